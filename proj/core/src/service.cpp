#include "mplab/service.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "mplab/event_log.hpp"
#include "mplab/menu_io.hpp"
#include "mplab/text_io.hpp"

namespace mplab {

namespace {

using json = nlohmann::ordered_json;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

enum class Role { SUBJECT, EXPERIMENTER };

struct TokenInfo {
    Role role;
    std::string session_id;  // subjects only
};

struct HttpError {
    int status;
    std::string code;
    std::string message;
    json extra = json::object();
};

std::string random_hex(std::size_t bytes) {
    static thread_local std::random_device rd;
    std::string out;
    static constexpr char digits[] = "0123456789abcdef";
    for (std::size_t i = 0; i < bytes; i += 4) {
        std::uint32_t v = rd();
        for (int k = 0; k < 4 && i + static_cast<std::size_t>(k) < bytes; ++k) {
            out += digits[(v >> 4) & 0xF];
            out += digits[v & 0xF];
            v >>= 8;
        }
    }
    return out;
}

bool valid_subject_id(const std::string& id) {
    if (id.empty() || id.size() > 64) return false;
    for (unsigned char c : id)
        if (!std::isalnum(c) && c != '-' && c != '_') return false;
    return true;
}

json default_messages() {
    return json{
        {"instructions",
         "You will make choices in six tasks of ten rows each. The order of the tasks is set at "
         "random. You will not see the outcome of any task until the end of the session. At the end, "
         "a die selects one task, and for row-by-row tasks a second die selects one row; your choice "
         "in that row is played out and paid in cash, together with the participation payment."},
        {"payoff_task", "In each row, choose Option A or Option B. Each option pays the amounts shown with the probabilities shown."},
        {"price_task",
         "You have an endowment of USD {endowment}. In each row, choose Option A or Option B. Each option "
         "lets you buy widgets at an uncertain buying price; you then sell every widget back at USD "
         "{sell_price} each."},
        {"bins_task", "Choose one of the ten decisions. Each decision pays its high or low amount with equal probability."},
        {"questionnaire", "Please answer the following questions about yourself."},
        {"reveal", "The die rolls below select the task, row and outcome that determine your payment."},
        {"errors",
         {{"irrational_switch",
           "You chose Option A after choosing Option B in an earlier row. Switching back and forth "
           "between Options A and B is not economically rational: if Option B was better in an earlier "
           "row, it is also better in this one. Please reconsider your choice."},
          {"duplicate_row", "This row has already been answered."},
          {"row_out_of_order", "Please answer the rows in order."},
          {"out_of_order_task", "This is not the current task."},
          {"wrong_stage", "This step is not available at this point of the session."},
          {"invalid_decision", "Please choose one of the ten decisions."},
          {"invalid_questionnaire", "Please check the highlighted answer."},
          {"incomplete_session", "Please finish every task and the questionnaire first."},
          {"roll_out_of_range", "Die roll out of range."},
          {"duplicate_subject", "This subject already has a session."},
          {"run_closed", "The session is closed to new participants."},
          {"unknown_session", "No such session."}}},
    };
}

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
    for (std::size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += to.size())
        s.replace(pos, from.size(), to);
    return s;
}

int status_for(SessionErrorCode code) {
    switch (code) {
        case SessionErrorCode::IrrationalSwitch:
        case SessionErrorCode::InvalidDecision:
        case SessionErrorCode::RollOutOfRange:
        case SessionErrorCode::InvalidQuestionnaire: return 422;
        case SessionErrorCode::UnknownSession: return 404;
        case SessionErrorCode::RunClosed: return 403;
        default: return 409;
    }
}

json option_json(const MenuOption& option) {
    return std::visit(overloaded{
                          [](const OutcomeLottery& l) {
                              json outcomes = json::array();
                              for (const auto& o : l.outcomes())
                                  outcomes.push_back({{"probability", o.probability}, {"payoff", o.payoff}});
                              return json{{"outcomes", outcomes}};
                          },
                          [](const PriceLottery& l) {
                              json prices = json::array();
                              for (const auto& p : l.prices())
                                  prices.push_back({{"probability", p.probability}, {"buy_price", p.buy_price}});
                              return json{{"prices", prices}};
                          },
                      },
                      option);
}

json payout_json(const PayoutResult& p) {
    json j{{"task", p.selected_task}, {"row", p.selected_row}, {"option", std::string(to_string(p.option))},
           {"realized", p.realized}};
    if (p.buy_price) j["buy_price"] = *p.buy_price;
    if (p.widgets) j["widgets"] = *p.widgets;
    j["fee"] = p.fee;
    j["total"] = p.total;
    return j;
}

Response json_response(int status, const json& body) { return {status, body.dump() + "\n", "application/json"}; }

std::vector<std::string> path_segments(const std::string& path) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : path) {
        if (c == '/') {
            if (!cur.empty()) out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

std::string field_text(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) return format_number(v.get<double>());
    throw HttpError{400, "bad_request", "questionnaire answers must be strings or numbers"};
}

}  // namespace

ServiceConfig load_service_config(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw ParseError("config " + path.string() + ": " + e.what());
    }
    const auto base = path.parent_path();
    auto resolve = [&](const std::string& p) {
        std::filesystem::path q(p);
        return q.is_relative() ? base / q : q;
    };
    ServiceConfig c;
    try {
        if (j.contains("host")) c.host = j["host"].get<std::string>();
        if (j.contains("port")) c.port = j["port"].get<int>();
        if (j.contains("data_dir")) c.data_dir = resolve(j["data_dir"].get<std::string>());
        if (j.contains("content_file")) c.content_file = resolve(j["content_file"].get<std::string>());
        if (j.contains("menus_dir")) c.menus_dir = resolve(j["menus_dir"].get<std::string>());
        if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("die_mode")) c.die_mode = parse_die_mode(j["die_mode"].get<std::string>());
        if (j.contains("capacity") && !j["capacity"].is_null()) c.capacity = j["capacity"].get<std::size_t>();
        if (j.contains("experimenter_token")) c.experimenter_token = j["experimenter_token"].get<std::string>();
    } catch (const json::exception& e) {
        throw ParseError("config " + path.string() + ": " + e.what());
    }
    return c;
}

void apply_env_overrides(ServiceConfig& config) {
    if (const char* port = std::getenv("MPL_PORT"); port && *port)
        config.port = static_cast<int>(parse_integer(port));
    if (const char* dir = std::getenv("MPL_DATA_DIR"); dir && *dir) config.data_dir = dir;
}

ExperimentConfig experiment_config_for(const ServiceConfig& config) {
    if (config.menus_dir.empty()) return default_experiment_config(config.seed, config.die_mode);
    ExperimentConfig cfg;
    cfg.seed = config.seed;
    cfg.die_mode = config.die_mode;
    for (int t = 1; t <= 6; ++t) {
        cfg.tasks.push_back(load_menu_file(config.menus_dir / ("task" + std::to_string(t) + ".menu")));
        if (auto m = cfg.tasks.back().endowment()) cfg.endowment = *m;
    }
    cfg.validate();
    return cfg;
}

struct Service::Impl {
    ServiceConfig config;
    std::unique_ptr<ExperimentRun> run;
    json messages;

    std::mutex mutex;
    std::map<std::string, TokenInfo> tokens;
    std::map<std::string, std::string> session_subject;  // session id -> subject id
    std::map<std::string, std::string> subject_session;
    std::map<std::string, std::shared_ptr<EventLogFile>> logs;
    std::map<std::string, Response> idempotent;          // session id + '\n' + key

    std::filesystem::path sessions_dir() const { return config.data_dir / "sessions"; }
    std::filesystem::path token_file() const { return config.data_dir / "tokens.tsv"; }

    Session::EventSink sink_for(const std::string& session_id) {
        auto log = std::make_shared<EventLogFile>(sessions_dir() / (session_id + ".jsonl"));
        logs[session_id] = log;
        return [log](const SessionEvent& e) { log->append(e); };
    }

    void load_messages() {
        messages = default_messages();
        if (config.content_file.empty()) return;
        const auto custom = json::parse(read_text_file(config.content_file));
        messages.merge_patch(custom);
    }

    std::string message(const std::string& code) const {
        const auto& errors = messages["errors"];
        return errors.contains(code) ? errors[code].get<std::string>() : code;
    }

    void restore() {
        std::filesystem::create_directories(sessions_dir());
        const auto token_path = config.data_dir / "experimenter.token";
        if (config.experimenter_token.empty()) {
            if (std::filesystem::exists(token_path)) {
                config.experimenter_token = std::string(trim(read_text_file(token_path)));
            } else {
                config.experimenter_token = random_hex(16);
                write_text_file_atomic(token_path, config.experimenter_token + "\n");
            }
        }
        tokens[config.experimenter_token] = {Role::EXPERIMENTER, {}};
        if (!std::filesystem::exists(token_file())) return;
        const auto text = read_text_file(token_file());
        for (const auto& line : split_lines(text)) {
            const auto cols = split(line, '\t');
            if (cols.size() != 3) continue;
            const std::string session_id(cols[0]), subject(cols[1]), token(cols[2]);
            auto events = load_event_log(sessions_dir() / (session_id + ".jsonl"));
            run->restore_session(std::move(events), sink_for(session_id));
            tokens[token] = {Role::SUBJECT, session_id};
            session_subject[session_id] = subject;
            subject_session[subject] = session_id;
        }
    }

    TokenInfo authenticate(const Request& r) {
        const auto it = r.headers.find("authorization");
        if (it == r.headers.end() || it->second.rfind("Bearer ", 0) != 0)
            throw HttpError{401, "unauthorized", "missing bearer token"};
        const auto token = it->second.substr(7);
        std::lock_guard lock(mutex);
        const auto t = tokens.find(token);
        if (t == tokens.end()) throw HttpError{401, "unauthorized", "unknown token"};
        return t->second;
    }

    void require_experimenter(const TokenInfo& who) {
        if (who.role != Role::EXPERIMENTER) throw HttpError{403, "forbidden", "experimenter role required"};
    }

    std::shared_ptr<Session> session_for(const TokenInfo& who, const std::string& session_id,
                                         bool experimenter_allowed) {
        if (who.role == Role::SUBJECT && who.session_id != session_id)
            throw HttpError{403, "forbidden", "token does not belong to this session"};
        if (who.role == Role::EXPERIMENTER && !experimenter_allowed)
            throw HttpError{403, "forbidden", "subject role required"};
        std::string subject;
        {
            std::lock_guard lock(mutex);
            const auto it = session_subject.find(session_id);
            if (it == session_subject.end())
                throw HttpError{404, "unknown_session", message("unknown_session")};
            subject = it->second;
        }
        return run->find(subject);
    }

    static json parse_body(const Request& r) {
        if (r.body.empty()) return json::object();
        try {
            auto j = json::parse(r.body);
            if (!j.is_object()) throw HttpError{400, "bad_request", "body must be a JSON object"};
            return j;
        } catch (const json::exception& e) {
            throw HttpError{400, "bad_request", std::string("malformed JSON: ") + e.what()};
        }
    }

    template <class T>
    static T field(const json& body, const char* name) {
        if (!body.contains(name)) throw HttpError{400, "bad_request", std::string("missing field '") + name + "'"};
        try {
            return body[name].get<T>();
        } catch (const json::exception&) {
            throw HttpError{400, "bad_request", std::string("field '") + name + "' has the wrong type"};
        }
    }

    json summary(const std::string& session_id, const SessionState& s, bool include_payout) const {
        std::size_t done = 0;
        for (const auto& p : s.progress) done += p.complete;
        json j{{"session_id", session_id},
               {"subject_id", s.subject_id},
               {"stage", std::string(to_string(s.stage))},
               {"tasks_completed", done},
               {"tasks_total", 6}};
        if (s.stage == Stage::CHOOSING) {
            j["position"] = s.order_position + 1;
            j["next_row"] = s.next_row;
        }
        if (include_payout && s.stage == Stage::PAID && s.payout) j["payout"] = payout_json(*s.payout);
        return j;
    }

    Response create_session(const Request& r) {
        const auto body = parse_body(r);
        const auto subject = field<std::string>(body, "subject_id");
        if (!valid_subject_id(subject))
            throw HttpError{400, "bad_request", "subject_id must be 1-64 letters, digits, '-' or '_'"};
        std::lock_guard lock(mutex);
        if (subject_session.count(subject))
            throw HttpError{409, "duplicate_subject", message("duplicate_subject")};
        const auto session_id = random_hex(12);
        const auto token = random_hex(16);
        auto session = run->create_session(subject, sink_for(session_id));
        std::ofstream(token_file(), std::ios::app) << session_id << '\t' << subject << '\t' << token << '\n';
        tokens[token] = {Role::SUBJECT, session_id};
        session_subject[session_id] = subject;
        subject_session[subject] = session_id;
        json out = summary(session_id, session->state(), false);
        out["token"] = token;
        out["role"] = "subject";
        out["screen"] = {{"kind", "instructions"}, {"text", messages["instructions"]}};
        return json_response(201, out);
    }

    Response task_screen(const Session& session, const std::string& session_id) {
        const auto s = session.state();
        if (s.stage != Stage::CHOOSING) {
            json extra{{"stage", std::string(to_string(s.stage))}};
            if (s.stage == Stage::QUESTIONNAIRE) extra["next"] = "/sessions/" + session_id + "/questionnaire";
            if (s.stage == Stage::INSTRUCTIONS) extra["next"] = "/sessions/" + session_id + "/begin";
            throw HttpError{409, "wrong_stage", message("wrong_stage"), extra};
        }
        const int task = *s.current_task();
        const auto& menu = session.config().task(task);
        json screen{{"task", task},
                    {"position", s.order_position + 1},
                    {"of", 6},
                    {"design", std::string(to_string(menu.kind()))},
                    {"domain", std::string(to_string(menu.domain()))}};
        std::string text = menu.kind() == DesignKind::BINS ? messages["bins_task"].get<std::string>() : "";
        if (menu.domain() == MenuDomain::PRICE) {
            screen["endowment"] = *menu.endowment();
            screen["sell_price"] = *menu.sell_price();
            auto price = replace_all(messages["price_task"].get<std::string>(), "{endowment}",
                                     format_fixed(*menu.endowment(), 2));
            price = replace_all(price, "{sell_price}", format_fixed(*menu.sell_price(), 2));
            text = text.empty() ? price : text + " " + price;
        } else if (text.empty()) {
            text = messages["payoff_task"].get<std::string>();
        }
        screen["text"] = text;
        json rows = json::array();
        for (const auto& row : menu.rows()) {
            json jr{{"row", row.row_index}, {"a", option_json(row.option_a)}};
            if (row.option_b) jr["b"] = option_json(*row.option_b);
            rows.push_back(jr);
        }
        screen["rows"] = rows;
        if (menu.kind() != DesignKind::BINS) {
            const auto& choices = s.progress[static_cast<std::size_t>(task - 1)].choices;
            json made = json::array();
            for (auto c : choices) made.push_back(std::string(to_string(c)));
            screen["choices"] = made;
            screen["next_row"] = s.next_row;
        }
        return json_response(200, screen);
    }

    Response submit_choice(Session& session, const std::string& session_id, const Request& r) {
        std::string key;
        if (const auto it = r.headers.find("idempotency-key"); it != r.headers.end()) {
            key = session_id + '\n' + it->second;
            std::lock_guard lock(mutex);
            if (const auto hit = idempotent.find(key); hit != idempotent.end()) return hit->second;
        }
        const auto body = parse_body(r);
        const int task = field<int>(body, "task");
        Response out;
        try {
            if (body.contains("decision")) {
                session.submit_decision(task, field<int>(body, "decision"));
                out = json_response(200, {{"accepted", true}, {"task_complete", true},
                                          {"stage", std::string(to_string(session.state().stage))}});
            } else {
                const int row = field<int>(body, "row");
                Option option;
                try {
                    option = parse_option(field<std::string>(body, "option"));
                } catch (const InvalidArgument& e) {
                    throw HttpError{400, "bad_request", e.what()};
                }
                const int next = session.submit_choice(task, row, option);
                json ack{{"accepted", true}, {"task_complete", next == 0}};
                if (next) ack["next_row"] = next;
                ack["stage"] = std::string(to_string(session.state().stage));
                out = json_response(200, ack);
            }
        } catch (const SessionError& e) {
            out = session_error(e);
        }
        if (!key.empty()) {
            std::lock_guard lock(mutex);
            idempotent.emplace(key, out);
        }
        return out;
    }

    Response session_error(const SessionError& e) const {
        const std::string code(to_string(e.code()));
        json body{{"error", code}, {"message", message(code)}, {"detail", e.what()}};
        if (e.task()) body["task"] = e.task();
        if (e.row()) body["row"] = e.row();
        return json_response(status_for(e.code()), body);
    }

    Response questionnaire(Session& session, const Request& r) {
        const auto body = parse_body(r);
        if (!body.contains("answers") || !body["answers"].is_object())
            throw HttpError{400, "bad_request", "missing object 'answers'"};
        std::array<std::optional<std::string>, kDemographicFieldCount> fields;
        for (std::size_t i = 0; i < fields.size(); ++i) {
            const std::string letter(1, static_cast<char>('A' + i));
            if (body["answers"].contains(letter) && !body["answers"][letter].is_null())
                fields[i] = field_text(body["answers"][letter]);
        }
        try {
            const auto rec = demographic_from_fields(session.state().subject_id, fields);
            session.capture_questionnaire(rec);
        } catch (const ValidationError& e) {
            return json_response(422, {{"error", "invalid_questionnaire"},
                                       {"message", message("invalid_questionnaire")},
                                       {"field", std::string(1, e.field())},
                                       {"detail", e.what()}});
        }
        return json_response(200, {{"accepted", true}, {"stage", std::string(to_string(session.state().stage))}});
    }

    Response paid(const SessionState& s, const PayoutResult& p) const {
        json body{{"stage", std::string(to_string(s.stage))}, {"text", messages["reveal"]}};
        if (s.rolls) body["rolls"] = {{"task", s.rolls->task}, {"row", s.rolls->row}, {"outcome", s.rolls->outcome}};
        body["payout"] = payout_json(p);
        return json_response(200, body);
    }

    Response dashboard() {
        json sessions = json::array();
        std::map<std::string, std::string> ids;
        {
            std::lock_guard lock(mutex);
            ids = subject_session;
        }
        for (const auto& s : run->sessions()) {
            const auto st = s->state();
            std::size_t irrational = 0, errors = 0;
            for (const auto& e : s->events())
                if (const auto* err = std::get_if<event::ErrorShown>(&e.payload)) {
                    ++errors;
                    irrational += err->code == SessionErrorCode::IrrationalSwitch;
                }
            json j = summary(ids[st.subject_id], st, true);
            j["errors_shown"] = errors;
            j["irrational_switch_attempts"] = irrational;
            sessions.push_back(j);
        }
        return json_response(200, {{"closed", run->closed()},
                                   {"die_mode", std::string(to_string(run->config()->die_mode))},
                                   {"session_count", sessions.size()},
                                   {"sessions", sessions}});
    }

    Response route(const Request& r) {
        const auto seg = path_segments(r.path);
        const bool get = r.method == "GET", post = r.method == "POST";

        if (seg.size() == 1 && seg[0] == "health" && get) return json_response(200, {{"status", "ok"}});
        if (seg.size() == 2 && seg[0] == "content" && seg[1] == "messages" && get)
            return json_response(200, messages);
        if (seg.size() == 1 && seg[0] == "sessions" && post) return create_session(r);

        if (seg.size() >= 2 && seg[0] == "sessions") {
            const auto who = authenticate(r);
            const auto& id = seg[1];
            const std::string action = seg.size() > 2 ? seg[2] : "";
            if (seg.size() > 3) throw HttpError{404, "not_found", "no such endpoint"};
            if (action.empty() && get) {
                auto s = session_for(who, id, true);
                return json_response(200, summary(id, s->state(), true));
            }
            if (action == "begin" && post) {
                auto s = session_for(who, id, false);
                s->begin();
                return json_response(200, summary(id, s->state(), false));
            }
            if (action == "task" && get) return task_screen(*session_for(who, id, false), id);
            if (action == "choices" && post) return submit_choice(*session_for(who, id, false), id, r);
            if (action == "questionnaire" && post) return questionnaire(*session_for(who, id, false), r);
            if (action == "reveal" && post) {
                auto s = session_for(who, id, false);
                if (run->config()->die_mode == DieMode::MANUAL_ENTRY) {
                    const auto st = s->state();
                    if (st.stage == Stage::PAID) return paid(st, *st.payout);
                    throw HttpError{409, "awaiting_die_rolls", "the experimenter enters the die rolls",
                                    {{"stage", std::string(to_string(st.stage))}}};
                }
                const auto payout = s->finalize_payment();
                return paid(s->state(), payout);
            }
            if (action == "rolls" && post) {
                require_experimenter(who);
                auto s = session_for(who, id, true);
                const auto body = parse_body(r);
                const DieRolls rolls{field<int>(body, "task"), field<int>(body, "row"), field<int>(body, "outcome")};
                const auto payout = s->finalize_payment(rolls);
                return paid(s->state(), payout);
            }
            if (action == "payout" && get) {
                auto s = session_for(who, id, true);
                const auto st = s->state();
                if (st.stage != Stage::PAID)
                    throw HttpError{409, "wrong_stage", message("wrong_stage"),
                                    {{"stage", std::string(to_string(st.stage))}}};
                return paid(st, *st.payout);
            }
            if (action == "events" && get) {
                require_experimenter(who);
                auto s = session_for(who, id, true);
                return {200, write_event_log(s->events()), "application/x-ndjson"};
            }
            throw HttpError{404, "not_found", "no such endpoint"};
        }

        if (seg.size() >= 2 && seg[0] == "runs" && seg[1] == "current") {
            require_experimenter(authenticate(r));
            if (seg.size() == 2 && get) return dashboard();
            if (seg.size() == 3 && seg[2] == "close" && post) {
                run->close();
                return json_response(200, {{"closed", true}});
            }
            if (seg.size() == 3 && seg[2] == "export" && get) {
                const auto files = run->export_cohort();
                const auto q = r.query.find("file");
                if (q != r.query.end()) {
                    if (q->second == "choices") return {200, files.session_table, "text/tab-separated-values"};
                    if (q->second == "demographics") return {200, files.demographics, "text/tab-separated-values"};
                    throw HttpError{400, "bad_request", "file must be choices or demographics"};
                }
                return json_response(200, {{"records", run->paid_records().size()},
                                           {"session_table", files.session_table},
                                           {"demographics", files.demographics}});
            }
        }
        throw HttpError{404, "not_found", "no such endpoint"};
    }
};

Service::Service(ServiceConfig config) : Service(config, experiment_config_for(config)) {}

Service::Service(ServiceConfig config, ExperimentConfig experiment) : impl_(std::make_unique<Impl>()) {
    impl_->config = std::move(config);
    impl_->run = std::make_unique<ExperimentRun>(std::move(experiment), impl_->config.capacity);
    impl_->load_messages();
    impl_->restore();
}

Service::~Service() = default;

Response Service::handle(const Request& request) {
    try {
        return impl_->route(request);
    } catch (const HttpError& e) {
        json body{{"error", e.code}, {"message", e.message}};
        for (const auto& [k, v] : e.extra.items()) body[k] = v;
        return json_response(e.status, body);
    } catch (const SessionError& e) {
        return impl_->session_error(e);
    } catch (const ValidationError& e) {
        return json_response(422, {{"error", "invalid_questionnaire"}, {"field", std::string(1, e.field())},
                                   {"detail", e.what()}});
    } catch (const Error& e) {
        return json_response(400, {{"error", "bad_request"}, {"message", e.what()}});
    } catch (const std::exception& e) {
        return json_response(500, {{"error", "internal"}, {"message", e.what()}});
    }
}

const std::string& Service::experimenter_token() const { return impl_->config.experimenter_token; }
const ServiceConfig& Service::config() const { return impl_->config; }
ExperimentRun& Service::run() { return *impl_->run; }

}  // namespace mplab
