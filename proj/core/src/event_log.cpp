#include "mplab/event_log.hpp"

#include <json.hpp>

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

SessionErrorCode parse_error_code(const std::string& text) {
    for (int i = 0; i <= static_cast<int>(SessionErrorCode::UnknownSession); ++i) {
        const auto c = static_cast<SessionErrorCode>(i);
        if (to_string(c) == text) return c;
    }
    throw ParseError("unknown error code '" + text + "'");
}

json payout_json(const PayoutResult& p) {
    json j{{"task", p.selected_task},
           {"row", p.selected_row},
           {"option", std::string(to_string(p.option))},
           {"outcome_index", p.outcome_index},
           {"realized", p.realized}};
    j["buy_price"] = p.buy_price ? json(*p.buy_price) : json(nullptr);
    j["widgets"] = p.widgets ? json(*p.widgets) : json(nullptr);
    j["fee"] = p.fee;
    j["total"] = p.total;
    return j;
}

PayoutResult payout_from(const json& j) {
    PayoutResult p;
    p.selected_task = j.at("task").get<int>();
    p.selected_row = j.at("row").get<int>();
    p.option = parse_option(j.at("option").get<std::string>());
    p.outcome_index = j.at("outcome_index").get<std::size_t>();
    p.realized = j.at("realized").get<double>();
    if (!j.at("buy_price").is_null()) p.buy_price = j["buy_price"].get<double>();
    if (!j.at("widgets").is_null()) p.widgets = j["widgets"].get<double>();
    p.fee = j.at("fee").get<double>();
    p.total = j.at("total").get<double>();
    return p;
}

json payload_json(const EventPayload& payload) {
    return std::visit(
        overloaded{
            [](const event::Created& e) { return json{{"subject", e.subject_id}, {"task_order", e.task_order}}; },
            [](const event::StageChanged& e) { return json{{"to", std::string(to_string(e.to))}}; },
            [](const event::ChoiceMade& e) {
                return json{{"task", e.task}, {"row", e.row}, {"option", std::string(to_string(e.option))}};
            },
            [](const event::DecisionMade& e) { return json{{"task", e.task}, {"decision", e.decision}}; },
            [](const event::ErrorShown& e) {
                return json{{"task", e.task},
                            {"row", e.row},
                            {"code", std::string(to_string(e.code))},
                            {"message", e.message}};
            },
            [](const event::QuestionnaireCaptured& e) {
                json fields = json::object();
                const auto text = demographic_fields(e.answers);
                for (std::size_t i = 0; i < text.size(); ++i)
                    fields[std::string(1, static_cast<char>('A' + i))] = text[i];
                return json{{"subject", e.answers.subject_id}, {"answers", fields}};
            },
            [](const event::DieRolled& e) {
                return json{{"task", e.rolls.task},
                            {"row", e.rolls.row},
                            {"outcome", e.rolls.outcome},
                            {"mode", std::string(to_string(e.mode))}};
            },
            [](const event::PayoutRealized& e) { return payout_json(e.payout); },
        },
        payload);
}

EventPayload payload_from(const std::string& type, const json& j) {
    if (type == "created") return event::Created{j.at("subject").get<std::string>(), j.at("task_order").get<std::array<int, 6>>()};
    if (type == "stage") return event::StageChanged{parse_stage(j.at("to").get<std::string>())};
    if (type == "choice")
        return event::ChoiceMade{j.at("task").get<int>(), j.at("row").get<int>(),
                                 parse_option(j.at("option").get<std::string>())};
    if (type == "decision") return event::DecisionMade{j.at("task").get<int>(), j.at("decision").get<int>()};
    if (type == "error_shown")
        return event::ErrorShown{j.at("task").get<int>(), j.at("row").get<int>(),
                                 parse_error_code(j.at("code").get<std::string>()),
                                 j.at("message").get<std::string>()};
    if (type == "questionnaire") {
        std::array<std::optional<std::string>, kDemographicFieldCount> fields;
        const auto& answers = j.at("answers");
        for (std::size_t i = 0; i < fields.size(); ++i) {
            const std::string key(1, static_cast<char>('A' + i));
            if (answers.contains(key)) fields[i] = answers[key].get<std::string>();
        }
        return event::QuestionnaireCaptured{demographic_from_fields(j.at("subject").get<std::string>(), fields)};
    }
    if (type == "die_roll")
        return event::DieRolled{{j.at("task").get<int>(), j.at("row").get<int>(), j.at("outcome").get<int>()},
                                parse_die_mode(j.at("mode").get<std::string>())};
    if (type == "payout") return event::PayoutRealized{payout_from(j)};
    throw ParseError("unknown event type '" + type + "'");
}

}  // namespace

std::string to_json_line(const SessionEvent& e) {
    json j{{"seq", e.sequence},
           {"ts", e.timestamp},
           {"type", std::string(event_type(e.payload))},
           {"payload", payload_json(e.payload)}};
    return j.dump();
}

SessionEvent parse_event_line(std::string_view line) {
    try {
        const auto j = json::parse(line);
        return {j.at("seq").get<std::uint64_t>(), j.at("ts").get<std::string>(),
                payload_from(j.at("type").get<std::string>(), j.at("payload"))};
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception& e) {
        throw ParseError(std::string("malformed event: ") + e.what());
    }
}

std::string write_event_log(const std::vector<SessionEvent>& events) {
    std::string out;
    for (const auto& e : events) out += to_json_line(e) + '\n';
    return out;
}

std::vector<SessionEvent> read_event_log(std::string_view text) {
    std::vector<SessionEvent> out;
    std::size_t n = 0;
    for (const auto& line : split_lines(text)) {
        ++n;
        if (trim(line).empty()) continue;
        try {
            out.push_back(parse_event_line(line));
        } catch (const ParseError& e) {
            throw ParseError(e.what(), n, e.position());
        }
    }
    return out;
}

EventLogFile::EventLogFile(std::filesystem::path path) : path_(std::move(path)) {
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
    out_.open(path_, std::ios::app | std::ios::binary);
    if (!out_) throw Error("cannot open event log " + path_.string());
}

void EventLogFile::append(const SessionEvent& event) {
    const auto line = to_json_line(event) + '\n';
    std::lock_guard lock(mutex_);
    out_.write(line.data(), static_cast<std::streamsize>(line.size()));
    out_.flush();
    if (!out_) throw Error("write to event log " + path_.string() + " failed");
}

std::vector<SessionEvent> load_event_log(const std::filesystem::path& path) {
    return read_event_log(read_text_file(path));
}

}  // namespace mplab
