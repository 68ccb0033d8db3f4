#include "mplab/session.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <ctime>
#include <sstream>

#include "mplab/choice_string.hpp"
#include "mplab/text_io.hpp"

namespace mplab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool is_list_design(DesignKind kind) { return kind != DesignKind::BINS; }

// First outcome whose cumulative probability, in tenths, reaches the roll.
std::size_t realize_index(const std::vector<double>& probabilities, int roll) {
    double cumulative = 0;
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
        cumulative += probabilities[i];
        if (roll <= std::llround(10.0 * cumulative)) return i;
    }
    return probabilities.size() - 1;
}

void advance_task(SessionState& s) {
    ++s.order_position;
    s.next_row = 1;
}

void check_task_is_current(const SessionState& s, int task) {
    const auto current = s.current_task();
    if (!current || *current != task)
        throw InvalidArgument("event for task " + std::to_string(task) + " out of order");
}

}  // namespace

std::string_view to_string(DieMode mode) {
    return mode == DieMode::SEEDED_RNG ? "seeded_rng" : "manual_entry";
}

std::string_view to_string(Stage stage) {
    switch (stage) {
        case Stage::INSTRUCTIONS: return "instructions";
        case Stage::CHOOSING: return "choosing";
        case Stage::QUESTIONNAIRE: return "questionnaire";
        case Stage::REVEAL: return "reveal";
        case Stage::PAID: return "paid";
    }
    return "?";
}

std::string_view to_string(Option option) { return option == Option::A ? "A" : "B"; }

DieMode parse_die_mode(std::string_view text) {
    const auto t = lower(text);
    if (t == "seeded_rng" || t == "seeded") return DieMode::SEEDED_RNG;
    if (t == "manual_entry" || t == "manual") return DieMode::MANUAL_ENTRY;
    throw InvalidArgument("unknown die mode '" + std::string(text) + "'");
}

Stage parse_stage(std::string_view text) {
    const auto t = lower(text);
    for (auto s : {Stage::INSTRUCTIONS, Stage::CHOOSING, Stage::QUESTIONNAIRE, Stage::REVEAL, Stage::PAID})
        if (t == to_string(s)) return s;
    throw InvalidArgument("unknown stage '" + std::string(text) + "'");
}

Option parse_option(std::string_view text) {
    const auto t = lower(text);
    if (t == "a") return Option::A;
    if (t == "b") return Option::B;
    throw InvalidArgument("option must be A or B, got '" + std::string(text) + "'");
}

std::string_view to_string(SessionErrorCode code) {
    switch (code) {
        case SessionErrorCode::WrongStage: return "wrong_stage";
        case SessionErrorCode::OutOfOrderTask: return "out_of_order_task";
        case SessionErrorCode::DuplicateRow: return "duplicate_row";
        case SessionErrorCode::RowOutOfOrder: return "row_out_of_order";
        case SessionErrorCode::IrrationalSwitch: return "irrational_switch";
        case SessionErrorCode::InvalidDecision: return "invalid_decision";
        case SessionErrorCode::IncompleteSession: return "incomplete_session";
        case SessionErrorCode::RollOutOfRange: return "roll_out_of_range";
        case SessionErrorCode::InvalidQuestionnaire: return "invalid_questionnaire";
        case SessionErrorCode::DuplicateSubject: return "duplicate_subject";
        case SessionErrorCode::RunClosed: return "run_closed";
        case SessionErrorCode::UnknownSession: return "unknown_session";
    }
    return "?";
}

void ExperimentConfig::validate() const {
    if (tasks.size() != 6)
        throw InvalidArgument("experiment needs six tasks, got " + std::to_string(tasks.size()));
    for (int t = 1; t <= 6; ++t) {
        const auto& m = task(t);
        if (m.kind() != task_design(t) || m.domain() != task_domain(t))
            throw InvalidArgument("task " + std::to_string(t) + " must be " +
                                  std::string(to_string(task_design(t))) + " in " +
                                  std::string(to_string(task_domain(t))) + " framing");
        if (m.endowment() && std::abs(*m.endowment() - endowment) > 1e-9)
            throw InvalidArgument("task " + std::to_string(t) + " endowment differs from the experiment's");
    }
    if (!(fee >= 0)) throw InvalidArgument("participation fee must be >= 0");
}

const TaskMenu& ExperimentConfig::task(int t) const {
    if (t < 1 || t > static_cast<int>(tasks.size()))
        throw InvalidArgument("task " + std::to_string(t) + " outside 1..6");
    return tasks[static_cast<std::size_t>(t - 1)];
}

double ExperimentConfig::min_total() const {
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& m : tasks) lo = std::min(lo, m.min_payout());
    return fee + lo;
}

double ExperimentConfig::max_total() const {
    double hi = 0;
    for (const auto& m : tasks) hi = std::max(hi, m.max_payout());
    return fee + hi;
}

ExperimentConfig default_experiment_config(std::uint64_t seed, DieMode mode) {
    const auto menus = default_task_menus();
    ExperimentConfig cfg{{menus.begin(), menus.end()}, 15.0, 5.0, seed, mode};
    cfg.validate();
    return cfg;
}

std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

DeterministicRng::DeterministicRng(std::uint64_t seed, std::string_view subject_id,
                                   std::string_view stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(fnv1a64(subject_id)),
                      static_cast<std::uint32_t>(fnv1a64(subject_id) >> 32),
                      static_cast<std::uint32_t>(fnv1a64(stream))};
    engine_.seed(seq);
}

int DeterministicRng::uniform_int(int lo, int hi) {
    if (hi < lo) throw InvalidArgument("empty range");
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % span;
    std::uint64_t v;
    do v = engine_();
    while (v >= limit);
    return lo + static_cast<int>(v % span);
}

std::array<int, 6> draw_task_order(std::uint64_t seed, std::string_view subject_id) {
    DeterministicRng rng(seed, subject_id, "order");
    std::array<int, 6> order{1, 2, 3, 4, 5, 6};
    for (int i = 5; i > 0; --i)
        std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(rng.uniform_int(0, i))]);
    return order;
}

DieRolls draw_die_rolls(std::uint64_t seed, std::string_view subject_id) {
    DeterministicRng rng(seed, subject_id, "payment");
    DieRolls r;
    r.task = rng.uniform_int(1, 6);
    r.row = rng.uniform_int(1, 10);
    r.outcome = rng.uniform_int(1, 10);
    return r;
}

int TaskProgress::response() const {
    if (decision) return *decision;
    return static_cast<int>(std::count(choices.begin(), choices.end(), Option::A));
}

std::optional<int> SessionState::current_task() const {
    if (stage != Stage::CHOOSING || order_position >= task_order.size()) return std::nullopt;
    return task_order[order_position];
}

std::array<int, 6> SessionState::responses() const {
    std::array<int, 6> out{};
    for (std::size_t i = 0; i < 6; ++i) out[i] = progress[i].response();
    return out;
}

std::string state_digest(const SessionState& s) {
    std::ostringstream out;
    out << "subject=" << s.subject_id << "\norder=";
    for (int t : s.task_order) out << t;
    out << "\nposition=" << s.order_position << "\nnext_row=" << s.next_row
        << "\nstage=" << to_string(s.stage) << '\n';
    for (std::size_t i = 0; i < s.progress.size(); ++i) {
        const auto& p = s.progress[i];
        out << "task" << i + 1 << '=';
        for (auto o : p.choices) out << to_string(o);
        if (p.decision) out << 'd' << *p.decision;
        out << (p.complete ? "!" : "") << '\n';
    }
    if (s.questionnaire)
        for (const auto& f : demographic_fields(*s.questionnaire)) out << f << '\t';
    out << '\n';
    if (s.rolls) out << "rolls=" << s.rolls->task << ',' << s.rolls->row << ',' << s.rolls->outcome << '\n';
    if (const auto& p = s.payout) {
        out << "payout=" << p->selected_task << ',' << p->selected_row << ',' << to_string(p->option)
            << ',' << p->outcome_index << ',' << format_number(p->realized) << ','
            << (p->buy_price ? format_number(*p->buy_price) : "-") << ','
            << (p->widgets ? format_number(*p->widgets) : "-") << ',' << format_number(p->fee) << ','
            << format_number(p->total) << '\n';
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(out.str())));
    return buf;
}

std::string_view event_type(const EventPayload& payload) {
    return std::visit(overloaded{
                          [](const event::Created&) { return "created"; },
                          [](const event::StageChanged&) { return "stage"; },
                          [](const event::ChoiceMade&) { return "choice"; },
                          [](const event::DecisionMade&) { return "decision"; },
                          [](const event::ErrorShown&) { return "error_shown"; },
                          [](const event::QuestionnaireCaptured&) { return "questionnaire"; },
                          [](const event::DieRolled&) { return "die_roll"; },
                          [](const event::PayoutRealized&) { return "payout"; },
                      },
                      payload);
}

bool reveals_outcome(const EventPayload& payload) {
    return std::holds_alternative<event::DieRolled>(payload) ||
           std::holds_alternative<event::PayoutRealized>(payload);
}

void apply_event(SessionState& s, const ExperimentConfig& config, const EventPayload& payload) {
    std::visit(
        overloaded{
            [&](const event::Created& e) {
                s = SessionState{};
                s.subject_id = e.subject_id;
                s.task_order = e.task_order;
            },
            [&](const event::StageChanged& e) {
                if (static_cast<int>(e.to) <= static_cast<int>(s.stage))
                    throw InvalidArgument("stage may only move forward");
                s.stage = e.to;
            },
            [&](const event::ChoiceMade& e) {
                check_task_is_current(s, e.task);
                if (!is_list_design(config.task(e.task).kind()) || e.row != s.next_row)
                    throw InvalidArgument("choice event for an unexpected row");
                auto& p = s.progress[static_cast<std::size_t>(e.task - 1)];
                p.choices.push_back(e.option);
                ++s.next_row;
                if (e.row == 10) {
                    p.complete = true;
                    advance_task(s);
                }
            },
            [&](const event::DecisionMade& e) {
                check_task_is_current(s, e.task);
                if (is_list_design(config.task(e.task).kind()))
                    throw InvalidArgument("decision event for a list task");
                auto& p = s.progress[static_cast<std::size_t>(e.task - 1)];
                p.decision = e.decision;
                p.complete = true;
                advance_task(s);
            },
            [](const event::ErrorShown&) {},
            [&](const event::QuestionnaireCaptured& e) {
                if (s.stage != Stage::QUESTIONNAIRE) throw InvalidArgument("questionnaire out of stage");
                s.questionnaire = e.answers;
            },
            [&](const event::DieRolled& e) {
                if (s.stage != Stage::REVEAL) throw InvalidArgument("die roll before reveal");
                s.rolls = e.rolls;
            },
            [&](const event::PayoutRealized& e) {
                if (s.stage != Stage::REVEAL) throw InvalidArgument("payout before reveal");
                s.payout = e.payout;
            },
        },
        payload);
}

SessionState replay(const std::vector<SessionEvent>& events, const ExperimentConfig& config) {
    if (events.empty() || !std::holds_alternative<event::Created>(events.front().payload))
        throw InvalidArgument("event log must start with a created event");
    SessionState s;
    std::uint64_t expected = 1;
    for (const auto& e : events) {
        if (e.sequence != expected)
            throw InvalidArgument("event sequence gap: expected " + std::to_string(expected) +
                                  ", got " + std::to_string(e.sequence));
        ++expected;
        apply_event(s, config, e.payload);
    }
    return s;
}

std::string utc_timestamp_now() {
    const auto now = std::chrono::system_clock::now();
    const auto t = std::chrono::system_clock::to_time_t(now);
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
    char out[40];
    std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms));
    return out;
}

PayoutResult compute_payout(const SessionState& s, const ExperimentConfig& config, const DieRolls& rolls) {
    if (rolls.task < 1 || rolls.task > 6)
        throw SessionError(SessionErrorCode::RollOutOfRange, "task roll must be 1..6");
    if (rolls.row < 1 || rolls.row > 10)
        throw SessionError(SessionErrorCode::RollOutOfRange, "row roll must be 1..10");
    if (rolls.outcome < 1 || rolls.outcome > 10)
        throw SessionError(SessionErrorCode::RollOutOfRange, "outcome roll must be 1..10");
    for (const auto& p : s.progress)
        if (!p.complete) throw SessionError(SessionErrorCode::IncompleteSession, "not every task is answered");

    const auto& menu = config.task(rolls.task);
    const auto& progress = s.progress[static_cast<std::size_t>(rolls.task - 1)];
    PayoutResult r;
    r.selected_task = rolls.task;
    const MenuOption* option = nullptr;
    if (is_list_design(menu.kind())) {
        r.selected_row = rolls.row;
        r.option = progress.choices[static_cast<std::size_t>(rolls.row - 1)];
        const auto& row = menu.row(rolls.row);
        option = r.option == Option::A ? &row.option_a : &*row.option_b;
    } else {
        r.selected_row = *progress.decision;
        option = &menu.row(r.selected_row).option_a;
    }
    std::visit(overloaded{
                   [&](const OutcomeLottery& l) {
                       std::vector<double> probs;
                       for (const auto& o : l.outcomes()) probs.push_back(o.probability);
                       r.outcome_index = realize_index(probs, rolls.outcome);
                       r.realized = l[r.outcome_index].payoff;
                   },
                   [&](const PriceLottery& l) {
                       std::vector<double> probs;
                       for (const auto& p : l.prices()) probs.push_back(p.probability);
                       r.outcome_index = realize_index(probs, rolls.outcome);
                       const double price = l[r.outcome_index].buy_price;
                       r.buy_price = price;
                       r.widgets = marshallian_demand(price, l.endowment());
                       r.realized = round_half_up(*r.widgets * l.sell_price(), 2);
                   },
               },
               *option);
    r.fee = config.fee;
    r.total = round_half_up(r.realized + r.fee, 2);
    return r;
}

Session::Session(std::shared_ptr<const ExperimentConfig> config, EventSink sink, Clock clock)
    : config_(std::move(config)), sink_(std::move(sink)), clock_(std::move(clock)) {
    if (!config_) throw InvalidArgument("session needs a config");
}

Session::Session(std::shared_ptr<const ExperimentConfig> config, std::string subject_id,
                 EventSink sink, Clock clock)
    : Session(std::move(config), std::move(sink), std::move(clock)) {
    if (subject_id.empty()) throw InvalidArgument("subject id is empty");
    const auto order = draw_task_order(config_->seed, subject_id);
    emit(event::Created{std::move(subject_id), order});
}

std::unique_ptr<Session> Session::from_events(std::shared_ptr<const ExperimentConfig> config,
                                              std::vector<SessionEvent> events, EventSink sink,
                                              Clock clock) {
    std::unique_ptr<Session> s(new Session(std::move(config), std::move(sink), std::move(clock)));
    s->state_ = replay(events, *s->config_);
    s->events_ = std::move(events);
    return s;
}

void Session::emit(EventPayload payload) {
    SessionEvent e{events_.size() + 1, clock_ ? clock_() : std::string{}, std::move(payload)};
    apply_event(state_, *config_, e.payload);
    events_.push_back(e);
    if (sink_) sink_(events_.back());
}

void Session::reject(SessionErrorCode code, const std::string& message, int task, int row) {
    emit(event::ErrorShown{task, row, code, message});
    throw SessionError(code, message, task, row);
}

void Session::require_stage(Stage stage) const {
    if (state_.stage != stage)
        throw SessionError(SessionErrorCode::WrongStage,
                           "session is in stage " + std::string(to_string(state_.stage)) + ", expected " +
                               std::string(to_string(stage)));
}

void Session::begin() {
    std::lock_guard lock(mutex_);
    require_stage(Stage::INSTRUCTIONS);
    emit(event::StageChanged{Stage::CHOOSING});
}

int Session::submit_choice(int task, int row, Option option) {
    std::lock_guard lock(mutex_);
    require_stage(Stage::CHOOSING);
    const int current = *state_.current_task();
    if (task != current)
        reject(SessionErrorCode::OutOfOrderTask,
               "task " + std::to_string(task) + " is not the current task", task, row);
    if (!is_list_design(config_->task(task).kind()))
        reject(SessionErrorCode::InvalidDecision, "this task takes a single decision", task, row);
    if (row < state_.next_row)
        reject(SessionErrorCode::DuplicateRow, "row " + std::to_string(row) + " was already answered",
               task, row);
    if (row > state_.next_row || row > 10)
        reject(SessionErrorCode::RowOutOfOrder,
               "rows are answered in order; next is row " + std::to_string(state_.next_row), task, row);
    const auto& choices = state_.progress[static_cast<std::size_t>(task - 1)].choices;
    if (option == Option::A && !choices.empty() && choices.back() == Option::B)
        reject(SessionErrorCode::IrrationalSwitch,
               "Option A on row " + std::to_string(row) + " after Option B on row " +
                   std::to_string(row - 1) + " switches back",
               task, row);
    emit(event::ChoiceMade{task, row, option});
    const bool done = row == 10;
    if (done && state_.order_position == 6) emit(event::StageChanged{Stage::QUESTIONNAIRE});
    return done ? 0 : row + 1;
}

void Session::submit_decision(int task, int decision) {
    std::lock_guard lock(mutex_);
    require_stage(Stage::CHOOSING);
    if (task != *state_.current_task())
        reject(SessionErrorCode::OutOfOrderTask,
               "task " + std::to_string(task) + " is not the current task", task);
    if (is_list_design(config_->task(task).kind()))
        reject(SessionErrorCode::InvalidDecision, "this task is answered row by row", task);
    if (decision < 1 || decision > 10)
        reject(SessionErrorCode::InvalidDecision, "decision must be 1..10", task);
    emit(event::DecisionMade{task, decision});
    if (state_.order_position == 6) emit(event::StageChanged{Stage::QUESTIONNAIRE});
}

void Session::capture_questionnaire(const DemographicRecord& answers) {
    std::lock_guard lock(mutex_);
    require_stage(Stage::QUESTIONNAIRE);
    DemographicRecord rec = answers;
    rec.subject_id = state_.subject_id;
    try {
        validate_demographics(rec);
    } catch (const ValidationError& e) {
        emit(event::ErrorShown{0, 0, SessionErrorCode::InvalidQuestionnaire, e.what()});
        throw;
    }
    emit(event::QuestionnaireCaptured{rec});
    emit(event::StageChanged{Stage::REVEAL});
}

PayoutResult Session::finalize_payment(std::optional<DieRolls> rolls) {
    std::lock_guard lock(mutex_);
    if (state_.stage == Stage::CHOOSING || state_.stage == Stage::QUESTIONNAIRE ||
        state_.stage == Stage::INSTRUCTIONS)
        throw SessionError(SessionErrorCode::IncompleteSession,
                           "payment needs every task and the questionnaire");
    require_stage(Stage::REVEAL);
    if (config_->die_mode == DieMode::MANUAL_ENTRY && !rolls)
        throw SessionError(SessionErrorCode::RollOutOfRange, "manual die mode needs the rolls entered");
    if (config_->die_mode == DieMode::SEEDED_RNG && rolls)
        throw SessionError(SessionErrorCode::RollOutOfRange, "rolls are drawn by the seeded generator");
    const DieRolls r = rolls ? *rolls : draw_die_rolls(config_->seed, state_.subject_id);
    const auto payout = compute_payout(state_, *config_, r);
    emit(event::DieRolled{r, config_->die_mode});
    emit(event::PayoutRealized{payout});
    emit(event::StageChanged{Stage::PAID});
    return payout;
}

SessionState Session::state() const {
    std::lock_guard lock(mutex_);
    return state_;
}

std::vector<SessionEvent> Session::events() const {
    std::lock_guard lock(mutex_);
    return events_;
}

std::string Session::digest() const { return state_digest(state()); }

ExperimentRun::ExperimentRun(ExperimentConfig config, std::optional<std::size_t> capacity)
    : capacity_(capacity) {
    config.validate();
    config_ = std::make_shared<const ExperimentConfig>(std::move(config));
}

std::shared_ptr<Session> ExperimentRun::create_session(const std::string& subject_id,
                                                       Session::EventSink sink, Clock clock) {
    std::lock_guard lock(mutex_);
    if (closed_) throw SessionError(SessionErrorCode::RunClosed, "run is closed");
    if (capacity_ && sessions_.size() >= *capacity_)
        throw SessionError(SessionErrorCode::RunClosed, "run is full");
    if (sessions_.count(subject_id))
        throw SessionError(SessionErrorCode::DuplicateSubject, "subject " + subject_id + " already has a session");
    auto s = std::make_shared<Session>(config_, subject_id, std::move(sink), std::move(clock));
    sessions_.emplace(subject_id, s);
    return s;
}

std::shared_ptr<Session> ExperimentRun::restore_session(std::vector<SessionEvent> events,
                                                        Session::EventSink sink, Clock clock) {
    std::shared_ptr<Session> s = Session::from_events(config_, std::move(events), std::move(sink), std::move(clock));
    const auto id = s->state().subject_id;
    std::lock_guard lock(mutex_);
    if (sessions_.count(id))
        throw SessionError(SessionErrorCode::DuplicateSubject, "subject " + id + " already has a session");
    sessions_.emplace(id, s);
    return s;
}

std::shared_ptr<Session> ExperimentRun::find(const std::string& subject_id) const {
    std::lock_guard lock(mutex_);
    const auto it = sessions_.find(subject_id);
    return it == sessions_.end() ? nullptr : it->second;
}

std::vector<std::shared_ptr<Session>> ExperimentRun::sessions() const {
    std::lock_guard lock(mutex_);
    std::vector<std::shared_ptr<Session>> out;
    for (const auto& [id, s] : sessions_) out.push_back(s);
    return out;
}

void ExperimentRun::close() {
    std::lock_guard lock(mutex_);
    closed_ = true;
}

bool ExperimentRun::closed() const {
    std::lock_guard lock(mutex_);
    return closed_;
}

std::vector<SubjectRecord> ExperimentRun::paid_records() const {
    std::vector<SubjectRecord> out;
    for (const auto& s : sessions()) {
        const auto st = s->state();
        if (st.stage == Stage::PAID) out.push_back(make_subject_record(st.subject_id, st.responses()));
    }
    return out;
}

CohortFiles ExperimentRun::export_cohort() const {
    std::vector<SubjectRecord> records;
    std::vector<DemographicRecord> demographics;
    for (const auto& s : sessions()) {
        const auto st = s->state();
        if (st.stage != Stage::PAID) continue;
        records.push_back(make_subject_record(st.subject_id, st.responses()));
        if (st.questionnaire) demographics.push_back(*st.questionnaire);
    }
    return {write_session_table(records), write_demographics(demographics)};
}

}  // namespace mplab
