#pragma once

// Live elicitation sessions as an event-sourced state machine. Every accepted
// command appends typed events and the session state is the fold of its event
// log, so replaying a log reproduces the state exactly.

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mplab/dataset.hpp"
#include "mplab/error.hpp"
#include "mplab/menu.hpp"

namespace mplab {

enum class DieMode { SEEDED_RNG, MANUAL_ENTRY };
enum class Stage { INSTRUCTIONS, CHOOSING, QUESTIONNAIRE, REVEAL, PAID };
enum class Option { A, B };

std::string_view to_string(DieMode mode);
std::string_view to_string(Stage stage);
std::string_view to_string(Option option);
DieMode parse_die_mode(std::string_view text);
Stage parse_stage(std::string_view text);
Option parse_option(std::string_view text);

struct ExperimentConfig {
    std::vector<TaskMenu> tasks;  // task 1..6 in task-number order
    double endowment = 15.0;
    double fee = 5.0;
    std::uint64_t seed = 0;
    DieMode die_mode = DieMode::SEEDED_RNG;

    // Throws InvalidArgument unless there are six tasks matching task_design /
    // task_domain, price tasks use `endowment`, and fee >= 0.
    void validate() const;
    const TaskMenu& task(int task) const;

    double min_total() const;  // fee + smallest payout of any task
    double max_total() const;  // fee + largest payout of any task
};

ExperimentConfig default_experiment_config(std::uint64_t seed = 0,
                                           DieMode mode = DieMode::SEEDED_RNG);

// mt19937_64 seeded from (seed, FNV-1a of the subject id, stream tag).
// Bounded draws use rejection sampling, so sequences do not depend on the
// standard library's distribution implementations.
class DeterministicRng {
public:
    DeterministicRng(std::uint64_t seed, std::string_view subject_id, std::string_view stream);
    std::uint64_t next() { return engine_(); }
    int uniform_int(int lo, int hi);  // inclusive

private:
    std::mt19937_64 engine_;
};

std::uint64_t fnv1a64(std::string_view text);

// Fisher-Yates permutation of tasks 1..6 from the "order" stream.
std::array<int, 6> draw_task_order(std::uint64_t seed, std::string_view subject_id);

struct DieRolls {
    int task = 1;     // 1..6, selects the paid task
    int row = 1;      // 1..10, selects the paid row (HL/CVU)
    int outcome = 1;  // 1..10, realizes the lottery: outcome i wins while roll <= 10 * P(outcomes 1..i)

    friend bool operator==(const DieRolls&, const DieRolls&) = default;
};

// Rolls for `subject_id` from the "payment" stream.
DieRolls draw_die_rolls(std::uint64_t seed, std::string_view subject_id);

struct PayoutResult {
    int selected_task = 0;
    int selected_row = 0;               // HL/CVU row, or the BINS decision
    Option option = Option::A;          // BINS: always A (the decision's lottery)
    std::size_t outcome_index = 0;      // realized outcome within the option
    double realized = 0;                // USD
    std::optional<double> buy_price;    // price tasks
    std::optional<double> widgets;      // price tasks: endowment / buy price
    double fee = 0;
    double total = 0;

    friend bool operator==(const PayoutResult&, const PayoutResult&) = default;
};

struct TaskProgress {
    std::vector<Option> choices;       // HL/CVU rows 1..k
    std::optional<int> decision;       // BINS
    bool complete = false;

    // Safe count for HL/CVU, decision for BINS.
    int response() const;
    friend bool operator==(const TaskProgress&, const TaskProgress&) = default;
};

struct SessionState {
    std::string subject_id;
    std::array<int, 6> task_order{};
    std::size_t order_position = 0;    // index into task_order of the current task
    int next_row = 1;                  // HL/CVU: next row expected
    std::array<TaskProgress, 6> progress;  // indexed by task - 1
    std::optional<DemographicRecord> questionnaire;
    Stage stage = Stage::INSTRUCTIONS;
    std::optional<DieRolls> rolls;
    std::optional<PayoutResult> payout;

    // Current task number, or nullopt outside CHOOSING.
    std::optional<int> current_task() const;
    std::array<int, 6> responses() const;
    friend bool operator==(const SessionState&, const SessionState&) = default;
};

// FNV-1a over a canonical rendering of the state, as 16 hex digits.
std::string state_digest(const SessionState& state);

enum class SessionErrorCode {
    WrongStage,
    OutOfOrderTask,
    DuplicateRow,
    RowOutOfOrder,
    IrrationalSwitch,
    InvalidDecision,
    IncompleteSession,
    RollOutOfRange,
    InvalidQuestionnaire,
    DuplicateSubject,
    RunClosed,
    UnknownSession,
};

std::string_view to_string(SessionErrorCode code);

class SessionError : public Error {
public:
    SessionError(SessionErrorCode code, const std::string& what, int task = 0, int row = 0)
        : Error(what), code_(code), task_(task), row_(row) {}
    SessionErrorCode code() const noexcept { return code_; }
    int task() const noexcept { return task_; }
    int row() const noexcept { return row_; }

private:
    SessionErrorCode code_;
    int task_;
    int row_;
};

namespace event {
struct Created { std::string subject_id; std::array<int, 6> task_order{}; };
struct StageChanged { Stage to = Stage::INSTRUCTIONS; };
struct ChoiceMade { int task = 0; int row = 0; Option option = Option::A; };
struct DecisionMade { int task = 0; int decision = 0; };
// Rejected command shown to the subject; does not change the state.
struct ErrorShown { int task = 0; int row = 0; SessionErrorCode code{}; std::string message; };
struct QuestionnaireCaptured { DemographicRecord answers; };
struct DieRolled { DieRolls rolls; DieMode mode = DieMode::SEEDED_RNG; };
struct PayoutRealized { PayoutResult payout; };
}  // namespace event

using EventPayload =
    std::variant<event::Created, event::StageChanged, event::ChoiceMade, event::DecisionMade,
                 event::ErrorShown, event::QuestionnaireCaptured, event::DieRolled,
                 event::PayoutRealized>;

struct SessionEvent {
    std::uint64_t sequence = 0;  // 1, 2, 3, ... without gaps
    std::string timestamp;       // ISO-8601 UTC
    EventPayload payload;
};

std::string_view event_type(const EventPayload& payload);

// Whether the payload carries realized outcomes (die rolls or payouts).
bool reveals_outcome(const EventPayload& payload);

// Folds one event into the state. Throws InvalidArgument for an event that
// cannot follow the state (replaying a corrupt log).
void apply_event(SessionState& state, const ExperimentConfig& config, const EventPayload& payload);

// Folds a whole log; throws InvalidArgument on sequence gaps.
SessionState replay(const std::vector<SessionEvent>& events, const ExperimentConfig& config);

using Clock = std::function<std::string()>;
std::string utc_timestamp_now();

// One subject's session. Commands are serialized per session; a rejected
// command leaves the state unchanged and throws SessionError.
class Session {
public:
    using EventSink = std::function<void(const SessionEvent&)>;

    Session(std::shared_ptr<const ExperimentConfig> config, std::string subject_id,
            EventSink sink = {}, Clock clock = utc_timestamp_now);

    // Rebuilds a session from a persisted log.
    static std::unique_ptr<Session> from_events(std::shared_ptr<const ExperimentConfig> config,
                                                std::vector<SessionEvent> events,
                                                EventSink sink = {},
                                                Clock clock = utc_timestamp_now);

    void begin();  // INSTRUCTIONS -> CHOOSING

    // HL/CVU: rows in order 1..10; the row after a B may not be an A.
    // Returns the next row index, or 0 when the task is complete.
    int submit_choice(int task, int row, Option option);

    // BINS: decision 1..10 completes the task.
    void submit_decision(int task, int decision);

    // QUESTIONNAIRE -> REVEAL after validating the answers.
    void capture_questionnaire(const DemographicRecord& answers);

    // REVEAL -> PAID. Manual mode requires rolls; seeded mode draws them and
    // rejects explicit rolls.
    PayoutResult finalize_payment(std::optional<DieRolls> rolls = std::nullopt);

    SessionState state() const;
    std::vector<SessionEvent> events() const;
    std::string digest() const;
    const ExperimentConfig& config() const noexcept { return *config_; }

private:
    Session(std::shared_ptr<const ExperimentConfig> config, EventSink sink, Clock clock);
    void emit(EventPayload payload);
    [[noreturn]] void reject(SessionErrorCode code, const std::string& message, int task = 0,
                             int row = 0);
    void require_stage(Stage stage) const;

    std::shared_ptr<const ExperimentConfig> config_;
    EventSink sink_;
    Clock clock_;
    mutable std::mutex mutex_;
    SessionState state_;
    std::vector<SessionEvent> events_;
};

// Computes the payout a set of rolls yields for a completed session.
PayoutResult compute_payout(const SessionState& state, const ExperimentConfig& config,
                            const DieRolls& rolls);

struct CohortFiles {
    std::string session_table;   // write_session_table format
    std::string demographics;    // write_demographics format
};

// All sessions of one experiment. Thread-safe.
class ExperimentRun {
public:
    explicit ExperimentRun(ExperimentConfig config, std::optional<std::size_t> capacity = std::nullopt);

    // Throws SessionError (DuplicateSubject, RunClosed).
    std::shared_ptr<Session> create_session(const std::string& subject_id,
                                            Session::EventSink sink = {},
                                            Clock clock = utc_timestamp_now);
    // Registers a session rebuilt from its log.
    std::shared_ptr<Session> restore_session(std::vector<SessionEvent> events,
                                             Session::EventSink sink = {},
                                             Clock clock = utc_timestamp_now);
    std::shared_ptr<Session> find(const std::string& subject_id) const;
    std::vector<std::shared_ptr<Session>> sessions() const;  // ordered by subject id

    void close();
    bool closed() const;
    std::shared_ptr<const ExperimentConfig> config() const { return config_; }

    // PAID sessions only, ordered by subject id.
    std::vector<SubjectRecord> paid_records() const;
    CohortFiles export_cohort() const;

private:
    std::shared_ptr<const ExperimentConfig> config_;
    std::optional<std::size_t> capacity_;
    mutable std::mutex mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    bool closed_ = false;
};

}  // namespace mplab
