#include <gtest/gtest.h>

#include <map>

#include "../support/session_driver.hpp"
#include "mplab/dataset.hpp"
#include "mplab/session.hpp"

using namespace mplab;
using mplab::test_support::answer_all_tasks;
using mplab::test_support::complete_session;
using mplab::test_support::sample_answers;

namespace {

std::shared_ptr<const ExperimentConfig> config(std::uint64_t seed = 42, DieMode mode = DieMode::SEEDED_RNG) {
    return std::make_shared<const ExperimentConfig>(default_experiment_config(seed, mode));
}

std::string fixed_clock() { return "2026-01-01T00:00:00Z"; }

int first_choice_task(const Session& s) {
    for (int t : s.state().task_order)
        if (task_design(t) != DesignKind::BINS) return t;
    return 0;
}

SessionErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const SessionError& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected SessionError";
    return SessionErrorCode::UnknownSession;
}

}  // namespace

TEST(Session, TaskOrderIsAPermutationAndDeterministic) {
    const auto a = draw_task_order(42, "S1"), b = draw_task_order(42, "S1");
    EXPECT_EQ(a, b);
    auto sorted = a;
    std::sort(sorted.begin(), sorted.end());
    EXPECT_EQ(sorted, (std::array<int, 6>{1, 2, 3, 4, 5, 6}));
    EXPECT_NE(draw_task_order(42, "S1"), draw_task_order(42, "S2"));
}

TEST(Session, StageFlow) {
    Session s(config(), "S1", {}, fixed_clock);
    EXPECT_EQ(s.state().stage, Stage::INSTRUCTIONS);
    EXPECT_EQ(code_of([&] { s.submit_choice(1, 1, Option::A); }), SessionErrorCode::WrongStage);
    s.begin();
    EXPECT_EQ(s.state().stage, Stage::CHOOSING);
    EXPECT_EQ(code_of([&] { s.finalize_payment(); }), SessionErrorCode::IncompleteSession);
    answer_all_tasks(s, {5, 5, 5, 5, 5, 5});
    EXPECT_EQ(s.state().stage, Stage::QUESTIONNAIRE);
    s.capture_questionnaire(sample_answers("S1"));
    EXPECT_EQ(s.state().stage, Stage::REVEAL);
    const auto p = s.finalize_payment();
    EXPECT_EQ(s.state().stage, Stage::PAID);
    EXPECT_EQ(s.state().payout, p);
    EXPECT_EQ(code_of([&] { s.finalize_payment(); }), SessionErrorCode::WrongStage);
}

TEST(Session, NoSecondSwitch) {
    Session s(config(), "S1", {}, fixed_clock);
    s.begin();
    const int task = s.state().task_order[0];
    if (task_design(task) == DesignKind::BINS) {
        EXPECT_EQ(code_of([&] { s.submit_decision(task, 0); }), SessionErrorCode::InvalidDecision);
        EXPECT_EQ(code_of([&] { s.submit_decision(task, 11); }), SessionErrorCode::InvalidDecision);
        s.submit_decision(task, 4);
    }
    const int t = s.state().current_task().value();
    ASSERT_NE(task_design(t), DesignKind::BINS) << "two BINS tasks cannot be first and second";
    EXPECT_EQ(s.submit_choice(t, 1, Option::A), 2);
    EXPECT_EQ(s.submit_choice(t, 2, Option::B), 3);
    try {
        s.submit_choice(t, 3, Option::A);
        FAIL();
    } catch (const SessionError& e) {
        EXPECT_EQ(e.code(), SessionErrorCode::IrrationalSwitch);
        EXPECT_EQ(e.row(), 3);
        EXPECT_EQ(e.task(), t);
    }
    const auto before = s.state();
    EXPECT_EQ(before.next_row, 3);
    EXPECT_TRUE(std::holds_alternative<event::ErrorShown>(s.events().back().payload));
    EXPECT_EQ(code_of([&] { s.submit_choice(t, 2, Option::B); }), SessionErrorCode::DuplicateRow);
    EXPECT_EQ(code_of([&] { s.submit_choice(t, 5, Option::B); }), SessionErrorCode::RowOutOfOrder);
    const int other = t == 1 ? 6 : 1;
    EXPECT_EQ(code_of([&] { s.submit_choice(other, 1, Option::A); }), SessionErrorCode::OutOfOrderTask);
    EXPECT_EQ(s.submit_choice(t, 3, Option::B), 4);
}

TEST(Session, PayoutWithinConfiguredRange) {
    const auto cfg = config(7);
    EXPECT_NEAR(cfg->min_total(), 5.60, 1e-9);
    for (int i = 0; i < 200; ++i) {
        Session s(cfg, "P" + std::to_string(i), {}, fixed_clock);
        const std::array<int, 6> r{i % 11, (i * 3) % 11, 1 + i % 10, 1 + (i * 7) % 10, (i * 5) % 11, (i * 9) % 11};
        complete_session(s, r);
        const auto p = s.finalize_payment();
        EXPECT_GE(p.total, cfg->min_total() - 1e-9);
        EXPECT_LE(p.total, cfg->max_total() + 1e-9);
        EXPECT_NEAR(p.total, p.realized + p.fee, 1e-9);
        EXPECT_EQ(p.buy_price.has_value(), task_domain(p.selected_task) == MenuDomain::PRICE);
    }
}

TEST(Session, ManualRollsDetermineThePayout) {
    auto cfg = config(1, DieMode::MANUAL_ENTRY);
    Session s(cfg, "M1", {}, fixed_clock);
    complete_session(s, {10, 10, 1, 1, 10, 10});
    EXPECT_EQ(code_of([&] { s.finalize_payment(); }), SessionErrorCode::RollOutOfRange);
    EXPECT_EQ(code_of([&] { s.finalize_payment(DieRolls{7, 1, 1}); }), SessionErrorCode::RollOutOfRange);
    EXPECT_EQ(code_of([&] { s.finalize_payment(DieRolls{1, 0, 1}); }), SessionErrorCode::RollOutOfRange);
    // Task 1 row 3 with all-safe choices pays option A of the HL menu: 12.00
    // with probability 0.3, realized by an outcome roll of 1..3.
    const auto p = s.finalize_payment(DieRolls{1, 3, 2});
    EXPECT_EQ(p.option, Option::A);
    EXPECT_DOUBLE_EQ(p.realized, 12.00);
    EXPECT_DOUBLE_EQ(p.total, 17.00);
}

TEST(Session, OutcomeRollThresholds) {
    auto cfg = config(1, DieMode::MANUAL_ENTRY);
    for (int roll = 1; roll <= 10; ++roll) {
        Session s(cfg, "R" + std::to_string(roll), {}, fixed_clock);
        complete_session(s, {10, 10, 1, 1, 10, 10});
        const auto p = s.finalize_payment(DieRolls{1, 3, roll});
        EXPECT_DOUBLE_EQ(p.realized, roll <= 3 ? 12.00 : 9.60) << roll;
    }
}

TEST(Session, ReplayReproducesStateAndDigest) {
    const auto cfg = config(99);
    std::vector<SessionEvent> sunk;
    Session s(cfg, "S7", [&](const SessionEvent& e) { sunk.push_back(e); }, fixed_clock);
    s.begin();
    const int t = s.state().current_task().value();
    if (task_design(t) != DesignKind::BINS) {
        s.submit_choice(t, 1, Option::B);
        EXPECT_THROW(s.submit_choice(t, 2, Option::A), SessionError);
    }
    const auto mid = replay(s.events(), *cfg);
    EXPECT_EQ(mid, s.state());
    EXPECT_EQ(state_digest(mid), s.digest());

    Session fresh(cfg, "S8", {}, fixed_clock);
    complete_session(fresh, {3, 4, 5, 6, 7, 8});
    fresh.finalize_payment();
    const auto events = fresh.events();
    EXPECT_EQ(state_digest(replay(events, *cfg)), fresh.digest());
    const auto rebuilt = Session::from_events(cfg, events, {}, fixed_clock);
    EXPECT_EQ(rebuilt->digest(), fresh.digest());
    EXPECT_EQ(rebuilt->state(), fresh.state());
    EXPECT_EQ(sunk.size(), s.events().size());

    auto gap = events;
    gap.erase(gap.begin() + 2);
    EXPECT_THROW(replay(gap, *cfg), InvalidArgument);
}

TEST(Session, DigestChangesWithState) {
    const auto cfg = config();
    Session a(cfg, "S1", {}, fixed_clock), b(cfg, "S1", {}, fixed_clock);
    EXPECT_EQ(a.digest(), b.digest());
    EXPECT_EQ(a.digest().size(), 16u);
    a.begin();
    EXPECT_NE(a.digest(), b.digest());
}

TEST(Session, NoOutcomeEventBeforeReveal) {
    const auto cfg = config(5);
    for (int i = 0; i < 20; ++i) {
        Session s(cfg, "N" + std::to_string(i), {}, fixed_clock);
        complete_session(s, {i % 11, 5, 4, 3, 6, 2});
        for (const auto& e : s.events()) EXPECT_FALSE(reveals_outcome(e.payload)) << event_type(e.payload);
        s.finalize_payment();
        bool revealed = false;
        for (const auto& e : s.events()) {
            if (const auto* sc = std::get_if<event::StageChanged>(&e.payload); sc && sc->to == Stage::REVEAL)
                revealed = true;
            if (reveals_outcome(e.payload)) EXPECT_TRUE(revealed);
        }
    }
}

TEST(Session, SeededRollsAreUniform) {
    // 7200 complete sessions; chi-square goodness of fit for each die at the
    // 1% level (critical values for 5 and 9 degrees of freedom).
    const auto cfg = config(2024);
    std::array<int, 6> task_counts{};
    std::array<int, 10> row_counts{}, outcome_counts{};
    const int n = 7200;
    for (int i = 0; i < n; ++i) {
        const std::string subject = "U" + std::to_string(i);
        Session s(cfg, subject, {}, fixed_clock);
        complete_session(s, {5, 5, 5, 5, 5, 5});
        s.finalize_payment();
        const auto rolls = *s.state().rolls;
        EXPECT_EQ(rolls, draw_die_rolls(2024, subject));
        ++task_counts[static_cast<std::size_t>(rolls.task - 1)];
        ++row_counts[static_cast<std::size_t>(rolls.row - 1)];
        ++outcome_counts[static_cast<std::size_t>(rolls.outcome - 1)];
    }
    auto chi2 = [](const auto& counts, double expected) {
        double x = 0;
        for (int c : counts) x += (c - expected) * (c - expected) / expected;
        return x;
    };
    EXPECT_LT(chi2(task_counts, n / 6.0), 15.086);
    EXPECT_LT(chi2(row_counts, n / 10.0), 21.666);
    EXPECT_LT(chi2(outcome_counts, n / 10.0), 21.666);
}

TEST(Session, QuestionnaireValidation) {
    Session s(config(), "Q1", {}, fixed_clock);
    s.begin();
    answer_all_tasks(s, {5, 5, 5, 5, 5, 5});
    auto bad = sample_answers("Q1");
    bad.gender = 3;
    try {
        s.capture_questionnaire(bad);
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.field(), 'B');
    }
    EXPECT_EQ(s.state().stage, Stage::QUESTIONNAIRE);
    s.capture_questionnaire(sample_answers("Q1"));
    EXPECT_EQ(s.state().questionnaire->subject_id, "Q1");
}

TEST(Session, ConfigValidation) {
    auto cfg = default_experiment_config();
    cfg.tasks.pop_back();
    EXPECT_THROW(cfg.validate(), InvalidArgument);
    auto swapped = default_experiment_config();
    std::swap(swapped.tasks[0], swapped.tasks[1]);
    EXPECT_THROW(swapped.validate(), InvalidArgument);
    auto neg = default_experiment_config();
    neg.fee = -1;
    EXPECT_THROW(neg.validate(), InvalidArgument);
}

TEST(Session, SeededModeRejectsExplicitRolls) {
    Session s(config(), "X1", {}, fixed_clock);
    complete_session(s, {5, 5, 5, 5, 5, 5});
    EXPECT_THROW(s.finalize_payment(DieRolls{1, 1, 1}), SessionError);
}

TEST(ExperimentRun, DuplicatesCapacityAndClose) {
    ExperimentRun run(default_experiment_config(3), 2);
    run.create_session("A", {}, fixed_clock);
    EXPECT_EQ(code_of([&] { run.create_session("A", {}, fixed_clock); }), SessionErrorCode::DuplicateSubject);
    run.create_session("B", {}, fixed_clock);
    EXPECT_EQ(code_of([&] { run.create_session("C", {}, fixed_clock); }), SessionErrorCode::RunClosed);

    ExperimentRun open(default_experiment_config(3));
    open.close();
    EXPECT_TRUE(open.closed());
    EXPECT_EQ(code_of([&] { open.create_session("A", {}, fixed_clock); }), SessionErrorCode::RunClosed);
}

TEST(ExperimentRun, ExportIngestRoundTrip) {
    ExperimentRun run(default_experiment_config(8));
    std::map<std::string, std::array<int, 6>> expected;
    for (int i = 0; i < 12; ++i) {
        const std::string id = "E" + std::to_string(i);
        const std::array<int, 6> r{i % 11, (i + 3) % 11, 1 + i % 10, 1 + (i + 4) % 10, (i + 6) % 11, (i + 2) % 11};
        auto s = run.create_session(id, {}, fixed_clock);
        complete_session(*s, r);
        if (i % 4 == 3) continue;  // left unpaid: excluded from the export
        s->finalize_payment();
        expected[id] = r;
    }
    EXPECT_EQ(run.paid_records().size(), expected.size());
    const auto files = run.export_cohort();
    const auto table = load_session_table(files.session_table);
    const Cohort cohort(table.records, load_demographics(files.demographics));
    ASSERT_EQ(cohort.size(), expected.size());
    for (const auto& m : cohort.members()) {
        EXPECT_EQ(m.choices.responses, expected.at(m.choices.subject_id));
        ASSERT_TRUE(m.demographics);
        EXPECT_EQ(*m.demographics, sample_answers(m.choices.subject_id));
    }
}
