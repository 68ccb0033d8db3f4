// One PASS/FAIL line per acceptance criterion. Published values and
// tolerances are pinned here, independent of the reproduction module.
//
// Usage: mplab_acceptance [cvu.schedule]
// Without a schedule file the schedule-dependent comparisons are reported as
// SKIPPED-CONDITIONAL and never count as a pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "mplab/analysis.hpp"
#include "mplab/choice_string.hpp"
#include "mplab/dataset.hpp"
#include "mplab/error.hpp"
#include "mplab/menu.hpp"
#include "mplab/menu_io.hpp"
#include "mplab/session.hpp"
#include "mplab/stats.hpp"
#include "mplab/text_io.hpp"
#include "mplab/utility.hpp"

using namespace mplab;

namespace {

using Stopwatch = std::chrono::steady_clock;

double seconds_since(Stopwatch::time_point t0) {
    return std::chrono::duration<double>(Stopwatch::now() - t0).count();
}

// Tally of compared values for one criterion.
struct Tally {
    int compared = 0;
    int failed = 0;
    std::vector<std::string> misses;

    void near(const std::string& what, double published, double computed, double tol) {
        ++compared;
        if (std::abs(computed - published) <= tol + 1e-12) return;
        ++failed;
        std::ostringstream s;
        s << what << " " << computed << " vs " << published;
        misses.push_back(s.str());
    }
    void at_most(const std::string& what, double bound, double computed, double tol) {
        ++compared;
        if (computed <= bound + tol + 1e-12) return;
        ++failed;
        std::ostringstream s;
        s << what << " " << computed << " > " << bound;
        misses.push_back(s.str());
    }
    void check(const std::string& what, bool ok) {
        ++compared;
        if (ok) return;
        ++failed;
        misses.push_back(what);
    }
    std::string summary() const {
        std::ostringstream s;
        s << (compared - failed) << "/" << compared << " within tolerance";
        for (std::size_t i = 0; i < misses.size() && i < 3; ++i) s << "; " << misses[i];
        if (misses.size() > 3) s << "; ...";
        return s.str();
    }
};

enum class Verdict { PASS, FAIL, SKIPPED_CONDITIONAL };

struct Line {
    Verdict verdict;
    std::string name;
    std::string detail;
};

Line from_tally(std::string name, const Tally& t, std::string extra = "") {
    auto detail = t.summary();
    if (!extra.empty()) detail += "; " + extra;
    return {t.failed == 0 ? Verdict::PASS : Verdict::FAIL, std::move(name), detail};
}

// Rank-sum and variance tolerances from the criteria.
constexpr double kVarianceTol = 0.02;
constexpr double kZTol = 0.001;
constexpr double kPTol = 0.0001;
constexpr double kMeanTol = 1e-4;
constexpr double kTTol = 1e-3;
constexpr double kShareTol = 0.01;
constexpr double kSdTol = 0.002;
constexpr double kCutoffTol = 0.01;
constexpr double kTwinTol = 1e-9;

Line wilcoxon_criterion(const Cohort& cohort) {
    const auto t0 = Stopwatch::now();
    struct Row { Comparison c; std::optional<double> s_plus, expected, variance; double z, p; };
    const Row rows[] = {
        {Comparison::HL, 1189.5, 1694, 54255.13, -2.166, 0.0303},
        {Comparison::CVU, {}, {}, {}, -2.932, 0.0034},
        {Comparison::BINS, {}, {}, {}, -0.580, 0.5619},
        {Comparison::MEAN, {}, {}, {}, -2.319, 0.0204},
    };
    Tally t;
    for (const auto& r : rows) {
        const auto w = wilcoxon_signed_rank(paired_sample(cohort, r.c, Measure::Response));
        const auto label = comparison_label(r.c);
        if (r.s_plus) t.near(label + " S+", *r.s_plus, w.sum_positive, 0);
        if (r.expected) t.near(label + " expected", *r.expected, w.expected, 0);
        if (r.variance) t.near(label + " variance", *r.variance, w.variance, kVarianceTol);
        t.near(label + " z", r.z, w.z, kZTol);
        t.near(label + " p", r.p, w.p_two_sided, kPTol);
    }
    const double elapsed = seconds_since(t0);
    t.check("runtime < 1 s", elapsed < 1.0);
    return from_tally("signed-rank test against published values", t,
                      "runtime " + format_fixed(elapsed * 1000, 1) + " ms");
}

Line sign_criterion(const Cohort& cohort) {
    struct Row { Comparison c; int pos, neg, zero; double p_one, p_two; };
    const Row rows[] = {
        {Comparison::HL, 21, 35, 32, 0.0407, 0.0814},
        {Comparison::CVU, 24, 42, 22, 0.0178, 0.0356},
        {Comparison::BINS, 28, 32, 28, 0.3494, 0.6989},
        {Comparison::MEAN, 28, 49, 11, 0.0110, 0.022},
    };
    Tally t;
    for (const auto& r : rows) {
        const auto s = sign_test(paired_sample(cohort, r.c, Measure::Response));
        const auto label = comparison_label(r.c);
        t.near(label + " positive", r.pos, static_cast<double>(s.n_positive), 0);
        t.near(label + " negative", r.neg, static_cast<double>(s.n_negative), 0);
        t.near(label + " zero", r.zero, static_cast<double>(s.n_zero), 0);
        t.near(label + " one-sided p", r.p_one, s.p_negative, kPTol);
        t.near(label + " two-sided p", r.p_two, s.p_two_sided, kPTol);
    }
    return from_tally("sign test against published values", t);
}

Line ttest_criterion(const Cohort& cohort) {
    struct Row { Comparison c; double mx, my, t, p; };
    const Row rows[] = {
        {Comparison::HL, 0.5765341, 0.7160227, -2.2133, 0.0147},
        {Comparison::CVU, 0.4475, 0.6297159, -3.0803, 0.0014},
        {Comparison::BINS, 0.7665909, 0.7779545, -0.1755, 0.4306},
        {Comparison::MEAN, 0.596875, 0.7078977, -2.4010, 0.0092},
    };
    Tally t;
    for (const auto& r : rows) {
        const auto res = paired_t_test(paired_sample(cohort, r.c, Measure::Midpoint));
        const auto label = comparison_label(r.c);
        t.near(label + " mean x", r.mx, res.mean_x, kMeanTol);
        t.near(label + " mean y", r.my, res.mean_y, kMeanTol);
        t.near(label + " t", r.t, res.t, kTTol);
        t.near(label + " one-sided p", r.p, res.p_lower, kTTol);
    }
    return from_tally("paired t-test on midpoint CRRA against published values", t);
}

Line aggregates_criterion(const Cohort& cohort) {
    const auto s = cohort_summary(cohort);
    const auto p = switching_profile(cohort);
    Tally t;
    t.at_most("loving share", 0.05, s.shares.loving, kShareTol);
    t.near("neutral share", 0.12, s.shares.neutral, kShareTol);
    t.near("averse share", 0.83, s.shares.averse, kShareTol);
    t.near("payoff-approach sd", 0.381, s.payoff_sd, kSdTol);
    t.near("price-approach sd", 0.451, s.price_sd, kSdTol);
    t.near("any switch", 0.41, p.any_switch, kShareTol);
    t.near("neutral/averse switch", 0.23, p.neutral_averse_only, kShareTol);
    t.near("all three attitudes", 0.18, p.all_three, kShareTol);
    return from_tally("attitude shares, approach spreads and switching profile", t);
}

Line calibration_criterion() {
    Tally t;
    const auto payoff = hl_menu(23.10, MenuDomain::PAYOFF);
    const auto b = boundaries_from_menu(payoff);
    t.check("eight boundaries", b.size() == kCrraCutoffs.size());
    for (std::size_t i = 0; i < b.size() && i < kCrraCutoffs.size(); ++i)
        t.near("boundary " + std::to_string(i + 1), kCrraCutoffs[i], b[i], kCutoffTol);

    const auto twin = to_price_domain(payoff, PriceFraming{15.0, 1.0, std::nullopt});
    const auto tb = boundaries_from_menu(twin);
    for (std::size_t i = 0; i < b.size() && i < tb.size(); ++i)
        t.near("price twin " + std::to_string(i + 1), b[i], tb[i], kTwinTol);

    for (double k : {0.1, 6.0, 100.0}) {
        const auto sb = boundaries_from_menu(payoff.scaled(k));
        for (std::size_t i = 0; i < b.size() && i < sb.size(); ++i)
            t.near("scale " + format_number(k) + " boundary " + std::to_string(i + 1), b[i], sb[i], kTwinTol);
    }
    return from_tally("menu calibration, price twin and payoff scaling", t);
}

Line duality_criterion() {
    Tally t;
    double roy = 0;
    for (double P = 0.5; P <= 25.0 + 1e-9; P += 0.5)
        for (double M = 5; M <= 30 + 1e-9; M += 1)
            for (double r = -0.9; r <= 1.3 + 1e-9; r += 0.1)
                roy = std::max(roy, roy_identity_residual(P, M, 1.0, CrraParams{r}, 1e-4 * std::min(P, M)));
    t.check("Roy residual " + std::to_string(roy) + " < 1e-6", roy < 1e-6);

    double eu_gap = 0, ce_gap = 0;
    std::mt19937_64 gen(20240601);
    std::uniform_real_distribution<double> price(0.5, 25.0), prob(0.05, 0.95), rr(-0.9, 1.3), kk(0.1, 100.0);
    for (int i = 0; i < 2000; ++i) {
        const double q = prob(gen);
        const PriceLottery pl({{q, price(gen)}, {1 - q, price(gen)}}, 15.0, 1.0);
        const CrraParams params{rr(gen)};
        const auto converted = price_lottery_to_payoff_lottery(pl);
        const double a = expected_utility(pl, params), b = expected_utility(converted, params);
        eu_gap = std::max(eu_gap, std::abs(a - b) / std::max(1.0, std::abs(a)));
        const double k = kk(gen);
        const double ce = certainty_equivalent(converted, params);
        const double ce_k = certainty_equivalent(converted.scaled(k), params);
        ce_gap = std::max(ce_gap, std::abs(ce_k - k * ce) / (k * ce));
    }
    t.check("EU price vs payoff gap " + std::to_string(eu_gap), eu_gap <= 1e-12);
    t.check("CE homogeneity gap " + std::to_string(ce_gap), ce_gap <= 1e-9);
    return from_tally("duality properties", t);
}

Line round_trip_criterion() {
    Tally t;
    const auto menus = default_task_menus();
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> draw(-1.4, 1.8);
    int pass = 0, total = 0;
    for (const auto& menu : menus) {
        int done = 0;
        while (done < 1000) {
            const double r = draw(gen);
            bool near_cutoff = false;
            for (double c : kCrraCutoffs) near_cutoff |= std::abs(r - c) < 0.02;
            if (near_cutoff) continue;
            ++done;
            ++total;
            const auto iv = interval_from_response(menu.kind(), simulate_eut_agent(menu, CrraParams{r}));
            pass += iv.lo <= r && r < iv.hi;
        }
    }
    t.check("round trip " + std::to_string(pass) + "/" + std::to_string(total), pass == total);

    // Identical agents answer the payoff and price menus of each design; no
    // paired test may detect a difference.
    std::vector<SubjectRecord> recs;
    std::uniform_real_distribution<double> agent(-1.2, 1.6);
    for (int i = 0; i < 200; ++i) {
        const CrraParams p{agent(gen)};
        std::array<int, 6> resp{};
        for (int k = 0; k < 6; ++k) resp[static_cast<std::size_t>(k)] = std::max(simulate_eut_agent(menus[static_cast<std::size_t>(k)], p), k == 2 || k == 3 ? 1 : 0);
        recs.push_back(make_subject_record("R" + std::to_string(i), resp));
    }
    const Cohort cohort(std::move(recs), {});
    for (auto c : kComparisons) {
        const auto sample = paired_sample(cohort, c, Measure::Midpoint);
        const auto s = sign_test(sample);
        bool detected = s.p_two_sided < 0.05;
        try {
            detected |= wilcoxon_signed_rank(sample).p_two_sided < 0.05;
        } catch (const DegenerateSampleError&) {
        }
        try {
            detected |= paired_t_test(sample).p_two_sided < 0.05;
        } catch (const DegenerateSampleError&) {
        }
        t.check("null " + comparison_label(c), !detected);
    }
    return from_tally("round-trip oracle and rational-agent null", t);
}

Line risk_premium_criterion(const Cohort& cohort, const std::optional<CvuSchedule>& external) {
    // Unconditional: the sign test depends only on the order of the certain amounts.
    Tally sign;
    const auto s = sign_test(risk_premium_sample(cohort, default_cvu_schedule()));
    sign.near("RP sign one-sided p", 0.0178, s.p_negative, kPTol);
    if (!external) {
        const auto detail = sign.summary() + "; signed-rank, t-test and CE/RP means SKIPPED-CONDITIONAL (no external schedule)";
        return {sign.failed ? Verdict::FAIL : Verdict::SKIPPED_CONDITIONAL,
                "risk-premium tests (schedule-dependent parts conditional)", detail};
    }
    Tally t = sign;
    const auto sample = risk_premium_sample(cohort, *external);
    t.near("RP signed-rank z", -3.195, wilcoxon_signed_rank(sample).z, kZTol);
    t.near("RP t", -3.4562, paired_t_test(sample).t, kTTol);
    std::vector<double> ce, rp, pct;
    for (const auto& m : cohort.members()) {
        const auto v = ce_rp_from_cvu(m.choices.response(2), *external);
        ce.push_back(v.ce);
        rp.push_back(v.rp);
        pct.push_back(v.rp_percent);
    }
    t.near("CE mean", 8.899204, mean(ce), kMeanTol);
    t.near("RP mean", 2.100796, mean(rp), kMeanTol);
    t.near("RP/EV mean (%)", 19.09814, mean(pct), kMeanTol);
    return from_tally("risk-premium tests with external schedule", t);
}

Line dataset_criterion(const CohortLoad& load, double total_elapsed) {
    Tally t;
    const auto& c = load.cohort;
    t.near("subjects", 88, static_cast<double>(c.size()), 0);
    const auto sizes = c.session_sizes();
    const std::vector<std::pair<std::string, std::size_t>> expected{{"A", 25}, {"B", 24}, {"C", 22}, {"D", 17}};
    t.check("session counts 25/24/22/17", sizes == expected);
    int complete = 0;
    for (const auto& m : c.members()) complete += m.demographics.has_value();
    t.near("subjects with questionnaire", 88, complete, 0);
    bool round_trip = true;
    for (auto kind : {DesignKind::HL, DesignKind::CVU, DesignKind::BINS})
        for (int n = kind == DesignKind::BINS ? 1 : 0; n <= 10; ++n)
            round_trip &= parse_choice_string(render_choice_string(n, kind), kind).response == n;
    t.check("parse(render(x)) = x", round_trip);
    const auto canonical = export_canonical(c);
    const auto back = import_canonical(canonical);
    bool same = back.size() == c.size() && export_canonical(back) == canonical;
    for (std::size_t i = 0; same && i < c.size(); ++i)
        same = back.members()[i].choices.responses == c.members()[i].choices.responses &&
               back.members()[i].demographics == c.members()[i].demographics;
    t.check("canonical export round trip", same);
    t.check("acceptance run < 10 s", total_elapsed < 10.0);
    return from_tally("dataset parsing and choice-string round trip", t,
                      "total runtime " + format_fixed(total_elapsed, 2) + " s");
}

std::string fixed_clock() { return "2026-01-01T00:00:00Z"; }

DemographicRecord answers_for(const std::string& subject) {
    DemographicRecord d;
    d.subject_id = subject;
    d.birth_year = 1999;
    d.household_size = 2;
    d.country = "USA";
    d.state = "NC";
    d.attitude_general = 5;
    d.attitude_lottery = 5;
    return d;
}

Line session_criterion() {
    Tally t;
    const auto cfg = std::make_shared<const ExperimentConfig>(default_experiment_config(2024));
    std::mt19937_64 gen(99);
    std::bernoulli_distribution coin(0.5);
    std::uniform_int_distribution<int> decision(0, 11);
    const int n = 7200;
    std::array<int, 6> first_task{};
    bool monotone = true, in_range = true, replay_ok = true;
    for (int i = 0; i < n; ++i) {
        Session s(cfg, "S" + std::to_string(i), {}, fixed_clock);
        s.begin();
        ++first_task[static_cast<std::size_t>(s.state().task_order[0] - 1)];
        // A random subject who clicks at random; rejected clicks are retried with B.
        while (s.state().stage == Stage::CHOOSING) {
            const int task = *s.state().current_task();
            if (task_design(task) == DesignKind::BINS) {
                try {
                    s.submit_decision(task, decision(gen));
                } catch (const SessionError&) {
                }
                continue;
            }
            const int row = s.state().next_row;
            try {
                s.submit_choice(task, row, coin(gen) ? Option::A : Option::B);
            } catch (const SessionError& e) {
                if (e.code() != SessionErrorCode::IrrationalSwitch) throw;
                s.submit_choice(task, row, Option::B);
            }
        }
        s.capture_questionnaire(answers_for(s.state().subject_id));
        const auto pay = s.finalize_payment();
        const auto state = s.state();
        for (const auto& p : state.progress) {
            bool seen_b = false;
            for (auto o : p.choices) {
                if (o == Option::A && seen_b) monotone = false;
                seen_b |= o == Option::B;
            }
        }
        in_range &= pay.total >= 5.60 - 1e-9 && pay.total <= cfg->max_total() + 1e-9;
        if (i % 50 == 0) replay_ok &= state_digest(replay(s.events(), *cfg)) == s.digest();
    }
    t.check("no second switch persisted", monotone);
    t.check("payout within [5.60, fee + menu max]", in_range);
    t.check("replay reproduces state digest", replay_ok);
    double chi2 = 0;
    for (int c : first_task) chi2 += (c - n / 6.0) * (c - n / 6.0) / (n / 6.0);
    const double p = boost::math::cdf(boost::math::complement(boost::math::chi_squared(5), chi2));
    t.check("first-task chi-square p " + format_fixed(p, 4) + " > 0.01", p > 0.01);
    return from_tally("session engine properties", t, "first-task chi-square p = " + format_fixed(p, 4));
}

std::string_view verdict_text(Verdict v) {
    switch (v) {
        case Verdict::PASS: return "PASS";
        case Verdict::FAIL: return "FAIL";
        case Verdict::SKIPPED_CONDITIONAL: return "SKIPPED-CONDITIONAL";
    }
    return "?";
}

}  // namespace

int main(int argc, char** argv) {
    const auto start = Stopwatch::now();
    std::optional<CvuSchedule> external;
    if (argc > 1) external = read_cvu_schedule(read_text_file(argv[1]));

    std::vector<Line> lines;
    auto guarded = [&](const std::string& name, const std::function<Line()>& f) {
        try {
            lines.push_back(f());
        } catch (const std::exception& e) {
            lines.push_back({Verdict::FAIL, name, std::string("error: ") + e.what()});
        }
    };

    CohortLoad load;
    try {
        load = load_cohort_dir(MPLAB_DATA_DIR "/cohort");
    } catch (const std::exception& e) {
        std::cout << "FAIL  dataset could not be loaded: " << e.what() << '\n';
        return 1;
    }
    const auto& cohort = load.cohort;

    guarded("signed-rank test", [&] { return wilcoxon_criterion(cohort); });
    guarded("sign test", [&] { return sign_criterion(cohort); });
    guarded("paired t-test", [&] { return ttest_criterion(cohort); });
    guarded("aggregates", [&] { return aggregates_criterion(cohort); });
    guarded("calibration", [] { return calibration_criterion(); });
    guarded("duality", [] { return duality_criterion(); });
    guarded("round trip", [] { return round_trip_criterion(); });
    guarded("risk premium", [&] { return risk_premium_criterion(cohort, external); });
    guarded("session engine", [] { return session_criterion(); });
    guarded("dataset", [&] { return dataset_criterion(load, seconds_since(start)); });

    int failed = 0;
    for (const auto& l : lines) {
        std::cout << verdict_text(l.verdict) << "  " << l.name << "  (" << l.detail << ")\n";
        failed += l.verdict == Verdict::FAIL;
    }
    std::cout << "\n" << lines.size() - static_cast<std::size_t>(failed) << "/" << lines.size()
              << " criteria without failure\n";
    return failed ? 1 : 0;
}
