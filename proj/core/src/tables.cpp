#include "mplab/tables.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "mplab/error.hpp"
#include "mplab/text_io.hpp"

namespace mplab {

namespace {

constexpr double kExact = 0;
constexpr double kVarianceTol = 0.02;
constexpr double kStatTol = 1e-3;
constexpr double kMeanTol = 1e-4;
constexpr double kProbTol = 1e-4;
constexpr double kShareTol = 0.01;
constexpr double kSdTol = 0.002;

struct WilcoxonPublished {
    double sum_positive, expected, sum_zero;
    std::optional<double> variance;
    double z, p;
};

// Per comparison, in kComparisons order. The variance of the mean-task row is
// misprinted (5752.25 against 57761 unadjusted) and is not compared.
constexpr WilcoxonPublished kWilcoxon[] = {
    {1189.5, 1694, 528, 54255.13, -2.166, 0.0303},
    {1138.5, 1831.5, 253, 55863.38, -2.932, 0.0034},
    {1618.5, 1755, 406, 55380.38, -0.580, 0.5619},
    {1368.5, 1925, 66, std::nullopt, -2.319, 0.0204},
};

struct SignPublished {
    int positive, negative, zero;
    double p_positive, p_negative, p_two_sided;
};

constexpr SignPublished kSign[] = {
    {21, 35, 32, 0.9780, 0.0407, 0.0814},
    {24, 42, 22, 0.9907, 0.0178, 0.0356},
    {28, 32, 28, 0.7405, 0.3494, 0.6989},
    {28, 49, 11, 0.9942, 0.0110, 0.022},
};

struct TPublished {
    double mean_x, mean_y, sd_x, sd_y, sd_diff, t, p_lower, p_two_sided;
};

constexpr TPublished kTTest[] = {
    {0.5765341, 0.7160227, 0.4388945, 0.494344, 0.5912076, -2.2133, 0.0147, 0.0295},
    {0.4475, 0.6297159, 0.4224151, 0.6002836, 0.5549168, -3.0803, 0.0014, 0.0028},
    {0.7665909, 0.7779545, 0.5480637, 0.6312252, 0.6074701, -0.1755, 0.4306, 0.8611},
    {0.596875, 0.7078977, 0.3811508, 0.4514727, 0.4337715, -2.4010, 0.0092, 0.0185},
};

struct Builder {
    ReproducedTable table;
    bool skip = false;

    void add(std::string quantity, double published, double computed, double tolerance,
             CheckKind kind = CheckKind::Near) {
        CheckedValue v{std::move(quantity), published, computed, tolerance, kind, CheckStatus::PASS};
        // Printed values carry limited digits; allow for half an ulp of print.
        const double slack = 1e-12;
        const bool ok = kind == CheckKind::Near
                            ? std::abs(computed - published) <= tolerance + slack
                            : computed <= published + tolerance + slack;
        v.status = skip ? CheckStatus::SKIPPED_CONDITIONAL : ok ? CheckStatus::PASS : CheckStatus::FAIL;
        table.values.push_back(std::move(v));
    }
};

std::string prefix(Comparison c) { return comparison_label(c) + ": "; }

ReproducedTable wilcoxon_table(const Cohort& cohort) {
    Builder b{{"wilcoxon", "Wilcoxon matched-pairs signed-rank test (responses)", false, {}}};
    for (std::size_t i = 0; i < kComparisons.size(); ++i) {
        const auto c = kComparisons[i];
        const auto w = wilcoxon_signed_rank(paired_sample(cohort, c, Measure::Response));
        const auto& p = kWilcoxon[i];
        const auto q = prefix(c);
        b.add(q + "sum ranks positive", p.sum_positive, w.sum_positive, kExact);
        b.add(q + "expected", p.expected, w.expected, kExact);
        b.add(q + "sum ranks zero", p.sum_zero, w.sum_zero, kExact);
        b.add(q + "unadjusted variance", 57761, w.unadjusted_variance, kExact);
        if (p.variance) b.add(q + "adjusted variance", *p.variance, w.variance, kVarianceTol);
        b.add(q + "z", p.z, w.z, kStatTol);
        b.add(q + "Prob > |z|", p.p, w.p_two_sided, kProbTol);
    }
    return b.table;
}

ReproducedTable sign_table(const Cohort& cohort) {
    Builder b{{"sign", "Sign test (responses)", false, {}}};
    for (std::size_t i = 0; i < kComparisons.size(); ++i) {
        const auto c = kComparisons[i];
        const auto s = sign_test(paired_sample(cohort, c, Measure::Response));
        const auto& p = kSign[i];
        const auto q = prefix(c);
        b.add(q + "positive", p.positive, static_cast<double>(s.n_positive), kExact);
        b.add(q + "negative", p.negative, static_cast<double>(s.n_negative), kExact);
        b.add(q + "zero", p.zero, static_cast<double>(s.n_zero), kExact);
        b.add(q + "Pr(#positive >= k)", p.p_positive, s.p_positive, kProbTol);
        b.add(q + "Pr(#negative >= k)", p.p_negative, s.p_negative, kProbTol);
        b.add(q + "two-sided", p.p_two_sided, s.p_two_sided, kProbTol);
    }
    return b.table;
}

ReproducedTable ttest_table(const Cohort& cohort) {
    Builder b{{"ttest", "Paired t test (midpoint CRRA)", false, {}}};
    for (std::size_t i = 0; i < kComparisons.size(); ++i) {
        const auto c = kComparisons[i];
        const auto sample = paired_sample(cohort, c, Measure::Midpoint);
        const auto t = paired_t_test(sample);
        const auto& p = kTTest[i];
        const auto q = prefix(c);
        b.add(q + "mean x", p.mean_x, t.mean_x, kMeanTol);
        b.add(q + "mean y", p.mean_y, t.mean_y, kMeanTol);
        b.add(q + "sd x", p.sd_x, sample_sd(sample.x()), kMeanTol);
        b.add(q + "sd y", p.sd_y, sample_sd(sample.y()), kMeanTol);
        b.add(q + "sd diff", p.sd_diff, t.sd_difference, kMeanTol);
        b.add(q + "t", p.t, t.t, kStatTol);
        b.add(q + "Pr(T < t)", p.p_lower, t.p_lower, kStatTol);
        b.add(q + "Pr(|T| > |t|)", p.p_two_sided, t.p_two_sided, kStatTol);
    }
    return b.table;
}

ReproducedTable ce_rp_table(const Cohort& cohort, const CvuSchedule& schedule, bool external) {
    Builder b{{"ce_rp", "Certainty equivalents and risk premiums (CVU tasks)", true, {}}, !external};
    for (int task : {2, 5}) {
        std::vector<double> ce, rp, rp_ev;
        for (const auto& m : cohort.members()) {
            const auto v = ce_rp_from_cvu(m.choices.response(task), schedule);
            ce.push_back(v.ce);
            rp.push_back(v.rp);
            rp_ev.push_back(v.rp_percent);
        }
        const bool t2 = task == 2;
        const auto q = "Task" + std::to_string(task) + ": ";
        b.add(q + "CE mean", t2 ? 8.899204 : 7.95375, mean(ce), kMeanTol);
        b.add(q + "CE sd", t2 ? 1.895516 : 2.735412, sample_sd(ce), kMeanTol);
        b.add(q + "CE min", t2 ? 4.5 : 4, *std::min_element(ce.begin(), ce.end()), kMeanTol);
        b.add(q + "CE max", 14.43, *std::max_element(ce.begin(), ce.end()), kMeanTol);
        b.add(q + "RP mean", t2 ? 2.100796 : 3.04625, mean(rp), kMeanTol);
        b.add(q + "RP/EV mean (%)", t2 ? 19.09814 : 27.69318, mean(rp_ev), kMeanTol);
        b.add(q + "RP/EV sd (%)", t2 ? 17.23196 : 24.86738, sample_sd(rp_ev), kMeanTol);
    }
    return b.table;
}

ReproducedTable rp_tests_table(const Cohort& cohort, const CvuSchedule& schedule, bool external) {
    const auto sample = risk_premium_sample(cohort, schedule);
    const auto w = wilcoxon_signed_rank(sample);
    const auto s = sign_test(sample);
    const auto t = paired_t_test(sample);

    ReproducedTable out{"rp_tests", "Tests on risk premiums (RP Task2 = RP Task5)", true, {}};
    // The sign test only depends on the order of the certain amounts, so it is
    // compared whatever schedule is in use.
    Builder sign{{}};
    sign.add("sign: positive", 24, static_cast<double>(s.n_positive), kExact);
    sign.add("sign: negative", 42, static_cast<double>(s.n_negative), kExact);
    sign.add("sign: zero", 22, static_cast<double>(s.n_zero), kExact);
    sign.add("sign: Pr(#negative >= k)", 0.0178, s.p_negative, kProbTol);
    sign.add("sign: two-sided", 0.0356, s.p_two_sided, kProbTol);

    Builder rest{{}, !external};
    rest.add("signrank: sum ranks positive", 1070.5, w.sum_positive, kExact);
    rest.add("signrank: adjusted variance", 56735.25, w.variance, kVarianceTol);
    rest.add("signrank: z", -3.195, w.z, kStatTol);
    rest.add("signrank: Prob > |z|", 0.0014, w.p_two_sided, kProbTol);
    rest.add("ttest: mean diff", -0.9454544, t.mean_difference, kMeanTol);
    rest.add("ttest: t", -3.4562, t.t, kStatTol);
    rest.add("ttest: Pr(T < t)", 0.0004, t.p_lower, kProbTol);
    rest.add("ttest: Pr(|T| > |t|)", 0.0008, t.p_two_sided, kProbTol);

    out.values = std::move(sign.table.values);
    for (auto& v : rest.table.values) out.values.push_back(std::move(v));
    return out;
}

ReproducedTable summary_ra_table(const Reproduction& r) {
    Builder b{{"summary_ra", "Summary of tests on risk aversion", false, {}}};
    const auto* w = r.find("wilcoxon");
    const auto* s = r.find("sign");
    const auto* t = r.find("ttest");
    auto pick = [](const ReproducedTable* table, const std::string& quantity) {
        for (const auto& v : table->values)
            if (v.quantity == quantity) return v;
        throw Error("missing value " + quantity);
    };
    for (auto c : kComparisons) {
        const auto q = prefix(c);
        const auto wv = pick(w, q + "Prob > |z|");
        const auto sv = pick(s, q + "Pr(#negative >= k)");
        const auto tv = pick(t, q + "Pr(T < t)");
        b.add(q + "signrank Prob > |z|", wv.published, wv.computed, wv.tolerance);
        b.add(q + "sign Prob(.)", sv.published, sv.computed, sv.tolerance);
        b.add(q + "ttest Pr(T < t)", tv.published, tv.computed, tv.tolerance);
    }
    return b.table;
}

ReproducedTable summary_rp_table(const Reproduction& r) {
    ReproducedTable out{"summary_rp", "Summary of tests on risk premiums", true, {}};
    for (const auto* name : {"signrank: Prob > |z|", "sign: Pr(#negative >= k)", "ttest: Pr(T < t)"})
        for (const auto& v : r.find("rp_tests")->values)
            if (v.quantity == name) out.values.push_back(v);
    return out;
}

ReproducedTable aggregates_table(const Cohort& cohort) {
    Builder b{{"aggregates", "Attitude shares, spread of approach means and switching", false, {}}};
    const auto s = cohort_summary(cohort);
    const auto p = switching_profile(cohort);
    b.add("share risk loving (upper bound)", 0.05, s.shares.loving, kShareTol, CheckKind::AtMost);
    b.add("share risk neutral", 0.12, s.shares.neutral, kShareTol);
    b.add("share risk averse", 0.83, s.shares.averse, kShareTol);
    b.add("sd of payoff-approach mean CRRA", 0.381, s.payoff_sd, kSdTol);
    b.add("sd of price-approach mean CRRA", 0.451, s.price_sd, kSdTol);
    b.add("switching: any switch", 0.41, p.any_switch, kShareTol);
    b.add("switching: neutral/averse only", 0.23, p.neutral_averse_only, kShareTol);
    b.add("switching: all three attitudes", 0.18, p.all_three, kShareTol);
    return b.table;
}

std::string format_value(double v, double tolerance) {
    if (tolerance == 0 && v == std::round(v)) return format_fixed(v, 1);
    return format_fixed(v, 7);
}

}  // namespace

std::string_view to_string(CheckStatus status) {
    switch (status) {
        case CheckStatus::PASS: return "PASS";
        case CheckStatus::FAIL: return "FAIL";
        case CheckStatus::SKIPPED_CONDITIONAL: return "SKIPPED-CONDITIONAL";
    }
    return "?";
}

std::size_t Reproduction::count(CheckStatus status) const {
    std::size_t n = 0;
    for (const auto& t : tables)
        for (const auto& v : t.values) n += v.status == status;
    return n;
}

const ReproducedTable* Reproduction::find(std::string_view id) const {
    for (const auto& t : tables)
        if (t.id == id) return &t;
    return nullptr;
}

Reproduction reproduce_tables(const Cohort& cohort, const std::optional<CvuSchedule>& cvu_schedule) {
    if (cohort.empty()) throw InvalidArgument("cohort is empty; nothing to reproduce");
    Reproduction r;
    r.subjects = cohort.size();
    r.external_schedule = cvu_schedule.has_value();
    const auto schedule = cvu_schedule.value_or(default_cvu_schedule());
    r.tables.push_back(wilcoxon_table(cohort));
    r.tables.push_back(sign_table(cohort));
    r.tables.push_back(ttest_table(cohort));
    r.tables.push_back(ce_rp_table(cohort, schedule, r.external_schedule));
    r.tables.push_back(rp_tests_table(cohort, schedule, r.external_schedule));
    r.tables.push_back(summary_ra_table(r));
    r.tables.push_back(summary_rp_table(r));
    r.tables.push_back(aggregates_table(cohort));
    return r;
}

std::string to_text(const Reproduction& r) {
    std::ostringstream out;
    out << "subjects: " << r.subjects << '\n'
        << "cvu schedule: " << (r.external_schedule ? "external" : "default") << '\n'
        << "pass: " << r.count(CheckStatus::PASS) << "  fail: " << r.count(CheckStatus::FAIL)
        << "  skipped-conditional: " << r.count(CheckStatus::SKIPPED_CONDITIONAL) << '\n';
    for (const auto& t : r.tables) {
        std::size_t width = 8;
        for (const auto& v : t.values) width = std::max(width, v.quantity.size());
        out << "\n== " << t.id << ": " << t.title << " ==\n";
        auto pad = [](std::string s, std::size_t w) {
            s.resize(std::max(s.size(), w), ' ');
            return s;
        };
        out << pad("quantity", width) << "  " << pad("published", 14) << "  " << pad("computed", 14)
            << "  " << pad("delta", 14) << "  " << pad("tolerance", 11) << "  status\n";
        for (const auto& v : t.values) {
            std::string tol = v.tolerance == 0 ? "exact" : format_number(v.tolerance);
            if (v.kind == CheckKind::AtMost) tol = "<= +" + tol;
            out << pad(v.quantity, width) << "  " << pad(format_value(v.published, v.tolerance), 14)
                << "  " << pad(format_value(v.computed, v.tolerance), 14) << "  "
                << pad(format_fixed(v.delta(), 7), 14) << "  " << pad(tol, 11) << "  "
                << to_string(v.status) << '\n';
        }
    }
    return out.str();
}

std::string to_json(const Reproduction& r) {
    nlohmann::ordered_json doc;
    doc["subjects"] = r.subjects;
    doc["cvu_schedule"] = r.external_schedule ? "external" : "default";
    doc["pass"] = r.count(CheckStatus::PASS);
    doc["fail"] = r.count(CheckStatus::FAIL);
    doc["skipped_conditional"] = r.count(CheckStatus::SKIPPED_CONDITIONAL);
    auto& tables = doc["tables"] = nlohmann::ordered_json::array();
    for (const auto& t : r.tables) {
        nlohmann::ordered_json jt;
        jt["id"] = t.id;
        jt["title"] = t.title;
        jt["conditional"] = t.conditional;
        auto& values = jt["values"] = nlohmann::ordered_json::array();
        for (const auto& v : t.values)
            values.push_back({{"quantity", v.quantity},
                              {"published", v.published},
                              {"computed", v.computed},
                              {"delta", v.delta()},
                              {"tolerance", v.tolerance},
                              {"check", v.kind == CheckKind::Near ? "near" : "at_most"},
                              {"status", std::string(to_string(v.status))}});
        tables.push_back(std::move(jt));
    }
    return doc.dump(2) + "\n";
}

}  // namespace mplab
