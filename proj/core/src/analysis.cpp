#include "mplab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "mplab/error.hpp"
#include "mplab/text_io.hpp"

namespace mplab {

namespace {

std::vector<double> task_values(const Cohort& cohort, int task, Measure measure, MidpointRule rule) {
    std::vector<double> out;
    out.reserve(cohort.size());
    for (const auto& m : cohort.members()) {
        const int r = m.choices.response(task);
        out.push_back(measure == Measure::Response ? r : response_midpoint(task, r, rule));
    }
    return out;
}

std::vector<double> mean_of_tasks(const Cohort& cohort, std::array<int, 3> tasks, Measure measure,
                                  MidpointRule rule) {
    std::vector<double> out(cohort.size(), 0.0);
    for (int t : tasks) {
        const auto v = task_values(cohort, t, measure, rule);
        for (std::size_t i = 0; i < v.size(); ++i) out[i] += v[i];
    }
    for (auto& x : out) x /= 3.0;
    return out;
}

std::pair<int, int> comparison_tasks(Comparison c) {
    switch (c) {
        case Comparison::HL: return {1, 6};
        case Comparison::CVU: return {2, 5};
        case Comparison::BINS: return {3, 4};
        case Comparison::MEAN: break;
    }
    return {0, 0};
}

double quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

Histogram histogram_over(std::string label, const std::vector<double>& values,
                         std::vector<double> bins) {
    Histogram h{std::move(label), std::move(bins), {}};
    h.counts.assign(h.bins.size(), 0);
    for (double v : values) {
        auto it = std::min_element(h.bins.begin(), h.bins.end(), [v](double a, double b) {
            return std::abs(a - v) < std::abs(b - v);
        });
        ++h.counts[static_cast<std::size_t>(it - h.bins.begin())];
    }
    return h;
}

AttitudeShares shares_of(const std::array<std::size_t, 3>& counts) {
    const double total = static_cast<double>(counts[0] + counts[1] + counts[2]);
    if (total == 0) return {};
    return {counts[0] / total, counts[1] / total, counts[2] / total};
}

}  // namespace

double midpoint_crra(const CrraInterval& interval, MidpointRule rule) {
    if (std::isinf(interval.lo)) return rule.first_interval_value;
    if (std::isinf(interval.hi)) return rule.last_interval_value;
    return 0.5 * (interval.lo + interval.hi);
}

double response_midpoint(int task, int response, MidpointRule rule) {
    return midpoint_crra(interval_from_response(task_design(task), response), rule);
}

RiskCategory classify_attitude(const CrraInterval& interval) { return interval.category; }

BroadAttitude broad_attitude(const CrraInterval& interval) {
    if (interval.hi <= -0.15) return BroadAttitude::LOVING;
    if (interval.lo >= 0.15) return BroadAttitude::AVERSE;
    return BroadAttitude::NEUTRAL;
}

BroadAttitude broad_attitude(int task, int response) {
    return broad_attitude(interval_from_response(task_design(task), response));
}

CertaintyEquivalent ce_rp_from_cvu(int safe_count, const CvuSchedule& schedule) {
    const auto& c = schedule.certain;
    if (c.size() != 10) throw InvalidArgument("CVU schedule needs 10 certain amounts");
    if (safe_count < 0 || safe_count > 10)
        throw InvalidArgument("safe-choice count " + std::to_string(safe_count) + " outside 0..10");
    CertaintyEquivalent out;
    if (safe_count == 0)
        out.ce = c.front();
    else if (safe_count == 10)
        out.ce = c.back();
    else
        out.ce = 0.5 * (c[static_cast<std::size_t>(safe_count - 1)] +
                        c[static_cast<std::size_t>(safe_count)]);
    const double ev = expected_value(schedule.lottery_b);
    out.rp = ev - out.ce;
    out.rp_percent = 100.0 * out.rp / ev;
    return out;
}

std::string comparison_label(Comparison c) {
    if (c == Comparison::MEAN) return "DUF mean = IUF mean";
    const auto [a, b] = comparison_tasks(c);
    return "Task" + std::to_string(a) + " = Task" + std::to_string(b);
}

PairedSample paired_sample(const Cohort& cohort, Comparison c, Measure measure, MidpointRule rule) {
    if (cohort.empty()) throw InvalidArgument("cohort is empty");
    if (c == Comparison::MEAN)
        return PairedSample(mean_of_tasks(cohort, {1, 2, 3}, measure, rule),
                            mean_of_tasks(cohort, {4, 5, 6}, measure, rule), "DUF mean",
                            "IUF mean");
    const auto [a, b] = comparison_tasks(c);
    return PairedSample(task_values(cohort, a, measure, rule), task_values(cohort, b, measure, rule),
                        "Task" + std::to_string(a), "Task" + std::to_string(b));
}

PairedSample risk_premium_sample(const Cohort& cohort, const CvuSchedule& schedule) {
    if (cohort.empty()) throw InvalidArgument("cohort is empty");
    std::vector<double> x, y;
    for (const auto& m : cohort.members()) {
        x.push_back(ce_rp_from_cvu(m.choices.response(2), schedule).rp);
        y.push_back(ce_rp_from_cvu(m.choices.response(5), schedule).rp);
    }
    return PairedSample(std::move(x), std::move(y), "RP Task2", "RP Task5");
}

CohortSummary cohort_summary(const Cohort& cohort, MidpointRule rule) {
    if (cohort.empty()) throw InvalidArgument("cohort is empty");
    CohortSummary s;
    s.subjects = cohort.size();
    AttitudeShares sum;
    for (int task = 1; task <= 6; ++task) {
        auto& ts = s.tasks[static_cast<std::size_t>(task - 1)];
        ts.task = task;
        const auto responses = task_values(cohort, task, Measure::Response, rule);
        const auto mids = task_values(cohort, task, Measure::Midpoint, rule);
        ts.mean_response = mean(responses);
        ts.mean_midpoint = mean(mids);
        ts.sd_midpoint = sample_sd(mids);
        std::array<std::size_t, 3> broad{};
        for (double r : responses) {
            const auto iv = interval_from_response(task_design(task), static_cast<int>(r));
            ++ts.category_counts[static_cast<std::size_t>(iv.category)];
            ++broad[static_cast<std::size_t>(broad_attitude(iv))];
        }
        ts.shares = shares_of(broad);
        sum.loving += ts.shares.loving / 6;
        sum.neutral += ts.shares.neutral / 6;
        sum.averse += ts.shares.averse / 6;
    }
    s.shares = sum;
    s.payoff_means = mean_of_tasks(cohort, {1, 2, 3}, Measure::Midpoint, rule);
    s.price_means = mean_of_tasks(cohort, {4, 5, 6}, Measure::Midpoint, rule);
    s.payoff_mean = mean(s.payoff_means);
    s.price_mean = mean(s.price_means);
    s.payoff_sd = sample_sd(s.payoff_means);
    s.price_sd = sample_sd(s.price_means);
    return s;
}

SwitchingProfile switching_profile(const Cohort& cohort) {
    SwitchingProfile p;
    p.subjects = cohort.size();
    if (cohort.empty()) return p;
    std::size_t any = 0, na = 0, all = 0, loving = 0;
    for (const auto& m : cohort.members()) {
        std::set<BroadAttitude> seen;
        for (int task = 1; task <= 6; ++task) seen.insert(broad_attitude(task, m.choices.response(task)));
        if (seen.size() < 2) continue;
        ++any;
        if (seen.size() == 3)
            ++all;
        else if (!seen.count(BroadAttitude::LOVING))
            ++na;
        else
            ++loving;
    }
    const double n = static_cast<double>(p.subjects);
    p.any_switch = any / n;
    p.neutral_averse_only = na / n;
    p.all_three = all / n;
    p.loving_mixed = loving / n;
    return p;
}

double silverman_bandwidth(const std::vector<double>& values) {
    if (values.empty()) throw InvalidArgument("bandwidth of an empty sample");
    const double sd = sample_sd(values);
    const double iqr = values.size() > 1 ? (quantile(values, 0.75) - quantile(values, 0.25)) / 1.34 : 0;
    double spread = std::min(sd, iqr);
    if (!(spread > 0)) spread = std::max(sd, iqr);
    if (!(spread > 0)) return 0.1;
    return 0.9 * spread * std::pow(static_cast<double>(values.size()), -0.2);
}

KdeCurve kde_epanechnikov(const std::vector<double>& values, std::string label, std::size_t points) {
    if (points < 2) throw InvalidArgument("KDE needs at least two evaluation points");
    KdeCurve k;
    k.label = std::move(label);
    k.bandwidth = silverman_bandwidth(values);
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    const double lo = *mn - k.bandwidth, hi = *mx + k.bandwidth;
    const double n = static_cast<double>(values.size());
    for (std::size_t i = 0; i < points; ++i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
        double f = 0;
        for (double v : values) {
            const double u = (x - v) / k.bandwidth;
            if (std::abs(u) < 1) f += 0.75 * (1 - u * u);
        }
        k.x.push_back(x);
        k.density.push_back(f / (n * k.bandwidth));
    }
    return k;
}

DistributionExport export_distributions(const Cohort& cohort, DistributionKind kind,
                                        const CvuSchedule& schedule) {
    DistributionExport out;
    if (cohort.empty()) return out;

    if (kind == DistributionKind::RiskPremium) {
        for (int task : {2, 5}) {
            std::vector<double> rp;
            std::set<double> bins;
            for (const auto& m : cohort.members()) {
                rp.push_back(ce_rp_from_cvu(m.choices.response(task), schedule).rp);
                bins.insert(rp.back());
            }
            const auto label = "RP Task" + std::to_string(task);
            out.histograms.push_back(histogram_over(label, rp, {bins.begin(), bins.end()}));
            out.kdes.push_back(kde_epanechnikov(rp, label));
        }
        return out;
    }

    const MidpointRule rule;
    std::vector<double> midpoint_bins;
    for (int i = 0; i < 9; ++i) midpoint_bins.push_back(midpoint_crra(crra_interval(i), rule));
    std::vector<double> response_bins;
    for (int i = 0; i <= 10; ++i) response_bins.push_back(i);

    const Measure measure = kind == DistributionKind::Responses ? Measure::Response : Measure::Midpoint;
    for (int task = 1; task <= 6; ++task) {
        const auto values = task_values(cohort, task, measure, rule);
        const auto label = "Task" + std::to_string(task);
        out.histograms.push_back(histogram_over(
            label, values, measure == Measure::Response ? response_bins : midpoint_bins));
        out.kdes.push_back(kde_epanechnikov(values, label));
    }
    if (kind == DistributionKind::Responses) {
        for (int a = 1; a <= 6; ++a)
            for (int b = a + 1; b <= 6; ++b) {
                ScatterPair sp{a, b, {}};
                for (const auto& m : cohort.members())
                    sp.points.emplace_back(m.choices.response(a), m.choices.response(b));
                out.scatter.push_back(std::move(sp));
            }
    }
    return out;
}

std::string to_columnar_text(const DistributionExport& data) {
    std::ostringstream out;
    for (const auto& h : data.histograms) {
        out << "# histogram " << h.label << "\nbin\tcount\n";
        for (std::size_t i = 0; i < h.bins.size(); ++i)
            out << format_number(h.bins[i]) << '\t' << h.counts[i] << '\n';
    }
    for (const auto& k : data.kdes) {
        out << "# kde " << k.label << " bandwidth=" << format_number(k.bandwidth) << "\nx\tdensity\n";
        for (std::size_t i = 0; i < k.x.size(); ++i)
            out << format_fixed(k.x[i], 6) << '\t' << format_fixed(k.density[i], 8) << '\n';
    }
    for (const auto& s : data.scatter) {
        out << "# scatter task" << s.task_x << " task" << s.task_y << "\ntask" << s.task_x << "\ttask"
            << s.task_y << '\n';
        for (const auto& [x, y] : s.points) out << format_number(x) << '\t' << format_number(y) << '\n';
    }
    return out.str();
}

}  // namespace mplab
