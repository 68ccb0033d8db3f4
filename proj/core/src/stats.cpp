#include "mplab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "mplab/error.hpp"

namespace mplab {

namespace {

// Absolute differences below this are treated as ties / zeros.
constexpr double kDifferenceQuantum = 1e-9;

struct RankedDifferences {
    std::vector<double> d;
    std::vector<double> ranks;  // of |d|, zeros included
};

RankedDifferences rank_differences(const PairedSample& sample) {
    RankedDifferences out;
    out.d = sample.differences();
    std::vector<double> abs_d(out.d.size());
    std::transform(out.d.begin(), out.d.end(), abs_d.begin(), [](double v) { return std::abs(v); });
    out.ranks = average_ranks(abs_d);
    return out;
}

}  // namespace

PairedSample::PairedSample(std::vector<double> x, std::vector<double> y, std::string x_label,
                           std::string y_label)
    : x_(std::move(x)), y_(std::move(y)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {
    if (x_.size() != y_.size())
        throw InvalidArgument("paired sample lengths differ: " + std::to_string(x_.size()) + " vs " +
                              std::to_string(y_.size()));
    if (x_.empty()) throw InvalidArgument("paired sample is empty");
}

std::vector<double> PairedSample::differences() const {
    std::vector<double> d(x_.size());
    for (std::size_t i = 0; i < d.size(); ++i)
        d[i] = std::round((x_[i] - y_[i]) / kDifferenceQuantum) * kDifferenceQuantum;
    return d;
}

PairedSample PairedSample::swapped() const { return PairedSample(y_, x_, y_label_, x_label_); }

double mean(const std::vector<double>& v) {
    if (v.empty()) throw InvalidArgument("mean of an empty list");
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_sd(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

std::vector<double> average_ranks(const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

WilcoxonReport wilcoxon_signed_rank(const PairedSample& sample) {
    const auto rd = rank_differences(sample);
    WilcoxonReport r;
    r.n = rd.d.size();
    std::map<double, std::size_t> tie_groups;  // |d| -> count, non-zero only
    for (std::size_t i = 0; i < r.n; ++i) {
        if (rd.d[i] > 0) {
            ++r.n_positive;
            r.sum_positive += rd.ranks[i];
        } else if (rd.d[i] < 0) {
            ++r.n_negative;
            r.sum_negative += rd.ranks[i];
        } else {
            ++r.n_zero;
            r.sum_zero += rd.ranks[i];
        }
        if (rd.d[i] != 0) ++tie_groups[std::abs(rd.d[i])];
    }
    const double n = static_cast<double>(r.n);
    r.expected = (n * (n + 1) / 2 - r.sum_zero) / 2;
    r.unadjusted_variance = n * (n + 1) * (2 * n + 1) / 24;
    for (const auto& [value, count] : tie_groups) {
        const double t = static_cast<double>(count);
        r.tie_adjustment += (t * t * t - t) / 48;
    }
    const double z0 = static_cast<double>(r.n_zero);
    r.zero_adjustment = z0 * (z0 + 1) * (2 * z0 + 1) / 24;
    r.variance = r.unadjusted_variance - r.tie_adjustment - r.zero_adjustment;
    if (!(r.variance > 0))
        throw DegenerateSampleError("signed-rank variance is zero: every difference is zero");
    r.z = (r.sum_positive - r.expected) / std::sqrt(r.variance);
    r.p_lower = normal_cdf(r.z);
    r.p_upper = normal_cdf(-r.z);
    r.p_two_sided = std::min(1.0, 2 * normal_cdf(-std::abs(r.z)));
    return r;
}

ExactWilcoxon wilcoxon_exact(const PairedSample& sample) {
    const auto rd = rank_differences(sample);
    // Ranks are multiples of 1/2; work with doubled ranks as integers.
    std::vector<std::size_t> doubled;
    double observed = 0;
    for (std::size_t i = 0; i < rd.d.size(); ++i) {
        if (rd.d[i] == 0) continue;
        doubled.push_back(static_cast<std::size_t>(std::lround(2 * rd.ranks[i])));
        if (rd.d[i] > 0) observed += rd.ranks[i];
    }
    if (doubled.empty()) throw DegenerateSampleError("every difference is zero");

    const std::size_t total = std::accumulate(doubled.begin(), doubled.end(), std::size_t{0});
    std::vector<double> count(total + 1, 0.0);  // number of sign patterns per doubled sum
    count[0] = 1.0;
    std::size_t reach = 0;
    for (auto w : doubled) {
        reach += w;
        for (std::size_t s = reach; s >= w; --s) {
            count[s] += count[s - w];
            if (s == w) break;
        }
    }
    const double patterns = std::ldexp(1.0, static_cast<int>(doubled.size()));
    const auto obs2 = static_cast<std::size_t>(std::lround(2 * observed));
    const double center2 = static_cast<double>(total) / 2;
    const double dev = std::abs(static_cast<double>(obs2) - center2);

    ExactWilcoxon e;
    e.statistic = observed;
    for (std::size_t s = 0; s <= total; ++s) {
        const double p = count[s] / patterns;
        if (s <= obs2) e.p_lower += p;
        if (s >= obs2) e.p_upper += p;
        if (std::abs(static_cast<double>(s) - center2) >= dev - 1e-9) e.p_two_sided += p;
    }
    e.p_lower = std::min(1.0, e.p_lower);
    e.p_upper = std::min(1.0, e.p_upper);
    e.p_two_sided = std::min(1.0, e.p_two_sided);
    return e;
}

double binomial_upper_tail(std::size_t n, std::size_t k) {
    if (k == 0) return 1.0;
    if (k > n) return 0.0;
    const boost::math::binomial_distribution<double> dist(static_cast<double>(n), 0.5);
    return boost::math::cdf(boost::math::complement(dist, static_cast<double>(k - 1)));
}

SignTestReport sign_test(const PairedSample& sample) {
    SignTestReport r;
    for (double d : sample.differences()) {
        if (d > 0)
            ++r.n_positive;
        else if (d < 0)
            ++r.n_negative;
        else
            ++r.n_zero;
    }
    r.n_used = r.n_positive + r.n_negative;
    if (r.n_used == 0) return r;
    r.p_positive = binomial_upper_tail(r.n_used, r.n_positive);
    r.p_negative = binomial_upper_tail(r.n_used, r.n_negative);
    r.p_two_sided =
        std::min(1.0, 2 * binomial_upper_tail(r.n_used, std::max(r.n_positive, r.n_negative)));
    return r;
}

TTestReport paired_t_test(const PairedSample& sample) {
    TTestReport r;
    r.n = sample.size();
    if (r.n < 2) throw DegenerateSampleError("paired t-test needs at least two pairs");
    std::vector<double> d(r.n);
    for (std::size_t i = 0; i < r.n; ++i) d[i] = sample.x()[i] - sample.y()[i];
    r.df = static_cast<double>(r.n - 1);
    r.mean_x = mean(sample.x());
    r.mean_y = mean(sample.y());
    r.mean_difference = mean(d);
    r.sd_difference = sample_sd(d);
    if (!(r.sd_difference > 1e-12 * std::max(1.0, std::abs(r.mean_difference))))
        throw DegenerateSampleError("differences have zero variance");
    r.standard_error = r.sd_difference / std::sqrt(static_cast<double>(r.n));
    r.t = r.mean_difference / r.standard_error;
    const boost::math::students_t_distribution<double> dist(r.df);
    r.p_lower = boost::math::cdf(dist, r.t);
    r.p_upper = boost::math::cdf(boost::math::complement(dist, r.t));
    r.p_two_sided = std::min(1.0, 2 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t))));
    return r;
}

}  // namespace mplab
