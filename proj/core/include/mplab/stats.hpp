#pragma once

// Paired-sample hypothesis tests reporting their intermediate quantities.

#include <string>
#include <vector>

namespace mplab {

// Aligned observations x[i], y[i] of the same subject. Differences are x - y.
class PairedSample {
public:
    // Throws InvalidArgument for unequal lengths or an empty sample.
    PairedSample(std::vector<double> x, std::vector<double> y, std::string x_label = "x",
                 std::string y_label = "y");

    const std::vector<double>& x() const noexcept { return x_; }
    const std::vector<double>& y() const noexcept { return y_; }
    const std::string& x_label() const noexcept { return x_label_; }
    const std::string& y_label() const noexcept { return y_label_; }
    std::size_t size() const noexcept { return x_.size(); }
    // x - y rounded to 1e-9 so that decimally equal values rank as ties.
    std::vector<double> differences() const;
    PairedSample swapped() const;

private:
    std::vector<double> x_, y_;
    std::string x_label_, y_label_;
};

double mean(const std::vector<double>& v);
// Sample standard deviation (n - 1 denominator); 0 for fewer than 2 values.
double sample_sd(const std::vector<double>& v);

// 1-based ranks with ties given their average rank.
std::vector<double> average_ranks(const std::vector<double>& v);

double normal_cdf(double z);

struct WilcoxonReport {
    std::size_t n = 0;
    std::size_t n_positive = 0, n_negative = 0, n_zero = 0;
    double sum_positive = 0;  // S+: ranks of |d| over all n pairs, zeros included
    double sum_negative = 0;
    double sum_zero = 0;
    double expected = 0;               // (n(n+1)/2 - sum_zero) / 2
    double unadjusted_variance = 0;    // n(n+1)(2n+1)/24
    double tie_adjustment = 0;         // sum over non-zero tie groups of (t^3 - t)/48
    double zero_adjustment = 0;        // z(z+1)(2z+1)/24 for z zero differences
    double variance = 0;               // unadjusted - tie - zero
    double z = 0;                      // (S+ - expected) / sqrt(variance)
    double p_lower = 0;                // Pr(Z <= z)
    double p_upper = 0;                // Pr(Z >= z)
    double p_two_sided = 0;            // 2 Pr(Z >= |z|)
};

// Signed-rank test with zero differences ranked and then discounted, normal
// approximation. Throws DegenerateSampleError when the variance is not
// positive (every difference is zero).
WilcoxonReport wilcoxon_signed_rank(const PairedSample& sample);

struct ExactWilcoxon {
    double statistic = 0;    // S+
    double p_lower = 0;      // Pr(S+ <= observed)
    double p_upper = 0;      // Pr(S+ >= observed)
    double p_two_sided = 0;  // Pr(|S+ - E| >= |observed - E|)
};

// Exact null distribution of S+ over the 2^m equally likely sign patterns of
// the m non-zero differences (ranks as in wilcoxon_signed_rank).
ExactWilcoxon wilcoxon_exact(const PairedSample& sample);

struct SignTestReport {
    std::size_t n_positive = 0, n_negative = 0, n_zero = 0;
    std::size_t n_used = 0;       // non-zero differences
    double p_positive = 1;        // Pr(#positive >= n_positive), Binomial(n_used, 1/2)
    double p_negative = 1;        // Pr(#negative >= n_negative)
    double p_two_sided = 1;       // min(1, 2 Pr(X >= max(n_positive, n_negative)))
};

// Exact binomial sign test; zero differences are dropped. An all-zero sample
// reports p = 1.
SignTestReport sign_test(const PairedSample& sample);

// Pr(X >= k) for X ~ Binomial(n, 1/2).
double binomial_upper_tail(std::size_t n, std::size_t k);

struct TTestReport {
    std::size_t n = 0;
    double df = 0;
    double mean_x = 0, mean_y = 0;
    double mean_difference = 0;
    double sd_difference = 0;
    double standard_error = 0;
    double t = 0;
    double p_lower = 0;      // Pr(T < t)
    double p_upper = 0;      // Pr(T > t)
    double p_two_sided = 0;  // Pr(|T| > |t|)
};

// Paired t-test on d = x - y with n - 1 degrees of freedom. Throws
// DegenerateSampleError for n < 2 or zero variance of the differences.
TTestReport paired_t_test(const PairedSample& sample);

}  // namespace mplab
