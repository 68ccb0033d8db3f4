#pragma once

// Cohort-level analysis: CRRA midpoints, attitude classes, certainty
// equivalents from CVU responses, paired comparisons between the payoff and
// price framing of each design, switching profiles and distribution exports.

#include <array>
#include <string>
#include <vector>

#include "mplab/dataset.hpp"
#include "mplab/menu.hpp"
#include "mplab/stats.hpp"

namespace mplab {

// Point value for an interval: interior midpoint, with the open-ended first
// and last intervals pinned to their finite bound.
struct MidpointRule {
    double first_interval_value = kCrraCutoffs.front();
    double last_interval_value = kCrraCutoffs.back();
};

double midpoint_crra(const CrraInterval& interval, MidpointRule rule = {});
double response_midpoint(int task, int response, MidpointRule rule = {});

RiskCategory classify_attitude(const CrraInterval& interval);
// hi <= -0.15 -> LOVING, lo >= 0.15 -> AVERSE, otherwise NEUTRAL.
BroadAttitude broad_attitude(const CrraInterval& interval);
BroadAttitude broad_attitude(int task, int response);

struct CertaintyEquivalent {
    double ce = 0;           // USD
    double rp = 0;           // EV(lottery_b) - CE
    double rp_percent = 0;   // 100 * RP / EV
};

// CE from a CVU safe count n: the midpoint of the certain amounts of rows n
// and n + 1, or the first / last amount for n = 0 / n = 10.
CertaintyEquivalent ce_rp_from_cvu(int safe_count, const CvuSchedule& schedule);

// Design pairs compared across framings: task 1 vs 6 (HL), 2 vs 5 (CVU),
// 3 vs 4 (BINS), and the per-subject mean of tasks 1-3 vs 4-6.
enum class Comparison { HL, CVU, BINS, MEAN };
inline constexpr std::array<Comparison, 4> kComparisons = {Comparison::HL, Comparison::CVU,
                                                           Comparison::BINS, Comparison::MEAN};
std::string comparison_label(Comparison c);  // "Task1 = Task6", ..., "DUF mean = IUF mean"

// Raw responses (safe counts / decision numbers) or their CRRA midpoints.
enum class Measure { Response, Midpoint };

PairedSample paired_sample(const Cohort& cohort, Comparison c, Measure measure,
                           MidpointRule rule = {});

// RP of task 2 vs task 5 under the given CVU schedule.
PairedSample risk_premium_sample(const Cohort& cohort, const CvuSchedule& schedule);

struct AttitudeShares {
    double loving = 0, neutral = 0, averse = 0;  // fractions summing to 1
};

struct TaskSummary {
    int task = 0;
    double mean_response = 0;
    double mean_midpoint = 0;
    double sd_midpoint = 0;
    std::array<std::size_t, 9> category_counts{};
    AttitudeShares shares;
};

struct CohortSummary {
    std::size_t subjects = 0;
    std::array<TaskSummary, 6> tasks;
    // Per-subject mean midpoint over tasks 1-3 (payoff) and 4-6 (price).
    std::vector<double> payoff_means, price_means;
    double payoff_mean = 0, price_mean = 0;
    double payoff_sd = 0, price_sd = 0;  // sample sd of the per-subject means
    AttitudeShares shares;               // per-task shares averaged over the six tasks
};

CohortSummary cohort_summary(const Cohort& cohort, MidpointRule rule = {});

// Shares of subjects whose broad attitude varies across the six tasks:
//   any_switch          attitude not constant
//   neutral_averse_only attitudes are exactly {NEUTRAL, AVERSE}
//   all_three           LOVING, NEUTRAL and AVERSE all appear
//   loving_mixed        attitudes are exactly {LOVING, NEUTRAL} or {LOVING, AVERSE}
struct SwitchingProfile {
    std::size_t subjects = 0;
    double any_switch = 0;
    double neutral_averse_only = 0;
    double all_three = 0;
    double loving_mixed = 0;
};

SwitchingProfile switching_profile(const Cohort& cohort);

struct Histogram {
    std::string label;
    std::vector<double> bins;            // bin value (response, midpoint or RP)
    std::vector<std::size_t> counts;
};

struct KdeCurve {
    std::string label;
    double bandwidth = 0;
    std::vector<double> x;
    std::vector<double> density;
};

struct ScatterPair {
    int task_x = 0, task_y = 0;
    std::vector<std::pair<double, double>> points;
};

struct DistributionExport {
    std::vector<Histogram> histograms;
    std::vector<KdeCurve> kdes;
    std::vector<ScatterPair> scatter;  // all 15 task pairs (responses only)
};

enum class DistributionKind { Responses, Midpoints, RiskPremium };

// Epanechnikov kernel with bandwidth 0.9 min(sd, IQR/1.34) n^(-1/5),
// falling back to whichever spread is positive (or 0.1) when one is zero.
// Evaluated on `points` equally spaced values spanning the data +/- bandwidth.
KdeCurve kde_epanechnikov(const std::vector<double>& values, std::string label,
                          std::size_t points = 1001);
double silverman_bandwidth(const std::vector<double>& values);

// Responses/midpoints: one histogram and KDE per task. RiskPremium: tasks 2
// and 5 only, under `schedule`.
DistributionExport export_distributions(const Cohort& cohort, DistributionKind kind,
                                        const CvuSchedule& schedule = default_cvu_schedule());

// Tab-separated sections: "# histogram <label>" / "# kde <label> bandwidth=h"
// / "# scatter task<i> task<j>", each followed by a header row and data rows.
std::string to_columnar_text(const DistributionExport& data);

}  // namespace mplab
