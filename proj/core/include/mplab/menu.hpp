#pragma once

// Task menus for the three MPL designs in payoff and price framing, crossover
// solving, response-to-interval mapping and simulated expected-utility agents.

#include <array>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mplab/utility.hpp"

namespace mplab {

enum class DesignKind { HL, CVU, BINS };
enum class MenuDomain { PAYOFF, PRICE };

std::string_view to_string(DesignKind kind);
std::string_view to_string(MenuDomain domain);
DesignKind parse_design_kind(std::string_view text);  // "hl", "cvu", "bins"; case-insensitive
MenuDomain parse_menu_domain(std::string_view text);  // "payoff", "price"

// Relative-risk-aversion cutoffs separating the nine attitude classes.
inline constexpr std::array<double, 8> kCrraCutoffs = {-0.95, -0.49, -0.15, 0.15,
                                                       0.41,  0.68,  0.97,  1.37};

enum class RiskCategory {
    HighlyRiskLoving,
    VeryRiskLoving,
    RiskLoving,
    RiskNeutral,
    SlightlyRiskAverse,
    RiskAverse,
    VeryRiskAverse,
    HighlyRiskAverse,
    StayInBed,
};

enum class BroadAttitude { LOVING, NEUTRAL, AVERSE };

std::string_view label(RiskCategory category);
std::string_view to_string(BroadAttitude attitude);

struct CrraInterval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    RiskCategory category = RiskCategory::RiskNeutral;

    bool contains(double r) const noexcept { return r > lo && r < hi; }
    friend bool operator==(const CrraInterval&, const CrraInterval&) = default;
};

// Interval 0..8 in ascending order of risk aversion.
CrraInterval crra_interval(int index);

// HL/CVU: n safe choices in 0..10, where 0-1 and 9-10 share the end intervals.
// BINS: decision 1..10, where 9 and 10 share the last interval.
// Throws InvalidArgument when n is out of range.
CrraInterval interval_from_response(DesignKind kind, int n);

// One side of a menu row: a payoff lottery or a buy-price lottery.
using MenuOption = std::variant<OutcomeLottery, PriceLottery>;

// Expected utility in normalized CRRA units (continuous in r).
double normalized_expected_utility(const MenuOption& option, CrraParams params);

// Payoff-domain view of an option (price options converted without rounding).
OutcomeLottery payoff_view(const MenuOption& option);

struct MenuRow {
    int row_index = 0;                    // 1..10
    MenuOption option_a;                  // BINS: the decision's lottery
    std::optional<MenuOption> option_b;   // absent for BINS
};

// Ten rows of one design in one framing. Construction checks structure only
// (row count and numbering, option families, CVU certainty of option A);
// calibration quality is reported by boundaries_from_menu / validate_menu.
class TaskMenu {
public:
    TaskMenu(DesignKind kind, MenuDomain domain, std::vector<MenuRow> rows);

    DesignKind kind() const noexcept { return kind_; }
    MenuDomain domain() const noexcept { return domain_; }
    const std::vector<MenuRow>& rows() const noexcept { return rows_; }
    const MenuRow& row(int row_index) const { return rows_.at(static_cast<std::size_t>(row_index - 1)); }

    // Price menus only; nullopt for payoff menus.
    std::optional<double> endowment() const;
    std::optional<double> sell_price() const;

    // Every payoff multiplied by k. Price menus scale the endowment instead,
    // which multiplies every realized payoff by k.
    TaskMenu scaled(double k) const;

    // Smallest / largest payout any option can realize with positive
    // probability. Price outcomes pay s * M / P rounded to cents.
    double min_payout() const;
    double max_payout() const;

private:
    DesignKind kind_;
    MenuDomain domain_;
    std::vector<MenuRow> rows_;
};

struct Bracket {
    double lo = -5.0;
    double hi = 5.0;
};

// r at which the two options are equally attractive. The bracket is scanned in
// 0.1 steps for sign changes of EU_a - EU_b and the unique change is bisected
// to machine precision. Throws NoCrossoverError / MultipleCrossingsError.
double crossover_crra(const MenuOption& a, const MenuOption& b, Bracket bracket = {});
double crossover_crra(const OutcomeLottery& a, const OutcomeLottery& b, Bracket bracket = {});

// Per-row crossover for HL/CVU (nullopt when the row never switches), or the
// indifference point between decision k and k+1 for BINS (nine entries).
std::vector<std::optional<double>> row_crossovers(const TaskMenu& menu, Bracket bracket = {});

// The eight interval boundaries the menu implies: HL/CVU crossovers of rows
// 2..9, BINS indifference points of decisions 1|2 .. 8|9. Throws
// CalibrationError when one is missing or the list is not strictly increasing.
std::vector<double> boundaries_from_menu(const TaskMenu& menu, Bracket bracket = {});

struct MenuValidation {
    std::vector<double> boundaries;
    std::vector<double> deviations;       // boundary - cutoff
    double max_abs_deviation = 0.0;
    bool strictly_increasing = false;
    bool last_row_b_dominant = false;     // HL/CVU: B first-order dominates A in row 10
    bool ok = false;                      // increasing and within tolerance
    std::string error;                    // calibration failure message, if any
};

MenuValidation validate_menu(const TaskMenu& menu, double tolerance = 0.01);

// Converts every payoff x to buy price P = s * M / x.
struct PriceFraming {
    double endowment = 15.0;
    double sell_price = 1.0;
    std::optional<MoneyRounding> rounding;  // applied to prices (money_decimals)
};

TaskMenu to_price_domain(const TaskMenu& menu, const PriceFraming& framing);

// Inverse of to_price_domain without rounding.
TaskMenu to_payoff_domain(const TaskMenu& menu);

// Rounding used by the default price twins. Cent prices keep the HL twin's
// boundaries within 0.01 of its payoff menu; the CVU and BINS payoffs are
// closer together and need 3 and 4 decimal prices respectively.
PriceFraming default_price_framing(DesignKind kind);

// HL: row n pays A = (12.00 w.p. n/10, 9.60) and B = (high_b w.p. n/10, 0.60).
inline constexpr double kDefaultHlHighB = 23.10;
TaskMenu hl_menu(double high_b = kDefaultHlHighB, MenuDomain domain = MenuDomain::PAYOFF);

struct CvuSchedule {
    std::vector<double> certain;  // row 1..10, strictly decreasing
    OutcomeLottery lottery_b;
};

// Lottery B = 50/50 of 20.00 and 2.00; certain amounts are its certainty
// equivalents at the eight cutoffs (rows 2..9) bracketed by 14.43 and 4.00.
CvuSchedule default_cvu_schedule();

// Certain amounts CE(lottery_b, cutoff) rounded to cents for rows 2..9.
CvuSchedule cvu_schedule_from_cutoffs(const OutcomeLottery& lottery_b, double first_row,
                                      double last_row);

// Row n: A = schedule.certain[n-1] for sure, B = schedule.lottery_b.
// Throws CalibrationError for a schedule that is not 10 strictly decreasing amounts.
TaskMenu cvu_menu(const CvuSchedule& schedule, MenuDomain domain = MenuDomain::PAYOFF);

struct BinsSchedule {
    std::vector<double> low;  // decision 1..10, strictly increasing
    double anchor_high = 23.10;
    // Decision 9 vs 10 indifference point; any value above the last cutoff
    // keeps decisions 9 and 10 inside the top interval.
    double terminal_r = 2.0;
    std::optional<int> money_decimals = 2;  // rounding of the solved highs
};

BinsSchedule default_bins_schedule();

// Solved high payoffs: decision 1 uses anchor_high, and each next high makes
// the agent at the corresponding cutoff indifferent between neighbours.
// Throws CalibrationError when no positive high exists, a high does not exceed
// its low, or spreads are not strictly decreasing.
std::vector<double> solve_bins_highs(const BinsSchedule& schedule);

// Decision k pays high_k or low_k with probability 1/2 each.
TaskMenu bins_menu(const BinsSchedule& schedule, MenuDomain domain = MenuDomain::PAYOFF);

// The standard six tasks in task-number order: HL payoff, CVU payoff, BINS
// payoff, BINS price, CVU price, HL price.
std::array<TaskMenu, 6> default_task_menus(double hl_high_b = kDefaultHlHighB);

// Task 1..6 -> design and framing.
DesignKind task_design(int task);
MenuDomain task_domain(int task);

// HL/CVU: number of rows where the agent picks A (ties go to A).
// BINS: the decision with the highest expected utility (ties to the lowest).
int simulate_eut_agent(const TaskMenu& menu, CrraParams params);

}  // namespace mplab
