#pragma once

// Expected-utility and single-good duality mathematics for CRRA agents.
//
// Payoffs are USD amounts; prices are USD per widget. A price lottery is turned
// into a payoff lottery by spending the endowment M on widgets at the realized
// buy price P (Marshallian demand q = M / P) and selling them back at the sure
// price s, so the final payoff is s * M / P.

#include <optional>
#include <span>
#include <vector>

namespace mplab {

// Coefficient of relative risk aversion. r = 1 selects the logarithmic branch.
struct CrraParams {
    double r = 0.0;
};

struct Outcome {
    double probability = 0.0;
    double payoff = 0.0;  // USD, strictly positive

    friend bool operator==(const Outcome&, const Outcome&) = default;
};

// Probability-weighted monetary payoffs. Construction validates that the list
// is non-empty, probabilities lie in [0, 1] and sum to 1 within 1e-12, and all
// payoffs are strictly positive.
class OutcomeLottery {
public:
    explicit OutcomeLottery(std::vector<Outcome> outcomes);

    static OutcomeLottery certain(double payoff);
    // Two-outcome lottery: `hi` with probability p_hi, `lo` otherwise.
    static OutcomeLottery binary(double p_hi, double hi, double lo);

    std::span<const Outcome> outcomes() const noexcept { return outcomes_; }
    std::size_t size() const noexcept { return outcomes_.size(); }
    const Outcome& operator[](std::size_t i) const { return outcomes_[i]; }

    // True when a single payoff carries all the probability mass.
    bool degenerate() const noexcept;
    double min_payoff() const noexcept;
    double max_payoff() const noexcept;

    // Every payoff multiplied by k > 0.
    OutcomeLottery scaled(double k) const;

    friend bool operator==(const OutcomeLottery&, const OutcomeLottery&) = default;

private:
    std::vector<Outcome> outcomes_;
};

struct PricedOutcome {
    double probability = 0.0;
    double buy_price = 0.0;  // USD per widget, strictly positive

    friend bool operator==(const PricedOutcome&, const PricedOutcome&) = default;
};

// Uncertain buy price for widgets bought with `endowment` and sold at `sell_price`.
class PriceLottery {
public:
    PriceLottery(std::vector<PricedOutcome> prices, double endowment, double sell_price);

    static PriceLottery certain(double buy_price, double endowment, double sell_price);
    static PriceLottery binary(double p_first, double first_price, double second_price,
                               double endowment, double sell_price);

    std::span<const PricedOutcome> prices() const noexcept { return prices_; }
    std::size_t size() const noexcept { return prices_.size(); }
    const PricedOutcome& operator[](std::size_t i) const { return prices_[i]; }
    double endowment() const noexcept { return endowment_; }
    double sell_price() const noexcept { return sell_price_; }

    friend bool operator==(const PriceLottery&, const PriceLottery&) = default;

private:
    std::vector<PricedOutcome> prices_;
    double endowment_;
    double sell_price_;
};

// Decimal places applied when quantities (widgets) and money (USD) are
// rounded at menu-construction boundaries. All internal math is unrounded.
struct MoneyRounding {
    int quantity_decimals = 2;
    int money_decimals = 2;

    // Widgets to one decimal, money to cents. With M = 15 and s = 1 this maps
    // prices 1.56 / 0.65 to payoffs 9.60 / 23.10.
    static constexpr MoneyRounding widget_tenths() { return {1, 2}; }
};

// Rounds half away from zero to `decimals` places, tolerant of binary
// representation error (2.675 rounds to 2.68).
double round_half_up(double value, int decimals);

// u(x) = x^(1-r) / (1-r), or ln x at r = 1. Throws DomainError for x <= 0.
double crra_utility(double x, CrraParams params);

// Affine-equivalent form (x^(1-r) - 1) / (1-r), continuous through r = 1.
// Used wherever r varies (root finding, numerical differentiation).
double normalized_crra_utility(double x, CrraParams params);

// Inverse of normalized_crra_utility. Throws DomainError outside the range.
double inverse_normalized_crra_utility(double value, CrraParams params);

double expected_value(const OutcomeLottery& lottery);
double expected_utility(const OutcomeLottery& lottery, CrraParams params);
double normalized_expected_utility(const OutcomeLottery& lottery, CrraParams params);

// Sure amount x with u(x) = EU(lottery), by closed-form inversion.
double certainty_equivalent(const OutcomeLottery& lottery, CrraParams params);

// EV - CE.
double risk_premium(const OutcomeLottery& lottery, CrraParams params);

// q = M / P, optionally rounded to `rounding->quantity_decimals`.
double marshallian_demand(double price, double endowment,
                          std::optional<MoneyRounding> rounding = std::nullopt);

// Final payoff s * M / P of buying at `price` and selling at `sell_price`,
// optionally rounded (quantity first, then money).
double payoff_from_price(double price, double endowment, double sell_price,
                         std::optional<MoneyRounding> rounding = std::nullopt);

// Buy price P = s * M / x that yields payoff x, optionally rounded to money decimals.
double price_from_payoff(double payoff, double endowment, double sell_price,
                         std::optional<MoneyRounding> rounding = std::nullopt);

// V(P, M) = u(s * M / P): utility of the best affordable bundle at price P.
double indirect_utility(double price, double endowment, double sell_price, CrraParams params);

// Expected indirect utility of a price lottery, sum of p_i * V(P_i, M).
double expected_utility(const PriceLottery& lottery, CrraParams params);

// Maps each (p, P) to (p, s * M / P), preserving order. With a rounding policy
// the widget quantity and the payoff are rounded in that order.
OutcomeLottery price_lottery_to_payoff_lottery(const PriceLottery& lottery,
                                               std::optional<MoneyRounding> rounding = std::nullopt);

// Inverse of price_lottery_to_payoff_lottery: each payoff x becomes P = s * M / x.
PriceLottery payoff_lottery_to_price_lottery(const OutcomeLottery& lottery, double endowment,
                                             double sell_price,
                                             std::optional<MoneyRounding> rounding = std::nullopt);

// Relative error |(-V_P / V_M) - M/P| / (M/P) with V differentiated by central
// differences of step h. Throws DomainError when h is not in (0, min(P, M)).
double roy_identity_residual(double price, double endowment, double sell_price,
                             CrraParams params, double step);

}  // namespace mplab
