#include "mplab/utility.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mplab/error.hpp"

namespace mplab {

namespace {

constexpr double kProbabilitySumTolerance = 1e-12;

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw DomainError(std::string(what) + " must be a finite positive number, got " +
                          std::to_string(v));
}

void check_probability(double p) {
    if (!(p >= 0.0 && p <= 1.0))
        throw InvalidArgument("probability outside [0, 1]: " + std::to_string(p));
}

void check_sum(double total) {
    if (std::abs(total - 1.0) > kProbabilitySumTolerance)
        throw InvalidArgument("probabilities sum to " + std::to_string(total) + ", not 1");
}

double pow10(int decimals) { return std::pow(10.0, decimals); }

}  // namespace

OutcomeLottery::OutcomeLottery(std::vector<Outcome> outcomes) : outcomes_(std::move(outcomes)) {
    if (outcomes_.empty()) throw InvalidArgument("lottery has no outcomes");
    double total = 0.0;
    for (const auto& o : outcomes_) {
        check_probability(o.probability);
        if (!(o.payoff > 0.0) || !std::isfinite(o.payoff))
            throw InvalidArgument("lottery payoff must be strictly positive, got " +
                                  std::to_string(o.payoff));
        total += o.probability;
    }
    check_sum(total);
}

OutcomeLottery OutcomeLottery::certain(double payoff) { return OutcomeLottery({{1.0, payoff}}); }

OutcomeLottery OutcomeLottery::binary(double p_hi, double hi, double lo) {
    return OutcomeLottery({{p_hi, hi}, {1.0 - p_hi, lo}});
}

bool OutcomeLottery::degenerate() const noexcept {
    const Outcome* seen = nullptr;
    for (const auto& o : outcomes_) {
        if (o.probability == 0.0) continue;
        if (seen && seen->payoff != o.payoff) return false;
        seen = &o;
    }
    return true;
}

double OutcomeLottery::min_payoff() const noexcept {
    return std::min_element(outcomes_.begin(), outcomes_.end(),
                            [](const Outcome& a, const Outcome& b) { return a.payoff < b.payoff; })
        ->payoff;
}

double OutcomeLottery::max_payoff() const noexcept {
    return std::max_element(outcomes_.begin(), outcomes_.end(),
                            [](const Outcome& a, const Outcome& b) { return a.payoff < b.payoff; })
        ->payoff;
}

OutcomeLottery OutcomeLottery::scaled(double k) const {
    require_positive(k, "scale factor");
    auto copy = outcomes_;
    for (auto& o : copy) o.payoff *= k;
    return OutcomeLottery(std::move(copy));
}

PriceLottery::PriceLottery(std::vector<PricedOutcome> prices, double endowment, double sell_price)
    : prices_(std::move(prices)), endowment_(endowment), sell_price_(sell_price) {
    if (prices_.empty()) throw InvalidArgument("price lottery has no outcomes");
    if (!(endowment_ > 0.0)) throw InvalidArgument("endowment must be positive");
    if (!(sell_price_ > 0.0)) throw InvalidArgument("sell price must be positive");
    double total = 0.0;
    for (const auto& p : prices_) {
        check_probability(p.probability);
        if (!(p.buy_price > 0.0) || !std::isfinite(p.buy_price))
            throw InvalidArgument("buy price must be strictly positive, got " +
                                  std::to_string(p.buy_price));
        total += p.probability;
    }
    check_sum(total);
}

PriceLottery PriceLottery::certain(double buy_price, double endowment, double sell_price) {
    return PriceLottery({{1.0, buy_price}}, endowment, sell_price);
}

PriceLottery PriceLottery::binary(double p_first, double first_price, double second_price,
                                  double endowment, double sell_price) {
    return PriceLottery({{p_first, first_price}, {1.0 - p_first, second_price}}, endowment,
                        sell_price);
}

double round_half_up(double value, int decimals) {
    if (decimals < 0) throw InvalidArgument("negative decimal count");
    const double scale = pow10(decimals);
    // The 1e-9 nudge absorbs representation error (2.675 is stored as 2.67499999...).
    const double rounded = std::floor(std::abs(value) * scale + 0.5 + 1e-9) / scale;
    return std::copysign(rounded, value);
}

double crra_utility(double x, CrraParams params) {
    require_positive(x, "payoff");
    if (params.r == 1.0) return std::log(x);
    const double e = 1.0 - params.r;
    return std::pow(x, e) / e;
}

double normalized_crra_utility(double x, CrraParams params) {
    require_positive(x, "payoff");
    const double lx = std::log(x);
    const double e = 1.0 - params.r;
    if (e == 0.0) return lx;
    return std::expm1(e * lx) / e;
}

double inverse_normalized_crra_utility(double value, CrraParams params) {
    const double e = 1.0 - params.r;
    if (e == 0.0) return std::exp(value);
    const double arg = e * value;
    if (!(arg > -1.0)) throw DomainError("utility value outside the range of the CRRA function");
    return std::exp(std::log1p(arg) / e);
}

double expected_value(const OutcomeLottery& lottery) {
    double ev = 0.0;
    for (const auto& o : lottery.outcomes()) ev += o.probability * o.payoff;
    return ev;
}

double expected_utility(const OutcomeLottery& lottery, CrraParams params) {
    double eu = 0.0;
    for (const auto& o : lottery.outcomes()) eu += o.probability * crra_utility(o.payoff, params);
    return eu;
}

double normalized_expected_utility(const OutcomeLottery& lottery, CrraParams params) {
    double eu = 0.0;
    for (const auto& o : lottery.outcomes())
        eu += o.probability * normalized_crra_utility(o.payoff, params);
    return eu;
}

double certainty_equivalent(const OutcomeLottery& lottery, CrraParams params) {
    if (lottery.degenerate()) {
        for (const auto& o : lottery.outcomes())
            if (o.probability > 0.0) return o.payoff;
    }
    const double ce =
        inverse_normalized_crra_utility(normalized_expected_utility(lottery, params), params);
    // Rounding can push the inversion a hair outside the payoff range.
    return std::clamp(ce, lottery.min_payoff(), lottery.max_payoff());
}

double risk_premium(const OutcomeLottery& lottery, CrraParams params) {
    if (lottery.degenerate()) return 0.0;
    return expected_value(lottery) - certainty_equivalent(lottery, params);
}

double marshallian_demand(double price, double endowment, std::optional<MoneyRounding> rounding) {
    require_positive(price, "price");
    require_positive(endowment, "endowment");
    const double q = endowment / price;
    return rounding ? round_half_up(q, rounding->quantity_decimals) : q;
}

double payoff_from_price(double price, double endowment, double sell_price,
                         std::optional<MoneyRounding> rounding) {
    require_positive(sell_price, "sell price");
    const double q = marshallian_demand(price, endowment, rounding);
    const double x = q * sell_price;
    return rounding ? round_half_up(x, rounding->money_decimals) : x;
}

double price_from_payoff(double payoff, double endowment, double sell_price,
                         std::optional<MoneyRounding> rounding) {
    require_positive(payoff, "payoff");
    require_positive(endowment, "endowment");
    require_positive(sell_price, "sell price");
    const double p = sell_price * endowment / payoff;
    return rounding ? round_half_up(p, rounding->money_decimals) : p;
}

double indirect_utility(double price, double endowment, double sell_price, CrraParams params) {
    return crra_utility(payoff_from_price(price, endowment, sell_price), params);
}

double expected_utility(const PriceLottery& lottery, CrraParams params) {
    double eu = 0.0;
    for (const auto& p : lottery.prices())
        eu += p.probability *
              indirect_utility(p.buy_price, lottery.endowment(), lottery.sell_price(), params);
    return eu;
}

OutcomeLottery price_lottery_to_payoff_lottery(const PriceLottery& lottery,
                                               std::optional<MoneyRounding> rounding) {
    std::vector<Outcome> out;
    out.reserve(lottery.size());
    for (const auto& p : lottery.prices())
        out.push_back({p.probability, payoff_from_price(p.buy_price, lottery.endowment(),
                                                        lottery.sell_price(), rounding)});
    return OutcomeLottery(std::move(out));
}

PriceLottery payoff_lottery_to_price_lottery(const OutcomeLottery& lottery, double endowment,
                                             double sell_price,
                                             std::optional<MoneyRounding> rounding) {
    std::vector<PricedOutcome> out;
    out.reserve(lottery.size());
    for (const auto& o : lottery.outcomes())
        out.push_back({o.probability, price_from_payoff(o.payoff, endowment, sell_price, rounding)});
    return PriceLottery(std::move(out), endowment, sell_price);
}

double roy_identity_residual(double price, double endowment, double sell_price, CrraParams params,
                             double step) {
    require_positive(price, "price");
    require_positive(endowment, "endowment");
    require_positive(sell_price, "sell price");
    if (!(step > 0.0) || !(step < price) || !(step < endowment) || !std::isfinite(step))
        throw DomainError("finite-difference step must lie in (0, min(P, M))");

    auto v = [&](double p, double m) {
        return normalized_crra_utility(sell_price * m / p, params);
    };
    const double v_p = (v(price + step, endowment) - v(price - step, endowment)) / (2.0 * step);
    const double v_m = (v(price, endowment + step) - v(price, endowment - step)) / (2.0 * step);
    if (v_m == 0.0) throw DomainError("degenerate step: zero budget derivative");
    const double q = endowment / price;
    return std::abs(-v_p / v_m - q) / q;
}

}  // namespace mplab
