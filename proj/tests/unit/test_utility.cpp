#include <gtest/gtest.h>

#include <cmath>

#include "mplab/error.hpp"
#include "mplab/utility.hpp"

using namespace mplab;

TEST(CrraUtility, HandValues) {
    EXPECT_DOUBLE_EQ(crra_utility(1.0, {0.0}), 1.0);
    EXPECT_DOUBLE_EQ(crra_utility(4.0, {0.5}), 4.0);  // 4^0.5 / 0.5
    EXPECT_NEAR(crra_utility(std::exp(1.0), {1.0}), 1.0, 1e-15);
    EXPECT_THROW(crra_utility(0.0, {0.5}), DomainError);
    EXPECT_THROW(crra_utility(-1.0, {0.5}), DomainError);
}

TEST(CrraUtility, NormalizedFormIsContinuousAtLog) {
    for (double x : {0.3, 1.0, 2.5, 23.1}) {
        const double at_one = normalized_crra_utility(x, {1.0});
        EXPECT_NEAR(at_one, std::log(x), 1e-15);
        EXPECT_NEAR(normalized_crra_utility(x, {1.0 - 1e-9}), at_one, 1e-7);
        EXPECT_NEAR(normalized_crra_utility(x, {1.0 + 1e-9}), at_one, 1e-7);
    }
}

TEST(CrraUtility, InverseRoundTrip) {
    for (double r : {-0.9, -0.2, 0.0, 0.5, 1.0, 1.3, 2.5})
        for (double x : {0.6, 1.0, 9.6, 23.1}) {
            const double v = normalized_crra_utility(x, {r});
            EXPECT_NEAR(inverse_normalized_crra_utility(v, {r}), x, 1e-12 * x) << r << " " << x;
        }
}

TEST(CrraUtility, ArrowPrattMeasureEqualsR) {
    // -x u''(x) / u'(x) by central differences of the normalized utility.
    for (double r : {-0.9, -0.3, 0.0, 0.4, 1.0, 1.3})
        for (double x : {0.8, 3.0, 12.0, 20.0}) {
            const double h = 1e-4 * x;
            auto u = [&](double t) { return normalized_crra_utility(t, {r}); };
            const double d1 = (u(x + h) - u(x - h)) / (2 * h);
            const double d2 = (u(x + h) - 2 * u(x) + u(x - h)) / (h * h);
            const double measure = -x * d2 / d1;
            EXPECT_NEAR(measure, r, 1e-6 * std::max(1.0, std::abs(r))) << r << " " << x;
        }
}

TEST(Lottery, ValidatesConstruction) {
    EXPECT_THROW(OutcomeLottery({}), InvalidArgument);
    EXPECT_THROW(OutcomeLottery({{0.5, 1.0}, {0.4, 2.0}}), InvalidArgument);
    EXPECT_THROW(OutcomeLottery({{1.0, 0.0}}), InvalidArgument);
    EXPECT_THROW(OutcomeLottery({{1.2, 1.0}, {-0.2, 2.0}}), InvalidArgument);
    EXPECT_NO_THROW(OutcomeLottery({{0.1, 12.0}, {0.9, 9.6}}));
}

TEST(Lottery, ExpectedValueAndUtility) {
    const auto a1 = OutcomeLottery::binary(0.1, 12.00, 9.60);
    const auto b1 = OutcomeLottery::binary(0.1, 23.10, 0.60);
    EXPECT_NEAR(expected_value(a1), 9.84, 1e-12);
    EXPECT_NEAR(expected_value(a1) - expected_value(b1), 6.99, 1e-12);
    EXPECT_DOUBLE_EQ(expected_value(OutcomeLottery::certain(7.0)), 7.0);

    const auto l = OutcomeLottery::binary(0.5, 16.0, 4.0);
    EXPECT_NEAR(expected_utility(l, {0.0}), expected_value(l), 1e-12);
    EXPECT_NEAR(expected_utility(l, {0.5}), 6.0, 1e-12);  // 0.5*4 + 0.5*8
    EXPECT_NEAR(expected_utility(OutcomeLottery::certain(3.0), {0.7}), crra_utility(3.0, {0.7}), 1e-12);
}

TEST(Lottery, CertaintyEquivalentAndPremium) {
    const auto l = OutcomeLottery::binary(0.5, 16.0, 4.0);
    EXPECT_NEAR(certainty_equivalent(l, {0.5}), 9.0, 1e-12);  // (0.5*2 + 0.5*4)^2
    EXPECT_NEAR(risk_premium(l, {0.5}), 1.0, 1e-12);
    EXPECT_NEAR(certainty_equivalent(l, {0.0}), 10.0, 1e-12);
    EXPECT_NEAR(risk_premium(l, {0.0}), 0.0, 1e-12);
    EXPECT_DOUBLE_EQ(risk_premium(OutcomeLottery::certain(5.0), {2.0}), 0.0);
    EXPECT_DOUBLE_EQ(certainty_equivalent(OutcomeLottery::certain(5.0), {-1.0}), 5.0);
    // Log utility: CE is the geometric mean.
    EXPECT_NEAR(certainty_equivalent(l, {1.0}), 8.0, 1e-12);
}

TEST(Lottery, JensenDirection) {
    for (double r : {0.1, 0.5, 1.0, 1.5}) {
        const auto l = OutcomeLottery::binary(0.3, 20.0, 2.0);
        EXPECT_LT(certainty_equivalent(l, {r}), expected_value(l));
        EXPECT_GT(risk_premium(l, {r}), 0.0);
    }
    EXPECT_GT(certainty_equivalent(OutcomeLottery::binary(0.3, 20.0, 2.0), {-0.5}),
              expected_value(OutcomeLottery::binary(0.3, 20.0, 2.0)));
}

TEST(Lottery, CertaintyEquivalentIsScaleHomogeneous) {
    const auto l = OutcomeLottery({{0.2, 23.1}, {0.5, 9.6}, {0.3, 0.6}});
    for (double r : {-0.9, -0.3, 0.0, 0.5, 1.0, 1.3})
        for (double k : {0.1, 6.0, 100.0}) {
            const double ce = certainty_equivalent(l, {r});
            EXPECT_NEAR(certainty_equivalent(l.scaled(k), {r}), k * ce, 1e-9 * k * ce) << r << " " << k;
        }
}

TEST(Rounding, HalfUpToleratesBinaryError) {
    EXPECT_DOUBLE_EQ(round_half_up(2.675, 2), 2.68);
    EXPECT_DOUBLE_EQ(round_half_up(9.615, 1), 9.6);
    EXPECT_DOUBLE_EQ(round_half_up(23.0769, 1), 23.1);
    EXPECT_DOUBLE_EQ(round_half_up(-1.005, 2), -1.01);
    EXPECT_DOUBLE_EQ(round_half_up(0.5, 0), 1.0);
}

TEST(Duality, MarshallianDemand) {
    EXPECT_DOUBLE_EQ(marshallian_demand(1.25, 15.0), 12.0);
    EXPECT_DOUBLE_EQ(marshallian_demand(25.0, 15.0), 0.6);
    EXPECT_DOUBLE_EQ(marshallian_demand(15.0, 15.0), 1.0);
    EXPECT_THROW(marshallian_demand(0.0, 15.0), DomainError);
}

TEST(Duality, PriceAndPayoffConversions) {
    EXPECT_DOUBLE_EQ(payoff_from_price(25.00, 15.0, 1.0), 0.6);
    EXPECT_NEAR(payoff_from_price(0.65, 15.0, 1.0), 15.0 / 0.65, 1e-12);
    EXPECT_DOUBLE_EQ(price_from_payoff(12.00, 15.0, 1.0), 1.25);
    EXPECT_DOUBLE_EQ(price_from_payoff(0.60, 15.0, 1.0), 25.0);
    // 15 / 1.56 = 9.615... widgets -> 9.6 widgets -> USD 9.60 with tenths.
    EXPECT_DOUBLE_EQ(payoff_from_price(1.56, 15.0, 1.0, MoneyRounding::widget_tenths()), 9.60);
    EXPECT_DOUBLE_EQ(payoff_from_price(0.65, 15.0, 1.0, MoneyRounding::widget_tenths()), 23.10);
    for (double x : {0.6, 4.0, 9.6, 12.0, 23.1})
        EXPECT_NEAR(payoff_from_price(price_from_payoff(x, 15, 1), 15, 1), x, 1e-12);
}

TEST(Duality, PriceLotteryConvertsToPayoffLottery) {
    const auto pl = PriceLottery::binary(0.1, 1.25, 1.56, 15.0, 1.0);
    const auto unrounded = price_lottery_to_payoff_lottery(pl);
    EXPECT_DOUBLE_EQ(unrounded[0].payoff, 12.0);
    EXPECT_NEAR(unrounded[1].payoff, 15.0 / 1.56, 1e-12);
    const auto rounded = price_lottery_to_payoff_lottery(pl, MoneyRounding::widget_tenths());
    EXPECT_DOUBLE_EQ(rounded[1].payoff, 9.60);
    EXPECT_DOUBLE_EQ(rounded[1].probability, 0.9);
}

TEST(Duality, IndirectUtilityMonotone) {
    for (double r : {-0.5, 0.0, 0.5, 1.2}) {
        for (double p = 0.5; p < 25; p += 1.7) {
            EXPECT_GT(indirect_utility(p, 15, 1, {r}), indirect_utility(p + 0.3, 15, 1, {r}));
            EXPECT_LT(indirect_utility(p, 15, 1, {r}), indirect_utility(p, 16, 1, {r}));
        }
    }
    EXPECT_NEAR(indirect_utility(1.25, 15, 1, {0.0}), 12.0, 1e-12);
}

TEST(Duality, PriceLotteryUtilityMatchesPayoffLottery) {
    for (double r : {-0.9, -0.15, 0.0, 0.41, 1.0, 1.3}) {
        const auto pl = PriceLottery({{0.2, 0.65}, {0.3, 1.25}, {0.5, 25.0}}, 15.0, 1.0);
        const auto ol = price_lottery_to_payoff_lottery(pl);
        EXPECT_NEAR(expected_utility(pl, {r}), expected_utility(ol, {r}), 1e-12 * std::max(1.0, std::abs(expected_utility(ol, {r}))));
        const auto back = payoff_lottery_to_price_lottery(ol, 15.0, 1.0);
        for (std::size_t i = 0; i < pl.size(); ++i) EXPECT_NEAR(back[i].buy_price, pl[i].buy_price, 1e-12);
    }
}

TEST(Duality, RoyIdentityResidual) {
    EXPECT_LT(roy_identity_residual(1.25, 15, 1, {0.5}, 1e-5), 1e-6);
    EXPECT_LT(roy_identity_residual(1.25, 15, 1, {0.0}, 1e-5), 1e-8);
    for (double p = 0.5; p <= 25.0; p += 2.45)
        for (double m = 5; m <= 30; m += 5)
            for (double r = -0.9; r <= 1.3 + 1e-9; r += 0.2)
                EXPECT_LT(roy_identity_residual(p, m, 1, {r}, 1e-4 * std::min(p, m)), 1e-6) << p << " " << m << " " << r;
    EXPECT_THROW(roy_identity_residual(1.25, 15, 1, {0.5}, 0.0), DomainError);
    EXPECT_THROW(roy_identity_residual(1.25, 15, 1, {0.5}, 2.0), DomainError);
}

TEST(Duality, RoyResidualShrinksQuadratically) {
    const double e1 = roy_identity_residual(2.0, 15, 1, {1.3}, 0.1);
    const double e2 = roy_identity_residual(2.0, 15, 1, {1.3}, 0.05);
    EXPECT_GT(e1, 0.0);
    EXPECT_NEAR(e1 / e2, 4.0, 0.2);
}
