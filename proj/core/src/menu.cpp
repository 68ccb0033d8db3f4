#include "mplab/menu.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "mplab/error.hpp"

namespace mplab {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

// Payouts realized with positive probability; price outcomes rounded to cents.
std::vector<double> support_payouts(const MenuOption& option) {
    std::vector<double> out;
    std::visit(overloaded{
                   [&](const OutcomeLottery& l) {
                       for (const auto& o : l.outcomes())
                           if (o.probability > 0.0) out.push_back(o.payoff);
                   },
                   [&](const PriceLottery& l) {
                       for (const auto& p : l.prices())
                           if (p.probability > 0.0)
                               out.push_back(round_half_up(
                                   payoff_from_price(p.buy_price, l.endowment(), l.sell_price()), 2));
                   },
               },
               option);
    return out;
}

template <class F>
void for_each_option(const std::vector<MenuRow>& rows, F&& f) {
    for (const auto& row : rows) {
        f(row.option_a);
        if (row.option_b) f(*row.option_b);
    }
}

double option_probability_hi(const MenuOption& option) {
    return std::visit(overloaded{[](const OutcomeLottery& l) { return l[0].probability; },
                                 [](const PriceLottery& l) { return l[0].probability; }},
                      option);
}

template <class F>
double bisect_crossover(F&& f, Bracket bracket) {
    if (!(bracket.lo < bracket.hi)) throw InvalidArgument("empty crossover bracket");
    const int steps = static_cast<int>(std::ceil((bracket.hi - bracket.lo) / 0.1 - 1e-9));
    const double width = (bracket.hi - bracket.lo) / steps;

    std::vector<double> grid(static_cast<std::size_t>(steps) + 1);
    std::vector<double> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        grid[i] = i + 1 == grid.size() ? bracket.hi : bracket.lo + width * static_cast<double>(i);
        values[i] = f(grid[i]);
    }

    int changes = 0;
    std::size_t from = 0, to = 0;
    std::optional<std::size_t> last_nonzero;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (sign_of(values[i]) == 0) continue;
        if (last_nonzero && sign_of(values[*last_nonzero]) != sign_of(values[i])) {
            ++changes;
            from = *last_nonzero;
            to = i;
        }
        last_nonzero = i;
    }
    if (changes == 0) throw NoCrossoverError("options are never indifferent inside the bracket");
    if (changes > 1)
        throw MultipleCrossingsError("options cross " + std::to_string(changes) +
                                     " times inside the bracket");

    // An exact grid zero between the two signed points is the root.
    for (std::size_t i = from + 1; i < to; ++i)
        if (values[i] == 0.0) return grid[i];

    double a = grid[from], b = grid[to];
    double fa = values[from], fb = values[to];
    for (;;) {
        const double m = 0.5 * (a + b);
        if (m <= a || m >= b) break;
        const double fm = f(m);
        if (fm == 0.0) return m;
        if (sign_of(fm) == sign_of(fa)) {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }
    }
    return std::abs(fa) <= std::abs(fb) ? a : b;
}

OutcomeLottery two_outcome(double p_hi, double hi, double lo) {
    return OutcomeLottery::binary(p_hi, hi, lo);
}

}  // namespace

std::string_view to_string(DesignKind kind) {
    switch (kind) {
        case DesignKind::HL: return "HL";
        case DesignKind::CVU: return "CVU";
        case DesignKind::BINS: return "BINS";
    }
    return "?";
}

std::string_view to_string(MenuDomain domain) {
    return domain == MenuDomain::PAYOFF ? "PAYOFF" : "PRICE";
}

DesignKind parse_design_kind(std::string_view text) {
    const auto t = lower(text);
    if (t == "hl") return DesignKind::HL;
    if (t == "cvu") return DesignKind::CVU;
    if (t == "bins") return DesignKind::BINS;
    throw InvalidArgument("unknown design kind '" + std::string(text) + "'");
}

MenuDomain parse_menu_domain(std::string_view text) {
    const auto t = lower(text);
    if (t == "payoff") return MenuDomain::PAYOFF;
    if (t == "price") return MenuDomain::PRICE;
    throw InvalidArgument("unknown menu domain '" + std::string(text) + "'");
}

std::string_view label(RiskCategory category) {
    switch (category) {
        case RiskCategory::HighlyRiskLoving: return "Highly risk-loving";
        case RiskCategory::VeryRiskLoving: return "Very risk-loving";
        case RiskCategory::RiskLoving: return "Risk-loving";
        case RiskCategory::RiskNeutral: return "Risk-neutral";
        case RiskCategory::SlightlyRiskAverse: return "Slightly risk-averse";
        case RiskCategory::RiskAverse: return "Risk-averse";
        case RiskCategory::VeryRiskAverse: return "Very risk-averse";
        case RiskCategory::HighlyRiskAverse: return "Highly risk-averse";
        case RiskCategory::StayInBed: return "Stay in bed (extremely risk-averse)";
    }
    return "?";
}

std::string_view to_string(BroadAttitude attitude) {
    switch (attitude) {
        case BroadAttitude::LOVING: return "LOVING";
        case BroadAttitude::NEUTRAL: return "NEUTRAL";
        case BroadAttitude::AVERSE: return "AVERSE";
    }
    return "?";
}

CrraInterval crra_interval(int index) {
    if (index < 0 || index > 8) throw InvalidArgument("interval index outside 0..8");
    CrraInterval iv;
    if (index > 0) iv.lo = kCrraCutoffs[static_cast<std::size_t>(index - 1)];
    if (index < 8) iv.hi = kCrraCutoffs[static_cast<std::size_t>(index)];
    iv.category = static_cast<RiskCategory>(index);
    return iv;
}

CrraInterval interval_from_response(DesignKind kind, int n) {
    if (kind == DesignKind::BINS) {
        if (n < 1 || n > 10)
            throw InvalidArgument("decision number " + std::to_string(n) + " outside 1..10");
        return crra_interval(std::min(n - 1, 8));
    }
    if (n < 0 || n > 10)
        throw InvalidArgument("safe-choice count " + std::to_string(n) + " outside 0..10");
    return crra_interval(std::clamp(n - 1, 0, 8));
}

double normalized_expected_utility(const MenuOption& option, CrraParams params) {
    return std::visit(
        overloaded{
            [&](const OutcomeLottery& l) { return normalized_expected_utility(l, params); },
            [&](const PriceLottery& l) {
                double eu = 0.0;
                for (const auto& p : l.prices())
                    eu += p.probability *
                          normalized_crra_utility(l.sell_price() * l.endowment() / p.buy_price,
                                                  params);
                return eu;
            },
        },
        option);
}

OutcomeLottery payoff_view(const MenuOption& option) {
    return std::visit(overloaded{[](const OutcomeLottery& l) { return l; },
                                 [](const PriceLottery& l) {
                                     return price_lottery_to_payoff_lottery(l);
                                 }},
                      option);
}

TaskMenu::TaskMenu(DesignKind kind, MenuDomain domain, std::vector<MenuRow> rows)
    : kind_(kind), domain_(domain), rows_(std::move(rows)) {
    if (rows_.size() != 10)
        throw InvalidArgument("menu must have 10 rows, got " + std::to_string(rows_.size()));

    std::optional<std::pair<double, double>> framing;
    auto check_option = [&](const MenuOption& option, int row) {
        const bool is_price = std::holds_alternative<PriceLottery>(option);
        if (is_price != (domain_ == MenuDomain::PRICE))
            throw InvalidArgument("row " + std::to_string(row) + ": option does not match the " +
                                  std::string(to_string(domain_)) + " domain");
        if (is_price) {
            const auto& pl = std::get<PriceLottery>(option);
            const std::pair<double, double> f{pl.endowment(), pl.sell_price()};
            if (framing && *framing != f)
                throw InvalidArgument("row " + std::to_string(row) +
                                      ": endowment or sell price differs from earlier rows");
            framing = f;
        }
    };

    for (std::size_t i = 0; i < rows_.size(); ++i) {
        const auto& row = rows_[i];
        const int n = static_cast<int>(i) + 1;
        if (row.row_index != n)
            throw InvalidArgument("row " + std::to_string(n) + " is numbered " +
                                  std::to_string(row.row_index));
        check_option(row.option_a, n);
        if (kind_ == DesignKind::BINS) {
            if (row.option_b) throw InvalidArgument("BINS rows carry a single lottery");
            continue;
        }
        if (!row.option_b) throw InvalidArgument("row " + std::to_string(n) + " lacks option B");
        check_option(*row.option_b, n);
        if (kind_ == DesignKind::CVU && !payoff_view(row.option_a).degenerate())
            throw InvalidArgument("row " + std::to_string(n) + ": CVU option A must be certain");
        if (kind_ == DesignKind::HL) {
            const double expected = n / 10.0;
            for (const auto* opt : {&row.option_a, &*row.option_b})
                if (std::abs(option_probability_hi(*opt) - expected) > 1e-9)
                    throw InvalidArgument("row " + std::to_string(n) +
                                          ": HL high-outcome probability must be n/10");
        }
    }
}

std::optional<double> TaskMenu::endowment() const {
    if (domain_ != MenuDomain::PRICE) return std::nullopt;
    return std::get<PriceLottery>(rows_.front().option_a).endowment();
}

std::optional<double> TaskMenu::sell_price() const {
    if (domain_ != MenuDomain::PRICE) return std::nullopt;
    return std::get<PriceLottery>(rows_.front().option_a).sell_price();
}

TaskMenu TaskMenu::scaled(double k) const {
    if (!(k > 0.0)) throw DomainError("scale factor must be positive");
    auto scale = [k](const MenuOption& option) -> MenuOption {
        return std::visit(
            overloaded{
                [k](const OutcomeLottery& l) -> MenuOption { return l.scaled(k); },
                [k](const PriceLottery& l) -> MenuOption {
                    return PriceLottery({l.prices().begin(), l.prices().end()},
                                        l.endowment() * k, l.sell_price());
                },
            },
            option);
    };
    std::vector<MenuRow> rows;
    rows.reserve(rows_.size());
    for (const auto& row : rows_) {
        MenuRow out{row.row_index, scale(row.option_a), std::nullopt};
        if (row.option_b) out.option_b = scale(*row.option_b);
        rows.push_back(std::move(out));
    }
    return TaskMenu(kind_, domain_, std::move(rows));
}

double TaskMenu::min_payout() const {
    double best = std::numeric_limits<double>::infinity();
    for_each_option(rows_, [&](const MenuOption& o) {
        for (double x : support_payouts(o)) best = std::min(best, x);
    });
    return best;
}

double TaskMenu::max_payout() const {
    double best = 0.0;
    for_each_option(rows_, [&](const MenuOption& o) {
        for (double x : support_payouts(o)) best = std::max(best, x);
    });
    return best;
}

double crossover_crra(const MenuOption& a, const MenuOption& b, Bracket bracket) {
    return bisect_crossover(
        [&](double r) {
            return normalized_expected_utility(a, {r}) - normalized_expected_utility(b, {r});
        },
        bracket);
}

double crossover_crra(const OutcomeLottery& a, const OutcomeLottery& b, Bracket bracket) {
    return bisect_crossover(
        [&](double r) {
            return normalized_expected_utility(a, {r}) - normalized_expected_utility(b, {r});
        },
        bracket);
}

std::vector<std::optional<double>> row_crossovers(const TaskMenu& menu, Bracket bracket) {
    std::vector<std::optional<double>> out;
    const auto& rows = menu.rows();
    auto solve = [&](const MenuOption& a, const MenuOption& b) -> std::optional<double> {
        try {
            return crossover_crra(a, b, bracket);
        } catch (const NoCrossoverError&) {
            return std::nullopt;
        }
    };
    if (menu.kind() == DesignKind::BINS) {
        for (std::size_t k = 0; k + 1 < rows.size(); ++k)
            out.push_back(solve(rows[k].option_a, rows[k + 1].option_a));
    } else {
        for (const auto& row : rows) out.push_back(solve(row.option_a, *row.option_b));
    }
    return out;
}

std::vector<double> boundaries_from_menu(const TaskMenu& menu, Bracket bracket) {
    const auto crossings = row_crossovers(menu, bracket);
    const std::size_t first = menu.kind() == DesignKind::BINS ? 0 : 1;
    std::vector<double> out;
    for (std::size_t i = first; i < first + kCrraCutoffs.size(); ++i) {
        if (!crossings[i])
            throw CalibrationError("no crossover for boundary " + std::to_string(out.size() + 1));
        out.push_back(*crossings[i]);
    }
    for (std::size_t i = 1; i < out.size(); ++i)
        if (!(out[i] > out[i - 1]))
            throw CalibrationError("crossovers are not strictly increasing at boundary " +
                                   std::to_string(i + 1));
    return out;
}

MenuValidation validate_menu(const TaskMenu& menu, double tolerance) {
    MenuValidation v;
    if (menu.kind() != DesignKind::BINS) {
        const auto& last = menu.rows().back();
        const auto a = support_payouts(last.option_a);
        const auto b = support_payouts(*last.option_b);
        v.last_row_b_dominant = *std::min_element(b.begin(), b.end()) >=
                                *std::max_element(a.begin(), a.end());
    }
    try {
        v.boundaries = boundaries_from_menu(menu);
        v.strictly_increasing = true;
    } catch (const Error& e) {
        v.error = e.what();
        return v;
    }
    for (std::size_t i = 0; i < v.boundaries.size(); ++i) {
        v.deviations.push_back(v.boundaries[i] - kCrraCutoffs[i]);
        v.max_abs_deviation = std::max(v.max_abs_deviation, std::abs(v.deviations.back()));
    }
    v.ok = v.strictly_increasing && v.max_abs_deviation <= tolerance;
    return v;
}

TaskMenu to_price_domain(const TaskMenu& menu, const PriceFraming& framing) {
    if (menu.domain() != MenuDomain::PAYOFF)
        throw InvalidArgument("menu is already in the price domain");
    auto convert = [&](const MenuOption& option) -> MenuOption {
        return payoff_lottery_to_price_lottery(std::get<OutcomeLottery>(option), framing.endowment,
                                               framing.sell_price, framing.rounding);
    };
    std::vector<MenuRow> rows;
    for (const auto& row : menu.rows()) {
        MenuRow out{row.row_index, convert(row.option_a), std::nullopt};
        if (row.option_b) out.option_b = convert(*row.option_b);
        rows.push_back(std::move(out));
    }
    return TaskMenu(menu.kind(), MenuDomain::PRICE, std::move(rows));
}

TaskMenu to_payoff_domain(const TaskMenu& menu) {
    if (menu.domain() != MenuDomain::PRICE) return menu;
    std::vector<MenuRow> rows;
    for (const auto& row : menu.rows()) {
        MenuRow out{row.row_index, payoff_view(row.option_a), std::nullopt};
        if (row.option_b) out.option_b = payoff_view(*row.option_b);
        rows.push_back(std::move(out));
    }
    return TaskMenu(menu.kind(), MenuDomain::PAYOFF, std::move(rows));
}

PriceFraming default_price_framing(DesignKind kind) {
    PriceFraming f;
    switch (kind) {
        case DesignKind::HL: f.rounding = MoneyRounding{2, 2}; break;
        case DesignKind::CVU: f.rounding = MoneyRounding{2, 3}; break;
        case DesignKind::BINS: f.rounding = MoneyRounding{2, 4}; break;
    }
    return f;
}

TaskMenu hl_menu(double high_b, MenuDomain domain) {
    if (!(high_b > 12.0)) throw InvalidArgument("HL high payoff of option B must exceed 12.00");
    std::vector<MenuRow> rows;
    for (int n = 1; n <= 10; ++n) {
        const double p = n / 10.0;
        rows.push_back({n, two_outcome(p, 12.00, 9.60), MenuOption{two_outcome(p, high_b, 0.60)}});
    }
    TaskMenu menu(DesignKind::HL, MenuDomain::PAYOFF, std::move(rows));
    if (domain == MenuDomain::PRICE) return to_price_domain(menu, default_price_framing(DesignKind::HL));
    return menu;
}

CvuSchedule default_cvu_schedule() {
    return {{14.43, 14.10, 12.83, 11.62, 10.34, 9.10, 7.78, 6.45, 4.98, 4.00},
            OutcomeLottery::binary(0.5, 20.00, 2.00)};
}

CvuSchedule cvu_schedule_from_cutoffs(const OutcomeLottery& lottery_b, double first_row,
                                      double last_row) {
    std::vector<double> certain{first_row};
    for (double c : kCrraCutoffs)
        certain.push_back(round_half_up(certainty_equivalent(lottery_b, {c}), 2));
    certain.push_back(last_row);
    return {std::move(certain), lottery_b};
}

TaskMenu cvu_menu(const CvuSchedule& schedule, MenuDomain domain) {
    const auto& c = schedule.certain;
    if (c.size() != 10)
        throw CalibrationError("CVU schedule needs 10 certain amounts, got " +
                               std::to_string(c.size()));
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (!(c[i] > 0.0)) throw CalibrationError("CVU certain amounts must be positive");
        if (i > 0 && !(c[i] < c[i - 1]))
            throw CalibrationError("CVU certain amounts must be strictly decreasing (row " +
                                   std::to_string(i + 1) + ")");
    }
    std::vector<MenuRow> rows;
    for (int n = 1; n <= 10; ++n)
        rows.push_back({n, OutcomeLottery::certain(c[static_cast<std::size_t>(n - 1)]),
                        MenuOption{schedule.lottery_b}});
    TaskMenu menu(DesignKind::CVU, MenuDomain::PAYOFF, std::move(rows));
    if (domain == MenuDomain::PRICE)
        return to_price_domain(menu, default_price_framing(DesignKind::CVU));
    return menu;
}

BinsSchedule default_bins_schedule() {
    BinsSchedule s;
    s.low = {0.60, 1.53, 2.55, 3.60, 4.66, 5.75, 6.85, 7.95, 9.07, 10.20};
    return s;
}

std::vector<double> solve_bins_highs(const BinsSchedule& schedule) {
    const auto& low = schedule.low;
    if (low.size() != 10)
        throw CalibrationError("BINS schedule needs 10 low payoffs, got " +
                               std::to_string(low.size()));
    for (std::size_t i = 0; i < low.size(); ++i) {
        if (!(low[i] > 0.0)) throw CalibrationError("BINS low payoffs must be positive");
        if (i > 0 && !(low[i] > low[i - 1]))
            throw CalibrationError("BINS low payoffs must be strictly increasing (decision " +
                                   std::to_string(i + 1) + ")");
    }
    if (!(schedule.terminal_r > kCrraCutoffs.back()))
        throw CalibrationError("terminal indifference point must exceed the last cutoff");
    if (!(schedule.anchor_high > low[0]))
        throw CalibrationError("anchor high must exceed the first low payoff");

    std::vector<double> high{schedule.anchor_high};
    for (std::size_t k = 0; k + 1 < low.size(); ++k) {
        const CrraParams r{k < kCrraCutoffs.size() ? kCrraCutoffs[k] : schedule.terminal_r};
        // 0.5 u(H_k) + 0.5 u(L_k) = 0.5 u(H_k+1) + 0.5 u(L_k+1) at the cutoff.
        const double target = normalized_crra_utility(high[k], r) +
                              normalized_crra_utility(low[k], r) -
                              normalized_crra_utility(low[k + 1], r);
        double h;
        try {
            h = inverse_normalized_crra_utility(target, r);
        } catch (const DomainError&) {
            throw CalibrationError("no positive high payoff for decision " +
                                   std::to_string(k + 2) + "; schedule infeasible");
        }
        if (schedule.money_decimals) h = round_half_up(h, *schedule.money_decimals);
        if (!(h > low[k + 1]))
            throw CalibrationError("solved high payoff of decision " + std::to_string(k + 2) +
                                   " does not exceed its low payoff");
        if (!(h - low[k + 1] < high[k] - low[k]))
            throw CalibrationError("payoff spread does not shrink at decision " +
                                   std::to_string(k + 2));
        high.push_back(h);
    }
    return high;
}

TaskMenu bins_menu(const BinsSchedule& schedule, MenuDomain domain) {
    const auto high = solve_bins_highs(schedule);
    std::vector<MenuRow> rows;
    for (std::size_t k = 0; k < high.size(); ++k)
        rows.push_back({static_cast<int>(k) + 1, two_outcome(0.5, high[k], schedule.low[k]),
                        std::nullopt});
    TaskMenu menu(DesignKind::BINS, MenuDomain::PAYOFF, std::move(rows));
    if (domain == MenuDomain::PRICE)
        return to_price_domain(menu, default_price_framing(DesignKind::BINS));
    return menu;
}

std::array<TaskMenu, 6> default_task_menus(double hl_high_b) {
    const auto cvu = default_cvu_schedule();
    const auto bins = default_bins_schedule();
    return {hl_menu(hl_high_b, MenuDomain::PAYOFF), cvu_menu(cvu, MenuDomain::PAYOFF),
            bins_menu(bins, MenuDomain::PAYOFF),    bins_menu(bins, MenuDomain::PRICE),
            cvu_menu(cvu, MenuDomain::PRICE),       hl_menu(hl_high_b, MenuDomain::PRICE)};
}

DesignKind task_design(int task) {
    switch (task) {
        case 1: case 6: return DesignKind::HL;
        case 2: case 5: return DesignKind::CVU;
        case 3: case 4: return DesignKind::BINS;
    }
    throw InvalidArgument("task number " + std::to_string(task) + " outside 1..6");
}

MenuDomain task_domain(int task) {
    if (task < 1 || task > 6)
        throw InvalidArgument("task number " + std::to_string(task) + " outside 1..6");
    return task <= 3 ? MenuDomain::PAYOFF : MenuDomain::PRICE;
}

int simulate_eut_agent(const TaskMenu& menu, CrraParams params) {
    const auto& rows = menu.rows();
    if (menu.kind() == DesignKind::BINS) {
        int best = 1;
        double best_eu = normalized_expected_utility(rows[0].option_a, params);
        for (std::size_t k = 1; k < rows.size(); ++k) {
            const double eu = normalized_expected_utility(rows[k].option_a, params);
            if (eu > best_eu) {
                best_eu = eu;
                best = static_cast<int>(k) + 1;
            }
        }
        return best;
    }
    int safe = 0;
    for (const auto& row : rows)
        if (normalized_expected_utility(row.option_a, params) >=
            normalized_expected_utility(*row.option_b, params))
            ++safe;
    return safe;
}

}  // namespace mplab
