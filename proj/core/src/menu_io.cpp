#include "mplab/menu_io.hpp"

#include <map>
#include <sstream>

#include "mplab/error.hpp"
#include "mplab/text_io.hpp"

namespace mplab {

namespace {

const char* const kPayoffHeader = "row_index,prob_a_hi,a_hi,a_lo,prob_b_hi,b_hi,b_lo";
const char* const kPriceHeader =
    "row_index,prob_a_hi,a_hi_price,a_lo_price,prob_b_hi,b_hi_price,b_lo_price";

struct Columns {
    double prob = 0.0;
    double hi = 0.0;
    double lo = 0.0;
};

Columns columns_of(const MenuOption& option) {
    if (const auto* l = std::get_if<OutcomeLottery>(&option)) {
        if (l->size() == 1) return {1.0, (*l)[0].payoff, (*l)[0].payoff};
        if (l->size() != 2) throw InvalidArgument("menu files hold two-outcome options only");
        return {(*l)[0].probability, (*l)[0].payoff, (*l)[1].payoff};
    }
    const auto& p = std::get<PriceLottery>(option);
    if (p.size() == 1) return {1.0, p[0].buy_price, p[0].buy_price};
    if (p.size() != 2) throw InvalidArgument("menu files hold two-outcome options only");
    return {p[0].probability, p[0].buy_price, p[1].buy_price};
}

MenuOption option_of(const Columns& c, MenuDomain domain, double endowment, double sell_price) {
    const bool certain = c.prob == 1.0 && c.hi == c.lo;
    if (domain == MenuDomain::PAYOFF)
        return certain ? OutcomeLottery::certain(c.hi) : OutcomeLottery::binary(c.prob, c.hi, c.lo);
    return certain ? PriceLottery::certain(c.hi, endowment, sell_price)
                   : PriceLottery::binary(c.prob, c.hi, c.lo, endowment, sell_price);
}

// key=value lines up to (not including) the first line that satisfies `stop`.
struct KeyValues {
    std::map<std::string, std::pair<std::string, std::size_t>> values;  // value, line
    std::size_t next_line = 0;                                          // 0-based index

    const std::string* find(const std::string& key) const {
        auto it = values.find(key);
        return it == values.end() ? nullptr : &it->second.first;
    }
    std::size_t line_of(const std::string& key) const {
        auto it = values.find(key);
        return it == values.end() ? 0 : it->second.second;
    }
};

template <class Stop>
KeyValues read_key_values(const std::vector<std::string_view>& lines, Stop stop) {
    KeyValues kv;
    for (; kv.next_line < lines.size(); ++kv.next_line) {
        const auto line = trim(lines[kv.next_line]);
        const std::size_t number = kv.next_line + 1;
        if (line.empty() || line.front() == '#') continue;
        if (stop(line)) break;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ParseError("expected key=value, got '" + std::string(line) + "'", number);
        std::string key(trim(line.substr(0, eq)));
        if (kv.values.count(key)) throw ParseError("duplicate key '" + key + "'", number);
        kv.values[key] = {std::string(trim(line.substr(eq + 1))), number};
    }
    return kv;
}

const std::string& require(const KeyValues& kv, const std::string& key) {
    const auto* v = kv.find(key);
    if (!v) throw ParseError("missing required key '" + key + "'");
    return *v;
}

std::vector<double> parse_number_list(std::string_view text, std::size_t line) {
    std::vector<double> out;
    for (auto tok : split(text, ',')) out.push_back(parse_double(tok, line));
    return out;
}

std::string join_numbers(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        out += format_number(values[i]);
    }
    return out;
}

}  // namespace

std::string write_menu(const TaskMenu& menu) {
    std::ostringstream out;
    out << "kind=" << to_string(menu.kind()) << '\n';
    out << "domain=" << to_string(menu.domain()) << '\n';
    if (menu.domain() == MenuDomain::PRICE) {
        out << "endowment=" << format_number(*menu.endowment()) << '\n';
        out << "sell_price=" << format_number(*menu.sell_price()) << '\n';
    }
    out << (menu.domain() == MenuDomain::PAYOFF ? kPayoffHeader : kPriceHeader) << '\n';
    for (const auto& row : menu.rows()) {
        const auto a = columns_of(row.option_a);
        out << row.row_index << ',' << format_number(a.prob) << ',' << format_number(a.hi) << ','
            << format_number(a.lo) << ',';
        if (row.option_b) {
            const auto b = columns_of(*row.option_b);
            out << format_number(b.prob) << ',' << format_number(b.hi) << ','
                << format_number(b.lo);
        } else {
            out << ",,";
        }
        out << '\n';
    }
    return out.str();
}

TaskMenu read_menu(std::string_view text) {
    const auto lines = split_lines(text);
    const auto kv = read_key_values(lines, [](std::string_view l) {
        return l.substr(0, 9) == "row_index";
    });
    const auto kind = parse_design_kind(require(kv, "kind"));
    const auto domain = parse_menu_domain(require(kv, "domain"));
    double endowment = 0.0, sell_price = 0.0;
    if (domain == MenuDomain::PRICE) {
        endowment = parse_double(require(kv, "endowment"), kv.line_of("endowment"));
        sell_price = parse_double(require(kv, "sell_price"), kv.line_of("sell_price"));
    }
    if (kv.next_line >= lines.size()) throw ParseError("missing column header row");

    const std::string expected = domain == MenuDomain::PAYOFF ? kPayoffHeader : kPriceHeader;
    const std::string header(trim(lines[kv.next_line]));
    if (header != expected)
        throw ParseError("column header must be '" + expected + "'", kv.next_line + 1);

    std::vector<MenuRow> rows;
    for (std::size_t i = kv.next_line + 1; i < lines.size(); ++i) {
        const auto line = trim(lines[i]);
        const std::size_t number = i + 1;
        if (line.empty() || line.front() == '#') continue;
        const auto cells = split(line, ',');
        if (cells.size() != 7)
            throw ParseError("expected 7 columns, got " + std::to_string(cells.size()), number);
        try {
            MenuRow row{static_cast<int>(parse_integer(cells[0], number)),
                        option_of({parse_double(cells[1], number), parse_double(cells[2], number),
                                   parse_double(cells[3], number)},
                                  domain, endowment, sell_price),
                        std::nullopt};
            const bool b_empty =
                trim(cells[4]).empty() && trim(cells[5]).empty() && trim(cells[6]).empty();
            if (!b_empty)
                row.option_b =
                    option_of({parse_double(cells[4], number), parse_double(cells[5], number),
                               parse_double(cells[6], number)},
                              domain, endowment, sell_price);
            rows.push_back(std::move(row));
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            throw ParseError(e.what(), number);
        }
    }
    try {
        return TaskMenu(kind, domain, std::move(rows));
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(e.what());
    }
}

TaskMenu load_menu_file(const std::filesystem::path& path) { return read_menu(read_text_file(path)); }

void save_menu_file(const std::filesystem::path& path, const TaskMenu& menu) {
    write_text_file_atomic(path, write_menu(menu));
}

std::string write_cvu_schedule(const CvuSchedule& schedule) {
    std::string out = "certain=" + join_numbers(schedule.certain) + "\nlottery_b=";
    for (std::size_t i = 0; i < schedule.lottery_b.size(); ++i) {
        if (i) out += ',';
        out += format_number(schedule.lottery_b[i].probability) + ":" +
               format_number(schedule.lottery_b[i].payoff);
    }
    return out + "\n";
}

CvuSchedule read_cvu_schedule(std::string_view text) {
    const auto kv = read_key_values(split_lines(text), [](std::string_view) { return false; });
    const auto certain = parse_number_list(require(kv, "certain"), kv.line_of("certain"));
    const std::size_t line = kv.line_of("lottery_b");
    std::vector<Outcome> outcomes;
    for (auto tok : split(require(kv, "lottery_b"), ',')) {
        const auto colon = tok.find(':');
        if (colon == std::string_view::npos)
            throw ParseError("lottery_b entries are probability:payoff", line);
        outcomes.push_back({parse_double(tok.substr(0, colon), line),
                            parse_double(tok.substr(colon + 1), line)});
    }
    try {
        return {certain, OutcomeLottery(std::move(outcomes))};
    } catch (const InvalidArgument& e) {
        throw ParseError(e.what(), line);
    }
}

std::string write_bins_schedule(const BinsSchedule& schedule) {
    std::string out = "low=" + join_numbers(schedule.low) + "\n";
    out += "anchor_high=" + format_number(schedule.anchor_high) + "\n";
    out += "terminal_r=" + format_number(schedule.terminal_r) + "\n";
    out += "money_decimals=" +
           (schedule.money_decimals ? std::to_string(*schedule.money_decimals) : "none") + "\n";
    return out;
}

BinsSchedule read_bins_schedule(std::string_view text) {
    const auto kv = read_key_values(split_lines(text), [](std::string_view) { return false; });
    BinsSchedule s;
    s.low = parse_number_list(require(kv, "low"), kv.line_of("low"));
    s.anchor_high = parse_double(require(kv, "anchor_high"), kv.line_of("anchor_high"));
    if (const auto* t = kv.find("terminal_r")) s.terminal_r = parse_double(*t, kv.line_of("terminal_r"));
    if (const auto* d = kv.find("money_decimals")) {
        if (*d == "none")
            s.money_decimals.reset();
        else
            s.money_decimals = static_cast<int>(parse_integer(*d, kv.line_of("money_decimals")));
    }
    return s;
}

}  // namespace mplab
