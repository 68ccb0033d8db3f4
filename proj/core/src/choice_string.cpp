#include "mplab/choice_string.hpp"

#include <cctype>

#include "mplab/error.hpp"

namespace mplab {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
char upper(char c) { return static_cast<char>(std::toupper(static_cast<unsigned char>(c))); }

std::string quoted(char c) { return std::string("'") + c + "'"; }

ParsedChoice parse_switch_list(std::string_view text, char safe, char risky) {
    ParsedChoice out;
    std::size_t slash_at = std::string_view::npos;
    int risky_count = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (is_space(c)) continue;
        if (c == '/') {
            if (slash_at != std::string_view::npos)
                throw ParseError("second switch marker '/'", 0, i);
            slash_at = i;
            continue;
        }
        const char u = upper(c);
        if (u == safe) {
            if (slash_at != std::string_view::npos)
                throw ParseError("safe choice " + quoted(c) + " after the switch marker", 0, i);
            ++out.response;
        } else if (u == risky) {
            if (slash_at == std::string_view::npos)
                throw ParseError("risky choice " + quoted(c) + " before the switch marker", 0, i);
            ++risky_count;
        } else {
            throw ParseError("symbol " + quoted(c) + " is not one of " + quoted(safe) + ", " +
                                 quoted(risky) + ", '/'",
                             0, i);
        }
    }
    if (slash_at == std::string_view::npos)
        throw ParseError("missing switch marker '/'", 0, text.size());
    if (out.response > 10) throw ParseError("more than 10 safe choices", 0, slash_at);
    out.symbol_count = out.response + risky_count;
    out.length_anomaly = out.symbol_count != 10;
    return out;
}

ParsedChoice parse_bins(std::string_view text) {
    // Strip whitespace but remember original offsets for error positions.
    std::string compact;
    std::vector<std::size_t> origin;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (is_space(text[i])) continue;
        compact.push_back(text[i]);
        origin.push_back(i);
    }
    const auto marker = compact.find("/1/");
    if (marker == std::string::npos) throw ParseError("missing decision marker \"/1/\"", 0, 0);
    const auto again = compact.find("/1/", marker + 3);
    if (again != std::string::npos)
        throw ParseError("second decision marker \"/1/\"", 0, origin[again]);

    ParsedChoice out;
    int zeros = 0;
    for (std::size_t i = 0; i < compact.size(); ++i) {
        if (i >= marker && i < marker + 3) continue;
        if (compact[i] != '0')
            throw ParseError("symbol " + quoted(compact[i]) + " outside the decision marker", 0,
                             origin[i]);
        ++zeros;
        if (i < marker) ++out.response;
    }
    out.response += 1;
    if (out.response > 10) throw ParseError("decision number above 10", 0, origin[marker]);
    out.symbol_count = zeros + 1;
    out.length_anomaly = out.symbol_count != 10;
    return out;
}

}  // namespace

ParsedChoice parse_choice_string(std::string_view text, DesignKind family) {
    bool blank = true;
    for (char c : text) blank = blank && is_space(c);
    if (blank) throw ParseError("empty choice string");
    switch (family) {
        case DesignKind::HL: return parse_switch_list(text, 'S', 'R');
        case DesignKind::CVU: return parse_switch_list(text, 'C', 'U');
        case DesignKind::BINS: return parse_bins(text);
    }
    throw InvalidArgument("unknown design kind");
}

std::string render_choice_string(int response, DesignKind family) {
    if (family == DesignKind::BINS) {
        if (response < 1 || response > 10) throw InvalidArgument("decision number outside 1..10");
        return std::string(static_cast<std::size_t>(response - 1), '0') + "/1/" +
               std::string(static_cast<std::size_t>(10 - response), '0');
    }
    if (response < 0 || response > 10) throw InvalidArgument("safe-choice count outside 0..10");
    const char safe = family == DesignKind::HL ? 'S' : 'C';
    const char risky = family == DesignKind::HL ? 'R' : 'U';
    std::string out(static_cast<std::size_t>(response), safe);
    if (response > 0) out += ' ';
    out += '/';
    if (response < 10) out += ' ' + std::string(static_cast<std::size_t>(10 - response), risky);
    return out;
}

}  // namespace mplab
