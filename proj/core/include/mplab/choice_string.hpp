#pragma once

// Printed choice strings.
//
// HL rows use S (safe) / R (risky), CVU rows use C (certain) / U (uncertain);
// the single '/' marks the switch, e.g. "SSSSSS / RRRR" is 6 safe choices.
// BINS strings mark the chosen decision with "/1/" among zeros, e.g.
// "000/1/000000" is decision 4. Symbols are case-insensitive and whitespace is
// ignored.

#include <string>
#include <string_view>

#include "mplab/menu.hpp"

namespace mplab {

struct ParsedChoice {
    int response = 0;          // safe count (HL/CVU) or decision number (BINS)
    int symbol_count = 0;      // choice symbols seen, 10 for a well-formed string
    bool length_anomaly = false;  // symbol_count != 10; the response still stands
};

// Throws ParseError whose position() is the 0-based offset of the offending
// character: foreign symbols, missing or repeated switch marker, safe symbols
// after risky ones, or a response outside the valid range.
ParsedChoice parse_choice_string(std::string_view text, DesignKind family);

// Canonical 10-symbol form: "SSSSSS / RRRR", "SSSSSSSSSS /", "/ UUUUUUUUUU",
// "000/1/000000".
std::string render_choice_string(int response, DesignKind family);

}  // namespace mplab
