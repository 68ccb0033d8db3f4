#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace mplab {

// Whole-file read; throws Error naming the path on failure.
std::string read_text_file(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it over `path`, so readers
// never observe a partially written file.
void write_text_file_atomic(const std::filesystem::path& path, std::string_view content);

// Shortest decimal text that parses back to exactly `value`.
std::string format_number(double value);

// Fixed-point text with `decimals` places ("9.60").
std::string format_fixed(double value, int decimals);

// Strict full-token parses; throw ParseError (with `line`) on trailing junk.
double parse_double(std::string_view token, std::size_t line = 0);
long long parse_integer(std::string_view token, std::size_t line = 0);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);

// Splits on '\n', dropping a trailing '\r' from each line.
std::vector<std::string_view> split_lines(std::string_view text);

}  // namespace mplab
