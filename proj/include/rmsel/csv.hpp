#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace rmsel::csv {

// Comma-separated, UTF-8, '.' decimal separator, header row. Lines starting
// with '#' are metadata/comment lines and are skipped on read.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::optional<std::size_t> column(std::string_view name) const;
};

Table read_file(const std::filesystem::path& path);
Table read_string(std::string_view text);

// Quotes a field only when needed (comma, quote, newline).
std::string escape_field(std::string_view field);

std::string to_line(const std::vector<std::string>& fields);

// Shortest round-trip decimal representation of an IEEE double.
std::string format_double(double value);

// Strict double parse of a whole field ('.' separator, no locale).
double parse_double(std::string_view text, bool& ok);

// Exact decimal parse into fixed-point millionths (1e-6 units). Fails when
// the value has more than six fractional digits or overflows. Keeps
// consistency checks on one-decimal score tables free of binary rounding.
std::optional<std::int64_t> parse_decimal_micro(std::string_view text);

std::string trim(std::string_view text);

}  // namespace rmsel::csv
