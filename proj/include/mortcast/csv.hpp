#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mortcast {

/// Shortest decimal text that parses back to the exact same double.
std::string format_double(double value);

/// Strict double parse of a whole field. Throws on trailing junk or empty input.
double parse_double(const std::string& field);

/// Strict integer parse. Throws on non-integers.
long parse_long(const std::string& field);

std::vector<std::string> split_csv_line(const std::string& line);

/// Reads a CSV stream, checks the header matches exactly, returns data rows.
std::vector<std::vector<std::string>> read_csv(std::istream& in, const std::string& expected_header);

} // namespace mortcast
