#include <mortcast/csv.hpp>

#include <charconv>
#include <cmath>
#include <istream>
#include <stdexcept>
#include <system_error>

namespace mortcast {

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, result.ptr);
}

double parse_double(const std::string& field) {
    if (field.empty()) throw std::invalid_argument("parse_double: empty field");
    if (field == "nan") return std::nan("");
    double value = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto result = std::from_chars(begin, end, value);
    if (result.ec != std::errc{} || result.ptr != end)
        throw std::invalid_argument("parse_double: not a number: '" + field + "'");
    return value;
}

long parse_long(const std::string& field) {
    if (field.empty()) throw std::invalid_argument("parse_long: empty field");
    long value = 0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto result = std::from_chars(begin, end, value);
    if (result.ec != std::errc{} || result.ptr != end)
        throw std::invalid_argument("parse_long: not an integer: '" + field + "'");
    return value;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(current);
            current.clear();
        } else if (ch != '\r') {
            current.push_back(ch);
        }
    }
    fields.push_back(current);
    return fields;
}

std::vector<std::vector<std::string>> read_csv(std::istream& in, const std::string& expected_header) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("read_csv: empty stream");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != expected_header)
        throw std::runtime_error("read_csv: header mismatch, expected '" + expected_header + "', got '" + line + "'");
    std::vector<std::vector<std::string>> rows;
    const std::size_t width = split_csv_line(expected_header).size();
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != width)
            throw std::runtime_error("read_csv: row with " + std::to_string(fields.size()) + " fields, expected " +
                                     std::to_string(width));
        rows.push_back(std::move(fields));
    }
    return rows;
}

} // namespace mortcast
