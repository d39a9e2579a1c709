#include <mortcast/mortality.hpp>

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <mortcast/csv.hpp>

namespace mortcast {

Gender gender_from_string(const std::string& name) {
    if (name == "female") return Gender::female;
    if (name == "male") return Gender::male;
    if (name == "total") return Gender::total;
    throw std::invalid_argument("unknown gender column: '" + name + "'");
}

std::string to_string(Gender gender) {
    switch (gender) {
        case Gender::female: return "female";
        case Gender::male: return "male";
        case Gender::total: return "total";
    }
    throw std::logic_error("unreachable");
}

namespace {

std::vector<std::string> whitespace_tokens(const std::string& line) {
    std::vector<std::string> tokens;
    std::istringstream stream(line);
    std::string token;
    while (stream >> token) tokens.push_back(token);
    return tokens;
}

bool is_header_row(const std::vector<std::string>& tokens) {
    return tokens.size() >= 2 && tokens[0] == "Year" && tokens[1] == "Age";
}

int parse_age_token(const std::string& token, std::size_t line_number) {
    std::string digits = token;
    if (!digits.empty() && digits.back() == '+') digits.pop_back();
    try {
        return static_cast<int>(parse_long(digits));
    } catch (const std::exception&) {
        throw std::runtime_error("HMD line " + std::to_string(line_number) + ": bad age field '" + token + "'");
    }
}

std::optional<double> parse_value_token(const std::string& token, std::size_t line_number) {
    if (token == ".") return std::nullopt;
    try {
        return parse_double(token);
    } catch (const std::exception&) {
        throw std::runtime_error("HMD line " + std::to_string(line_number) + ": bad value field '" + token + "'");
    }
}

} // namespace

std::vector<HmdRecord> parse_hmd_table(std::istream& in, Gender column) {
    std::vector<HmdRecord> records;
    std::string line;
    std::size_t line_number = 0;
    bool header_seen = false;
    bool any_line = false;

    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto tokens = whitespace_tokens(line);
        if (tokens.empty()) {
            any_line = true;
            continue;
        }
        any_line = true;
        if (!header_seen) {
            if (is_header_row(tokens)) header_seen = true;
            // Preamble (title line etc.) is skipped until the column header row.
            continue;
        }
        if (tokens.size() != 5)
            throw std::runtime_error("HMD line " + std::to_string(line_number) + ": expected 5 columns, got " +
                                     std::to_string(tokens.size()));
        HmdRecord record;
        try {
            record.year = static_cast<int>(parse_long(tokens[0]));
        } catch (const std::exception&) {
            throw std::runtime_error("HMD line " + std::to_string(line_number) + ": bad year field '" + tokens[0] + "'");
        }
        record.age = parse_age_token(tokens[1], line_number);
        const std::size_t column_index = column == Gender::female ? 2 : column == Gender::male ? 3 : 4;
        record.value = parse_value_token(tokens[column_index], line_number);
        // The unselected columns must still be well-formed.
        for (std::size_t i = 2; i < 5; ++i)
            if (i != column_index) parse_value_token(tokens[i], line_number);
        records.push_back(record);
    }
    if (!any_line) throw std::runtime_error("parse_hmd_table: empty input");
    if (!header_seen) throw std::runtime_error("parse_hmd_table: no 'Year Age ...' header row found");
    return records;
}

Index MortalitySurface::age_index(int age) const {
    const auto it = std::find(ages.begin(), ages.end(), age);
    if (it == ages.end()) throw std::out_of_range("age " + std::to_string(age) + " not on the surface");
    return static_cast<Index>(it - ages.begin());
}

Index MortalitySurface::year_index(int year) const {
    const auto it = std::find(years.begin(), years.end(), year);
    if (it == years.end()) throw std::out_of_range("year " + std::to_string(year) + " not on the surface");
    return static_cast<Index>(it - years.begin());
}

MortalitySurface MortalitySurface::year_slice(int year_from, int year_to) const {
    const Index from = year_index(year_from);
    const Index to = year_index(year_to);
    if (to < from) throw std::invalid_argument("year_slice: empty range");
    MortalitySurface sliced;
    sliced.ages = ages;
    sliced.years.assign(years.begin() + from, years.begin() + to + 1);
    sliced.deaths = deaths.middleCols(from, to - from + 1);
    sliced.exposures = exposures.middleCols(from, to - from + 1);
    return sliced;
}

void MortalitySurface::validate() const {
    const Index a = n_ages();
    const Index y = n_years();
    if (a == 0 || y == 0) throw std::invalid_argument("surface: empty age or year axis");
    if (deaths.rows() != a || deaths.cols() != y || exposures.rows() != a || exposures.cols() != y)
        throw std::invalid_argument("surface: matrix dimensions do not match axes");
    for (std::size_t i = 1; i < ages.size(); ++i)
        if (ages[i] != ages[i - 1] + 1) throw std::invalid_argument("surface: ages must increase with unit step");
    for (std::size_t i = 1; i < years.size(); ++i)
        if (years[i] != years[i - 1] + 1) throw std::invalid_argument("surface: years must increase with unit step");
    for (Index x = 0; x < a; ++x)
        for (Index t = 0; t < y; ++t) {
            if (!(exposures(x, t) > 0.0))
                throw std::invalid_argument("surface: non-positive exposure at age " + std::to_string(ages[x]) +
                                            ", year " + std::to_string(years[t]));
            if (!(deaths(x, t) >= 0.0))
                throw std::invalid_argument("surface: negative deaths at age " + std::to_string(ages[x]) + ", year " +
                                            std::to_string(years[t]));
        }
}

bool MortalitySurface::operator==(const MortalitySurface& other) const {
    return ages == other.ages && years == other.years && deaths == other.deaths && exposures == other.exposures;
}

namespace {

Matrix table_to_matrix(const std::vector<HmdRecord>& table, int age_min, int age_max, int year_min, int year_max,
                       const char* what) {
    std::map<std::pair<int, int>, double> cells;
    for (const auto& record : table) {
        if (record.age < age_min || record.age > age_max || record.year < year_min || record.year > year_max)
            continue;
        if (record.value) cells[{record.age, record.year}] = *record.value;
    }
    Matrix values(age_max - age_min + 1, year_max - year_min + 1);
    for (int age = age_min; age <= age_max; ++age)
        for (int year = year_min; year <= year_max; ++year) {
            const auto it = cells.find({age, year});
            if (it == cells.end())
                throw std::runtime_error(std::string(what) + ": missing cell at age " + std::to_string(age) +
                                         ", year " + std::to_string(year));
            values(age - age_min, year - year_min) = it->second;
        }
    return values;
}

} // namespace

MortalitySurface build_surface(const std::vector<HmdRecord>& deaths_table,
                               const std::vector<HmdRecord>& exposures_table, int age_min, int age_max, int year_min,
                               int year_max) {
    if (age_min > age_max || year_min > year_max) throw std::invalid_argument("build_surface: empty range");
    MortalitySurface surface;
    for (int age = age_min; age <= age_max; ++age) surface.ages.push_back(age);
    for (int year = year_min; year <= year_max; ++year) surface.years.push_back(year);
    surface.deaths = table_to_matrix(deaths_table, age_min, age_max, year_min, year_max, "deaths");
    surface.exposures = table_to_matrix(exposures_table, age_min, age_max, year_min, year_max, "exposures");
    surface.validate();
    return surface;
}

LogRateSurface log_rates(const MortalitySurface& surface) {
    surface.validate();
    LogRateSurface rates;
    rates.ages = surface.ages;
    rates.years = surface.years;
    rates.logm.resize(surface.n_ages(), surface.n_years());
    rates.zero_deaths = BoolMatrix::Constant(surface.n_ages(), surface.n_years(), false);
    for (Index x = 0; x < surface.n_ages(); ++x)
        for (Index t = 0; t < surface.n_years(); ++t) {
            const double deaths = surface.deaths(x, t);
            if (deaths > 0.0) {
                rates.logm(x, t) = std::log(deaths / surface.exposures(x, t));
            } else {
                rates.logm(x, t) = std::numeric_limits<double>::quiet_NaN();
                rates.zero_deaths(x, t) = true;
            }
        }
    return rates;
}

void write_surface_csv(const MortalitySurface& surface, std::ostream& out) {
    const LogRateSurface rates = log_rates(surface);
    out << "age,year,deaths,exposures,log_rate\n";
    for (Index x = 0; x < surface.n_ages(); ++x)
        for (Index t = 0; t < surface.n_years(); ++t)
            out << surface.ages[x] << ',' << surface.years[t] << ',' << format_double(surface.deaths(x, t)) << ','
                << format_double(surface.exposures(x, t)) << ',' << format_double(rates.logm(x, t)) << '\n';
}

MortalitySurface read_surface_csv(std::istream& in) {
    const auto rows = read_csv(in, "age,year,deaths,exposures,log_rate");
    if (rows.empty()) throw std::runtime_error("read_surface_csv: no data rows");

    std::vector<int> ages;
    std::vector<int> years;
    for (const auto& row : rows) {
        const int age = static_cast<int>(parse_long(row[0]));
        const int year = static_cast<int>(parse_long(row[1]));
        if (ages.empty() || ages.back() != age) ages.push_back(age);
        if (std::find(years.begin(), years.end(), year) == years.end()) years.push_back(year);
    }
    MortalitySurface surface;
    surface.ages = ages;
    surface.years = years;
    surface.deaths.resize(static_cast<Index>(ages.size()), static_cast<Index>(years.size()));
    surface.exposures.resize(static_cast<Index>(ages.size()), static_cast<Index>(years.size()));
    if (rows.size() != ages.size() * years.size()) throw std::runtime_error("read_surface_csv: ragged grid");
    for (const auto& row : rows) {
        const Index x = surface.age_index(static_cast<int>(parse_long(row[0])));
        const Index t = surface.year_index(static_cast<int>(parse_long(row[1])));
        surface.deaths(x, t) = parse_double(row[2]);
        surface.exposures(x, t) = parse_double(row[3]);
    }
    surface.validate();
    return surface;
}

} // namespace mortcast
