#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <mortcast/types.hpp>

namespace mortcast {

enum class Gender { female, male, total };

Gender gender_from_string(const std::string& name);
std::string to_string(Gender gender);

/// One parsed row of an HMD 1x1 table; value is empty when the source marks it ".".
struct HmdRecord {
    int year = 0;
    int age = 0;
    std::optional<double> value;
};

/// Parses an HMD 1x1 table (Deaths_1x1 / Exposures_1x1 layout): preamble lines,
/// a `Year Age Female Male Total` header row, then whitespace-delimited data rows.
/// The open age group "110+" is parsed as age 110. Malformed rows throw with the
/// 1-based line number.
std::vector<HmdRecord> parse_hmd_table(std::istream& in, Gender column);

/// Deaths and central exposures on a rectangular age x year grid.
struct MortalitySurface {
    std::vector<int> ages;
    std::vector<int> years;
    Matrix deaths;    // |ages| x |years|
    Matrix exposures; // |ages| x |years|

    Index n_ages() const { return static_cast<Index>(ages.size()); }
    Index n_years() const { return static_cast<Index>(years.size()); }
    Index age_index(int age) const;
    Index year_index(int year) const;

    /// Restriction to a contiguous year span (both ends inclusive).
    MortalitySurface year_slice(int year_from, int year_to) const;

    /// Enforces the grid invariants: matching shapes, unit-step axes,
    /// strictly positive exposures, non-negative deaths.
    void validate() const;

    bool operator==(const MortalitySurface& other) const;
};

/// Log central death rates; cells with zero deaths are flagged, not imputed.
struct LogRateSurface {
    std::vector<int> ages;
    std::vector<int> years;
    Matrix logm;
    BoolMatrix zero_deaths;

    bool any_flagged() const { return zero_deaths.size() > 0 && zero_deaths.any(); }
};

MortalitySurface build_surface(const std::vector<HmdRecord>& deaths_table,
                               const std::vector<HmdRecord>& exposures_table, int age_min, int age_max,
                               int year_min, int year_max);

LogRateSurface log_rates(const MortalitySurface& surface);

/// CSV with header `age,year,deaths,exposures,log_rate`; doubles are written in
/// shortest round-trip form, so write -> read reproduces the surface bit-exactly.
void write_surface_csv(const MortalitySurface& surface, std::ostream& out);
MortalitySurface read_surface_csv(std::istream& in);

} // namespace mortcast
