#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include <mortcast/lc_poisson.hpp>
#include <mortcast/mortality.hpp>
#include <mortcast/types.hpp>

namespace mortcast {

enum class KappaLaw { random_walk_drift, piecewise_linear };
enum class DeathsLaw { poisson, deterministic };

KappaLaw kappa_law_from_string(const std::string& name);
DeathsLaw deaths_law_from_string(const std::string& name);
std::string to_string(KappaLaw law);
std::string to_string(DeathsLaw law);

/// Generator settings for synthetic age-period surfaces used in tests and demos.
struct SimulationSpec {
    int age_min = 0;
    int age_max = 9;
    int year_min = 1950;
    int year_max = 1999;
    double exposure = 1e6;
    // Log-rate level alpha_x = alpha_level + alpha_slope * (x - age_min).
    double alpha_level = -6.5;
    double alpha_slope = 0.04;
    // Raw beta_x proportional to exp(-beta_decay * (x - age_min)), normalized to sum 1.
    double beta_decay = 0.15;
    KappaLaw kappa_law = KappaLaw::random_walk_drift;
    double kappa_start = 0.0;
    double drift = -1.5;
    double sigma = 1.0;      // innovation s.d. for the random walk
    double drift_after = -0.5; // second slope of the piecewise-linear law
    int break_offset = -1;     // years after year_min where the slope changes; -1 = mid sample
    DeathsLaw deaths_law = DeathsLaw::deterministic;
    std::uint64_t seed = 1;
};

struct SimulatedData {
    MortalitySurface surface;
    LCParameters truth; // constrained ground truth over the generated years
};

/// Builds deaths E * exp(alpha + beta*kappa), exactly or with Poisson draws.
MortalitySurface surface_from_parameters(const std::vector<int>& ages, const std::vector<int>& years,
                                         double exposure, const Vector& alpha, const Vector& beta,
                                         const Vector& kappa, DeathsLaw law, std::uint64_t seed);

/// Generates raw parameters from the spec, constrains them over the generated
/// window and builds the surface from the constrained truth.
SimulatedData simulate_surface(const SimulationSpec& spec);

/// Kappa path generators used by the surface simulator and by backtests.
Vector simulate_kappa(const SimulationSpec& spec, int n_years);

/// Writes a surface as an HMD 1x1 table (the same value in all three gender
/// columns) so the pipeline can ingest synthetic data unchanged.
void write_hmd_table(const Matrix& values, const std::vector<int>& ages, const std::vector<int>& years,
                     const std::string& title, std::ostream& out);

} // namespace mortcast
