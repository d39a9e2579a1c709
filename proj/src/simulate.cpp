#include <mortcast/simulate.hpp>

#include <cmath>
#include <ostream>
#include <random>
#include <stdexcept>

#include <mortcast/csv.hpp>
#include <mortcast/stats.hpp>

namespace mortcast {

KappaLaw kappa_law_from_string(const std::string& name) {
    if (name == "rwd") return KappaLaw::random_walk_drift;
    if (name == "piecewise") return KappaLaw::piecewise_linear;
    throw std::invalid_argument("unknown kappa law: '" + name + "'");
}

DeathsLaw deaths_law_from_string(const std::string& name) {
    if (name == "poisson") return DeathsLaw::poisson;
    if (name == "deterministic") return DeathsLaw::deterministic;
    throw std::invalid_argument("unknown deaths law: '" + name + "'");
}

std::string to_string(KappaLaw law) { return law == KappaLaw::random_walk_drift ? "rwd" : "piecewise"; }
std::string to_string(DeathsLaw law) { return law == DeathsLaw::poisson ? "poisson" : "deterministic"; }

MortalitySurface surface_from_parameters(const std::vector<int>& ages, const std::vector<int>& years,
                                         double exposure, const Vector& alpha, const Vector& beta,
                                         const Vector& kappa, DeathsLaw law, std::uint64_t seed) {
    if (!(exposure > 0.0)) throw std::invalid_argument("surface_from_parameters: exposure must be positive");
    MortalitySurface surface;
    surface.ages = ages;
    surface.years = years;
    surface.exposures = Matrix::Constant(alpha.size(), kappa.size(), exposure);
    const Matrix log_rates = alpha.replicate(1, kappa.size()) + beta * kappa.transpose();
    surface.deaths = surface.exposures.array() * log_rates.array().exp();
    if (law == DeathsLaw::poisson) {
        std::mt19937_64 rng(seed);
        for (Index x = 0; x < surface.deaths.rows(); ++x)
            for (Index t = 0; t < surface.deaths.cols(); ++t) {
                std::poisson_distribution<long> draw(surface.deaths(x, t));
                surface.deaths(x, t) = static_cast<double>(draw(rng));
            }
    }
    surface.validate();
    return surface;
}

Vector simulate_kappa(const SimulationSpec& spec, int n_years) {
    if (n_years < 1) throw std::invalid_argument("simulate_kappa: need at least one year");
    Vector kappa(n_years);
    std::mt19937_64 rng(derive_seed(spec.seed, 0x6b61707061ULL));
    std::normal_distribution<double> noise(0.0, spec.sigma);
    kappa[0] = spec.kappa_start;
    const int break_at = spec.break_offset >= 0 ? spec.break_offset : n_years / 2;
    for (int t = 1; t < n_years; ++t) {
        double slope = spec.drift;
        if (spec.kappa_law == KappaLaw::piecewise_linear && t > break_at) slope = spec.drift_after;
        const double innovation = spec.sigma > 0.0 ? noise(rng) : 0.0;
        kappa[t] = kappa[t - 1] + slope + innovation;
    }
    return kappa;
}

SimulatedData simulate_surface(const SimulationSpec& spec) {
    if (spec.age_min > spec.age_max || spec.year_min > spec.year_max)
        throw std::invalid_argument("simulate_surface: empty range");
    std::vector<int> ages;
    std::vector<int> years;
    for (int age = spec.age_min; age <= spec.age_max; ++age) ages.push_back(age);
    for (int year = spec.year_min; year <= spec.year_max; ++year) years.push_back(year);
    const Index n_ages = static_cast<Index>(ages.size());
    const Index n_years = static_cast<Index>(years.size());

    LCParameters raw;
    raw.ages = ages;
    raw.years = years;
    raw.alpha.resize(n_ages);
    raw.beta.resize(n_ages);
    for (Index x = 0; x < n_ages; ++x) {
        raw.alpha[x] = spec.alpha_level + spec.alpha_slope * static_cast<double>(x);
        raw.beta[x] = std::exp(-spec.beta_decay * static_cast<double>(x));
    }
    raw.beta /= raw.beta.sum();
    raw.kappa = simulate_kappa(spec, static_cast<int>(n_years));

    SimulatedData data;
    data.truth = apply_identifiability_constraints(raw);
    data.surface = surface_from_parameters(ages, years, spec.exposure, data.truth.alpha, data.truth.beta,
                                           data.truth.kappa, spec.deaths_law, derive_seed(spec.seed, 0x64656174ULL));
    return data;
}

void write_hmd_table(const Matrix& values, const std::vector<int>& ages, const std::vector<int>& years,
                     const std::string& title, std::ostream& out) {
    if (values.rows() != static_cast<Index>(ages.size()) || values.cols() != static_cast<Index>(years.size()))
        throw std::invalid_argument("write_hmd_table: shape mismatch");
    out << title << "\n\n";
    out << "Year          Age             Female            Male           Total\n";
    for (Index t = 0; t < values.cols(); ++t)
        for (Index x = 0; x < values.rows(); ++x) {
            const std::string cell = format_double(values(x, t));
            out << years[t] << "   " << ages[x] << "   " << cell << "   " << cell << "   " << cell << '\n';
        }
}

} // namespace mortcast
