#include <mortcast/lc_poisson.hpp>

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include <mortcast/csv.hpp>

namespace mortcast {

namespace {

constexpr double kNewtonGuard = 1e-12;

double deviance_cell(double d, double dhat) {
    const double dlog = d > 0.0 ? d * std::log(d / dhat) : 0.0;
    return 2.0 * (dlog - (d - dhat));
}

double residual_cell(double d, double dhat) {
    const double value = std::max(deviance_cell(d, dhat), 0.0);
    return (d >= dhat ? 1.0 : -1.0) * std::sqrt(value);
}

} // namespace

Index LCParameters::age_index(int age) const {
    const auto it = std::find(ages.begin(), ages.end(), age);
    if (it == ages.end()) throw std::out_of_range("age " + std::to_string(age) + " not among fitted ages");
    return static_cast<Index>(it - ages.begin());
}

void LCParameters::validate() const {
    const Index a = static_cast<Index>(ages.size());
    const Index y = static_cast<Index>(years.size());
    if (alpha.size() != a || beta.size() != a || kappa.size() != y)
        throw std::invalid_argument("LCParameters: vector lengths do not match axes");
    if (std::abs(kappa.sum()) > 1e-8) throw std::invalid_argument("LCParameters: sum(kappa) != 0");
    if (std::abs(beta.sum() - 1.0) > 1e-8) throw std::invalid_argument("LCParameters: sum(beta) != 1");
}

LCParameters apply_identifiability_constraints(const LCParameters& params) {
    const double kappa_mean = params.kappa.mean();
    const double beta_sum = params.beta.sum();
    if (std::abs(beta_sum) < kNewtonGuard)
        throw std::runtime_error("apply_identifiability_constraints: sum(beta) is numerically zero");
    LCParameters constrained = params;
    constrained.alpha = params.alpha + params.beta * kappa_mean;
    constrained.kappa = (params.kappa.array() - kappa_mean) * beta_sum;
    constrained.beta = params.beta / beta_sum;
    return constrained;
}

Matrix fitted_deaths(const MortalitySurface& surface, const LCParameters& params) {
    const Matrix log_rates =
        params.alpha.replicate(1, params.kappa.size()) + params.beta * params.kappa.transpose();
    return surface.exposures.array() * log_rates.array().exp();
}

double poisson_deviance(const Matrix& deaths, const Matrix& fitted) {
    if (deaths.rows() != fitted.rows() || deaths.cols() != fitted.cols())
        throw std::invalid_argument("poisson_deviance: shape mismatch");
    double total = 0.0;
    for (Index x = 0; x < deaths.rows(); ++x)
        for (Index t = 0; t < deaths.cols(); ++t) total += deviance_cell(deaths(x, t), fitted(x, t));
    return total;
}

namespace {

/// One sweep of damped Newton updates: alpha, then kappa, then beta, with the
/// fitted deaths refreshed after each family. Denominators below the guard
/// leave that coordinate unchanged for the sweep.
LCParameters newton_sweep(const MortalitySurface& surface, const LCParameters& params, double damping) {
    LCParameters next = params;
    const Matrix& deaths = surface.deaths;

    Matrix dhat = fitted_deaths(surface, next);
    for (Index x = 0; x < next.alpha.size(); ++x) {
        const double denominator = dhat.row(x).sum();
        if (denominator < kNewtonGuard) continue;
        next.alpha[x] += damping * (deaths.row(x).sum() - denominator) / denominator;
    }

    dhat = fitted_deaths(surface, next);
    for (Index t = 0; t < next.kappa.size(); ++t) {
        const double denominator = (dhat.col(t).array() * next.beta.array().square()).sum();
        if (denominator < kNewtonGuard) continue;
        const double score = ((deaths.col(t) - dhat.col(t)).array() * next.beta.array()).sum();
        next.kappa[t] += damping * score / denominator;
    }

    dhat = fitted_deaths(surface, next);
    for (Index x = 0; x < next.beta.size(); ++x) {
        const double denominator = (dhat.row(x).transpose().array() * next.kappa.array().square()).sum();
        if (denominator < kNewtonGuard) continue;
        const double score = ((deaths.row(x) - dhat.row(x)).transpose().array() * next.kappa.array()).sum();
        next.beta[x] += damping * score / denominator;
    }
    return next;
}

} // namespace

LCFitReport fit_lc(const MortalitySurface& surface, double tol, int max_sweeps) {
    surface.validate();
    if (!(tol > 0.0)) throw std::invalid_argument("fit_lc: tol must be positive");
    if (max_sweeps < 1) throw std::invalid_argument("fit_lc: max_sweeps must be positive");
    for (Index x = 0; x < surface.n_ages(); ++x)
        for (Index t = 0; t < surface.n_years(); ++t)
            if (!(surface.deaths(x, t) > 0.0))
                throw std::runtime_error("fit_lc: zero deaths at age " + std::to_string(surface.ages[x]) +
                                         ", year " + std::to_string(surface.years[t]) +
                                         "; restrict the surface or clean the data");

    LCParameters params;
    params.ages = surface.ages;
    params.years = surface.years;
    const Matrix observed_log_rates = (surface.deaths.array() / surface.exposures.array()).log();
    params.alpha = observed_log_rates.rowwise().mean();
    params.beta = Vector::Constant(surface.n_ages(), 1.0 / static_cast<double>(surface.n_ages()));
    params.kappa = Vector::Zero(surface.n_years());

    LCFitReport report;
    report.deviance_trace.push_back(poisson_deviance(surface.deaths, fitted_deaths(surface, params)));

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        const double previous = report.deviance_trace.back();
        LCParameters accepted;
        double accepted_deviance = previous;
        bool improved = false;
        double damping = 1.0;
        for (int attempt = 0; attempt < 30; ++attempt, damping *= 0.5) {
            const LCParameters candidate = newton_sweep(surface, params, damping);
            const double deviance = poisson_deviance(surface.deaths, fitted_deaths(surface, candidate));
            if (deviance <= previous) {
                accepted = candidate;
                accepted_deviance = deviance;
                improved = true;
                break;
            }
        }
        if (!improved) {
            // No damping level decreases the deviance: numerical optimum.
            report.converged = true;
            break;
        }
        params = accepted;
        report.sweeps = sweep + 1;
        report.deviance_trace.push_back(accepted_deviance);
        if (previous - accepted_deviance < tol) {
            report.converged = true;
            break;
        }
    }

    report.params = apply_identifiability_constraints(params);
    report.fitted_deaths = fitted_deaths(surface, report.params);
    report.deviance_residuals = deviance_residuals(surface, report.params);
    return report;
}

Matrix deviance_residuals(const MortalitySurface& surface, const LCParameters& params) {
    if (static_cast<Index>(params.ages.size()) != surface.n_ages() ||
        static_cast<Index>(params.years.size()) != surface.n_years())
        throw std::invalid_argument("deviance_residuals: parameters do not match the surface");
    const Matrix dhat = fitted_deaths(surface, params);
    Matrix residuals(surface.n_ages(), surface.n_years());
    for (Index x = 0; x < surface.n_ages(); ++x)
        for (Index t = 0; t < surface.n_years(); ++t)
            residuals(x, t) = residual_cell(surface.deaths(x, t), dhat(x, t));
    return residuals;
}

namespace {

/// Solves r(D, dhat) = target for D >= 0. The map is strictly increasing in D
/// with minimum r(0, dhat) = -sqrt(2*dhat); targets below that clamp to 0.
double invert_residual(double dhat, double target, int age, int year) {
    if (target <= -std::sqrt(2.0 * dhat)) return 0.0;
    if (target == 0.0) return dhat;

    double lo = 0.0;
    double hi = dhat;
    if (target > 0.0) {
        lo = dhat;
        hi = std::max(dhat * 2.0, dhat + 1.0);
        int expansions = 0;
        while (residual_cell(hi, dhat) < target) {
            hi *= 2.0;
            if (++expansions > 200)
                throw std::runtime_error("reconstruct_surface_from_residuals: cannot bracket cell at age " +
                                         std::to_string(age) + ", year " + std::to_string(year));
        }
    }

    // Newton with bisection fallback; dr/dD = ln(D/dhat)/r, -> 1/sqrt(dhat) at D = dhat.
    double d = std::max(lo, std::min(hi, dhat + target * std::sqrt(dhat)));
    for (int iteration = 0; iteration < 200; ++iteration) {
        const double r = residual_cell(d, dhat);
        const double g = r - target;
        if (g > 0.0) hi = d; else lo = d;
        if (std::abs(g) < 1e-13 * (1.0 + std::abs(target)) || hi - lo < 1e-12 * (1.0 + dhat)) break;
        const double slope = (d > 0.0 && std::abs(r) > 1e-9) ? std::log(d / dhat) / r : 1.0 / std::sqrt(dhat);
        double next = d - g / slope;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        d = next;
    }
    return d;
}

} // namespace

MortalitySurface reconstruct_surface_from_residuals(const MortalitySurface& surface, const LCParameters& params,
                                                    const Matrix& r_star) {
    if (r_star.rows() != surface.n_ages() || r_star.cols() != surface.n_years())
        throw std::invalid_argument("reconstruct_surface_from_residuals: r_star shape mismatch");
    const Matrix dhat = fitted_deaths(surface, params);
    MortalitySurface pseudo = surface;
    for (Index x = 0; x < surface.n_ages(); ++x)
        for (Index t = 0; t < surface.n_years(); ++t)
            pseudo.deaths(x, t) = invert_residual(dhat(x, t), r_star(x, t), surface.ages[x], surface.years[t]);
    return pseudo;
}

LogRateSurface lc_point_forecast(const LCParameters& params, const Vector& kappa_future,
                                 const std::vector<int>& years_future) {
    if (!kappa_future.allFinite()) throw std::invalid_argument("lc_point_forecast: kappa_future must be finite");
    if (static_cast<Index>(years_future.size()) != kappa_future.size())
        throw std::invalid_argument("lc_point_forecast: years/kappa length mismatch");
    LogRateSurface forecast;
    forecast.ages = params.ages;
    forecast.years = years_future;
    forecast.logm = params.alpha.replicate(1, kappa_future.size()) + params.beta * kappa_future.transpose();
    forecast.zero_deaths = BoolMatrix::Constant(params.alpha.size(), kappa_future.size(), false);
    return forecast;
}

void write_parameters_csv(const LCParameters& params, std::ostream& out) {
    out << "series,index,value\n";
    for (Index x = 0; x < params.alpha.size(); ++x)
        out << "alpha," << params.ages[x] << ',' << format_double(params.alpha[x]) << '\n';
    for (Index x = 0; x < params.beta.size(); ++x)
        out << "beta," << params.ages[x] << ',' << format_double(params.beta[x]) << '\n';
    for (Index t = 0; t < params.kappa.size(); ++t)
        out << "kappa," << params.years[t] << ',' << format_double(params.kappa[t]) << '\n';
}

LCParameters read_parameters_csv(std::istream& in) {
    const auto rows = read_csv(in, "series,index,value");
    std::vector<double> alpha;
    std::vector<double> beta;
    std::vector<double> kappa;
    LCParameters params;
    for (const auto& row : rows) {
        const int index = static_cast<int>(parse_long(row[1]));
        const double value = parse_double(row[2]);
        if (row[0] == "alpha") {
            params.ages.push_back(index);
            alpha.push_back(value);
        } else if (row[0] == "beta") {
            beta.push_back(value);
        } else if (row[0] == "kappa") {
            params.years.push_back(index);
            kappa.push_back(value);
        } else {
            throw std::runtime_error("read_parameters_csv: unknown series '" + row[0] + "'");
        }
    }
    params.alpha = Eigen::Map<const Vector>(alpha.data(), static_cast<Index>(alpha.size()));
    params.beta = Eigen::Map<const Vector>(beta.data(), static_cast<Index>(beta.size()));
    params.kappa = Eigen::Map<const Vector>(kappa.data(), static_cast<Index>(kappa.size()));
    params.validate();
    return params;
}

} // namespace mortcast
