#pragma once

#include <iosfwd>
#include <vector>

#include <mortcast/mortality.hpp>
#include <mortcast/types.hpp>

namespace mortcast {

/// Fitted log-bilinear decomposition log m = alpha_x + beta_x * kappa_t, with
/// the identifiability constraints sum(kappa) = 0 and sum(beta) = 1.
struct LCParameters {
    std::vector<int> ages;
    std::vector<int> years;
    Vector alpha;
    Vector beta;
    Vector kappa;

    Index age_index(int age) const;
    void validate() const;
};

/// Maps (alpha, beta, kappa) to the constrained parameterization without
/// changing any fitted log rate: alpha += beta*mean(kappa),
/// kappa = (kappa - mean(kappa))*sum(beta), beta /= sum(beta).
LCParameters apply_identifiability_constraints(const LCParameters& params);

struct LCFitReport {
    LCParameters params;
    std::vector<double> deviance_trace; // one entry per accepted sweep, never increasing
    Matrix deviance_residuals;
    Matrix fitted_deaths;
    bool converged = false;
    int sweeps = 0;
};

/// Fitted deaths E * exp(alpha + beta*kappa) for a parameter set.
Matrix fitted_deaths(const MortalitySurface& surface, const LCParameters& params);

/// Total Poisson deviance 2*sum[ D*ln(D/Dhat) - (D - Dhat) ].
double poisson_deviance(const Matrix& deaths, const Matrix& fitted);

/// Maximizes the Poisson likelihood by alternating one-dimensional Newton
/// updates (alpha, then kappa, then beta per sweep), stopping when the
/// deviance change drops below tol. Constraints are applied at termination.
/// Requires strictly positive death counts in every cell.
LCFitReport fit_lc(const MortalitySurface& surface, double tol = 1e-6, int max_sweeps = 10000);

/// Signed square-root Poisson deviance contributions, with D*ln(D/Dhat) = 0
/// when D = 0.
Matrix deviance_residuals(const MortalitySurface& surface, const LCParameters& params);

/// Inverts the deviance-residual map cellwise: finds pseudo-deaths D* >= 0 with
/// r(D*, Dhat) = r_star, by safeguarded Newton iteration on the monotone map.
/// Values of r_star below the reachable minimum clamp D* to 0.
MortalitySurface reconstruct_surface_from_residuals(const MortalitySurface& surface, const LCParameters& params,
                                                    const Matrix& r_star);

/// Point log-rate forecast alpha_x + beta_x * kappa_future[h].
LogRateSurface lc_point_forecast(const LCParameters& params, const Vector& kappa_future,
                                 const std::vector<int>& years_future);

/// CSV export with header `series,index,value`; index is the age for alpha and
/// beta rows and the calendar year for kappa rows.
void write_parameters_csv(const LCParameters& params, std::ostream& out);
LCParameters read_parameters_csv(std::istream& in);

} // namespace mortcast
