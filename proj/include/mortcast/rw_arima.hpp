#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include <mortcast/types.hpp>

namespace mortcast {

/// ARIMA(p,d,q) coefficients with drift; estimation is provided for the
/// random walk with drift (0,1,0), the forecast recursion for any given set.
struct ArimaSpec {
    int p = 0;
    int d = 0;
    int q = 0;
    double drift = 0.0;
    Vector ar; // phi_1..phi_p
    Vector ma; // theta_1..theta_q
    double sigma_eps = 0.0;

    void validate() const;
};

/// Random walk with drift: drift = mean of first differences, sigma_eps from
/// the squared deviations of the differences about the drift with denominator
/// max(#differences - 2, 1).
ArimaSpec fit_rwd(const Vector& kappa);

/// Conditional-mean forecast: the recursion runs on d-th differences with the
/// per-step drift, future innovations set to zero, then integrates back to
/// levels. residual_history supplies the last in-sample innovations for q > 0.
Vector arima_forecast(const ArimaSpec& spec, const Vector& history, const Vector& residual_history, int horizon);

/// How the innovation variance accumulates across the horizon: sqrt_h is the
/// standard random-walk law (variance h*sigma^2); linear_h keeps the printed
/// h^2*sigma^2 reading for comparison.
enum class PiVarianceLaw { sqrt_h, linear_h };

PiVarianceLaw pi_variance_law_from_string(const std::string& name);
std::string to_string(PiVarianceLaw law);

struct ArimaInterval {
    Vector point;
    Vector lower;
    Vector upper;
};

/// Gaussian prediction intervals point +/- z_{alpha/2} * scale(h) * sigma_eps.
/// When loading is set (an age sensitivity beta_x), the bounds live in
/// log-rate space and the width is scaled by |loading|.
ArimaInterval arima_pi(const ArimaSpec& spec, const Vector& point_forecasts, double alpha,
                       PiVarianceLaw law = PiVarianceLaw::sqrt_h, std::optional<double> loading = std::nullopt);

/// CSV export with header `horizon,point,lower,upper`.
void write_arima_interval_csv(const ArimaInterval& interval, std::ostream& out);

} // namespace mortcast
