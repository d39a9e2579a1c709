#include <mortcast/rw_arima.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <mortcast/csv.hpp>
#include <mortcast/stats.hpp>

namespace mortcast {

void ArimaSpec::validate() const {
    if (p < 0 || d < 0 || q < 0) throw std::invalid_argument("ArimaSpec: negative order");
    if (ar.size() != p) throw std::invalid_argument("ArimaSpec: ar length must equal p");
    if (ma.size() != q) throw std::invalid_argument("ArimaSpec: ma length must equal q");
    if (!(sigma_eps >= 0.0)) throw std::invalid_argument("ArimaSpec: sigma_eps must be non-negative");
}

ArimaSpec fit_rwd(const Vector& kappa) {
    if (kappa.size() < 3) throw std::invalid_argument("fit_rwd: need at least 3 observations");
    const Index m = kappa.size() - 1;
    const Vector differences = kappa.tail(m) - kappa.head(m);
    ArimaSpec spec;
    spec.d = 1;
    spec.drift = differences.mean();
    const double rss = (differences.array() - spec.drift).square().sum();
    const double dof = static_cast<double>(std::max<Index>(m - 2, 1));
    spec.sigma_eps = std::sqrt(rss / dof);
    spec.validate();
    return spec;
}

namespace {

/// d-th differences of a series; returns the series itself for d = 0.
Vector difference(const Vector& series, int d) {
    Vector current = series;
    for (int round = 0; round < d; ++round) {
        if (current.size() < 2) throw std::invalid_argument("arima_forecast: history too short to difference");
        current = Vector(current.tail(current.size() - 1) - current.head(current.size() - 1));
    }
    return current;
}

} // namespace

Vector arima_forecast(const ArimaSpec& spec, const Vector& history, const Vector& residual_history, int horizon) {
    spec.validate();
    if (horizon < 1) throw std::invalid_argument("arima_forecast: horizon must be >= 1");
    if (history.size() < spec.p + spec.d)
        throw std::invalid_argument("arima_forecast: history shorter than p + d");
    if (residual_history.size() < spec.q)
        throw std::invalid_argument("arima_forecast: residual history shorter than q");

    const Vector z = difference(history, spec.d);
    if (z.size() < spec.p) throw std::invalid_argument("arima_forecast: differenced history shorter than p");

    // Forecast the differenced process with future innovations at zero.
    std::vector<double> extended(z.data(), z.data() + z.size());
    std::vector<double> innovations(residual_history.data(), residual_history.data() + residual_history.size());
    for (int h = 1; h <= horizon; ++h) {
        double value = spec.drift;
        for (int i = 1; i <= spec.p; ++i) value += spec.ar[i - 1] * extended[extended.size() - i];
        for (int j = 1; j <= spec.q; ++j) {
            const std::ptrdiff_t offset = static_cast<std::ptrdiff_t>(innovations.size()) - j + (h - 1);
            if (offset >= 0 && offset < static_cast<std::ptrdiff_t>(innovations.size()))
                value += spec.ma[j - 1] * innovations[offset];
        }
        extended.push_back(value);
    }

    // Integrate back to levels d times.
    Vector forecast(horizon);
    for (int h = 0; h < horizon; ++h) forecast[h] = extended[z.size() + h];
    for (int round = spec.d; round >= 1; --round) {
        const Vector lower_order = difference(history, round - 1);
        double level = lower_order[lower_order.size() - 1];
        for (int h = 0; h < horizon; ++h) {
            level += forecast[h];
            forecast[h] = level;
        }
    }
    return forecast;
}

PiVarianceLaw pi_variance_law_from_string(const std::string& name) {
    if (name == "sqrt_h") return PiVarianceLaw::sqrt_h;
    if (name == "linear_h") return PiVarianceLaw::linear_h;
    throw std::invalid_argument("unknown pi variance law: '" + name + "'");
}

std::string to_string(PiVarianceLaw law) {
    return law == PiVarianceLaw::sqrt_h ? "sqrt_h" : "linear_h";
}

ArimaInterval arima_pi(const ArimaSpec& spec, const Vector& point_forecasts, double alpha, PiVarianceLaw law,
                       std::optional<double> loading) {
    spec.validate();
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("arima_pi: alpha must lie in (0,1)");
    const double z = normal_quantile(1.0 - alpha / 2.0);
    const double scale = loading ? std::abs(*loading) : 1.0;
    ArimaInterval interval;
    interval.point = point_forecasts;
    interval.lower.resize(point_forecasts.size());
    interval.upper.resize(point_forecasts.size());
    for (Index h = 0; h < point_forecasts.size(); ++h) {
        const double steps = static_cast<double>(h + 1);
        const double growth = law == PiVarianceLaw::sqrt_h ? std::sqrt(steps) : steps;
        const double half_width = z * growth * spec.sigma_eps * scale;
        interval.lower[h] = point_forecasts[h] - half_width;
        interval.upper[h] = point_forecasts[h] + half_width;
    }
    return interval;
}

void write_arima_interval_csv(const ArimaInterval& interval, std::ostream& out) {
    out << "horizon,point,lower,upper\n";
    for (Index h = 0; h < interval.point.size(); ++h)
        out << (h + 1) << ',' << format_double(interval.point[h]) << ',' << format_double(interval.lower[h]) << ','
            << format_double(interval.upper[h]) << '\n';
}

} // namespace mortcast
