#pragma once

#include <map>
#include <string>

#include <mortcast/types.hpp>

namespace mortcast {

/// Divisor for the averaging metrics: the printed formulas use count-1, the
/// values they report are only reachable with count.
enum class MetricDenominator { count, count_minus_one };

MetricDenominator metric_denominator_from_string(const std::string& name);
std::string to_string(MetricDenominator denominator);

/// sqrt(sum of squared errors / denominator); the printed form (count-1) is
/// the default here.
double rmse(const Vector& actual, const Vector& predicted,
            MetricDenominator denominator = MetricDenominator::count_minus_one);

/// Fraction of observed values inside [lower, upper].
double picp(const Vector& actual, const Vector& lower, const Vector& upper,
            MetricDenominator denominator = MetricDenominator::count);

/// Mean interval width over the horizon.
double mpiw(const Vector& lower, const Vector& upper, MetricDenominator denominator = MetricDenominator::count);

struct MetricsReport {
    double rmse_k = 0.0;
    double picp_k = 0.0;
    double mpiw_k = 0.0;
    std::map<int, double> rmse_m;
    std::map<int, double> picp_m;
    std::map<int, double> mpiw_m;
    int horizon = 0;
    double alpha = 0.0;
};

} // namespace mortcast
