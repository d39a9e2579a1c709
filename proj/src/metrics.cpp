#include <mortcast/metrics.hpp>

#include <cmath>
#include <stdexcept>

namespace mortcast {

namespace {

double divisor(MetricDenominator denominator, Index count) {
    if (denominator == MetricDenominator::count) return static_cast<double>(count);
    if (count < 2) throw std::invalid_argument("metric: count-1 denominator needs at least 2 points");
    return static_cast<double>(count - 1);
}

void check_bounds(const Vector& lower, const Vector& upper) {
    if (lower.size() != upper.size()) throw std::invalid_argument("metric: bound length mismatch");
    if (lower.size() == 0) throw std::invalid_argument("metric: empty bounds");
    for (Index i = 0; i < lower.size(); ++i)
        if (lower[i] > upper[i]) throw std::invalid_argument("metric: inverted interval at position " + std::to_string(i));
}

} // namespace

MetricDenominator metric_denominator_from_string(const std::string& name) {
    if (name == "s") return MetricDenominator::count;
    if (name == "s_minus_1") return MetricDenominator::count_minus_one;
    throw std::invalid_argument("unknown metric denominator: '" + name + "'");
}

std::string to_string(MetricDenominator denominator) {
    return denominator == MetricDenominator::count ? "s" : "s_minus_1";
}

double rmse(const Vector& actual, const Vector& predicted, MetricDenominator denominator) {
    if (actual.size() != predicted.size()) throw std::invalid_argument("rmse: length mismatch");
    if (actual.size() < 2) throw std::invalid_argument("rmse: need at least 2 points");
    const double sum_squares = (actual - predicted).squaredNorm();
    return std::sqrt(sum_squares / divisor(denominator, actual.size()));
}

double picp(const Vector& actual, const Vector& lower, const Vector& upper, MetricDenominator denominator) {
    check_bounds(lower, upper);
    if (actual.size() != lower.size()) throw std::invalid_argument("picp: length mismatch");
    double covered = 0.0;
    for (Index i = 0; i < actual.size(); ++i)
        if (actual[i] >= lower[i] && actual[i] <= upper[i]) covered += 1.0;
    return covered / divisor(denominator, actual.size());
}

double mpiw(const Vector& lower, const Vector& upper, MetricDenominator denominator) {
    check_bounds(lower, upper);
    return (upper - lower).sum() / divisor(denominator, lower.size());
}

} // namespace mortcast
