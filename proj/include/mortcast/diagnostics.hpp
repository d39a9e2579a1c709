#pragma once

#include <map>
#include <optional>
#include <string>

#include <mortcast/types.hpp>

namespace mortcast {

struct TestReport {
    std::string test_name;
    double statistic = 0.0;
    double p_value = 0.0;
    int n = 0;
    std::map<std::string, double> detail;
};

/// JB = n/6 * (S^2 + (K-3)^2/4) against chi-square(2). Needs n >= 8 and a
/// non-constant sample.
TestReport jarque_bera(const Vector& sample);

/// K^2 omnibus test: the D'Agostino skewness z and the Anscombe-Glynn kurtosis
/// z, combined against chi-square(2). Needs n >= 20.
TestReport dagostino_pearson(const Vector& sample);

/// W statistic with Royston's polynomial coefficient approximation and his
/// normalizing transformation for the p-value. Valid for 3 <= n <= 5000.
TestReport shapiro_wilk(const Vector& sample);

/// Augmented Dickey-Fuller regression with constant and trend; the reported
/// p-value interpolates the trend-case Dickey-Fuller critical-value table and
/// clamps to [0.01, 0.99] at its edges. Default lag order trunc((n-1)^(1/3)).
TestReport adf_test(const Vector& sample, std::optional<int> lags = std::nullopt);

} // namespace mortcast
