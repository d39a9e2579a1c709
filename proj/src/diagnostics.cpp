#include <mortcast/diagnostics.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <mortcast/stats.hpp>

namespace mortcast {

TestReport jarque_bera(const Vector& sample) {
    const Index n = sample.size();
    if (n < 8) throw std::invalid_argument("jarque_bera: need n >= 8");
    const double skew = sample_skewness(sample); // throws on zero variance
    const double kurt = sample_kurtosis(sample);
    const double excess = kurt - 3.0;
    const double statistic = static_cast<double>(n) / 6.0 * (skew * skew + 0.25 * excess * excess);
    TestReport report;
    report.test_name = "jarque_bera";
    report.statistic = statistic;
    report.p_value = chi2_survival_2df(statistic);
    report.n = static_cast<int>(n);
    report.detail = {{"skewness", skew}, {"kurtosis", kurt}};
    return report;
}

namespace {

double skewness_z(const Vector& sample) {
    const double n = static_cast<double>(sample.size());
    const double b1 = sample_skewness(sample);
    double y = b1 * std::sqrt((n + 1.0) * (n + 3.0) / (6.0 * (n - 2.0)));
    const double beta2 =
        3.0 * (n * n + 27.0 * n - 70.0) * (n + 1.0) * (n + 3.0) / ((n - 2.0) * (n + 5.0) * (n + 7.0) * (n + 9.0));
    const double w2 = -1.0 + std::sqrt(2.0 * (beta2 - 1.0));
    const double delta = 1.0 / std::sqrt(0.5 * std::log(w2));
    const double alpha = std::sqrt(2.0 / (w2 - 1.0));
    if (y == 0.0) y = 1.0;
    return delta * std::log(y / alpha + std::sqrt((y / alpha) * (y / alpha) + 1.0));
}

double kurtosis_z(const Vector& sample) {
    const double n = static_cast<double>(sample.size());
    const double b2 = sample_kurtosis(sample);
    const double mean_b2 = 3.0 * (n - 1.0) / (n + 1.0);
    const double var_b2 = 24.0 * n * (n - 2.0) * (n - 3.0) / ((n + 1.0) * (n + 1.0) * (n + 3.0) * (n + 5.0));
    const double x = (b2 - mean_b2) / std::sqrt(var_b2);
    const double sqrt_beta1 = 6.0 * (n * n - 5.0 * n + 2.0) / ((n + 7.0) * (n + 9.0)) *
                              std::sqrt(6.0 * (n + 3.0) * (n + 5.0) / (n * (n - 2.0) * (n - 3.0)));
    const double a =
        6.0 + 8.0 / sqrt_beta1 * (2.0 / sqrt_beta1 + std::sqrt(1.0 + 4.0 / (sqrt_beta1 * sqrt_beta1)));
    const double term1 = 1.0 - 2.0 / (9.0 * a);
    const double denominator = 1.0 + x * std::sqrt(2.0 / (a - 4.0));
    const double term2 =
        std::copysign(std::cbrt((1.0 - 2.0 / a) / std::abs(denominator)), denominator);
    return (term1 - term2) / std::sqrt(2.0 / (9.0 * a));
}

} // namespace

TestReport dagostino_pearson(const Vector& sample) {
    const Index n = sample.size();
    if (n < 20) throw std::invalid_argument("dagostino_pearson: need n >= 20 for the normalizing transforms");
    const double z1 = skewness_z(sample);
    const double z2 = kurtosis_z(sample);
    const double statistic = z1 * z1 + z2 * z2;
    TestReport report;
    report.test_name = "dagostino_pearson";
    report.statistic = statistic;
    report.p_value = chi2_survival_2df(statistic);
    report.n = static_cast<int>(n);
    report.detail = {{"z_skewness", z1}, {"z_kurtosis", z2}};
    return report;
}

namespace {

double polynomial(const double* coefficients, int count, double x) {
    double value = coefficients[count - 1];
    for (int i = count - 2; i >= 0; --i) value = value * x + coefficients[i];
    return value;
}

} // namespace

TestReport shapiro_wilk(const Vector& sample) {
    const Index n = sample.size();
    if (n < 3 || n > 5000) throw std::invalid_argument("shapiro_wilk: valid for 3 <= n <= 5000");

    std::vector<double> x(sample.data(), sample.data() + n);
    std::sort(x.begin(), x.end());
    if (x.back() - x.front() <= 0.0) throw std::invalid_argument("shapiro_wilk: sample has zero range");

    // Royston's AS R94 coefficient polynomials.
    static const double c1[6] = {0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056};
    static const double c2[6] = {0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};
    static const double c3[4] = {0.544, -0.39978, 0.025054, -6.714e-4};
    static const double c4[4] = {1.3822, -0.77857, 0.062767, -0.0020322};
    static const double c5[4] = {-1.5861, -0.31082, -0.083751, 0.0038915};
    static const double c6[3] = {-0.4803, -0.082676, 0.0030302};

    const Index half = n / 2;
    std::vector<double> weights(half); // upper-half coefficients, positive
    if (n == 3) {
        weights[0] = std::sqrt(0.5);
    } else {
        std::vector<double> scores(half);
        double sum_squares = 0.0;
        for (Index i = 1; i <= half; ++i) {
            scores[i - 1] = normal_quantile((static_cast<double>(i) - 0.375) / (static_cast<double>(n) + 0.25));
            sum_squares += scores[i - 1] * scores[i - 1];
        }
        sum_squares *= 2.0;
        const double norm = std::sqrt(sum_squares);
        const double rsn = 1.0 / std::sqrt(static_cast<double>(n));
        const double a1 = polynomial(c1, 6, rsn) - scores[0] / norm;
        Index first_plain;
        double fac;
        if (n > 5) {
            first_plain = 2;
            const double a2 = polynomial(c2, 6, rsn) - scores[1] / norm;
            fac = std::sqrt((sum_squares - 2.0 * scores[0] * scores[0] - 2.0 * scores[1] * scores[1]) /
                            (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
            weights[1] = a2;
        } else {
            first_plain = 1;
            fac = std::sqrt((sum_squares - 2.0 * scores[0] * scores[0]) / (1.0 - 2.0 * a1 * a1));
        }
        weights[0] = a1;
        for (Index i = first_plain; i < half; ++i) weights[i] = -scores[i] / fac;
    }

    // W is the squared correlation between the order statistics and the
    // antisymmetric coefficient vector (-w_0, ..., 0, ..., +w_0).
    std::vector<double> coefficient(n, 0.0);
    for (Index i = 0; i < half; ++i) {
        coefficient[i] = -weights[i];
        coefficient[n - 1 - i] = weights[i];
    }
    const double x_mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    double ssx = 0.0;
    double ssa = 0.0;
    double sax = 0.0;
    for (Index i = 0; i < n; ++i) {
        const double dx = x[i] - x_mean;
        ssx += dx * dx;
        ssa += coefficient[i] * coefficient[i];
        sax += coefficient[i] * dx;
    }
    const double w = (sax * sax) / (ssa * ssx);

    // Royston's normalizing transformation for the p-value.
    double p_value;
    if (n == 3) {
        const double pi6 = 6.0 / M_PI;
        const double stqr = std::asin(std::sqrt(0.75));
        p_value = std::clamp(pi6 * (std::asin(std::sqrt(w)) - stqr), 0.0, 1.0);
    } else {
        double z;
        if (n <= 11) {
            const double gamma = -2.273 + 0.459 * static_cast<double>(n);
            const double w1 = -std::log(gamma - std::log1p(-w));
            const double mu = polynomial(c3, 4, static_cast<double>(n));
            const double sigma = std::exp(polynomial(c4, 4, static_cast<double>(n)));
            z = (w1 - mu) / sigma;
        } else {
            const double log_n = std::log(static_cast<double>(n));
            const double w1 = std::log1p(-w);
            const double mu = polynomial(c5, 4, log_n);
            const double sigma = std::exp(polynomial(c6, 3, log_n));
            z = (w1 - mu) / sigma;
        }
        p_value = 1.0 - normal_cdf(z);
    }

    TestReport report;
    report.test_name = "shapiro_wilk";
    report.statistic = w;
    report.p_value = p_value;
    report.n = static_cast<int>(n);
    return report;
}

namespace {

// Dickey-Fuller percentiles of the trend-case tau statistic (Fuller 1976),
// by sample size {25, 50, 100, 250, 500, inf}.
constexpr double kAdfProbabilities[8] = {0.01, 0.025, 0.05, 0.10, 0.90, 0.95, 0.975, 0.99};
constexpr double kAdfSampleSizes[6] = {25.0, 50.0, 100.0, 250.0, 500.0, 1e5};
constexpr double kAdfTable[8][6] = {
    {-4.38, -4.15, -4.04, -3.99, -3.98, -3.96}, {-3.95, -3.80, -3.73, -3.69, -3.68, -3.66},
    {-3.60, -3.50, -3.45, -3.43, -3.42, -3.41}, {-3.24, -3.18, -3.15, -3.13, -3.13, -3.12},
    {-1.14, -1.19, -1.22, -1.23, -1.24, -1.25}, {-0.80, -0.87, -0.90, -0.92, -0.93, -0.94},
    {-0.50, -0.58, -0.62, -0.64, -0.65, -0.66}, {-0.15, -0.24, -0.28, -0.31, -0.32, -0.33}};

double interpolate(const double* xs, const double* ys, int count, double x) {
    if (x <= xs[0]) return ys[0];
    if (x >= xs[count - 1]) return ys[count - 1];
    for (int i = 1; i < count; ++i)
        if (x <= xs[i]) {
            const double weight = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
            return ys[i - 1] + weight * (ys[i] - ys[i - 1]);
        }
    return ys[count - 1];
}

double adf_p_value(double tau, double effective_n) {
    double critical[8];
    for (int row = 0; row < 8; ++row)
        critical[row] = interpolate(kAdfSampleSizes, kAdfTable[row], 6, effective_n);
    return interpolate(critical, kAdfProbabilities, 8, tau);
}

} // namespace

TestReport adf_test(const Vector& sample, std::optional<int> lags) {
    const Index n = sample.size();
    if (n < 15) throw std::invalid_argument("adf_test: need n >= 15");
    const int lag_order =
        lags ? *lags : static_cast<int>(std::trunc(std::pow(static_cast<double>(n - 1), 1.0 / 3.0)));
    if (lag_order < 0) throw std::invalid_argument("adf_test: negative lag order");

    const Index diffs = n - 1;
    Vector dy(diffs);
    for (Index i = 0; i < diffs; ++i) dy[i] = sample[i + 1] - sample[i];

    const Index k = lag_order + 1;
    const Index rows = diffs - k + 1;
    const Index columns = 3 + lag_order; // intercept, lagged level, trend, lagged differences
    if (rows <= columns) throw std::invalid_argument("adf_test: too few observations for the lag order");

    Matrix design(rows, columns);
    Vector response(rows);
    for (Index j = 0; j < rows; ++j) {
        const Index t = k + j; // 1-based position in dy
        response[j] = dy[t - 1];
        design(j, 0) = 1.0;
        design(j, 1) = sample[t - 1]; // level one step before the target difference
        design(j, 2) = static_cast<double>(t);
        for (int lag = 1; lag <= lag_order; ++lag) design(j, 2 + lag) = dy[t - 1 - lag];
    }

    const Eigen::ColPivHouseholderQR<Matrix> qr(design);
    if (qr.rank() < columns) throw std::runtime_error("adf_test: singular regression design");
    const Vector coefficients = qr.solve(response);
    const Vector residuals = response - design * coefficients;
    const double sigma2 = residuals.squaredNorm() / static_cast<double>(rows - columns);
    const Matrix xtx_inverse = (design.transpose() * design).ldlt().solve(Matrix::Identity(columns, columns));
    const double se = std::sqrt(sigma2 * xtx_inverse(1, 1));
    const double tau = coefficients[1] / se;

    TestReport report;
    report.test_name = "adf";
    report.statistic = tau;
    report.p_value = adf_p_value(tau, static_cast<double>(diffs));
    report.n = static_cast<int>(n);
    report.detail = {{"lags", static_cast<double>(lag_order)},
                     {"rho", coefficients[1]},
                     {"regression", 2.0}}; // 2 = constant + trend
    return report;
}

} // namespace mortcast
