#include <doctest.h>

#include <cmath>
#include <random>

#include <mortcast/diagnostics.hpp>
#include <mortcast/stats.hpp>

using namespace mortcast;

namespace {

Vector normal_sample(std::mt19937_64& rng, int n, double mean = 0.0, double sd = 1.0) {
    std::normal_distribution<double> noise(mean, sd);
    Vector sample(n);
    for (Index i = 0; i < n; ++i) sample[i] = noise(rng);
    return sample;
}

/// Rejection rate of `test` at level 5% over `reps` N(0,1) samples of size n.
template <typename Test>
double rejection_rate(Test test, int n, int reps, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    int rejections = 0;
    for (int r = 0; r < reps; ++r)
        if (test(normal_sample(rng, n)).p_value < 0.05) ++rejections;
    return static_cast<double>(rejections) / reps;
}

} // namespace

TEST_CASE("jarque-bera on a symmetric sample has no skewness component") {
    // Antisymmetric sample: skewness is exactly zero, so JB reduces to the
    // kurtosis term n/6 * (K-3)^2 / 4.
    Vector sample(10);
    sample << -5.0, -4.0, -3.0, -2.0, -1.0, 1.0, 2.0, 3.0, 4.0, 5.0;
    const TestReport report = jarque_bera(sample);
    CHECK(report.detail.at("skewness") == doctest::Approx(0.0));
    const double kurt = report.detail.at("kurtosis");
    CHECK(report.statistic == doctest::Approx(10.0 / 6.0 * 0.25 * (kurt - 3.0) * (kurt - 3.0)).epsilon(1e-12));
    CHECK(report.p_value == doctest::Approx(std::exp(-0.5 * report.statistic)).epsilon(1e-12));
}

TEST_CASE("jarque-bera guards") {
    CHECK_THROWS_AS(static_cast<void>(jarque_bera(Vector::Zero(5))), std::invalid_argument);   // n too small
    CHECK_THROWS_AS(static_cast<void>(jarque_bera(Vector::Ones(20))), std::invalid_argument);  // constant
}

TEST_CASE("normality test calibration at the 5% level") {
    // n = 51, 400 replications per test; nominal size must land in [0.02, 0.08].
    const double jb = rejection_rate([](const Vector& s) { return jarque_bera(s); }, 51, 400, 101);
    CHECK(jb >= 0.02);
    CHECK(jb <= 0.08);
    const double dp = rejection_rate([](const Vector& s) { return dagostino_pearson(s); }, 51, 400, 102);
    CHECK(dp >= 0.02);
    CHECK(dp <= 0.08);
    const double sw = rejection_rate([](const Vector& s) { return shapiro_wilk(s); }, 51, 400, 103);
    CHECK(sw >= 0.02);
    CHECK(sw <= 0.08);
}

TEST_CASE("heavy tails are rejected with high power") {
    std::mt19937_64 rng(7);
    std::student_t_distribution<double> heavy(2.0);
    int jb_rejections = 0;
    int dp_rejections = 0;
    const int reps = 50;
    for (int r = 0; r < reps; ++r) {
        Vector sample(200);
        for (Index i = 0; i < 200; ++i) sample[i] = heavy(rng);
        if (jarque_bera(sample).p_value < 0.01) ++jb_rejections;
        if (dagostino_pearson(sample).p_value < 0.01) ++dp_rejections;
    }
    CHECK(jb_rejections >= static_cast<int>(0.95 * reps));
    CHECK(dp_rejections >= static_cast<int>(0.90 * reps));
}

TEST_CASE("platykurtic samples are rejected by the omnibus test") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> flat(-1.0, 1.0);
    int rejections = 0;
    const int reps = 50;
    for (int r = 0; r < reps; ++r) {
        Vector sample(200);
        for (Index i = 0; i < 200; ++i) sample[i] = flat(rng);
        if (dagostino_pearson(sample).p_value < 0.05) ++rejections;
    }
    CHECK(rejections >= static_cast<int>(0.90 * reps));
}

TEST_CASE("dagostino-pearson guards and statistic sign") {
    CHECK_THROWS_AS(static_cast<void>(dagostino_pearson(Vector::Zero(19))), std::invalid_argument);
    std::mt19937_64 rng(3);
    for (int r = 0; r < 10; ++r) {
        const TestReport report = dagostino_pearson(normal_sample(rng, 40));
        CHECK(report.statistic >= 0.0);
        CHECK(report.p_value >= 0.0);
        CHECK(report.p_value <= 1.0);
    }
}

TEST_CASE("shapiro-wilk statistic lies in (0, 1]") {
    std::mt19937_64 rng(4);
    for (int n : {3, 5, 11, 12, 51, 300}) {
        const TestReport report = shapiro_wilk(normal_sample(rng, n));
        CHECK(report.statistic > 0.0);
        CHECK(report.statistic <= 1.0);
        CHECK(report.p_value >= 0.0);
        CHECK(report.p_value <= 1.0);
    }
}

TEST_CASE("shapiro-wilk on exact normal scores is nearly one") {
    // The expected normal order statistics themselves are the best case.
    const int n = 50;
    Vector blom(n);
    for (Index i = 1; i <= n; ++i)
        blom[i - 1] = normal_quantile((static_cast<double>(i) - 0.375) / (n + 0.25));
    const TestReport report = shapiro_wilk(blom);
    CHECK(report.statistic > 0.99);
    CHECK(report.p_value > 0.9);
}

TEST_CASE("shapiro-wilk rejects ties with zero range") {
    CHECK_THROWS_AS(static_cast<void>(shapiro_wilk(Vector::Ones(10))), std::invalid_argument);
}

TEST_CASE("normality statistics are invariant under positive affine maps") {
    std::mt19937_64 rng(11);
    const Vector sample = normal_sample(rng, 51);
    const Vector mapped = (sample.array() * 3.7 - 11.0).matrix();
    CHECK(std::abs(jarque_bera(sample).statistic - jarque_bera(mapped).statistic) < 1e-10);
    CHECK(std::abs(dagostino_pearson(sample).statistic - dagostino_pearson(mapped).statistic) < 1e-10);
    CHECK(std::abs(shapiro_wilk(sample).statistic - shapiro_wilk(mapped).statistic) < 1e-10);
}

namespace {

Vector random_walk(std::mt19937_64& rng, int n, double sigma = 1.0) {
    std::normal_distribution<double> noise(0.0, sigma);
    Vector path(n);
    path[0] = 0.0;
    for (Index t = 1; t < n; ++t) path[t] = path[t - 1] + noise(rng);
    return path;
}

} // namespace

TEST_CASE("adf keeps the null on random walks and rejects white noise") {
    std::mt19937_64 rng(21);
    int false_rejections = 0;
    const int size_reps = 150;
    for (int r = 0; r < size_reps; ++r)
        if (adf_test(random_walk(rng, 50)).p_value < 0.05) ++false_rejections;
    CHECK(false_rejections <= static_cast<int>(0.15 * size_reps));

    int rejections = 0;
    const int power_reps = 100;
    for (int r = 0; r < power_reps; ++r)
        if (adf_test(normal_sample(rng, 100)).p_value < 0.05) ++rejections;
    CHECK(rejections >= static_cast<int>(0.90 * power_reps));
}

TEST_CASE("adf p-values clamp at the table edges") {
    std::mt19937_64 rng(31);
    // White noise gives a very negative tau: the floor prints as exactly 0.01.
    const TestReport strong = adf_test(normal_sample(rng, 200));
    CHECK(strong.p_value == doctest::Approx(0.01));
    // A noisy explosive series drives tau positive, far above the table: the
    // ceiling prints as exactly 0.99.
    std::normal_distribution<double> noise(0.0, 0.5);
    Vector explosive(40);
    explosive[0] = 1.0;
    for (Index t = 1; t < 40; ++t) explosive[t] = 1.15 * explosive[t - 1] + noise(rng);
    const TestReport weak = adf_test(explosive);
    CHECK(weak.p_value == doctest::Approx(0.99));
}

TEST_CASE("adf statistic is invariant under scaling") {
    std::mt19937_64 rng(41);
    const Vector path = random_walk(rng, 60);
    const Vector scaled = (path.array() * 250.0).matrix();
    CHECK(std::abs(adf_test(path).statistic - adf_test(scaled).statistic) < 1e-8);
}

TEST_CASE("adf default lag order and detail fields") {
    std::mt19937_64 rng(51);
    const TestReport report = adf_test(random_walk(rng, 50));
    CHECK(report.detail.at("lags") == doctest::Approx(std::trunc(std::cbrt(49.0))));
    CHECK(report.n == 50);
    CHECK_THROWS_AS(static_cast<void>(adf_test(Vector::Zero(10))), std::invalid_argument);
}
