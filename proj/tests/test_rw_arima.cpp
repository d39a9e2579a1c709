#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include <mortcast/rw_arima.hpp>

using namespace mortcast;

TEST_CASE("fit_rwd on an exact line") {
    Vector kappa(4);
    kappa << 10.0, 8.0, 6.0, 4.0;
    const ArimaSpec spec = fit_rwd(kappa);
    CHECK(spec.drift == -2.0);
    CHECK(spec.sigma_eps == 0.0);
    CHECK(spec.d == 1);
}

TEST_CASE("fit_rwd hand computation") {
    Vector kappa(4);
    kappa << 0.0, 1.0, 0.0, 1.0;
    const ArimaSpec spec = fit_rwd(kappa);
    CHECK(spec.drift == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    // Differences (1,-1,1) about 1/3: sum of squares 8/3 over denominator 1.
    CHECK(spec.sigma_eps == doctest::Approx(1.632993161855452).epsilon(1e-12));
}

TEST_CASE("fit_rwd on a constant series") {
    const ArimaSpec spec = fit_rwd(Vector::Constant(6, 5.5));
    CHECK(spec.drift == 0.0);
    CHECK(spec.sigma_eps == 0.0);
    CHECK_THROWS_AS(static_cast<void>(fit_rwd(Vector::Constant(2, 1.0))), std::invalid_argument);
}

TEST_CASE("random walk with drift forecast closed form") {
    ArimaSpec spec;
    spec.d = 1;
    spec.drift = -2.0;
    spec.sigma_eps = 1.0;
    Vector history(3);
    history << -46.0, -48.0, -50.0;
    const Vector forecast = arima_forecast(spec, history, Vector(), 3);
    CHECK(forecast[0] == doctest::Approx(-52.0));
    CHECK(forecast[1] == doctest::Approx(-54.0));
    CHECK(forecast[2] == doctest::Approx(-56.0));

    spec.drift = 0.0;
    const Vector flat = arima_forecast(spec, history, Vector(), 4);
    for (Index h = 0; h < 4; ++h) CHECK(flat[h] == doctest::Approx(-50.0));
}

TEST_CASE("AR(1) on differences hand recursion") {
    ArimaSpec spec;
    spec.p = 1;
    spec.d = 1;
    spec.drift = 0.0;
    spec.ar = Vector::Constant(1, 0.5);
    spec.sigma_eps = 1.0;
    Vector history(3);
    history << -3.0, -2.0, 0.0; // last difference is 2
    const Vector forecast = arima_forecast(spec, history, Vector(), 3);
    CHECK(forecast[0] == doctest::Approx(1.0));
    CHECK(forecast[1] == doctest::Approx(1.5));
    CHECK(forecast[2] == doctest::Approx(1.75));
}

TEST_CASE("MA(1) residual history enters only the first step") {
    ArimaSpec spec;
    spec.q = 1;
    spec.d = 0;
    spec.drift = 1.0;
    spec.ma = Vector::Constant(1, 0.5);
    spec.sigma_eps = 1.0;
    Vector history(3);
    history << 0.0, 0.0, 0.0;
    Vector residuals(1);
    residuals << 2.0;
    const Vector forecast = arima_forecast(spec, history, residuals, 3);
    CHECK(forecast[0] == doctest::Approx(2.0)); // drift + theta * eps_tn
    CHECK(forecast[1] == doctest::Approx(1.0));
    CHECK(forecast[2] == doctest::Approx(1.0));
}

TEST_CASE("arima_forecast validates history lengths") {
    ArimaSpec spec;
    spec.p = 2;
    spec.d = 1;
    spec.ar = Vector::Zero(2);
    CHECK_THROWS_AS(static_cast<void>(arima_forecast(spec, Vector::Zero(2), Vector(), 2)), std::invalid_argument);
}

TEST_CASE("prediction interval widths") {
    ArimaSpec spec;
    spec.d = 1;
    spec.sigma_eps = 1.0;
    Vector points = Vector::Zero(4);

    SUBCASE("degenerate when sigma is zero") {
        spec.sigma_eps = 0.0;
        const ArimaInterval interval = arima_pi(spec, points, 0.05);
        CHECK(interval.lower == interval.point);
        CHECK(interval.upper == interval.point);
    }

    SUBCASE("sqrt-h law half-widths") {
        const ArimaInterval interval = arima_pi(spec, points, 0.05);
        // z(0.975) = 1.959963984540054; at h = 4 the half-width doubles.
        CHECK(interval.upper[0] == doctest::Approx(1.959963984540054).epsilon(1e-12));
        CHECK(interval.upper[3] == doctest::Approx(3.919927969080108).epsilon(1e-12));
        const double ratio = interval.upper[3] / interval.upper[0];
        CHECK(std::abs(ratio - 2.0) < 1e-12);
    }

    SUBCASE("h = 1 with doubled sigma matches h = 4 with unit sigma") {
        spec.sigma_eps = 2.0;
        const ArimaInterval interval = arima_pi(spec, points, 0.05);
        CHECK(interval.upper[0] == doctest::Approx(3.919927969080108).epsilon(1e-12));
    }

    SUBCASE("literal linear-h law") {
        const ArimaInterval interval = arima_pi(spec, points, 0.05, PiVarianceLaw::linear_h);
        CHECK(interval.upper[3] / interval.upper[0] == doctest::Approx(4.0).epsilon(1e-12));
    }

    SUBCASE("age loading scales the width and keeps order for negative beta") {
        const ArimaInterval interval = arima_pi(spec, points, 0.05, PiVarianceLaw::sqrt_h, -0.25);
        CHECK(interval.upper[0] == doctest::Approx(0.25 * 1.959963984540054).epsilon(1e-12));
        CHECK(interval.lower[0] < interval.upper[0]);
    }
}

TEST_CASE("Monte Carlo quantiles agree with the analytic bounds") {
    const double drift = -1.5;
    const double sigma = 2.0;
    const int horizon = 6;
    const int paths = 20000;
    std::mt19937_64 rng(12);
    std::normal_distribution<double> noise(0.0, sigma);

    Matrix simulated(paths, horizon);
    for (int b = 0; b < paths; ++b) {
        double level = 0.0;
        for (int h = 0; h < horizon; ++h) {
            level += drift + noise(rng);
            simulated(b, h) = level;
        }
    }
    ArimaSpec spec;
    spec.d = 1;
    spec.drift = drift;
    spec.sigma_eps = sigma;
    Vector history(3);
    history << 3.0, 1.5, 0.0;
    const Vector points = arima_forecast(spec, history, Vector(), horizon);
    const ArimaInterval interval = arima_pi(spec, points, 0.05);

    for (int h = 0; h < horizon; ++h) {
        std::vector<double> column(paths);
        for (int b = 0; b < paths; ++b) column[b] = simulated(b, h);
        std::sort(column.begin(), column.end());
        const double lo = column[static_cast<std::size_t>(0.025 * paths)];
        const double hi = column[static_cast<std::size_t>(0.975 * paths)];
        const double half_width = (interval.upper[h] - interval.lower[h]) / 2.0;
        CHECK(std::abs(lo - interval.lower[h]) < 0.05 * half_width);
        CHECK(std::abs(hi - interval.upper[h]) < 0.05 * half_width);
    }
}
