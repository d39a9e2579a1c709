#include <doctest.h>

#include <cmath>
#include <sstream>

#include <mortcast/lc_poisson.hpp>
#include <mortcast/simulate.hpp>

using namespace mortcast;

namespace {

/// Known constrained truth on a small grid with deterministic deaths.
SimulatedData exact_fixture(int n_ages = 6, int n_years = 12) {
    SimulationSpec spec;
    spec.age_min = 0;
    spec.age_max = n_ages - 1;
    spec.year_min = 1980;
    spec.year_max = 1980 + n_years - 1;
    spec.exposure = 1e6;
    spec.kappa_law = KappaLaw::random_walk_drift;
    spec.kappa_start = 8.0;
    spec.drift = -1.4;
    spec.sigma = 0.7;
    spec.deaths_law = DeathsLaw::deterministic;
    spec.seed = 99;
    return simulate_surface(spec);
}

} // namespace

TEST_CASE("fit_lc recovers known constrained parameters from an exact surface") {
    const SimulatedData data = exact_fixture();
    const LCFitReport report = fit_lc(data.surface, 1e-10, 20000);
    CHECK(report.converged);
    for (Index x = 0; x < data.truth.alpha.size(); ++x) {
        CHECK(report.params.alpha[x] == doctest::Approx(data.truth.alpha[x]).epsilon(1e-4));
        CHECK(report.params.beta[x] == doctest::Approx(data.truth.beta[x]).epsilon(1e-4));
    }
    for (Index t = 0; t < data.truth.kappa.size(); ++t)
        CHECK(std::abs(report.params.kappa[t] - data.truth.kappa[t]) < 1e-3);
}

TEST_CASE("fit_lc enforces the identifiability constraints") {
    const SimulatedData data = exact_fixture(4, 9);
    const LCFitReport report = fit_lc(data.surface);
    CHECK(std::abs(report.params.kappa.sum()) < 1e-8);
    CHECK(std::abs(report.params.beta.sum() - 1.0) < 1e-8);
    report.params.validate();
}

TEST_CASE("deviance trace never increases") {
    SimulationSpec spec;
    spec.age_max = 7;
    spec.year_min = 1979;
    spec.year_max = 2004;
    spec.exposure = 1e5;
    spec.drift = -0.4;
    spec.deaths_law = DeathsLaw::poisson;
    spec.seed = 4;
    const SimulatedData data = simulate_surface(spec);
    const LCFitReport report = fit_lc(data.surface);
    REQUIRE(report.deviance_trace.size() > 1);
    for (std::size_t i = 1; i < report.deviance_trace.size(); ++i)
        CHECK(report.deviance_trace[i] <= report.deviance_trace[i - 1]);
    CHECK(report.converged);
}

TEST_CASE("degenerate period effect: fitted rates match alpha") {
    MortalitySurface surface;
    surface.ages = {0, 1, 2};
    surface.years = {2000, 2001, 2002, 2003};
    Vector alpha(3);
    alpha << -5.0, -4.5, -4.0;
    surface.exposures = Matrix::Constant(3, 4, 1e6);
    surface.deaths = surface.exposures.array() * alpha.replicate(1, 4).array().exp();
    const LCFitReport report = fit_lc(surface, 1e-12);
    const Matrix fitted_log =
        report.params.alpha.replicate(1, 4) + report.params.beta * report.params.kappa.transpose();
    for (Index x = 0; x < 3; ++x)
        for (Index t = 0; t < 4; ++t) CHECK(fitted_log(x, t) == doctest::Approx(alpha[x]).epsilon(1e-6));
}

TEST_CASE("fit_lc rejects zero-death cells") {
    MortalitySurface surface;
    surface.ages = {0, 1};
    surface.years = {2000, 2001};
    surface.deaths.resize(2, 2);
    surface.deaths << 5.0, 4.0, 0.0, 2.0;
    surface.exposures = Matrix::Constant(2, 2, 100.0);
    CHECK_THROWS_WITH_AS(static_cast<void>(fit_lc(surface)), doctest::Contains("zero deaths"), std::runtime_error);
}

TEST_CASE("constraint transformation is idempotent and preserves fitted rates") {
    LCParameters params;
    params.ages = {0, 1, 2};
    params.years = {2000, 2001, 2002, 2003};
    params.alpha.resize(3);
    params.alpha << -5.0, -4.0, -3.0;
    params.beta.resize(3);
    params.beta << 0.9, 0.7, 0.4;
    params.kappa.resize(4);
    params.kappa << 3.0, 1.0, -0.5, -1.5;

    const LCParameters once = apply_identifiability_constraints(params);
    const LCParameters twice = apply_identifiability_constraints(once);
    CHECK(std::abs(once.kappa.sum()) < 1e-12);
    CHECK(once.beta.sum() == doctest::Approx(1.0).epsilon(1e-14));
    for (Index x = 0; x < 3; ++x) {
        CHECK(twice.alpha[x] == doctest::Approx(once.alpha[x]).epsilon(1e-14));
        CHECK(twice.beta[x] == doctest::Approx(once.beta[x]).epsilon(1e-14));
    }
    for (Index t = 0; t < 4; ++t) CHECK(twice.kappa[t] == doctest::Approx(once.kappa[t]).epsilon(1e-14));

    const Matrix before = params.alpha.replicate(1, 4) + params.beta * params.kappa.transpose();
    const Matrix after = once.alpha.replicate(1, 4) + once.beta * once.kappa.transpose();
    CHECK((before - after).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("deviance residual formula") {
    MortalitySurface surface;
    surface.ages = {0};
    surface.years = {2000, 2001, 2002};
    surface.deaths.resize(1, 3);
    surface.exposures = Matrix::Constant(1, 3, 1.0);
    LCParameters params;
    params.ages = {0};
    params.years = {2000, 2001, 2002};
    params.alpha = Vector::Zero(1);
    params.beta = Vector::Ones(1);
    params.kappa.resize(3);
    // Fitted deaths exp(kappa): 8, 10, 5.
    params.kappa << std::log(8.0), std::log(10.0), std::log(5.0);
    surface.deaths << 10.0, 8.0, 5.0;

    const Matrix residuals = deviance_residuals(surface, params);
    // Direct formula evaluation: sqrt(2*(10*ln(10/8) - 2)) and -sqrt(2*(8*ln(8/10) + 2)).
    CHECK(residuals(0, 0) == doctest::Approx(0.6803462546999102).epsilon(1e-12));
    CHECK(residuals(0, 1) == doctest::Approx(-0.6555174894483324).epsilon(1e-12));
    CHECK(residuals(0, 2) == doctest::Approx(0.0));
}

TEST_CASE("residual reconstruction inverts the residual map") {
    const SimulatedData data = exact_fixture(4, 8);
    SimulationSpec noisy;
    noisy.age_max = 3;
    noisy.year_min = 1980;
    noisy.year_max = 1987;
    noisy.exposure = 2e5;
    noisy.drift = -0.5;
    noisy.deaths_law = DeathsLaw::poisson;
    noisy.seed = 11;
    const SimulatedData poisson_data = simulate_surface(noisy);
    const LCFitReport fit = fit_lc(poisson_data.surface);

    SUBCASE("zero residuals reproduce the fitted deaths") {
        const Matrix zeros = Matrix::Zero(4, 8);
        const MortalitySurface pseudo =
            reconstruct_surface_from_residuals(poisson_data.surface, fit.params, zeros);
        CHECK((pseudo.deaths - fit.fitted_deaths).cwiseAbs().maxCoeff() < 1e-9 * fit.fitted_deaths.maxCoeff());
        CHECK(pseudo.exposures == poisson_data.surface.exposures);
    }

    SUBCASE("the original residuals reproduce the observed deaths") {
        const MortalitySurface pseudo =
            reconstruct_surface_from_residuals(poisson_data.surface, fit.params, fit.deviance_residuals);
        for (Index x = 0; x < 4; ++x)
            for (Index t = 0; t < 8; ++t)
                CHECK(std::abs(pseudo.deaths(x, t) - poisson_data.surface.deaths(x, t)) <=
                      1e-6 * std::max(1.0, poisson_data.surface.deaths(x, t)));
    }

    SUBCASE("single cell against an independent bisection solution") {
        MortalitySurface cell;
        cell.ages = {0};
        cell.years = {2000};
        cell.deaths = Matrix::Constant(1, 1, 100.0);
        cell.exposures = Matrix::Constant(1, 1, 1.0);
        LCParameters params;
        params.ages = {0};
        params.years = {2000};
        params.alpha = Vector::Constant(1, std::log(100.0));
        params.beta = Vector::Ones(1);
        params.kappa = Vector::Zero(1);
        const Matrix target = Matrix::Constant(1, 1, 1.0);
        const MortalitySurface pseudo = reconstruct_surface_from_residuals(cell, params, target);
        // r(D, 100) = 1 solved by bisection gives 110.16531353718656.
        CHECK(pseudo.deaths(0, 0) == doctest::Approx(110.16531353718656).epsilon(1e-9));
        // Plugging back must reproduce the requested residual.
        const double d = pseudo.deaths(0, 0);
        const double r = std::sqrt(2.0 * (d * std::log(d / 100.0) - (d - 100.0)));
        CHECK(r == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("lc_point_forecast maps kappa through the fitted decomposition") {
    LCParameters params;
    params.ages = {60, 61};
    params.years = {2000, 2001};
    params.alpha.resize(2);
    params.alpha << -4.0, -3.9;
    params.beta.resize(2);
    params.beta << 0.02, 0.0;
    params.kappa = Vector::Zero(2);

    Vector future(3);
    future << -10.0, -20.0, -30.0;
    const LogRateSurface forecast = lc_point_forecast(params, future, {2002, 2003, 2004});
    CHECK(forecast.logm(0, 0) == doctest::Approx(-4.2));
    CHECK(forecast.logm(0, 2) == doctest::Approx(-4.6));
    // Zero sensitivity: constant forecast across the horizon.
    CHECK(forecast.logm(1, 0) == doctest::Approx(-3.9));
    CHECK(forecast.logm(1, 2) == doctest::Approx(-3.9));

    const Vector centered = Vector::Zero(3);
    const LogRateSurface flat = lc_point_forecast(params, centered, {2002, 2003, 2004});
    CHECK(flat.logm(0, 1) == doctest::Approx(params.alpha[0]));
}

TEST_CASE("parameter CSV round-trips") {
    const SimulatedData data = exact_fixture(4, 6);
    const LCFitReport report = fit_lc(data.surface);
    std::ostringstream out;
    write_parameters_csv(report.params, out);
    std::istringstream in(out.str());
    const LCParameters parsed = read_parameters_csv(in);
    CHECK(parsed.alpha == report.params.alpha);
    CHECK(parsed.beta == report.params.beta);
    CHECK(parsed.kappa == report.params.kappa);
    CHECK(parsed.ages == report.params.ages);
    CHECK(parsed.years == report.params.years);
}
