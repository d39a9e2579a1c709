#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <mortcast/pipeline.hpp>

using namespace mortcast;

namespace {

/// 40 training years + 8 test years of Poisson data, small enough for unit
/// tests; B and the grid stay tiny here, the acceptance suite scales them up.
struct PipelineFixture {
    SimulatedData data;
    RunConfig config;

    PipelineFixture() {
        SimulationSpec spec;
        spec.age_min = 40;
        spec.age_max = 49;
        spec.year_min = 1960;
        spec.year_max = 2008;
        spec.exposure = 3e5;
        spec.alpha_level = -5.8;
        spec.alpha_slope = 0.06;
        spec.kappa_start = 12.0;
        spec.drift = -0.6;
        spec.sigma = 0.6;
        spec.deaths_law = DeathsLaw::poisson;
        spec.seed = 77;
        data = simulate_surface(spec);

        config.age_min = 40;
        config.age_max = 49;
        config.year_min = 1960;
        config.year_max = 2008;
        config.origin = 2000;
        config.horizon_end = 2008;
        config.bootstrap_samples = 4;
        config.grid_hidden = {3};
        config.grid_learning_rates = {0.01};
        config.max_epochs = 250;
        config.patience = 80;
        config.seed = 2024;
        config.eval_ages = {42, 45};
        config.country = "testland";
    }
};

} // namespace

TEST_CASE("run_pipeline produces a coherent set of artifacts") {
    PipelineFixture fixture;
    const ForecastArtifacts artifacts = run_pipeline(fixture.config, fixture.data.surface);

    CHECK(artifacts.forecast_years.size() == 8);
    CHECK(artifacts.kappa_train.size() == 41);
    CHECK(artifacts.kappa_test_actual.size() == 8);
    CHECK(artifacts.lstm_point.size() == 8);
    CHECK(artifacts.ensemble.paths.rows() == 4);
    CHECK(artifacts.ensemble.paths.cols() == 8);
    artifacts.kappa_interval.validate();
    CHECK(artifacts.rwd.d == 1);
    CHECK(artifacts.battery.size() == 4);

    // The kappa interval contains its own point forecast strictly inside.
    for (Index h = 0; h < 8; ++h) {
        CHECK(artifacts.kappa_interval.lower[h] < artifacts.lstm_point[h]);
        CHECK(artifacts.kappa_interval.upper[h] > artifacts.lstm_point[h]);
    }
}

TEST_CASE("run_pipeline is deterministic end to end") {
    PipelineFixture fixture;
    const ForecastArtifacts a = run_pipeline(fixture.config, fixture.data.surface);
    const ForecastArtifacts b = run_pipeline(fixture.config, fixture.data.surface);
    CHECK(a.lstm_point == b.lstm_point);
    CHECK(a.ensemble.paths == b.ensemble.paths);
    CHECK(a.kappa_interval.lower == b.kappa_interval.lower);
    CHECK(a.rwd_point == b.rwd_point);
}

TEST_CASE("evaluate_forecast emits one row per model and series") {
    PipelineFixture fixture;
    const ForecastArtifacts artifacts = run_pipeline(fixture.config, fixture.data.surface);
    const auto rows = evaluate_forecast(fixture.config, fixture.data.surface, artifacts);
    // 2 models for kappa + 2 models per evaluation age.
    CHECK(rows.size() == 2 + 2 * fixture.config.eval_ages.size());
    for (const auto& row : rows) {
        CHECK(row.rmse >= 0.0);
        CHECK(row.picp >= 0.0);
        CHECK(row.picp <= 1.0);
        CHECK(row.mpiw >= 0.0);
    }
}

TEST_CASE("metrics-literal only changes denominators") {
    PipelineFixture fixture;
    const ForecastArtifacts artifacts = run_pipeline(fixture.config, fixture.data.surface);
    const auto plain = evaluate_forecast(fixture.config, fixture.data.surface, artifacts);
    RunConfig literal_config = fixture.config;
    literal_config.metrics_literal = true;
    const auto literal = evaluate_forecast(literal_config, fixture.data.surface, artifacts);
    REQUIRE(plain.size() == literal.size());
    const double s = 8.0;
    for (std::size_t i = 0; i < plain.size(); ++i) {
        CHECK(literal[i].rmse == plain[i].rmse); // rmse is s-1 in both
        CHECK(literal[i].picp == doctest::Approx(plain[i].picp * s / (s - 1.0)).epsilon(1e-12));
        CHECK(literal[i].mpiw == doctest::Approx(plain[i].mpiw * s / (s - 1.0)).epsilon(1e-12));
    }
}

TEST_CASE("eq14-literal collapses the bagged variance column") {
    PipelineFixture fixture;
    RunConfig literal_config = fixture.config;
    literal_config.eq14_literal = true;
    const ForecastArtifacts artifacts = run_pipeline(literal_config, fixture.data.surface);
    for (Index t = 0; t < artifacts.bagged.variance.size(); ++t)
        CHECK(std::abs(artifacts.bagged.variance[t]) < 1e-9);
}

TEST_CASE("simulate command writes HMD files the pipeline can re-ingest") {
    const std::filesystem::path dir = std::filesystem::temp_directory_path() / "mortcast_test_sim";
    std::filesystem::remove_all(dir);

    RunConfig config;
    config.out_dir = dir.string();
    SimulationSpec spec;
    spec.age_max = 5;
    spec.year_min = 1990;
    spec.year_max = 2005;
    spec.exposure = 1e5;
    spec.drift = -0.5;
    spec.deaths_law = DeathsLaw::deterministic;
    spec.seed = 3;
    cmd_simulate(config, spec);

    RunConfig reload;
    reload.deaths_path = (dir / "deaths_1x1.txt").string();
    reload.exposures_path = (dir / "exposures_1x1.txt").string();
    reload.age_min = 0;
    reload.age_max = 5;
    reload.year_min = 1990;
    reload.year_max = 2005;
    reload.origin = 2000;
    reload.horizon_end = 2005;
    const MortalitySurface surface = load_surface(reload);
    CHECK(surface.n_ages() == 6);
    CHECK(surface.n_years() == 16);

    // The round-tripped surface matches the generator output exactly.
    std::ifstream surface_csv(dir / "surface.csv");
    const MortalitySurface reference = read_surface_csv(surface_csv);
    CHECK(surface == reference);

    std::filesystem::remove_all(dir);
}

TEST_CASE("RunConfig validation catches bad settings") {
    RunConfig config;
    config.origin = 1940; // outside the year range
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config = RunConfig{};
    config.horizon_end = config.origin;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config = RunConfig{};
    config.spreading = "sometimes";
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
}
