#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <mortcast/bootstrap.hpp>
#include <mortcast/lc_poisson.hpp>
#include <mortcast/lstm.hpp>
#include <mortcast/metrics.hpp>
#include <mortcast/mortality.hpp>
#include <mortcast/rw_arima.hpp>
#include <mortcast/simulate.hpp>
#include <mortcast/uncertainty.hpp>

namespace mortcast {

/// Everything a run needs, resolvable from a config file plus flag overrides.
struct RunConfig {
    std::string deaths_path;
    std::string exposures_path;
    std::string gender = "total";
    int age_min = 0;
    int age_max = 99;
    int year_min = 1950;
    int year_max = 2018;
    int origin = 2000;
    int horizon_end = 2018;
    double alpha = 0.05;
    int bootstrap_samples = 200;
    std::vector<int> grid_hidden = {5, 10, 15, 20, 25};
    std::vector<double> grid_learning_rates = {0.01, 0.005};
    std::string cell_activation = "relu";
    int max_epochs = 2000;
    int patience = 100;
    std::uint64_t seed = 1;
    std::string pi_variance_law = "sqrt_h";
    bool metrics_literal = false;
    std::string picp_denominator = "s";
    bool eq14_literal = false;
    std::string spreading = "auto"; // auto | random_walk | constant
    std::vector<int> eval_ages = {45, 65, 85};
    std::string out_dir = "out";
    std::string country = "synthetic";
    double lc_tol = 1e-6;
    int lc_max_sweeps = 10000;

    void validate() const;
    std::vector<LSTMConfig> build_grid() const;
    int horizon() const { return horizon_end - origin; }
    std::vector<int> horizon_years() const;
    std::string period_label() const;
    MetricDenominator interval_denominator() const;
};

/// Full end-to-end state of one forecast run.
struct ForecastArtifacts {
    LCFitReport full_fit;
    Vector kappa_train;
    Vector kappa_test_actual; // horizon years that overlap the data window
    std::vector<int> test_years;
    GridSearchResult grid;
    LSTMModel step1_model;
    Vector lstm_point;
    NoiseModel noise;
    std::vector<TestReport> battery;
    GateRecord gate;
    bool gate_available = false;
    EnsembleDistribution ensemble;
    BaggedEstimate bagged;
    PredictionInterval kappa_interval;
    ArimaSpec rwd;
    Vector rwd_point;
    ArimaInterval rwd_interval;
    std::vector<int> forecast_years;
};

MortalitySurface load_surface(const RunConfig& config);

/// Ingest -> LC fit -> split -> grid search -> noise analysis -> bootstrap
/// ensemble -> prediction intervals -> baseline, on an already-built surface.
ForecastArtifacts run_pipeline(const RunConfig& config, const MortalitySurface& surface);

struct EvaluationRow {
    std::string model;
    std::string series;
    double rmse = 0.0;
    double picp = 0.0;
    double mpiw = 0.0;
};

/// Backtest metrics for both models: the kappa series plus the log rates at
/// the configured evaluation ages.
std::vector<EvaluationRow> evaluate_forecast(const RunConfig& config, const MortalitySurface& surface,
                                             const ForecastArtifacts& artifacts);

void cmd_fit(const RunConfig& config);
void cmd_forecast(const RunConfig& config);
void cmd_evaluate(const RunConfig& config);
void cmd_diagnose(const RunConfig& config);
void cmd_simulate(const RunConfig& config, const SimulationSpec& spec);

} // namespace mortcast
