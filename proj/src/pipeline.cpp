#include <mortcast/pipeline.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include <json.hpp>

#include <mortcast/csv.hpp>
#include <mortcast/stats.hpp>

namespace mortcast {

namespace fs = std::filesystem;
using nlohmann::json;

void RunConfig::validate() const {
    if (age_min > age_max) throw std::invalid_argument("config: age range is empty");
    if (year_min > year_max) throw std::invalid_argument("config: year range is empty");
    if (origin <= year_min || origin > year_max)
        throw std::invalid_argument("config: forecast origin must lie inside the year range");
    if (horizon_end <= origin) throw std::invalid_argument("config: horizon must extend past the origin");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("config: alpha must lie in (0,1)");
    if (bootstrap_samples < 2) throw std::invalid_argument("config: bootstrap_samples must be >= 2");
    if (grid_hidden.empty() || grid_learning_rates.empty()) throw std::invalid_argument("config: empty grid");
    if (spreading != "auto" && spreading != "random_walk" && spreading != "constant")
        throw std::invalid_argument("config: spreading must be auto, random_walk or constant");
    pi_variance_law_from_string(pi_variance_law);
    metric_denominator_from_string(picp_denominator);
    gender_from_string(gender);
    activation_from_string(cell_activation);
}

std::vector<LSTMConfig> RunConfig::build_grid() const {
    std::vector<LSTMConfig> grid;
    std::uint64_t stream = 0;
    for (int hidden : grid_hidden)
        for (double lr : grid_learning_rates) {
            LSTMConfig config;
            config.hidden_units = hidden;
            config.learning_rate = lr;
            config.cell_activation = activation_from_string(cell_activation);
            config.max_epochs = max_epochs;
            config.patience = patience;
            config.seed = derive_seed(seed, 0x67726964ULL + stream++);
            grid.push_back(config);
        }
    return grid;
}

std::vector<int> RunConfig::horizon_years() const {
    std::vector<int> years;
    for (int year = origin + 1; year <= horizon_end; ++year) years.push_back(year);
    return years;
}

std::string RunConfig::period_label() const {
    return std::to_string(year_min) + "-" + std::to_string(origin);
}

MetricDenominator RunConfig::interval_denominator() const {
    if (metrics_literal) return MetricDenominator::count_minus_one;
    return metric_denominator_from_string(picp_denominator);
}

MortalitySurface load_surface(const RunConfig& config) {
    const Gender column = gender_from_string(config.gender);
    std::ifstream deaths_file(config.deaths_path);
    if (!deaths_file) throw std::runtime_error("cannot open deaths file: " + config.deaths_path);
    std::ifstream exposures_file(config.exposures_path);
    if (!exposures_file) throw std::runtime_error("cannot open exposures file: " + config.exposures_path);
    const auto deaths = parse_hmd_table(deaths_file, column);
    const auto exposures = parse_hmd_table(exposures_file, column);
    return build_surface(deaths, exposures, config.age_min, config.age_max, config.year_min, config.year_max);
}

ForecastArtifacts run_pipeline(const RunConfig& config, const MortalitySurface& surface) {
    config.validate();
    ForecastArtifacts artifacts;
    artifacts.forecast_years = config.horizon_years();
    const int horizon = config.horizon();

    // One fit over the whole data window supplies the age parameters and the
    // kappa series; the series is then split at the origin.
    artifacts.full_fit = fit_lc(surface, config.lc_tol, config.lc_max_sweeps);
    const Index origin_index = surface.year_index(config.origin);
    artifacts.kappa_train = artifacts.full_fit.params.kappa.head(origin_index + 1);

    for (int year = config.origin + 1; year <= std::min(config.horizon_end, config.year_max); ++year)
        artifacts.test_years.push_back(year);
    artifacts.kappa_test_actual.resize(static_cast<Index>(artifacts.test_years.size()));
    for (std::size_t i = 0; i < artifacts.test_years.size(); ++i)
        artifacts.kappa_test_actual[static_cast<Index>(i)] =
            artifacts.full_fit.params.kappa[surface.year_index(artifacts.test_years[i])];

    // Architecture selection on the sub-training/validation split, then the
    // winning configuration is retrained on the whole training series.
    artifacts.grid = grid_search(artifacts.kappa_train, config.build_grid());
    artifacts.step1_model = train(artifacts.grid.best, artifacts.kappa_train).model;

    const Vector fitted = fitted_one_step(artifacts.step1_model, artifacts.kappa_train);
    const Vector residuals = artifacts.kappa_train.tail(artifacts.kappa_train.size() - 1) - fitted;

    artifacts.battery.clear();
    for (const auto& run : {+[](const Vector& r) { return shapiro_wilk(r); },
                            +[](const Vector& r) { return dagostino_pearson(r); },
                            +[](const Vector& r) { return jarque_bera(r); },
                            +[](const Vector& r) { return adf_test(r, std::nullopt); }}) {
        try {
            artifacts.battery.push_back(run(residuals));
        } catch (const std::invalid_argument&) {
            // Sample too short for this test; the gate handles the absence.
        }
    }

    NoiseSpreading spreading = NoiseSpreading::random_walk;
    if (config.spreading == "auto") {
        const bool has_adf = std::any_of(artifacts.battery.begin(), artifacts.battery.end(),
                                         [](const TestReport& r) { return r.test_name == "adf"; });
        if (has_adf) {
            artifacts.gate = noise_diagnostics_gate(NoiseModel::from_residuals(residuals), artifacts.battery);
            artifacts.gate_available = true;
            spreading = artifacts.gate.spreading;
            if (artifacts.gate.warning)
                std::cerr << "warning: noise diagnostics reject the random-walk representation; "
                             "using constant spreading\n";
        } else {
            std::cerr << "warning: training series too short for the ADF test; defaulting to "
                         "random-walk spreading\n";
        }
    } else {
        spreading = noise_spreading_from_string(config.spreading);
    }
    artifacts.noise = NoiseModel::from_residuals(residuals, spreading);

    // Residual bootstrap of the training-period surface.
    const MortalitySurface train_surface = surface.year_slice(config.year_min, config.origin);
    const LCFitReport train_fit = fit_lc(train_surface, config.lc_tol, config.lc_max_sweeps);
    const auto kappa_samples = bootstrap_kappas(train_surface, train_fit, config.bootstrap_samples,
                                                derive_seed(config.seed, 0x626f6f74ULL), config.lc_tol,
                                                config.lc_max_sweeps);
    artifacts.ensemble = train_and_forecast_members(artifacts.grid.best, kappa_samples, artifacts.forecast_years);
    artifacts.bagged = config.eq14_literal ? bag_unsquared(artifacts.ensemble) : bag(artifacts.ensemble);

    const StateCarry state = final_training_state(artifacts.step1_model, artifacts.kappa_train);
    artifacts.lstm_point = forecast_recursive(artifacts.step1_model,
                                              artifacts.kappa_train[artifacts.kappa_train.size() - 1], state,
                                              horizon);

    BaggedEstimate variance_estimate = artifacts.bagged;
    if (config.eq14_literal) {
        // The literal reading telescopes to ~0; floor it so the interval is defined.
        variance_estimate.variance = variance_estimate.variance.cwiseMax(0.0);
    }
    artifacts.kappa_interval = kappa_pi(artifacts.forecast_years, artifacts.lstm_point,
                                        total_variance(variance_estimate, artifacts.noise), config.alpha);

    artifacts.rwd = fit_rwd(artifacts.kappa_train);
    artifacts.rwd_point = arima_forecast(artifacts.rwd, artifacts.kappa_train, Vector(), horizon);
    artifacts.rwd_interval = arima_pi(artifacts.rwd, artifacts.rwd_point, config.alpha,
                                      pi_variance_law_from_string(config.pi_variance_law));
    return artifacts;
}

namespace {

PredictionInterval rw_rate_interval(const RunConfig& config, const ForecastArtifacts& artifacts,
                                    const LCParameters& params, int age) {
    const Index x = params.age_index(age);
    const Vector rate_points = (params.alpha[x] + params.beta[x] * artifacts.rwd_point.array()).matrix();
    const ArimaInterval raw = arima_pi(artifacts.rwd, rate_points, config.alpha,
                                       pi_variance_law_from_string(config.pi_variance_law), params.beta[x]);
    PredictionInterval interval;
    interval.years = artifacts.forecast_years;
    interval.alpha = config.alpha;
    interval.point = raw.point;
    interval.lower = raw.lower;
    interval.upper = raw.upper;
    interval.validate();
    return interval;
}

Vector slice(const Vector& values, Index count) { return values.head(count); }

PredictionInterval truncate(const PredictionInterval& interval, Index count) {
    PredictionInterval truncated;
    truncated.years.assign(interval.years.begin(), interval.years.begin() + count);
    truncated.point = interval.point.head(count);
    truncated.lower = interval.lower.head(count);
    truncated.upper = interval.upper.head(count);
    truncated.alpha = interval.alpha;
    return truncated;
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& writer) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    writer(out);
}

void write_diagnostics_csv(const RunConfig& config, const std::vector<TestReport>& battery, std::ostream& out) {
    out << "country,gender,period,test,statistic,p_value\n";
    for (const auto& report : battery)
        out << config.country << ',' << config.gender << ',' << config.period_label() << ',' << report.test_name
            << ',' << format_double(report.statistic) << ',' << format_double(report.p_value) << '\n';
}

json config_to_json(const RunConfig& config) {
    json j;
    j["deaths_path"] = config.deaths_path;
    j["exposures_path"] = config.exposures_path;
    j["gender"] = config.gender;
    j["age_min"] = config.age_min;
    j["age_max"] = config.age_max;
    j["year_min"] = config.year_min;
    j["year_max"] = config.year_max;
    j["origin"] = config.origin;
    j["horizon_end"] = config.horizon_end;
    j["alpha"] = config.alpha;
    j["bootstrap_samples"] = config.bootstrap_samples;
    j["grid_hidden"] = config.grid_hidden;
    j["grid_learning_rates"] = config.grid_learning_rates;
    j["cell_activation"] = config.cell_activation;
    j["max_epochs"] = config.max_epochs;
    j["patience"] = config.patience;
    j["seed"] = config.seed;
    j["pi_variance_law"] = config.pi_variance_law;
    j["metrics_literal"] = config.metrics_literal;
    j["picp_denominator"] = config.picp_denominator;
    j["eq14_literal"] = config.eq14_literal;
    j["spreading"] = config.spreading;
    j["eval_ages"] = config.eval_ages;
    j["country"] = config.country;
    j["lc_tol"] = config.lc_tol;
    j["lc_max_sweeps"] = config.lc_max_sweeps;
    return j;
}

void write_manifest(const fs::path& path, const json& manifest) {
    write_file(path, [&](std::ostream& out) { out << manifest.dump(2) << '\n'; });
}

} // namespace

std::vector<EvaluationRow> evaluate_forecast(const RunConfig& config, const MortalitySurface& surface,
                                             const ForecastArtifacts& artifacts) {
    const Index overlap = artifacts.kappa_test_actual.size();
    if (overlap < 2) throw std::invalid_argument("evaluate: need at least 2 test years inside the data window");
    const MetricDenominator interval_denom = config.interval_denominator();
    const MetricDenominator rmse_denom = MetricDenominator::count_minus_one;

    std::vector<EvaluationRow> rows;
    const PredictionInterval lstm_kpi = truncate(artifacts.kappa_interval, overlap);
    rows.push_back({"lstm", "kappa", rmse(artifacts.kappa_test_actual, slice(artifacts.lstm_point, overlap), rmse_denom),
                    picp(artifacts.kappa_test_actual, lstm_kpi.lower, lstm_kpi.upper, interval_denom),
                    mpiw(lstm_kpi.lower, lstm_kpi.upper, interval_denom)});
    rows.push_back({"arima", "kappa", rmse(artifacts.kappa_test_actual, slice(artifacts.rwd_point, overlap), rmse_denom),
                    picp(artifacts.kappa_test_actual, slice(artifacts.rwd_interval.lower, overlap),
                         slice(artifacts.rwd_interval.upper, overlap), interval_denom),
                    mpiw(slice(artifacts.rwd_interval.lower, overlap), slice(artifacts.rwd_interval.upper, overlap),
                         interval_denom)});

    const LogRateSurface observed = log_rates(surface);
    for (int age : config.eval_ages) {
        const Index x = surface.age_index(age);
        Vector actual(overlap);
        for (Index i = 0; i < overlap; ++i) {
            const Index t = surface.year_index(artifacts.test_years[static_cast<std::size_t>(i)]);
            if (observed.zero_deaths(x, t))
                throw std::runtime_error("evaluate: zero-death cell at evaluation age " + std::to_string(age));
            actual[i] = observed.logm(x, t);
        }
        const std::string series = "logm_x" + std::to_string(age);

        const PredictionInterval lstm_rpi = truncate(rate_pi(artifacts.full_fit.params, artifacts.kappa_interval, age), overlap);
        rows.push_back({"lc_lstm", series, rmse(actual, lstm_rpi.point, rmse_denom),
                        picp(actual, lstm_rpi.lower, lstm_rpi.upper, interval_denom),
                        mpiw(lstm_rpi.lower, lstm_rpi.upper, interval_denom)});

        const PredictionInterval rw_rpi = truncate(rw_rate_interval(config, artifacts, artifacts.full_fit.params, age), overlap);
        rows.push_back({"lc_arima", series, rmse(actual, rw_rpi.point, rmse_denom),
                        picp(actual, rw_rpi.lower, rw_rpi.upper, interval_denom),
                        mpiw(rw_rpi.lower, rw_rpi.upper, interval_denom)});
    }
    return rows;
}

namespace {

json forecast_manifest(const RunConfig& config, const ForecastArtifacts& artifacts) {
    json manifest;
    manifest["config"] = config_to_json(config);
    manifest["lc_fit"] = {{"converged", artifacts.full_fit.converged},
                          {"sweeps", artifacts.full_fit.sweeps},
                          {"deviance", artifacts.full_fit.deviance_trace.back()}};
    manifest["tuned"] = {{"hidden_units", artifacts.grid.best.hidden_units},
                         {"learning_rate", artifacts.grid.best.learning_rate},
                         {"seed", artifacts.grid.best.seed}};
    manifest["noise"] = {{"sigma2_gamma", artifacts.noise.sigma2_gamma},
                         {"spreading", to_string(artifacts.noise.spreading)}};
    if (artifacts.gate_available) {
        json entries = json::array();
        for (const auto& entry : artifacts.gate.entries)
            entries.push_back({{"test", entry.test}, {"p_value", entry.p_value}, {"rejected", entry.rejected}});
        manifest["noise_gate"] = {{"entries", entries},
                                  {"spreading", to_string(artifacts.gate.spreading)},
                                  {"warning", artifacts.gate.warning}};
    }
    manifest["rwd"] = {{"drift", artifacts.rwd.drift}, {"sigma_eps", artifacts.rwd.sigma_eps}};
    return manifest;
}

void write_forecast_artifacts(const RunConfig& config, const MortalitySurface& surface,
                              const ForecastArtifacts& artifacts) {
    const fs::path out_dir(config.out_dir);
    fs::create_directories(out_dir);
    write_file(out_dir / "surface.csv", [&](std::ostream& out) { write_surface_csv(surface, out); });
    write_file(out_dir / "lc_parameters.csv",
               [&](std::ostream& out) { write_parameters_csv(artifacts.full_fit.params, out); });
    write_file(out_dir / "kappa_pi_lstm.csv",
               [&](std::ostream& out) { write_interval_csv(artifacts.kappa_interval, out); });
    write_file(out_dir / "kappa_pi_rw.csv",
               [&](std::ostream& out) { write_arima_interval_csv(artifacts.rwd_interval, out); });
    write_file(out_dir / "ensemble_paths.csv", [&](std::ostream& out) { write_paths_csv(artifacts.ensemble, out); });
    write_file(out_dir / "bagged_kappa.csv",
               [&](std::ostream& out) { write_bagged_csv(artifacts.bagged, artifacts.forecast_years, out); });
    write_file(out_dir / "diagnostics.csv",
               [&](std::ostream& out) { write_diagnostics_csv(config, artifacts.battery, out); });
    for (int age : config.eval_ages) {
        const PredictionInterval lstm_rpi = rate_pi(artifacts.full_fit.params, artifacts.kappa_interval, age);
        write_file(out_dir / ("rate_pi_lstm_age" + std::to_string(age) + ".csv"),
                   [&](std::ostream& out) { write_interval_csv(lstm_rpi, out); });
        const PredictionInterval rw_rpi = rw_rate_interval(config, artifacts, artifacts.full_fit.params, age);
        write_file(out_dir / ("rate_pi_rw_age" + std::to_string(age) + ".csv"),
                   [&](std::ostream& out) { write_interval_csv(rw_rpi, out); });
    }
}

} // namespace

void cmd_fit(const RunConfig& config) {
    config.validate();
    const MortalitySurface surface = load_surface(config);
    const LCFitReport fit = fit_lc(surface, config.lc_tol, config.lc_max_sweeps);
    const fs::path out_dir(config.out_dir);
    fs::create_directories(out_dir);
    write_file(out_dir / "surface.csv", [&](std::ostream& out) { write_surface_csv(surface, out); });
    write_file(out_dir / "lc_parameters.csv", [&](std::ostream& out) { write_parameters_csv(fit.params, out); });
    json manifest;
    manifest["config"] = config_to_json(config);
    manifest["lc_fit"] = {{"converged", fit.converged},
                          {"sweeps", fit.sweeps},
                          {"deviance", fit.deviance_trace.back()}};
    write_manifest(out_dir / "manifest.json", manifest);
    std::cout << "lc fit: converged=" << (fit.converged ? "yes" : "no") << " sweeps=" << fit.sweeps
              << " deviance=" << fit.deviance_trace.back() << '\n';
}

void cmd_forecast(const RunConfig& config) {
    config.validate();
    const MortalitySurface surface = load_surface(config);
    const ForecastArtifacts artifacts = run_pipeline(config, surface);
    write_forecast_artifacts(config, surface, artifacts);
    write_manifest(fs::path(config.out_dir) / "manifest.json", forecast_manifest(config, artifacts));
    std::cout << "forecast: " << artifacts.forecast_years.size() << " years, tuned hidden_units="
              << artifacts.grid.best.hidden_units << ", spreading=" << to_string(artifacts.noise.spreading) << '\n';
}

void cmd_evaluate(const RunConfig& config) {
    config.validate();
    const MortalitySurface surface = load_surface(config);
    const ForecastArtifacts artifacts = run_pipeline(config, surface);
    write_forecast_artifacts(config, surface, artifacts);
    const auto rows = evaluate_forecast(config, surface, artifacts);
    const fs::path out_dir(config.out_dir);
    write_file(out_dir / "metrics.csv", [&](std::ostream& out) {
        out << "country,gender,period,model,series,rmse,picp,mpiw\n";
        for (const auto& row : rows)
            out << config.country << ',' << config.gender << ',' << config.period_label() << ',' << row.model << ','
                << row.series << ',' << format_double(row.rmse) << ',' << format_double(row.picp) << ','
                << format_double(row.mpiw) << '\n';
    });
    json manifest = forecast_manifest(config, artifacts);
    json metric_rows = json::array();
    for (const auto& row : rows)
        metric_rows.push_back(
            {{"model", row.model}, {"series", row.series}, {"rmse", row.rmse}, {"picp", row.picp}, {"mpiw", row.mpiw}});
    manifest["metrics"] = metric_rows;
    write_manifest(out_dir / "manifest.json", manifest);
    for (const auto& row : rows)
        std::cout << row.model << ' ' << row.series << " rmse=" << row.rmse << " picp=" << row.picp
                  << " mpiw=" << row.mpiw << '\n';
}

void cmd_diagnose(const RunConfig& config) {
    config.validate();
    const MortalitySurface surface = load_surface(config);
    const LCFitReport fit = fit_lc(surface, config.lc_tol, config.lc_max_sweeps);
    const Index origin_index = surface.year_index(config.origin);
    const Vector kappa_train = fit.params.kappa.head(origin_index + 1);
    const GridSearchResult grid = grid_search(kappa_train, config.build_grid());
    const LSTMModel model = train(grid.best, kappa_train).model;
    const Vector fitted = fitted_one_step(model, kappa_train);
    const Vector residuals = kappa_train.tail(kappa_train.size() - 1) - fitted;

    std::vector<TestReport> battery;
    battery.push_back(shapiro_wilk(residuals));
    battery.push_back(dagostino_pearson(residuals));
    battery.push_back(jarque_bera(residuals));
    battery.push_back(adf_test(residuals));
    const GateRecord gate = noise_diagnostics_gate(NoiseModel::from_residuals(residuals), battery);

    const fs::path out_dir(config.out_dir);
    fs::create_directories(out_dir);
    write_file(out_dir / "diagnostics.csv",
               [&](std::ostream& out) { write_diagnostics_csv(config, battery, out); });
    json manifest;
    manifest["config"] = config_to_json(config);
    json entries = json::array();
    for (const auto& entry : gate.entries)
        entries.push_back({{"test", entry.test}, {"p_value", entry.p_value}, {"rejected", entry.rejected}});
    manifest["noise_gate"] = {{"entries", entries},
                              {"spreading", to_string(gate.spreading)},
                              {"warning", gate.warning}};
    write_manifest(out_dir / "manifest.json", manifest);
    for (const auto& report : battery)
        std::cout << config.country << ' ' << config.gender << ' ' << config.period_label() << ' '
                  << report.test_name << " statistic=" << report.statistic << " p=" << report.p_value << '\n';
    std::cout << "spreading decision: " << to_string(gate.spreading) << (gate.warning ? " (warning)" : "") << '\n';
}

void cmd_simulate(const RunConfig& config, const SimulationSpec& spec) {
    const SimulatedData data = simulate_surface(spec);
    const fs::path out_dir(config.out_dir);
    fs::create_directories(out_dir);
    write_file(out_dir / "deaths_1x1.txt", [&](std::ostream& out) {
        write_hmd_table(data.surface.deaths, data.surface.ages, data.surface.years, "synthetic, Deaths (period 1x1)",
                        out);
    });
    write_file(out_dir / "exposures_1x1.txt", [&](std::ostream& out) {
        write_hmd_table(data.surface.exposures, data.surface.ages, data.surface.years,
                        "synthetic, Exposure to risk (period 1x1)", out);
    });
    write_file(out_dir / "surface.csv", [&](std::ostream& out) { write_surface_csv(data.surface, out); });
    write_file(out_dir / "truth_parameters.csv", [&](std::ostream& out) { write_parameters_csv(data.truth, out); });
    json manifest;
    manifest["config"] = config_to_json(config);
    manifest["simulation"] = {{"age_min", spec.age_min},       {"age_max", spec.age_max},
                              {"year_min", spec.year_min},     {"year_max", spec.year_max},
                              {"exposure", spec.exposure},     {"alpha_level", spec.alpha_level},
                              {"alpha_slope", spec.alpha_slope}, {"beta_decay", spec.beta_decay},
                              {"kappa_law", to_string(spec.kappa_law)}, {"kappa_start", spec.kappa_start},
                              {"drift", spec.drift},           {"sigma", spec.sigma},
                              {"drift_after", spec.drift_after}, {"break_offset", spec.break_offset},
                              {"deaths_law", to_string(spec.deaths_law)}, {"seed", spec.seed}};
    write_manifest(out_dir / "manifest.json", manifest);
    std::cout << "simulated " << data.surface.ages.size() << " ages x " << data.surface.years.size()
              << " years into " << config.out_dir << '\n';
}

} // namespace mortcast
