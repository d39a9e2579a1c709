#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include <mortcast/pipeline.hpp>

namespace {

void add_common_options(CLI::App* cmd, mortcast::RunConfig& config) {
    cmd->set_config("--config", "", "Keyed text configuration file; command-line flags win");
    cmd->add_option("--data-deaths", config.deaths_path, "HMD Deaths_1x1 file");
    cmd->add_option("--data-exposures", config.exposures_path, "HMD Exposures_1x1 file");
    cmd->add_option("--gender", config.gender, "Gender column: female|male|total");
    cmd->add_option("--ages", [&config](const std::vector<std::string>& values) {
        const auto dash = values[0].find('-');
        if (dash == std::string::npos) return false;
        config.age_min = std::stoi(values[0].substr(0, dash));
        config.age_max = std::stoi(values[0].substr(dash + 1));
        return true;
    }, "Age range, e.g. 0-99");
    cmd->add_option("--years", [&config](const std::vector<std::string>& values) {
        const auto dash = values[0].find('-');
        if (dash == std::string::npos) return false;
        config.year_min = std::stoi(values[0].substr(0, dash));
        config.year_max = std::stoi(values[0].substr(dash + 1));
        return true;
    }, "Year range, e.g. 1950-2018");
    cmd->add_option("--origin", config.origin, "Forecast origin year T");
    cmd->add_option("--horizon", [&config](const std::vector<std::string>& values) {
        const int value = std::stoi(values[0]);
        // A calendar year sets the horizon end; a small number is a step count.
        config.horizon_end = value >= 1000 ? value : config.origin + value;
        return true;
    }, "Horizon: end year (e.g. 2018) or number of steps");
    cmd->add_option("--alpha", config.alpha, "Confidence level for prediction intervals");
    cmd->add_option("--bootstrap-samples", config.bootstrap_samples, "Bootstrap ensemble size B");
    cmd->add_option("--seed", config.seed, "Master seed; all randomness derives from it");
    cmd->add_option("--grid-hidden", config.grid_hidden, "Hidden-unit grid")->delimiter(',');
    cmd->add_option("--grid-lr", config.grid_learning_rates, "Learning-rate grid")->delimiter(',');
    cmd->add_option("--cell-activation", config.cell_activation, "Cell activation: relu|tanh");
    cmd->add_option("--max-epochs", config.max_epochs, "Training epochs");
    cmd->add_option("--patience", config.patience, "Early-stopping patience");
    cmd->add_option("--pi-variance-law", config.pi_variance_law, "Baseline PI growth: sqrt_h|linear_h");
    cmd->add_flag("--metrics-literal", config.metrics_literal, "Use the printed s-1 denominators everywhere");
    cmd->add_option("--picp-denominator", config.picp_denominator, "PICP/MPIW denominator: s|s_minus_1");
    cmd->add_flag("--eq14-literal", config.eq14_literal, "Unsquared-deviation bagged variance, for inspection");
    cmd->add_option("--spreading", config.spreading, "Noise spreading: auto|random_walk|constant");
    cmd->add_option("--eval-ages", config.eval_ages, "Ages evaluated in rate metrics")->delimiter(',');
    cmd->add_option("--country", config.country, "Label used in report tables");
    cmd->add_option("--out", config.out_dir, "Output directory");
}

void add_simulation_options(CLI::App* cmd, mortcast::SimulationSpec& spec, std::string& kappa_law,
                            std::string& deaths_law) {
    cmd->add_option("--sim-ages", [&spec](const std::vector<std::string>& values) {
        const auto dash = values[0].find('-');
        if (dash == std::string::npos) return false;
        spec.age_min = std::stoi(values[0].substr(0, dash));
        spec.age_max = std::stoi(values[0].substr(dash + 1));
        return true;
    }, "Simulated age range, e.g. 0-99");
    cmd->add_option("--sim-years", [&spec](const std::vector<std::string>& values) {
        const auto dash = values[0].find('-');
        if (dash == std::string::npos) return false;
        spec.year_min = std::stoi(values[0].substr(0, dash));
        spec.year_max = std::stoi(values[0].substr(dash + 1));
        return true;
    }, "Simulated year range, e.g. 1950-2018");
    cmd->add_option("--exposure", spec.exposure, "Constant central exposure");
    cmd->add_option("--alpha-level", spec.alpha_level, "Base log-rate level");
    cmd->add_option("--alpha-slope", spec.alpha_slope, "Log-rate slope per year of age");
    cmd->add_option("--beta-decay", spec.beta_decay, "Decay rate of the age sensitivity");
    cmd->add_option("--kappa-law", kappa_law, "rwd|piecewise");
    cmd->add_option("--kappa-start", spec.kappa_start, "Initial time-index value");
    cmd->add_option("--drift", spec.drift, "Time-index drift");
    cmd->add_option("--sigma", spec.sigma, "Time-index innovation s.d.");
    cmd->add_option("--drift-after", spec.drift_after, "Second slope of the piecewise law");
    cmd->add_option("--break-offset", spec.break_offset, "Years after start where the slope changes");
    cmd->add_option("--deaths-law", deaths_law, "poisson|deterministic");
    cmd->add_option("--sim-seed", spec.seed, "Simulation seed");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lee-Carter mortality forecasting with an LSTM time index and bootstrap prediction intervals"};
    app.require_subcommand(1);

    mortcast::RunConfig config;
    mortcast::SimulationSpec sim_spec;
    std::string kappa_law = "rwd";
    std::string deaths_law = "deterministic";

    CLI::App* fit = app.add_subcommand("fit", "Fit the Poisson Lee-Carter model and export its parameters");
    add_common_options(fit, config);
    CLI::App* forecast = app.add_subcommand("forecast", "Run the full forecasting pipeline and write PI tables");
    add_common_options(forecast, config);
    CLI::App* evaluate = app.add_subcommand("evaluate", "Backtest both models and write the metrics table");
    add_common_options(evaluate, config);
    CLI::App* diagnose = app.add_subcommand("diagnose", "Run the residual noise test battery");
    add_common_options(diagnose, config);
    CLI::App* simulate = app.add_subcommand("simulate", "Generate a synthetic surface with known parameters");
    add_common_options(simulate, config);
    add_simulation_options(simulate, sim_spec, kappa_law, deaths_law);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*fit) mortcast::cmd_fit(config);
        if (*forecast) mortcast::cmd_forecast(config);
        if (*evaluate) mortcast::cmd_evaluate(config);
        if (*diagnose) mortcast::cmd_diagnose(config);
        if (*simulate) {
            sim_spec.kappa_law = mortcast::kappa_law_from_string(kappa_law);
            sim_spec.deaths_law = mortcast::deaths_law_from_string(deaths_law);
            mortcast::cmd_simulate(config, sim_spec);
        }
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << '\n';
        return 1;
    }
    return 0;
}
