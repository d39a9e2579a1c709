#include <mortcast/bootstrap.hpp>

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <random>
#include <stdexcept>
#include <thread>

#include <mortcast/csv.hpp>
#include <mortcast/stats.hpp>

namespace mortcast {

void EnsembleDistribution::validate() const {
    if (paths.rows() < 2) throw std::invalid_argument("EnsembleDistribution: need at least 2 members");
    if (!paths.allFinite()) throw std::invalid_argument("EnsembleDistribution: non-finite path entries");
    if (static_cast<Index>(member_seeds.size()) != paths.rows())
        throw std::invalid_argument("EnsembleDistribution: one seed per member required");
    if (static_cast<Index>(horizon_years.size()) != paths.cols())
        throw std::invalid_argument("EnsembleDistribution: one year per horizon step required");
}

void parallel_for_members(int count, const std::function<void(int)>& fn) {
    const unsigned hardware = std::max(1u, std::thread::hardware_concurrency());
    const unsigned workers = std::min<unsigned>(hardware, static_cast<unsigned>(count));
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& thread : pool) thread.join();
    if (first_error) std::rethrow_exception(first_error);
}

std::vector<Vector> bootstrap_kappas(const MortalitySurface& surface, const LCFitReport& fit, int samples,
                                     std::uint64_t seed, double tol, int max_sweeps) {
    if (samples < 2) throw std::invalid_argument("bootstrap_kappas: need at least 2 samples");
    if (!fit.converged) throw std::invalid_argument("bootstrap_kappas: fit did not converge");
    const Index n_cells = fit.deviance_residuals.size();
    if (n_cells != surface.deaths.size())
        throw std::invalid_argument("bootstrap_kappas: fit does not match the surface");

    std::vector<Vector> kappas(samples);
    parallel_for_members(samples, [&](int b) {
        std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(b)));
        std::uniform_int_distribution<Index> pick(0, n_cells - 1);
        Matrix resampled(fit.deviance_residuals.rows(), fit.deviance_residuals.cols());
        for (Index j = 0; j < resampled.size(); ++j)
            resampled.data()[j] = fit.deviance_residuals.data()[pick(rng)];
        try {
            const MortalitySurface pseudo = reconstruct_surface_from_residuals(surface, fit.params, resampled);
            const LCFitReport refit = fit_lc(pseudo, tol, max_sweeps);
            kappas[b] = refit.params.kappa;
        } catch (const std::exception& error) {
            throw std::runtime_error("bootstrap member " + std::to_string(b) + " failed: " + error.what());
        }
    });
    return kappas;
}

EnsembleDistribution train_and_forecast_members(const LSTMConfig& tuned_config,
                                                const std::vector<Vector>& kappa_samples,
                                                const std::vector<int>& horizon_years) {
    tuned_config.validate();
    if (kappa_samples.size() < 2) throw std::invalid_argument("train_and_forecast_members: need at least 2 members");
    if (horizon_years.empty()) throw std::invalid_argument("train_and_forecast_members: empty horizon");

    const int members = static_cast<int>(kappa_samples.size());
    const int horizon = static_cast<int>(horizon_years.size());
    EnsembleDistribution distribution;
    distribution.paths.resize(members, horizon);
    distribution.member_seeds.resize(members);
    distribution.horizon_years = horizon_years;

    parallel_for_members(members, [&](int b) {
        LSTMConfig member_config = tuned_config;
        member_config.seed = derive_seed(tuned_config.seed, static_cast<std::uint64_t>(b));
        distribution.member_seeds[b] = member_config.seed;
        const Vector& series = kappa_samples[b];

        LSTMModel model;
        try {
            model = train(member_config, series).model;
        } catch (const TrainingDivergence&) {
            member_config.learning_rate *= 0.5;
            try {
                model = train(member_config, series).model;
            } catch (const TrainingDivergence& retry_error) {
                throw TrainingDivergence("ensemble member " + std::to_string(b) +
                                         " diverged twice: " + retry_error.what());
            }
        }
        const StateCarry state = final_training_state(model, series);
        distribution.paths.row(b) = forecast_recursive(model, series[series.size() - 1], state, horizon).transpose();
    });
    distribution.validate();
    return distribution;
}

BaggedEstimate bag(const EnsembleDistribution& distribution) {
    distribution.validate();
    const Index members = distribution.paths.rows();
    BaggedEstimate estimate;
    estimate.mean.resize(distribution.paths.cols());
    estimate.variance.resize(distribution.paths.cols());
    for (Index t = 0; t < distribution.paths.cols(); ++t) {
        const Vector column = distribution.paths.col(t);
        estimate.mean[t] = stable_sum(column) / static_cast<double>(members);
        const Vector deviations = (column.array() - estimate.mean[t]).square();
        estimate.variance[t] = stable_sum(deviations) / static_cast<double>(members - 1);
    }
    return estimate;
}

BaggedEstimate bag_unsquared(const EnsembleDistribution& distribution) {
    distribution.validate();
    const Index members = distribution.paths.rows();
    BaggedEstimate estimate;
    estimate.mean.resize(distribution.paths.cols());
    estimate.variance.resize(distribution.paths.cols());
    for (Index t = 0; t < distribution.paths.cols(); ++t) {
        const Vector column = distribution.paths.col(t);
        estimate.mean[t] = stable_sum(column) / static_cast<double>(members);
        const Vector deviations = column.array() - estimate.mean[t];
        estimate.variance[t] = stable_sum(deviations) / static_cast<double>(members - 1);
    }
    return estimate;
}

void write_paths_csv(const EnsembleDistribution& distribution, std::ostream& out) {
    out << "member,year,kappa_hat\n";
    for (Index b = 0; b < distribution.paths.rows(); ++b)
        for (Index t = 0; t < distribution.paths.cols(); ++t)
            out << b << ',' << distribution.horizon_years[t] << ',' << format_double(distribution.paths(b, t))
                << '\n';
}

void write_bagged_csv(const BaggedEstimate& estimate, const std::vector<int>& years, std::ostream& out) {
    if (static_cast<Index>(years.size()) != estimate.mean.size())
        throw std::invalid_argument("write_bagged_csv: year axis mismatch");
    out << "year,mean,variance\n";
    for (Index t = 0; t < estimate.mean.size(); ++t)
        out << years[t] << ',' << format_double(estimate.mean[t]) << ',' << format_double(estimate.variance[t])
            << '\n';
}

} // namespace mortcast
