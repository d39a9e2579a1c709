#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include <mortcast/lc_poisson.hpp>
#include <mortcast/lstm.hpp>
#include <mortcast/types.hpp>

namespace mortcast {

/// B bootstrap forecast paths of the time index over the horizon.
struct EnsembleDistribution {
    Matrix paths; // B x s
    std::vector<std::uint64_t> member_seeds;
    std::vector<int> horizon_years;

    void validate() const;
};

struct BaggedEstimate {
    Vector mean;
    Vector variance;
};

/// Residual bootstrap: resamples the deviance residuals i.i.d. with
/// replacement over all cells, reconstructs pseudo-deaths, refits the model
/// and returns the constrained kappa series of each member. Deterministic for
/// a fixed seed regardless of thread count.
std::vector<Vector> bootstrap_kappas(const MortalitySurface& surface, const LCFitReport& fit, int samples,
                                     std::uint64_t seed, double tol = 1e-6, int max_sweeps = 10000);

/// Retrains the tuned architecture on each bootstrap kappa series (member b
/// uses seed derive_seed(config.seed, b)) and forecasts recursively over the
/// horizon. A diverging member is retried once at half the learning rate.
EnsembleDistribution train_and_forecast_members(const LSTMConfig& tuned_config,
                                                const std::vector<Vector>& kappa_samples,
                                                const std::vector<int>& horizon_years);

/// Bagged mean and sample variance (B-1 denominator) per horizon step.
/// Sorted compensated summation makes both order-invariant bit for bit.
BaggedEstimate bag(const EnsembleDistribution& distribution);

/// The unsquared-deviation reading of the variance formula, kept for
/// inspection; it telescopes to zero up to rounding.
BaggedEstimate bag_unsquared(const EnsembleDistribution& distribution);

/// CSV export with header `member,year,kappa_hat`.
void write_paths_csv(const EnsembleDistribution& distribution, std::ostream& out);
/// CSV export with header `year,mean,variance`.
void write_bagged_csv(const BaggedEstimate& estimate, const std::vector<int>& years, std::ostream& out);

/// Runs fn(0..count-1) on a small thread pool; results must be written to
/// disjoint preallocated slots. The first exception, if any, is rethrown.
void parallel_for_members(int count, const std::function<void(int)>& fn);

} // namespace mortcast
