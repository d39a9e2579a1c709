#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <mortcast/bootstrap.hpp>
#include <mortcast/diagnostics.hpp>
#include <mortcast/lc_poisson.hpp>
#include <mortcast/types.hpp>

namespace mortcast {

/// How the residual noise variance accumulates over the forecast horizon.
enum class NoiseSpreading { random_walk, constant };

NoiseSpreading noise_spreading_from_string(const std::string& name);
std::string to_string(NoiseSpreading spreading);

/// Residual noise left by the trained network on the training set.
struct NoiseModel {
    Vector residuals;
    double sigma2_gamma = 0.0;
    NoiseSpreading spreading = NoiseSpreading::random_walk;

    /// sigma2_gamma is the sample variance (n-1) of the residuals.
    static NoiseModel from_residuals(const Vector& residuals,
                                     NoiseSpreading spreading = NoiseSpreading::random_walk);
};

struct PredictionInterval {
    std::vector<int> years;
    Vector point;
    Vector lower;
    Vector upper;
    double alpha = 0.05;

    void validate() const;
};

/// Total forecast variance per horizon step h = 1..s: the bagged ensemble
/// variance plus the noise variance, spread as h*sigma2 under random_walk and
/// flat under constant. The bias term of the decomposition is fixed at zero.
Vector total_variance(const BaggedEstimate& bagged, const NoiseModel& noise);

/// Gaussian interval point +/- z_{alpha/2} * sqrt(total_variance).
PredictionInterval kappa_pi(const std::vector<int>& years, const Vector& point, const Vector& total_var,
                            double alpha);

/// Maps a kappa interval through log m = alpha_x + beta_x * kappa; bounds are
/// reordered when beta_x < 0.
PredictionInterval rate_pi(const LCParameters& params, const PredictionInterval& kappa_interval, int age);

struct GateEntry {
    std::string test;
    double p_value = 0.0;
    bool rejected = false;
};

/// Pairing of each diagnostic p-value with the chosen spreading mode.
struct GateRecord {
    std::vector<GateEntry> entries;
    NoiseSpreading spreading = NoiseSpreading::random_walk;
    bool warning = false;
};

/// Policy: random-walk spreading when the ADF test fails to reject a unit
/// root at 5% and no normality test rejects at 1%; otherwise constant
/// spreading with a warning. Advisory only.
GateRecord noise_diagnostics_gate(const NoiseModel& noise, const std::vector<TestReport>& reports);

/// CSV export with header `year,point,lower,upper,alpha`.
void write_interval_csv(const PredictionInterval& interval, std::ostream& out);
PredictionInterval read_interval_csv(std::istream& in);

} // namespace mortcast
