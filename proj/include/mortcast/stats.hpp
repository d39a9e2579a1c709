#pragma once

#include <cstdint>
#include <mortcast/types.hpp>

namespace mortcast {

/// Standard normal CDF.
double normal_cdf(double x);

/// Standard normal quantile (inverse CDF), Wichura's AS 241 rational
/// approximation, accurate to full double precision. Throws for p outside (0,1).
double normal_quantile(double p);

/// Upper-tail probability of a chi-square distribution with 2 degrees of freedom.
double chi2_survival_2df(double x);

double sample_mean(const Vector& x);

/// Unbiased sample variance (n-1 denominator). Throws for n < 2.
double sample_variance(const Vector& x);

double sample_skewness(const Vector& x);

/// Sample kurtosis (not excess): m4 / m2^2.
double sample_kurtosis(const Vector& x);

/// Compensated (Neumaier) sum over values sorted ascending, so the result is
/// bit-identical under any permutation of the input.
double stable_sum(Vector values);

/// splitmix64 step; the basis for all derived seeds.
std::uint64_t splitmix64(std::uint64_t& state);

/// Deterministic per-stream seed derivation from one master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

} // namespace mortcast
