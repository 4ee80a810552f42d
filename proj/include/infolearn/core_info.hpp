#pragma once

#include <cmath>

namespace infolearn {

/// Information quantity in nats (1 nat = 1/ln 2 bits).
struct Nats {
  double value = 0.0;

  constexpr Nats() = default;
  constexpr explicit Nats(double v) : value(v) {}
  constexpr operator double() const { return value; }
  double bits() const { return value / std::log(2.0); }
};

/// Univariate Gaussian N(mean, variance).
struct GaussianDist {
  double mean = 0.0;
  double variance = 1.0;
};

/// Smallest variance accepted by the Gaussian KL; below this the log ratio is
/// not trustworthy in double precision.
inline constexpr double kMinVariance = 1e-300;

/// KL(p || q) for univariate Gaussians.
Nats kl_gaussian(const GaussianDist& p, const GaussianDist& q);

/// Upper bound on the KL of a variance-sigma2 Gaussian prediction in terms of its
/// mean squared error: 0.5 ln(1 + mse / sigma2).
Nats kl_from_mse_upper(double mse, double sigma2);

/// Lower bound mse / delta2 valid when the target is delta2-subgaussian given
/// the history. delta2 is supplied by the caller.
Nats kl_from_mse_lower(double mse, double delta2);

/// Largest differential entropy of a `dim`-vector whose covariance has trace
/// `trace_cov`: (d/2) ln(2 pi e kappa / d), attained by N(mu, (kappa/d) I).
Nats max_diff_entropy(int dim, double trace_cov);

/// Differential entropy of N(0, K) from its log-determinant.
Nats gaussian_entropy(int dim, double log_det_cov);

}  // namespace infolearn
