#include "infolearn/core_info.hpp"

#include <numbers>
#include <string>

#include "infolearn/errors.hpp"

namespace infolearn {

namespace {

void require_variance(double v, const char* what) {
  if (!(v >= kMinVariance) || !std::isfinite(v)) {
    throw DomainError(std::string(what) + ": variance must be finite and >= 1e-300");
  }
}

}  // namespace

Nats kl_gaussian(const GaussianDist& p, const GaussianDist& q) {
  require_variance(p.variance, "kl_gaussian(p)");
  require_variance(q.variance, "kl_gaussian(q)");
  if (!std::isfinite(p.mean) || !std::isfinite(q.mean)) throw DomainError("kl_gaussian: non-finite mean");
  const double diff = p.mean - q.mean;
  const double ratio = p.variance / q.variance;
  // ratio - 1 - ln(ratio) computed as expm1/log1p-friendly form near ratio = 1.
  const double shape = (ratio - 1.0) - std::log1p(ratio - 1.0);
  return Nats(diff * diff / (2.0 * q.variance) + 0.5 * shape);
}

Nats kl_from_mse_upper(double mse, double sigma2) {
  if (!(sigma2 > 0.0)) throw DomainError("kl_from_mse_upper: sigma2 must be positive");
  if (!(mse >= 0.0)) throw DomainError("kl_from_mse_upper: mse must be nonnegative");
  return Nats(0.5 * std::log1p(mse / sigma2));
}

Nats kl_from_mse_lower(double mse, double delta2) {
  if (!(delta2 > 0.0)) throw DomainError("kl_from_mse_lower: delta2 must be positive");
  if (!(mse >= 0.0)) throw DomainError("kl_from_mse_lower: mse must be nonnegative");
  return Nats(mse / delta2);
}

Nats max_diff_entropy(int dim, double trace_cov) {
  if (dim < 1) throw DomainError("max_diff_entropy: dim must be >= 1");
  if (!(trace_cov > 0.0) || !std::isfinite(trace_cov)) throw DomainError("max_diff_entropy: trace must be positive");
  const double d = static_cast<double>(dim);
  return Nats(0.5 * d * std::log(2.0 * std::numbers::pi * std::numbers::e * trace_cov / d));
}

Nats gaussian_entropy(int dim, double log_det_cov) {
  if (dim < 1) throw DomainError("gaussian_entropy: dim must be >= 1");
  const double d = static_cast<double>(dim);
  return Nats(0.5 * (d * std::log(2.0 * std::numbers::pi * std::numbers::e) + log_det_cov));
}

}  // namespace infolearn
