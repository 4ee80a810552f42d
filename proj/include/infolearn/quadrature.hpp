#pragma once

#include <functional>
#include <vector>

namespace infolearn {

/// Gauss-Hermite rule for the weight exp(-x^2): nodes ascending, and
/// `scaled_weights[i] = weights[i] * exp(nodes[i]^2)` kept separately so callers
/// can rescale the Gaussian without losing the tiny tail weights.
struct HermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<double> scaled_weights;
};

/// Nodes by Newton iteration on the orthonormal Hermite recurrence.
HermiteRule gauss_hermite(int n);

/// E[f(Z)] for Z ~ N(0, 1), using z = sqrt(2) * c * x. A width factor c < 1
/// spreads nodes closer together, which helps integrands with sharp features
/// near the origin; c = 1 is the plain rule.
double expect_standard_normal(const std::function<double(double)>& f, int n = 200, double c = 0.3);

/// Gauss-Legendre rule on [-1, 1], nodes ascending.
struct LegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
LegendreRule gauss_legendre(int n);

/// E[f(|Z|)] for Z ~ N(0, 1) by composite Gauss-Legendre on [0, 12] with panels
/// refined geometrically towards 0 down to `feature_scale` / 64. Suited to
/// integrands that vary sharply near |z| ~ feature_scale.
double expect_abs_standard_normal(const std::function<double(double)>& f, double feature_scale);

}  // namespace infolearn
