#include "infolearn/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include <Eigen/Dense>

#include "infolearn/errors.hpp"

namespace infolearn {

HermiteRule gauss_hermite(int n) {
  if (n < 1) throw ConfigError("gauss_hermite: n must be >= 1");
  constexpr double kPiM4 = 0.7511255444649425;  // pi^(-1/4)
  constexpr double kTol = 1e-15;
  constexpr int kMaxIter = 50;

  // Golub-Welsch nodes as starting points, polished by Newton on the
  // orthonormal recurrence, which also yields accurate tail weights.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int j = 1; j < n; ++j) jacobi(j, j - 1) = jacobi(j - 1, j) = std::sqrt(j / 2.0);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw NumericError("gauss_hermite: eigen solver failed");

  HermiteRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  rule.scaled_weights.resize(static_cast<std::size_t>(n));
  const double dn = n;
  for (int i = n / 2; i < n; ++i) {
    double z = std::max(0.0, eig.eigenvalues()(i));
    if (n % 2 == 1 && i == n / 2) z = 0.0;
    double pp = 0.0;
    for (int it = 0;; ++it) {
      double p1 = kPiM4;
      double p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * dn) * p2;
      const double step = p1 / pp;
      z -= step;
      if (std::abs(step) <= kTol * std::max(1.0, std::abs(z))) break;
      if (it == kMaxIter) throw NumericError("gauss_hermite: Newton iteration did not converge");
    }
    const double log_w = std::log(2.0) - 2.0 * std::log(std::abs(pp));
    const auto hi = static_cast<std::size_t>(i);
    const auto lo = static_cast<std::size_t>(n - 1 - i);
    rule.nodes[hi] = z;
    rule.nodes[lo] = -z;
    rule.weights[hi] = rule.weights[lo] = std::exp(log_w);
    rule.scaled_weights[hi] = rule.scaled_weights[lo] = std::exp(log_w + z * z);
  }
  return rule;
}

namespace {

const HermiteRule& cached_rule(int n) {
  static std::mutex mu;
  static std::map<int, HermiteRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, gauss_hermite(n)).first;
  return it->second;
}

}  // namespace

double expect_standard_normal(const std::function<double(double)>& f, int n, double c) {
  if (!(c > 0.0) || c > 1.0) throw ConfigError("expect_standard_normal: width factor must lie in (0, 1]");
  const HermiteRule& rule = cached_rule(n);
  const double shrink = 1.0 - c * c;
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double x = rule.nodes[i];
    // w * exp((1 - c^2) x^2) = scaled_w * exp(-c^2 x^2)
    const double w = shrink == 0.0 ? rule.weights[i] : rule.scaled_weights[i] * std::exp(-c * c * x * x);
    sum += w * f(std::numbers::sqrt2 * c * x);
  }
  return sum * c / std::sqrt(std::numbers::pi);
}

LegendreRule gauss_legendre(int n) {
  if (n < 1) throw ConfigError("gauss_legendre: n must be >= 1");
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int j = 1; j < n; ++j) jacobi(j, j - 1) = jacobi(j - 1, j) = j / std::sqrt(4.0 * j * j - 1.0);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  if (eig.info() != Eigen::Success) throw NumericError("gauss_legendre: eigen solver failed");
  LegendreRule rule;
  for (int i = 0; i < n; ++i) {
    rule.nodes.push_back(eig.eigenvalues()(i));
    rule.weights.push_back(2.0 * eig.eigenvectors()(0, i) * eig.eigenvectors()(0, i));
  }
  return rule;
}

double expect_abs_standard_normal(const std::function<double(double)>& f, double feature_scale) {
  if (!(feature_scale > 0.0)) throw ConfigError("expect_abs_standard_normal: feature scale must be positive");
  constexpr double kUpper = 12.0;
  static const LegendreRule rule = gauss_legendre(20);
  std::vector<double> edges{0.0};
  for (double e = std::min(feature_scale, 1.0) / 64.0; e < kUpper; e *= 2.0) edges.push_back(e);
  edges.push_back(kUpper);
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    const double half = 0.5 * (edges[k + 1] - edges[k]);
    const double mid = 0.5 * (edges[k + 1] + edges[k]);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double z = mid + half * rule.nodes[i];
      sum += half * rule.weights[i] * std::exp(-0.5 * z * z) * f(z);
    }
  }
  return sum * 2.0 / std::sqrt(2.0 * std::numbers::pi);
}

}  // namespace infolearn
