#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "infolearn/bayes_agent.hpp"
#include "infolearn/core_info.hpp"
#include "infolearn/dgp.hpp"
#include "infolearn/parallel.hpp"

namespace infolearn {

// ---------------------------------------------------------------------------
// Wrong prior mean

struct MisspecMeanConfig {
  LinRegSpec base;
  Eigen::VectorXd mu;  ///< the agent's prior mean; the data use a zero-mean prior
};

/// KL between the correct and the mean-misspecified posterior predictives after
/// the inputs in `x_path`, evaluated at `x_next`:
///   0.5 * (x^T C mu)^2 / (sigma2 + x^T C x),  C = (I + sum x_i x_i^T / sigma2)^{-1}.
/// It does not depend on the observed labels.
Nats excess_kl_pathwise_mean(const std::vector<Eigen::VectorXd>& x_path, const Eigen::VectorXd& x_next,
                             const Eigen::VectorXd& mu, double sigma2);

/// Same quantity from a covariance C that already encodes the history.
Nats excess_kl_from_cov(const Eigen::MatrixXd& cov, const Eigen::VectorXd& x_next, const Eigen::VectorXd& mu,
                        double sigma2);

/// d |mu|^2 (2 / t^2 + exp(-(sqrt(t)/2 - sqrt(d))^2 / 2) / (2 sigma2)); requires t >= 4d.
Nats excess_kl_bound_mean(int d, int t, double mu_norm2, double sigma2);

// ---------------------------------------------------------------------------
// Missing feature

/// How the agent that ignores a feature models its labels.
enum class MissingFeatureModel {
  /// Labels are N(theta~^T x~, sigma2): the omitted coordinate is simply absent.
  Nominal,
  /// Labels are N(theta~^T x~, sigma2 + x_d^2): the omitted term theta_d x_d is
  /// treated as extra per-sample noise with its prior variance.
  Marginalized,
};

struct MissingFeatureConfig {
  LinRegSpec base;
  int omitted = -1;  ///< coordinate the agent ignores; -1 means the last one
  MissingFeatureModel model = MissingFeatureModel::Marginalized;
  Eigen::VectorXd fixed_theta;  ///< when set, data use this theta instead of a prior draw

  int omitted_index() const { return omitted < 0 ? base.d - 1 : omitted; }
};

/// Conjugate Gaussian agent over the d - 1 retained coordinates.
class MissingFeatureAgent {
 public:
  explicit MissingFeatureAgent(const MissingFeatureConfig& config);

  /// x is the full d-dimensional input.
  void observe(const Eigen::VectorXd& x, double y);
  GaussianDist predict(const Eigen::VectorXd& x) const;

  const GaussianPosterior& posterior() const { return post_; }
  Eigen::VectorXd reduce(const Eigen::VectorXd& x) const;

 private:
  double noise_var(const Eigen::VectorXd& x) const;

  MissingFeatureConfig config_;
  GaussianPosterior post_;
};

/// 0.5 E[ln(1 + Z^2 / sigma2)], Z ~ N(0, 1), by composite Gauss-Legendre quadrature.
Nats missing_feature_asymptote(double sigma2);

// ---------------------------------------------------------------------------
// Monte Carlo curves

struct ExcessCurve {
  std::vector<int> t;
  std::vector<double> mc_mean;
  std::vector<double> se;
  std::vector<double> bound;      ///< NaN where no bound applies
  std::vector<double> asymptote;  ///< NaN where no limit is known

  /// Columns t, mc_mean, se, bound, asymptote.
  void write_csv(std::ostream& os) const;
};

/// Excess error of the mean-misspecified agent at each history length in `ts`.
ExcessCurve mean_misspec_curve(const MisspecMeanConfig& config, const std::vector<int>& ts, int n_paths,
                               std::uint64_t seed, Exec exec = Exec::Parallel);

/// E[KL(P^_t || P_t)] of the missing-feature agent, P^_t the exact posterior
/// predictive, at each history length in `ts`.
ExcessCurve missing_feature_curve(const MissingFeatureConfig& config, const std::vector<int>& ts, int n_paths,
                                  std::uint64_t seed, Exec exec = Exec::Parallel);

}  // namespace infolearn
