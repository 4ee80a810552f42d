#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "infolearn/core_info.hpp"
#include "infolearn/dgp.hpp"
#include "infolearn/parallel.hpp"

namespace infolearn {

/// Gaussian posterior over a linear-regression parameter.
///
/// The covariance is updated by Sherman-Morrison in O(d^2) per observation.
/// The precision and the natural mean b = Sigma_0^{-1} mu_0 + sum x y / s2 are
/// accumulated alongside, and every `kRefreshInterval` updates the covariance
/// and mean are recomputed from them by Cholesky to bound rounding drift.
struct GaussianPosterior {
  static constexpr int kRefreshInterval = 256;

  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  Eigen::MatrixXd precision;
  Eigen::VectorXd natural_mean;
  int updates_since_refresh = 0;

  /// N(prior_mean, I_d); an empty `prior_mean` means zero.
  static GaussianPosterior standard(int d, const Eigen::VectorXd& prior_mean = {});

  int dim() const { return static_cast<int>(mean.size()); }
};

/// Conjugate update with observation y = theta^T x + w, w ~ N(0, noise_var).
GaussianPosterior posterior_update(const GaussianPosterior& post, const Eigen::VectorXd& x, double y,
                                   double noise_var);
void posterior_update_inplace(GaussianPosterior& post, const Eigen::VectorXd& x, double y, double noise_var);

/// Posterior predictive N(mu^T x, noise_var + x^T Sigma x).
GaussianDist predictive(const GaussianPosterior& post, const Eigen::VectorXd& x, double noise_var);

/// E[KL(N(theta^T x, s2) || predictive) | history] = 0.5 ln(1 + x^T Sigma x / s2).
Nats expected_step_kl(const GaussianPosterior& post, const Eigen::VectorXd& x, double sigma2);

/// Sampling estimator of `expected_step_kl`: draws theta from the posterior and
/// averages the Gaussian KL. Used as an oracle.
MeanSe sampled_step_kl(const GaussianPosterior& post, const Eigen::VectorXd& x, double sigma2, int samples,
                       Rng& rng);

/// 0.5 ln det(I + X^T X / sigma2) for the stacked inputs of `x_path`.
Nats exact_cumulative_info(const std::vector<Eigen::VectorXd>& x_path, double sigma2);

/// How each trial scores a step.
enum class StepEstimator {
  Analytic,  ///< conditional expectation over theta given the history
  Sampled,   ///< KL between the true conditional and the predictive for the drawn theta
};

struct RegretCurve {
  std::vector<double> mean_step_kl;  ///< e_1 ... e_T
  std::vector<double> se;            ///< standard error of each e_t
  std::vector<double> cumulative;    ///< running sum of mean_step_kl
  std::vector<double> cumulative_se; ///< standard error of the per-trial cumulative sum
  std::size_t n_trials = 0;

  std::size_t size() const { return mean_step_kl.size(); }
  double total() const { return cumulative.empty() ? 0.0 : cumulative.back(); }
  double total_se() const { return cumulative_se.empty() ? 0.0 : cumulative_se.back(); }

  /// Columns t, mean_step_kl, se, cumulative.
  void write_csv(std::ostream& os) const;
};

struct RegretOptions {
  StepEstimator estimator = StepEstimator::Analytic;
  Exec exec = Exec::Parallel;
};

/// Averages per-step errors of the optimal agent over `n_trials` independent
/// (theta, data path) draws. Trial i uses the stream derived from (seed, i).
/// The scalar environment requires the Gaussian prior (the agent is conjugate).
RegretCurve simulate_regret(const ScalarEnvSpec& spec, int T, int n_trials, std::uint64_t seed,
                            RegretOptions opts = {});
RegretCurve simulate_regret(const LinRegSpec& spec, int T, int n_trials, std::uint64_t seed,
                            RegretOptions opts = {});

/// Builds a curve from a trials x T table of per-step values.
RegretCurve aggregate_regret(const std::vector<std::vector<double>>& per_trial, int T);

}  // namespace infolearn
