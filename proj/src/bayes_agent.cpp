#include "infolearn/bayes_agent.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "infolearn/errors.hpp"

namespace infolearn {

namespace {

void check_finite(const Eigen::VectorXd& x, double y, double noise_var) {
  if (!x.allFinite() || !std::isfinite(y) || !std::isfinite(noise_var)) {
    throw NumericError("posterior_update: non-finite input");
  }
}

void refresh(GaussianPosterior& post) {
  Eigen::LLT<Eigen::MatrixXd> llt(post.precision);
  if (llt.info() != Eigen::Success) throw NumericError("posterior refresh: precision not positive definite");
  post.cov = llt.solve(Eigen::MatrixXd::Identity(post.dim(), post.dim()));
  post.cov = 0.5 * (post.cov + post.cov.transpose());
  post.mean = post.cov * post.natural_mean;
  post.updates_since_refresh = 0;
}

}  // namespace

GaussianPosterior GaussianPosterior::standard(int d, const Eigen::VectorXd& prior_mean) {
  if (d < 1) throw ConfigError("GaussianPosterior: d must be >= 1");
  if (prior_mean.size() != 0 && prior_mean.size() != d) throw ShapeError("GaussianPosterior: prior mean dimension");
  GaussianPosterior p;
  p.mean = prior_mean.size() == 0 ? Eigen::VectorXd::Zero(d) : prior_mean;
  p.cov = Eigen::MatrixXd::Identity(d, d);
  p.precision = Eigen::MatrixXd::Identity(d, d);
  p.natural_mean = p.mean;
  return p;
}

void posterior_update_inplace(GaussianPosterior& post, const Eigen::VectorXd& x, double y, double noise_var) {
  if (x.size() != post.dim()) throw ShapeError("posterior_update: x has wrong dimension");
  if (!(noise_var > 0.0)) throw DomainError("posterior_update: noise variance must be positive");
  check_finite(x, y, noise_var);

  const Eigen::VectorXd sx = post.cov * x;
  const double s = noise_var + x.dot(sx);
  const double resid = y - post.mean.dot(x);
  post.mean.noalias() += sx * (resid / s);
  post.cov.noalias() -= (sx * sx.transpose()) / s;
  post.precision.noalias() += (x * x.transpose()) / noise_var;
  post.natural_mean.noalias() += x * (y / noise_var);

  if (++post.updates_since_refresh >= GaussianPosterior::kRefreshInterval) refresh(post);
  if (!post.mean.allFinite() || !post.cov.allFinite()) throw NumericError("posterior_update: non-finite state");
}

GaussianPosterior posterior_update(const GaussianPosterior& post, const Eigen::VectorXd& x, double y,
                                   double noise_var) {
  GaussianPosterior next = post;
  posterior_update_inplace(next, x, y, noise_var);
  return next;
}

GaussianDist predictive(const GaussianPosterior& post, const Eigen::VectorXd& x, double noise_var) {
  if (x.size() != post.dim()) throw ShapeError("predictive: x has wrong dimension");
  return GaussianDist{post.mean.dot(x), noise_var + x.dot(post.cov * x)};
}

Nats expected_step_kl(const GaussianPosterior& post, const Eigen::VectorXd& x, double sigma2) {
  if (x.size() != post.dim()) throw ShapeError("expected_step_kl: x has wrong dimension");
  if (!(sigma2 > 0.0)) throw DomainError("expected_step_kl: sigma2 must be positive");
  const double q = std::max(0.0, x.dot(post.cov * x));
  return Nats(0.5 * std::log1p(q / sigma2));
}

MeanSe sampled_step_kl(const GaussianPosterior& post, const Eigen::VectorXd& x, double sigma2, int samples,
                       Rng& rng) {
  if (samples < 1) throw ConfigError("sampled_step_kl: samples must be >= 1");
  const GaussianDist pred = predictive(post, x, sigma2);
  // theta^T x given the history is N(mu^T x, x^T Sigma x); only that projection matters.
  const double sd = std::sqrt(std::max(0.0, pred.variance - sigma2));
  std::vector<double> kl(static_cast<std::size_t>(samples));
  for (auto& v : kl) {
    const double m = pred.mean + sd * rng.normal();
    v = kl_gaussian(GaussianDist{m, sigma2}, pred);
  }
  return mean_se(kl);
}

Nats exact_cumulative_info(const std::vector<Eigen::VectorXd>& x_path, double sigma2) {
  if (x_path.empty()) return Nats(0.0);
  if (!(sigma2 > 0.0)) throw DomainError("exact_cumulative_info: sigma2 must be positive");
  const auto d = x_path.front().size();
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(d, d);
  for (const auto& x : x_path) {
    if (x.size() != d) throw ShapeError("exact_cumulative_info: inconsistent input dimension");
    gram.selfadjointView<Eigen::Lower>().rankUpdate(x);
  }
  Eigen::MatrixXd m = gram.selfadjointView<Eigen::Lower>();
  m /= sigma2;
  m.diagonal().array() += 1.0;
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) throw NumericError("exact_cumulative_info: factorization failed");
  const Eigen::VectorXd diag = llt.matrixL().toDenseMatrix().diagonal();
  return Nats(diag.array().log().sum());
}

void RegretCurve::write_csv(std::ostream& os) const {
  os << "t,mean_step_kl,se,cumulative\n";
  os.precision(17);
  for (std::size_t i = 0; i < mean_step_kl.size(); ++i) {
    os << (i + 1) << ',' << mean_step_kl[i] << ',' << se[i] << ',' << cumulative[i] << '\n';
  }
}

RegretCurve aggregate_regret(const std::vector<std::vector<double>>& per_trial, int T) {
  RegretCurve curve;
  curve.n_trials = per_trial.size();
  const auto steps = static_cast<std::size_t>(std::max(T, 0));
  curve.mean_step_kl.resize(steps);
  curve.se.resize(steps);
  curve.cumulative.resize(steps);
  curve.cumulative_se.resize(steps);
  if (per_trial.empty()) return curve;

  std::vector<double> column(per_trial.size());
  std::vector<double> running(per_trial.size(), 0.0);
  double cum = 0.0;
  for (std::size_t t = 0; t < steps; ++t) {
    for (std::size_t i = 0; i < per_trial.size(); ++i) {
      column[i] = per_trial[i][t];
      running[i] += column[i];
    }
    const MeanSe step = mean_se(column);
    cum += step.mean;
    curve.mean_step_kl[t] = step.mean;
    curve.se[t] = step.se;
    curve.cumulative[t] = cum;
    curve.cumulative_se[t] = mean_se(running).se;
  }
  return curve;
}

namespace {

template <typename DrawX, typename Truth>
std::vector<double> run_path(GaussianPosterior post, int T, double sigma2, StepEstimator est, Rng& rng,
                             DrawX&& draw_x, Truth&& truth) {
  std::vector<double> steps(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t) {
    const Eigen::VectorXd x = draw_x();
    const double f = truth(x);
    if (est == StepEstimator::Analytic) {
      steps[static_cast<std::size_t>(t)] = expected_step_kl(post, x, sigma2);
    } else {
      steps[static_cast<std::size_t>(t)] = kl_gaussian(GaussianDist{f, sigma2}, predictive(post, x, sigma2));
    }
    const double y = f + std::sqrt(sigma2) * rng.normal();
    posterior_update_inplace(post, x, y, sigma2);
  }
  return steps;
}

}  // namespace

RegretCurve simulate_regret(const ScalarEnvSpec& spec, int T, int n_trials, std::uint64_t seed, RegretOptions opts) {
  if (spec.prior != ScalarPrior::Gaussian) {
    throw ConfigError("simulate_regret: the conjugate agent requires the Gaussian scalar prior");
  }
  if (!(spec.sigma2 > 0.0)) throw DomainError("simulate_regret: sigma2 must be positive");
  if (n_trials < 1) throw ConfigError("simulate_regret: n_trials must be >= 1");
  if (T <= 0) return aggregate_regret({}, 0);
  auto per_trial = map_indexed(
      static_cast<std::size_t>(n_trials),
      [&](std::size_t i) {
        Rng rng = Rng::derive(seed, "regret/scalar", i);
        const double theta = sample_env(spec, rng);
        const Eigen::VectorXd one = Eigen::VectorXd::Ones(1);
        return run_path(GaussianPosterior::standard(1), T, spec.sigma2, opts.estimator, rng,
                        [&] { return one; }, [&](const Eigen::VectorXd&) { return theta; });
      },
      opts.exec);
  return aggregate_regret(per_trial, T);
}

RegretCurve simulate_regret(const LinRegSpec& spec, int T, int n_trials, std::uint64_t seed, RegretOptions opts) {
  if (!(spec.sigma2 > 0.0)) throw DomainError("simulate_regret: sigma2 must be positive");
  if (n_trials < 1) throw ConfigError("simulate_regret: n_trials must be >= 1");
  if (T <= 0) return aggregate_regret({}, 0);
  auto per_trial = map_indexed(
      static_cast<std::size_t>(n_trials),
      [&](std::size_t i) {
        Rng rng = Rng::derive(seed, "regret/linreg", i);
        const Eigen::VectorXd theta = sample_env(spec, rng);
        return run_path(GaussianPosterior::standard(spec.d, spec.prior_mean), T, spec.sigma2, opts.estimator, rng,
                        [&] { return standard_normal_vector(spec.d, rng); },
                        [&](const Eigen::VectorXd& x) { return theta.dot(x); });
      },
      opts.exec);
  return aggregate_regret(per_trial, T);
}

}  // namespace infolearn
