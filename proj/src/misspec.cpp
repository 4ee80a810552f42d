#include "infolearn/misspec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "infolearn/errors.hpp"
#include "infolearn/quadrature.hpp"

namespace infolearn {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<int> sorted_unique(std::vector<int> ts) {
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  if (!ts.empty() && ts.front() < 0) throw ConfigError("excess curve: history lengths must be >= 0");
  return ts;
}

}  // namespace

Nats excess_kl_from_cov(const Eigen::MatrixXd& cov, const Eigen::VectorXd& x_next, const Eigen::VectorXd& mu,
                        double sigma2) {
  if (x_next.size() != cov.rows() || mu.size() != cov.rows()) {
    throw ShapeError("excess_kl_pathwise_mean: dimension mismatch");
  }
  if (!(sigma2 > 0.0)) throw DomainError("excess_kl_pathwise_mean: sigma2 must be positive");
  const Eigen::VectorXd cx = cov * x_next;
  const double proj = cx.dot(mu);
  return Nats(0.5 * proj * proj / (sigma2 + x_next.dot(cx)));
}

Nats excess_kl_pathwise_mean(const std::vector<Eigen::VectorXd>& x_path, const Eigen::VectorXd& x_next,
                             const Eigen::VectorXd& mu, double sigma2) {
  const auto d = mu.size();
  if (!(sigma2 > 0.0)) throw DomainError("excess_kl_pathwise_mean: sigma2 must be positive");
  Eigen::MatrixXd prec = Eigen::MatrixXd::Identity(d, d);
  for (const auto& x : x_path) {
    if (x.size() != d) throw ShapeError("excess_kl_pathwise_mean: dimension mismatch");
    prec.noalias() += x * x.transpose() / sigma2;
  }
  const Eigen::MatrixXd cov = prec.llt().solve(Eigen::MatrixXd::Identity(d, d));
  return excess_kl_from_cov(cov, x_next, mu, sigma2);
}

Nats excess_kl_bound_mean(int d, int t, double mu_norm2, double sigma2) {
  if (d < 1) throw DomainError("excess_kl_bound_mean: d must be >= 1");
  if (t < 4 * d) throw DomainError("excess_kl_bound_mean: requires t >= 4d");
  if (!(sigma2 > 0.0) || !(mu_norm2 >= 0.0)) throw DomainError("excess_kl_bound_mean: invalid sigma2 or |mu|^2");
  const double gap = 0.5 * std::sqrt(static_cast<double>(t)) - std::sqrt(static_cast<double>(d));
  const double tt = static_cast<double>(t);
  return Nats(d * mu_norm2 * (2.0 / (tt * tt) + std::exp(-0.5 * gap * gap) / (2.0 * sigma2)));
}

// ---------------------------------------------------------------------------

MissingFeatureAgent::MissingFeatureAgent(const MissingFeatureConfig& config) : config_(config) {
  if (config.base.d < 2) throw ConfigError("MissingFeatureAgent: d must be >= 2");
  if (!(config.base.sigma2 > 0.0)) throw DomainError("MissingFeatureAgent: sigma2 must be positive");
  const int k = config.omitted_index();
  if (k < 0 || k >= config.base.d) throw ConfigError("MissingFeatureAgent: omitted index out of range");
  Eigen::VectorXd prior_mean;
  if (config.base.prior_mean.size() == config.base.d) prior_mean = reduce(config.base.prior_mean);
  post_ = GaussianPosterior::standard(config.base.d - 1, prior_mean);
}

Eigen::VectorXd MissingFeatureAgent::reduce(const Eigen::VectorXd& x) const {
  const int d = config_.base.d;
  if (x.size() != d) throw ShapeError("MissingFeatureAgent: input must have d coordinates");
  const int k = config_.omitted_index();
  Eigen::VectorXd r(d - 1);
  r.head(k) = x.head(k);
  r.tail(d - 1 - k) = x.tail(d - 1 - k);
  return r;
}

double MissingFeatureAgent::noise_var(const Eigen::VectorXd& x) const {
  const double xd = x(config_.omitted_index());
  return config_.model == MissingFeatureModel::Marginalized ? config_.base.sigma2 + xd * xd : config_.base.sigma2;
}

void MissingFeatureAgent::observe(const Eigen::VectorXd& x, double y) {
  posterior_update_inplace(post_, reduce(x), y, noise_var(x));
}

GaussianDist MissingFeatureAgent::predict(const Eigen::VectorXd& x) const {
  return predictive(post_, reduce(x), noise_var(x));
}

Nats missing_feature_asymptote(double sigma2) {
  if (!(sigma2 > 0.0)) throw DomainError("missing_feature_asymptote: sigma2 must be positive");
  return Nats(0.5 * expect_abs_standard_normal([sigma2](double z) { return std::log1p(z * z / sigma2); },
                                               std::sqrt(sigma2)));
}

// ---------------------------------------------------------------------------

void ExcessCurve::write_csv(std::ostream& os) const {
  os << "t,mc_mean,se,bound,asymptote\n";
  os.precision(17);
  for (std::size_t i = 0; i < t.size(); ++i) {
    os << t[i] << ',' << mc_mean[i] << ',' << se[i] << ',' << bound[i] << ',' << asymptote[i] << '\n';
  }
}

namespace {

ExcessCurve collect(const std::vector<int>& ts, const std::vector<std::vector<double>>& per_path) {
  ExcessCurve c;
  c.t = ts;
  std::vector<double> column(per_path.size());
  for (std::size_t j = 0; j < ts.size(); ++j) {
    for (std::size_t i = 0; i < per_path.size(); ++i) column[i] = per_path[i][j];
    const MeanSe m = mean_se(column);
    c.mc_mean.push_back(m.mean);
    c.se.push_back(m.se);
  }
  return c;
}

}  // namespace

ExcessCurve mean_misspec_curve(const MisspecMeanConfig& config, const std::vector<int>& ts_in, int n_paths,
                               std::uint64_t seed, Exec exec) {
  const int d = config.base.d;
  const double sigma2 = config.base.sigma2;
  if (config.mu.size() != d) throw ShapeError("mean_misspec_curve: mu must have d coordinates");
  if (n_paths < 1) throw ConfigError("mean_misspec_curve: n_paths must be >= 1");
  const std::vector<int> ts = sorted_unique(ts_in);

  auto per_path = map_indexed(
      static_cast<std::size_t>(n_paths),
      [&](std::size_t i) {
        Rng rng = Rng::derive(seed, "misspec/mean", i);
        GaussianPosterior post = GaussianPosterior::standard(d);
        std::vector<double> out;
        int seen = 0;
        for (int target : ts) {
          // Labels do not enter the excess, so the history only needs inputs.
          for (; seen < target; ++seen) posterior_update_inplace(post, standard_normal_vector(d, rng), 0.0, sigma2);
          out.push_back(excess_kl_from_cov(post.cov, standard_normal_vector(d, rng), config.mu, sigma2));
        }
        return out;
      },
      exec);

  ExcessCurve c = collect(ts, per_path);
  const double mu2 = config.mu.squaredNorm();
  for (int t : ts) {
    c.bound.push_back(t >= 4 * d ? excess_kl_bound_mean(d, t, mu2, sigma2).value : kNaN);
    c.asymptote.push_back(0.0);
  }
  return c;
}

ExcessCurve missing_feature_curve(const MissingFeatureConfig& config, const std::vector<int>& ts_in, int n_paths,
                                  std::uint64_t seed, Exec exec) {
  const int d = config.base.d;
  const double sigma2 = config.base.sigma2;
  if (n_paths < 1) throw ConfigError("missing_feature_curve: n_paths must be >= 1");
  if (config.fixed_theta.size() != 0 && config.fixed_theta.size() != d) {
    throw ShapeError("missing_feature_curve: fixed theta must have d coordinates");
  }
  MissingFeatureAgent probe(config);  // validates the configuration up front
  const std::vector<int> ts = sorted_unique(ts_in);
  const double sd = std::sqrt(sigma2);

  auto per_path = map_indexed(
      static_cast<std::size_t>(n_paths),
      [&](std::size_t i) {
        Rng rng = Rng::derive(seed, "misspec/missing", i);
        const Eigen::VectorXd theta = config.fixed_theta.size() == d ? config.fixed_theta : sample_env(config.base, rng);
        GaussianPosterior full = GaussianPosterior::standard(d, config.base.prior_mean);
        MissingFeatureAgent agent(config);
        std::vector<double> out;
        int step = 0;
        for (int target : ts) {
          for (;; ++step) {
            const Eigen::VectorXd x = standard_normal_vector(d, rng);
            if (step == target) {
              out.push_back(kl_gaussian(predictive(full, x, sigma2), agent.predict(x)));
            }
            const double y = theta.dot(x) + sd * rng.normal();
            posterior_update_inplace(full, x, y, sigma2);
            agent.observe(x, y);
            if (step == target) {
              ++step;
              break;
            }
          }
        }
        return out;
      },
      exec);

  ExcessCurve c = collect(ts, per_path);
  const double limit = config.model == MissingFeatureModel::Marginalized && config.fixed_theta.size() == 0 &&
                               config.base.prior_mean.size() == 0
                           ? missing_feature_asymptote(sigma2).value
                           : kNaN;
  for (std::size_t j = 0; j < ts.size(); ++j) {
    c.bound.push_back(kNaN);
    c.asymptote.push_back(limit);
  }
  return c;
}

}  // namespace infolearn
