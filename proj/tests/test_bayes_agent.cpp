#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "infolearn/bayes_agent.hpp"
#include "infolearn/errors.hpp"

using namespace infolearn;

namespace {

// Batch conjugate posterior computed by direct inversion.
void batch_posterior(const std::vector<Eigen::VectorXd>& xs, const std::vector<double>& ys, double s2, int d,
                     Eigen::VectorXd& mean, Eigen::MatrixXd& cov) {
  Eigen::MatrixXd P = Eigen::MatrixXd::Identity(d, d);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(d);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    P += xs[i] * xs[i].transpose() / s2;
    b += xs[i] * ys[i] / s2;
  }
  cov = P.inverse();
  mean = cov * b;
}

}  // namespace

TEST(Posterior, ZeroInputLeavesPosteriorUnchanged) {
  const auto p0 = GaussianPosterior::standard(3);
  const auto p1 = posterior_update(p0, Eigen::VectorXd::Zero(3), 2.5, 0.1);
  EXPECT_TRUE(p1.mean.isApprox(p0.mean));
  EXPECT_TRUE(p1.cov.isApprox(p0.cov));
}

TEST(Posterior, ScalarHandValue) {
  const auto p = posterior_update(GaussianPosterior::standard(1), Eigen::VectorXd::Ones(1), 1.0, 1.0);
  EXPECT_NEAR(p.cov(0, 0), 0.5, 1e-15);
  EXPECT_NEAR(p.mean(0), 0.5, 1e-15);
}

TEST(Posterior, RepeatedInputShrinksAlongIt) {
  Eigen::VectorXd x(2);
  x << 1.0, 2.0;
  auto p = GaussianPosterior::standard(2);
  const double s2 = 0.3;
  const Eigen::VectorXd u = x.normalized();
  for (int t = 1; t <= 50; ++t) {
    posterior_update_inplace(p, x, 0.0, s2);
    EXPECT_NEAR(u.dot(p.cov * u), 1.0 / (1.0 + t * x.squaredNorm() / s2), 1e-12);
  }
}

TEST(Posterior, MatchesBatchInverseAcrossRefreshes) {
  const int d = 5;
  const double s2 = 0.05;
  Rng rng(1);
  auto p = GaussianPosterior::standard(d);
  std::vector<Eigen::VectorXd> xs;
  std::vector<double> ys;
  for (int t = 0; t < 600; ++t) {
    xs.push_back(standard_normal_vector(d, rng));
    ys.push_back(rng.normal());
    posterior_update_inplace(p, xs.back(), ys.back(), s2);
  }
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  batch_posterior(xs, ys, s2, d, mean, cov);
  EXPECT_LT((p.mean - mean).norm(), 1e-10);
  EXPECT_LT((p.cov - cov).norm(), 1e-12);
}

TEST(Posterior, RejectsBadInputs) {
  auto p = GaussianPosterior::standard(2);
  EXPECT_THROW(posterior_update_inplace(p, Eigen::VectorXd::Ones(3), 0.0, 1.0), ShapeError);
  EXPECT_THROW(posterior_update_inplace(p, Eigen::VectorXd::Ones(2), 0.0, 0.0), DomainError);
  EXPECT_THROW(posterior_update_inplace(p, Eigen::VectorXd::Ones(2), NAN, 1.0), NumericError);
}

TEST(Predictive, PriorState) {
  const GaussianDist g = predictive(GaussianPosterior::standard(3), Eigen::Vector3d(1, 0, 0), 0.1);
  EXPECT_DOUBLE_EQ(g.mean, 0.0);
  EXPECT_NEAR(g.variance, 1.1, 1e-15);
}

TEST(Predictive, HandValue) {
  auto p = GaussianPosterior::standard(2);
  p.cov = Eigen::Vector2d(0.5, 1.0).asDiagonal();
  EXPECT_NEAR(predictive(p, Eigen::Vector2d(1, 1), 0.1).variance, 1.6, 1e-15);
}

TEST(Predictive, VarianceTendsToNoise) {
  auto p = GaussianPosterior::standard(2);
  Rng rng(2);
  for (int t = 0; t < 20000; ++t) posterior_update_inplace(p, standard_normal_vector(2, rng), rng.normal(), 0.2);
  EXPECT_NEAR(predictive(p, Eigen::Vector2d(1, -1), 0.2).variance, 0.2, 1e-3);
}

TEST(StepKl, KnownEnvironmentIsZero) {
  auto p = GaussianPosterior::standard(2);
  p.cov.setZero();
  EXPECT_DOUBLE_EQ(expected_step_kl(p, Eigen::Vector2d(1, 2), 0.1), 0.0);
}

TEST(StepKl, HandValue) {
  EXPECT_NEAR(expected_step_kl(GaussianPosterior::standard(1), Eigen::VectorXd::Ones(1), 1.0), 0.5 * std::log(2.0),
              1e-15);
}

TEST(StepKl, MatchesMonteCarloOracle) {
  Rng rng(3);
  for (int rep = 0; rep < 5; ++rep) {
    auto p = GaussianPosterior::standard(3);
    for (int t = 0; t < rep * 3; ++t) posterior_update_inplace(p, standard_normal_vector(3, rng), rng.normal(), 0.1);
    const Eigen::VectorXd x = standard_normal_vector(3, rng);
    const MeanSe mc = sampled_step_kl(p, x, 0.1, 100000, rng);
    EXPECT_NEAR(expected_step_kl(p, x, 0.1), mc.mean, 3 * mc.se + 1e-12);
  }
}

TEST(CumulativeInfo, EmptyAndSingle) {
  EXPECT_DOUBLE_EQ(exact_cumulative_info({}, 0.1), 0.0);
  EXPECT_NEAR(exact_cumulative_info({Eigen::VectorXd::Ones(1)}, 0.1), 0.5 * std::log(11.0), 1e-14);
  EXPECT_NEAR(exact_cumulative_info({Eigen::VectorXd::Ones(1)}, 0.1), 1.19895, 1e-5);
}

TEST(CumulativeInfo, TelescopesOverSteps) {
  Rng rng(4);
  for (int rep = 0; rep < 20; ++rep) {
    const int d = 1 + rep % 6;
    auto p = GaussianPosterior::standard(d);
    std::vector<Eigen::VectorXd> path;
    double sum = 0.0;
    for (int t = 0; t < 120; ++t) {
      path.push_back(standard_normal_vector(d, rng));
      sum += expected_step_kl(p, path.back(), 0.1);
      posterior_update_inplace(p, path.back(), rng.normal(), 0.1);
    }
    EXPECT_NEAR(sum, exact_cumulative_info(path, 0.1), 1e-8);
  }
}

TEST(Regret, EmptyHorizon) {
  const RegretCurve c = simulate_regret(ScalarEnvSpec{}, 0, 10, 1);
  EXPECT_EQ(c.size(), 0u);
  EXPECT_DOUBLE_EQ(c.total(), 0.0);
}

TEST(Regret, ScalarStepOneIsExact) {
  const RegretCurve c = simulate_regret(ScalarEnvSpec{0.1}, 3, 50, 7);
  EXPECT_NEAR(c.mean_step_kl[0], 0.5 * std::log(11.0), 1e-14);
  EXPECT_NEAR(c.se[0], 0.0, 1e-14);
  EXPECT_NEAR(c.total(), 0.5 * std::log(1.0 + 3 / 0.1), 1e-12);
}

TEST(Regret, SampledEstimatorAgreesWithAnalytic) {
  RegretOptions opts;
  opts.estimator = StepEstimator::Sampled;
  const RegretCurve s = simulate_regret(ScalarEnvSpec{1.0}, 10, 100000, 8, opts);
  EXPECT_NEAR(s.total(), 0.5 * std::log(11.0), 3 * s.total_se());
}

TEST(Regret, UniformPriorIsRejectedForTheConjugateAgent) {
  EXPECT_THROW(simulate_regret(ScalarEnvSpec{0.1, ScalarPrior::Uniform}, 3, 10, 1), ConfigError);
}

TEST(Regret, SerialAndParallelIdentical) {
  LinRegSpec spec;
  spec.d = 4;
  RegretOptions serial{StepEstimator::Sampled, Exec::Serial};
  RegretOptions par{StepEstimator::Sampled, Exec::Parallel};
  const RegretCurve a = simulate_regret(spec, 30, 64, 5, serial);
  const RegretCurve b = simulate_regret(spec, 30, 64, 5, par);
  EXPECT_EQ(a.mean_step_kl, b.mean_step_kl);
  EXPECT_EQ(a.cumulative_se, b.cumulative_se);
}

TEST(Regret, CsvHasOneRowPerStep) {
  const RegretCurve c = simulate_regret(ScalarEnvSpec{0.1}, 4, 5, 2);
  std::ostringstream os;
  c.write_csv(os);
  const std::string text = os.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 5);
  EXPECT_EQ(text.rfind("t,mean_step_kl,se,cumulative\n", 0), 0u);
}
