#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "infolearn/errors.hpp"
#include "infolearn/misspec.hpp"

using namespace infolearn;

TEST(MeanMisspec, ZeroMeanHasNoExcess) {
  Rng rng(1);
  std::vector<Eigen::VectorXd> path;
  for (int i = 0; i < 10; ++i) path.push_back(standard_normal_vector(3, rng));
  EXPECT_DOUBLE_EQ(excess_kl_pathwise_mean(path, standard_normal_vector(3, rng), Eigen::VectorXd::Zero(3), 0.1), 0.0);
}

TEST(MeanMisspec, EmptyHistoryHandValue) {
  for (double mu : {0.5, 1.0, 3.0}) {
    EXPECT_NEAR(excess_kl_pathwise_mean({}, Eigen::VectorXd::Ones(1), Eigen::VectorXd::Constant(1, mu), 1.0),
                mu * mu / 4, 1e-15);
  }
}

TEST(MeanMisspec, MatchesTwoAgentOracle) {
  Rng rng(2);
  const int d = 4;
  const double s2 = 0.2;
  for (int rep = 0; rep < 50; ++rep) {
    const Eigen::VectorXd mu = standard_normal_vector(d, rng);
    auto right = GaussianPosterior::standard(d);
    auto wrong = GaussianPosterior::standard(d, mu);
    std::vector<Eigen::VectorXd> path;
    const int t = rep % 25;
    for (int i = 0; i < t; ++i) {
      path.push_back(standard_normal_vector(d, rng));
      const double y = rng.normal() * 2;
      posterior_update_inplace(right, path.back(), y, s2);
      posterior_update_inplace(wrong, path.back(), y, s2);
    }
    const Eigen::VectorXd x = standard_normal_vector(d, rng);
    const double oracle = kl_gaussian(predictive(right, x, s2), predictive(wrong, x, s2));
    EXPECT_NEAR(excess_kl_pathwise_mean(path, x, mu, s2), oracle, 1e-8 * std::max(1.0, oracle));
  }
}

TEST(MeanMisspec, BoundValues) {
  EXPECT_DOUBLE_EQ(excess_kl_bound_mean(3, 12, 0.0, 0.1), 0.0);
  EXPECT_NEAR(excess_kl_bound_mean(1, 4, 1.0, 1.0), 0.625, 1e-15);
  EXPECT_THROW(excess_kl_bound_mean(2, 7, 1.0, 1.0), DomainError);
}

TEST(MeanMisspec, BoundDecreasesForLargeT) {
  double prev = excess_kl_bound_mean(5, 200, 1.0, 0.1);
  for (int t = 400; t <= 6400; t *= 2) {
    const double b = excess_kl_bound_mean(5, t, 1.0, 0.1);
    EXPECT_LT(b, prev);
    prev = b;
  }
}

TEST(MeanMisspec, MonteCarloRespectsBound) {
  const int d = 4;
  MisspecMeanConfig cfg{LinRegSpec{d, 0.1, {}}, Eigen::VectorXd::Constant(d, 0.5)};
  const ExcessCurve c = mean_misspec_curve(cfg, {16, 40, 160}, 500, 3);
  ASSERT_EQ(c.t.size(), 3u);
  for (std::size_t j = 0; j < c.t.size(); ++j) {
    ASSERT_TRUE(std::isfinite(c.bound[j]));
    EXPECT_LE(c.mc_mean[j], c.bound[j] + 3 * c.se[j]);
  }
}

TEST(MeanMisspec, CurveIsDeterministicAcrossExecutors) {
  MisspecMeanConfig cfg{LinRegSpec{3, 0.1, {}}, Eigen::VectorXd::Ones(3)};
  const ExcessCurve a = mean_misspec_curve(cfg, {1, 5, 20}, 64, 4, Exec::Serial);
  const ExcessCurve b = mean_misspec_curve(cfg, {1, 5, 20}, 64, 4, Exec::Parallel);
  EXPECT_EQ(a.mc_mean, b.mc_mean);
  std::ostringstream os;
  a.write_csv(os);
  EXPECT_EQ(os.str().rfind("t,mc_mean,se,bound,asymptote\n", 0), 0u);
}

TEST(MissingFeature, AgentIgnoresTheOmittedCoordinate) {
  MissingFeatureConfig cfg;
  cfg.base = LinRegSpec{3, 0.1, {}};
  cfg.omitted = 1;
  MissingFeatureAgent agent(cfg);
  EXPECT_EQ(agent.posterior().dim(), 2);
  const Eigen::VectorXd r = agent.reduce(Eigen::Vector3d(1, 2, 3));
  EXPECT_EQ(r, Eigen::Vector2d(1, 3));
  EXPECT_THROW(MissingFeatureAgent(MissingFeatureConfig{LinRegSpec{1, 0.1, {}}}), ConfigError);
}

TEST(MissingFeature, MarginalizedNoiseInflatesPredictiveVariance) {
  MissingFeatureConfig cfg;
  cfg.base = LinRegSpec{2, 0.1, {}};
  MissingFeatureAgent marg(cfg);
  cfg.model = MissingFeatureModel::Nominal;
  MissingFeatureAgent nominal(cfg);
  const Eigen::Vector2d x(0.5, 2.0);
  EXPECT_NEAR(marg.predict(x).variance - nominal.predict(x).variance, 4.0, 1e-12);
}

TEST(MissingFeature, CorrectlySpecifiedCaseVanishes) {
  MissingFeatureConfig cfg;
  cfg.base = LinRegSpec{2, 0.1, {}};
  cfg.model = MissingFeatureModel::Nominal;
  cfg.fixed_theta = Eigen::Vector2d(0.7, 0.0);
  const ExcessCurve c = missing_feature_curve(cfg, {10, 1000}, 200, 5);
  EXPECT_LT(c.mc_mean[1], c.mc_mean[0]);
  EXPECT_LT(c.mc_mean[1], 1e-3);
  EXPECT_TRUE(std::isnan(c.asymptote[0]));
}

TEST(MissingFeature, OmittedSignalKeepsExcessAwayFromZero) {
  MissingFeatureConfig cfg;
  cfg.base = LinRegSpec{2, 0.1, {}};
  cfg.fixed_theta = Eigen::Vector2d(0.0, 1.0);
  const ExcessCurve c = missing_feature_curve(cfg, {1000}, 1000, 6);
  EXPECT_GT(c.mc_mean[0] - 3 * c.se[0], 0.3);
}

TEST(MissingFeature, AsymptoteOracleValues) {
  // 30-digit adaptive quadrature of 0.5 E ln(1 + Z^2 / s2).
  EXPECT_NEAR(missing_feature_asymptote(1.0), 0.266726589922067, 1e-10);
  EXPECT_NEAR(missing_feature_asymptote(0.1), 0.868305108771152, 1e-10);
  EXPECT_NEAR(missing_feature_asymptote(0.01), 1.787935938929957, 1e-9);
  EXPECT_LT(missing_feature_asymptote(1e6), 1e-6);
  EXPECT_THROW(missing_feature_asymptote(0.0), DomainError);
}

TEST(MissingFeature, AsymptoteAgreesWithMonteCarlo) {
  for (double s2 : {1.0, 0.01}) {
    Rng rng(7);
    const int n = 2000000;
    double s = 0.0;
    double ss = 0.0;
    for (int i = 0; i < n; ++i) {
      const double z = rng.normal();
      const double v = 0.5 * std::log1p(z * z / s2);
      s += v;
      ss += v * v;
    }
    const double mean = s / n;
    const double se = std::sqrt((ss / n - mean * mean) / n);
    EXPECT_NEAR(missing_feature_asymptote(s2), mean, std::max(3 * se, 0.005 * mean));
  }
}
