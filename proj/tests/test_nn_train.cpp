#include <algorithm>
#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "infolearn/dgp.hpp"
#include "infolearn/errors.hpp"
#include "infolearn/nn_train.hpp"

using namespace infolearn;

namespace {

Dataset random_dataset(int d, int n, Rng& rng) {
  Dataset data;
  data.X = standard_normal_matrix(d, n, rng);
  data.y = standard_normal_vector(n, rng);
  return data;
}

}  // namespace

TEST(Mlp, InitRangeAndZeroBias) {
  Rng rng(1);
  const auto m = mlp_init({5, 7, 1}, rng);
  EXPECT_EQ(m.param_count(), 5u * 7 + 7 + 7 + 1);
  EXPECT_LE(m.weight(0).cwiseAbs().maxCoeff(), 1 / std::sqrt(5.0));
  EXPECT_LE(m.weight(1).cwiseAbs().maxCoeff(), 1 / std::sqrt(7.0));
  EXPECT_EQ(m.bias(0).squaredNorm(), 0.0);
  EXPECT_EQ(m.bias(1).squaredNorm(), 0.0);
  EXPECT_THROW(MlpModel({3, 2}), ConfigError);
}

TEST(Mlp, HandComputedForward) {
  MlpModel m({2, 2, 1});
  m.weight(0) << 1, -1, 2, 0.5;
  m.bias(0) << 0, -3;
  m.weight(1) << 2, -1;
  m.bias(1) << 0.5;
  // hidden = relu([1 - 2, 2 + 1 - 3]) = [0, 0]; second case relu([3 - 1, 6 + 0.5 - 3]) = [2, 3.5]
  EXPECT_DOUBLE_EQ(m.forward(Eigen::Vector2d(1, 2)), 0.5);
  EXPECT_DOUBLE_EQ(m.forward(Eigen::Vector2d(3, 1)), 2 * 2 - 3.5 + 0.5);
}

TEST(Mlp, NetworkExportMatchesForward) {
  Rng rng(2);
  const auto m = mlp_init({3, 6, 4, 1}, rng);
  const auto net = m.to_network();
  EXPECT_EQ(net.kind, "student");
  for (int i = 0; i < 10; ++i) {
    const Eigen::VectorXd x = standard_normal_vector(3, rng);
    EXPECT_NEAR(net.forward(x), m.forward(x), 1e-12);
  }
}

TEST(Grad, MatchesFiniteDifferencesOnRandomModels) {
  Rng rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    const int d = 1 + static_cast<int>(rng.below(5));
    std::vector<int> widths{d};
    const int hidden = 1 + static_cast<int>(rng.below(2));
    for (int h = 0; h < hidden; ++h) widths.push_back(2 + static_cast<int>(rng.below(7)));
    widths.push_back(1);
    MlpModel m = mlp_init(widths, rng);
    m.params() += 0.1 * standard_normal_vector(static_cast<int>(m.param_count()), rng);
    const auto data = random_dataset(d, 9, rng);
    Eigen::VectorXd g;
    grad(m, data.X, data.y, g);
    const double h = 1e-6;
    Eigen::VectorXd fd(g.size());
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      MlpModel p = m;
      p.params()(i) += h;
      const double up = mse_loss(p, data.X, data.y);
      p.params()(i) -= 2 * h;
      const double down = mse_loss(p, data.X, data.y);
      fd(i) = (up - down) / (2 * h);
    }
    EXPECT_LT((g - fd).norm() / std::max(1e-12, fd.norm()), 1e-5) << "model " << rep;
  }
}

TEST(Grad, MatchesReferenceLoops) {
  Rng rng(4);
  const auto m = mlp_init({4, 8, 5, 1}, rng);
  const auto data = random_dataset(4, 33, rng);
  Eigen::VectorXd a, b;
  const double la = grad(m, data.X, data.y, a);
  const double lb = grad_reference(m, data.X, data.y, b);
  EXPECT_NEAR(la, lb, 1e-12);
  EXPECT_LT((a - b).lpNorm<Eigen::Infinity>(), 1e-12);
  EXPECT_NEAR(la, mse_loss(m, data.X, data.y), 1e-12);
}

TEST(Grad, ShapeErrors) {
  Rng rng(5);
  const auto m = mlp_init({3, 4, 1}, rng);
  Eigen::VectorXd g;
  EXPECT_THROW(grad(m, Eigen::MatrixXd::Zero(2, 4), Eigen::VectorXd::Zero(4), g), ShapeError);
  EXPECT_THROW(grad(m, Eigen::MatrixXd::Zero(3, 4), Eigen::VectorXd::Zero(3), g), ShapeError);
}

TEST(Adam, FirstTwoStepsHandValues) {
  Eigen::VectorXd p = Eigen::Vector2d(1.0, -2.0);
  AdamState s(2);
  const Eigen::VectorXd g1 = Eigen::Vector2d(0.5, -4.0);
  adam_step(p, s, g1, 0.1);
  EXPECT_NEAR(p(0), 1.0 - 0.1 * 0.5 / (0.5 + 1e-8), 1e-15);
  EXPECT_NEAR(p(1), -2.0 + 0.1 * 4.0 / (4.0 + 1e-8), 1e-15);
  const Eigen::VectorXd g2 = Eigen::Vector2d(1.0, 0.0);
  const double m = (0.9 * 0.1 * 0.5 + 0.1 * 1.0) / (1 - 0.81);
  const double v = (0.999 * 0.001 * 0.25 + 0.001 * 1.0) / (1 - 0.999 * 0.999);
  const double expected = p(0) - 0.1 * m / (std::sqrt(v) + 1e-8);
  adam_step(p, s, g2, 0.1);
  EXPECT_NEAR(p(0), expected, 1e-14);
  EXPECT_EQ(s.step, 2);
}

TEST(Adam, MinimizesQuadratic) {
  Eigen::VectorXd p = Eigen::Vector3d(3, -1, 2);
  AdamState s(3);
  for (int i = 0; i < 3000; ++i) adam_step(p, s, 2 * p, 0.01);
  EXPECT_LT(p.norm(), 1e-2);
}

TEST(Split, SizesAndPartition) {
  Rng data_rng(6);
  for (int n : {1, 2, 3, 10, 101}) {
    Dataset data = random_dataset(2, n, data_rng);
    data.y = Eigen::VectorXd::LinSpaced(n, 0, n - 1);
    Rng rng(7);
    const auto [tr, va] = split_dataset(data, 0.2, rng);
    if (n == 1) {
      EXPECT_EQ(tr.size(), 1);
      EXPECT_EQ(va.size(), 1);
      continue;
    }
    EXPECT_EQ(va.size(), std::clamp(static_cast<int>(std::floor(0.2 * n)), 1, n - 1));
    EXPECT_EQ(tr.size() + va.size(), n);
    std::set<double> seen;
    for (int i = 0; i < tr.size(); ++i) seen.insert(tr.y(i));
    for (int i = 0; i < va.size(); ++i) seen.insert(va.y(i));
    EXPECT_EQ(static_cast<int>(seen.size()), n);
  }
}

TEST(LrSuggest, FallbackOnShortCurve) {
  const auto r = lr_suggest({1e-3, 1e-2}, {1.0, 0.5}, 7e-4);
  EXPECT_TRUE(r.fell_back);
  EXPECT_EQ(r.lr, 7e-4);
}

TEST(LrSuggest, MedianOfThreeSuggestions) {
  std::vector<double> lrs, loss;
  for (int i = 0; i < 40; ++i) {
    const double x = -6 + 0.2 * i;
    lrs.push_back(std::pow(10.0, x));
    loss.push_back(1.0 + (x + 2) * (x + 2));
  }
  const auto r = lr_suggest(lrs, loss, 1e-3);
  EXPECT_FALSE(r.fell_back);
  EXPECT_NEAR(std::log10(r.minimum * 20), -2.0, 1e-9);
  std::vector<double> three{r.steep, r.minimum, r.valley};
  std::sort(three.begin(), three.end());
  EXPECT_EQ(r.lr, three[1]);
  EXPECT_LE(r.steep, lrs[static_cast<std::size_t>(std::distance(loss.begin(), std::min_element(loss.begin(), loss.end())))]);
}

TEST(LrFind, QueryAccountingAndModelUntouched) {
  MlpModel m({2, 3, 1});
  Dataset data;
  data.X = Eigen::MatrixXd::Ones(2, 10);
  data.y = Eigen::VectorXd::Zero(10);
  TrainConfig cfg;
  Rng rng(8);
  QueryCounter q;
  const Eigen::VectorXd before = m.params();
  const auto r = lr_find(m, data, cfg, rng, q);
  int expected_steps = 0;
  for (double lr = cfg.lr_start; lr <= cfg.lr_cap; lr *= cfg.lr_mult) ++expected_steps;
  EXPECT_EQ(static_cast<int>(r.lrs.size()), expected_steps);
  EXPECT_EQ(q.q, static_cast<std::uint64_t>(10 * expected_steps));
  EXPECT_EQ(m.params(), before);
  EXPECT_LE(r.lr, cfg.lr_cap);
}

TEST(Train, EarlyStopsOnConstantLoss) {
  MlpModel m({2, 3, 1});
  Dataset data;
  Rng data_rng(9);
  data.X = standard_normal_matrix(2, 20, data_rng);
  data.y = Eigen::VectorXd::Zero(20);
  TrainConfig cfg;
  Rng rng(10);
  QueryCounter q;
  const auto r = train(m, data, data, cfg, rng, q);
  EXPECT_EQ(r.epochs, cfg.early_stop_window + 1);
  EXPECT_EQ(r.best_val_loss, 0.0);
  EXPECT_EQ(r.status, TrainStatus::Ok);
}

TEST(Train, LearnsLinearTargetAndCountsQueries) {
  Rng data_rng(11);
  Dataset data;
  data.X = standard_normal_matrix(2, 200, data_rng);
  data.y = (data.X.row(0) - 0.5 * data.X.row(1)).transpose().cwiseMax(0.0);
  Rng split_rng(12);
  const auto [tr, va] = split_dataset(data, 0.2, split_rng);
  Rng init(13);
  const auto m = mlp_init({2, 16, 1}, init);
  TrainConfig cfg;
  cfg.max_epochs = 300;
  Rng rng(14);
  QueryCounter q;
  const auto r = train(m, tr, va, cfg, rng, q);
  EXPECT_LT(r.best_val_loss, 0.05 * va.y.squaredNorm() / va.size() + 1e-3);
  EXPECT_NEAR(mse_loss(r.model, va.X, va.y), r.best_val_loss, 1e-12);
  EXPECT_GE(q.q, static_cast<std::uint64_t>(r.epochs) * static_cast<std::uint64_t>(tr.size()));
}

TEST(Train, Deterministic) {
  Rng data_rng(15);
  const auto data = random_dataset(3, 50, data_rng);
  Rng init(16);
  const auto m = mlp_init({3, 8, 1}, init);
  TrainConfig cfg;
  cfg.max_epochs = 40;
  Rng a(17), b(17);
  QueryCounter qa, qb;
  const auto ra = train(m, data, data, cfg, a, qa);
  const auto rb = train(m, data, data, cfg, b, qb);
  EXPECT_EQ(ra.model.params(), rb.model.params());
  EXPECT_EQ(qa.q, qb.q);
}

TEST(WidthSearch, StepCapAndUnimodalOptimum) {
  const auto f = [](int w) { return std::pow(std::log2(static_cast<double>(w)) - 4.0, 2); };
  const auto r = golden_width_search(2, 1000, 0.25, f);
  EXPECT_LE(r.steps, 8);
  EXPECT_EQ(golden_step_cap(std::log2(500.0), 0.25), 8);
  EXPECT_LE(r.steps, golden_step_cap(std::log2(500.0), 0.25));
  EXPECT_EQ(r.best_width, 16);
  EXPECT_EQ(r.best_value, 0.0);
  EXPECT_LE(static_cast<int>(r.evaluations.size()), r.steps + 2);
}

TEST(WidthSearch, EvaluatesEachWidthOnce) {
  int calls = 0;
  std::set<int> seen;
  const auto r = golden_width_search(2, 4, 0.01, [&](int w) {
    ++calls;
    EXPECT_TRUE(seen.insert(w).second) << w;
    return static_cast<double>(w);
  });
  EXPECT_EQ(calls, static_cast<int>(r.evaluations.size()));
  EXPECT_EQ(r.best_width, 2);
}

TEST(WidthSearch, Range) {
  EXPECT_EQ(width_range(1, 4, 4), std::make_pair(2, 40));
  EXPECT_EQ(width_range(100000, 16, 16), std::make_pair(2, 288));
  EXPECT_THROW(width_range(0, 1, 1), ConfigError);
}
