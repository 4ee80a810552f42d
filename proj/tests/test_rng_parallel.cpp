#include <cmath>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

#include <gtest/gtest.h>

#include "infolearn/parallel.hpp"
#include "infolearn/rng.hpp"

using namespace infolearn;

TEST(Rng, SameSeedSameSequence) {
  Rng a(42, 7);
  Rng b(42, 7);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a(), b());
}

TEST(Rng, StreamsDiffer) {
  Rng a(42, 1);
  Rng b(42, 2);
  int equal = 0;
  for (int i = 0; i < 1000; ++i) equal += a() == b();
  EXPECT_EQ(equal, 0);
}

TEST(Rng, DeriveDependsOnTagAndIndex) {
  EXPECT_NE(Rng::hash_seed(1, "a", 0), Rng::hash_seed(1, "b", 0));
  EXPECT_NE(Rng::hash_seed(1, "a", 0), Rng::hash_seed(1, "a", 1));
  EXPECT_NE(Rng::hash_seed(1, "a", 0), Rng::hash_seed(2, "a", 0));
  Rng x = Rng::derive(9, "tag", 3);
  Rng y = Rng::derive(9, "tag", 3);
  EXPECT_EQ(x(), y());
}

TEST(Rng, UniformMoments) {
  Rng r(3);
  const int n = 200000;
  double s = 0.0;
  double s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    s += u;
    s2 += u * u;
  }
  EXPECT_NEAR(s / n, 0.5, 5 * std::sqrt(1.0 / 12 / n));
  EXPECT_NEAR(s2 / n - (s / n) * (s / n), 1.0 / 12, 2e-3);
}

TEST(Rng, NormalMoments) {
  Rng r(4);
  const int n = 400000;
  double s = 0.0;
  double s2 = 0.0;
  double s4 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    s += z;
    s2 += z * z;
    s4 += z * z * z * z;
  }
  EXPECT_NEAR(s / n, 0.0, 5 / std::sqrt(n));
  EXPECT_NEAR(s2 / n, 1.0, 5 * std::sqrt(2.0 / n));
  EXPECT_NEAR(s4 / n, 3.0, 5 * std::sqrt(96.0 / n));
}

TEST(Rng, BelowIsInRangeAndUnbiased) {
  Rng r(5);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const auto k = r.below(7);
    ASSERT_LT(k, 7u);
    ++counts[k];
  }
  for (int c : counts) EXPECT_NEAR(c, n / 7.0, 5 * std::sqrt(n / 7.0));
}

TEST(Rng, GammaMeanForSmallAndLargeShape) {
  Rng r(6);
  for (double shape : {0.01, 0.5, 1.0, 3.7}) {
    const int n = 100000;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += r.gamma_variate(shape);
    EXPECT_NEAR(s / n, shape, 5 * std::sqrt(shape / n)) << "shape " << shape;
  }
}

TEST(Rng, TinyShapeLogGammaIsFinite) {
  Rng r(7);
  for (int i = 0; i < 1000; ++i) ASSERT_TRUE(std::isfinite(r.log_gamma_variate(1e-4)));
}

TEST(Rng, DirichletOnSimplexWithCorrectMean) {
  Rng r(8);
  const std::size_t dim = 5;
  std::vector<double> mean(dim, 0.0);
  const int n = 50000;
  for (int i = 0; i < n; ++i) {
    const auto v = r.dirichlet(0.3, dim);
    const double s = std::accumulate(v.begin(), v.end(), 0.0);
    ASSERT_NEAR(s, 1.0, 1e-12);
    for (std::size_t j = 0; j < dim; ++j) mean[j] += v[j] / n;
  }
  for (double m : mean) EXPECT_NEAR(m, 0.2, 0.01);
}

TEST(Rng, MultinomialCountsSumToTrials) {
  Rng r(9);
  const std::vector<double> p{0.1, 0.2, 0.7};
  std::vector<std::uint64_t> counts(3);
  std::vector<double> mean(3, 0.0);
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    r.multinomial(10, p, counts);
    ASSERT_EQ(counts[0] + counts[1] + counts[2], 10u);
    for (int j = 0; j < 3; ++j) mean[j] += static_cast<double>(counts[j]) / n;
  }
  for (int j = 0; j < 3; ++j) EXPECT_NEAR(mean[j], 10 * p[j], 0.05);
}

TEST(Parallel, SerialAndParallelAreBitIdentical) {
  auto fn = [](std::size_t i) {
    Rng r = Rng::derive(123, "kernel", i);
    double s = 0.0;
    for (int k = 0; k < 100; ++k) s += r.normal();
    return s;
  };
  const auto a = map_indexed(1000, fn, Exec::Serial);
  std::vector<double> b;
  with_workers(4, [&] { b = map_indexed(1000, fn, Exec::Parallel); });
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) ASSERT_EQ(a[i], b[i]);
  EXPECT_EQ(mean_se(a).mean, mean_se(b).mean);
}

TEST(Parallel, ExceptionPropagatesFromLowestIndex) {
  auto fn = [](std::size_t i) -> int {
    if (i == 17 || i == 40) throw std::runtime_error("boom " + std::to_string(i));
    return static_cast<int>(i);
  };
  try {
    map_indexed(64, fn, Exec::Parallel);
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "boom 17");
  }
}

TEST(Parallel, MeanSe) {
  const MeanSe m = mean_se({1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(m.mean, 2.5);
  EXPECT_NEAR(m.se, std::sqrt(5.0 / 3.0 / 4.0), 1e-15);
  EXPECT_EQ(m.n, 4u);
}

TEST(Parallel, ResolveWorkers) {
  EXPECT_EQ(resolve_workers(3), 3);
  setenv("INFOLEARN_WORKERS", "5", 1);
  EXPECT_EQ(resolve_workers(0), 5);
  unsetenv("INFOLEARN_WORKERS");
  EXPECT_GE(resolve_workers(0), 1);
}
