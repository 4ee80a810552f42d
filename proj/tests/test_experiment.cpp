#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "infolearn/errors.hpp"
#include "infolearn/experiment.hpp"

using namespace infolearn;

namespace {

ExperimentConfig tiny_config() {
  ExperimentConfig c;
  c.trials = 2;
  c.test_size = 500;
  c.t_min = 2;
  c.t_cap = 16;
  c.train.max_epochs = 40;
  c.width_tol = 1.0;
  return c;
}

TrialRecord record(const Gamma& g, int T, double error, std::uint64_t Q, TrialStatus s = TrialStatus::Ok) {
  TrialRecord r;
  r.gamma = g;
  r.T = T;
  r.error = error;
  r.Q = Q;
  r.status = s;
  return r;
}

TableEntry entry(const Gamma& g, double eps, int T_eps) {
  TableEntry e;
  e.gamma = g;
  e.eps_target = eps;
  e.T_eps = T_eps;
  e.resolved = true;
  return e;
}

}  // namespace

TEST(Gamma, RegressorAndValidation) {
  EXPECT_EQ(Gamma::independent(3, 4, 0.1).regressor(), 12.0);
  const auto dir = Gamma::dirichlet(2, 3, 0.1);
  EXPECT_EQ(dir.N, 12);
  EXPECT_EQ(dir.regressor(), 6.0);
  EXPECT_THROW(Gamma::independent(0, 4, 0.1), ConfigError);
  EXPECT_THROW(Gamma::independent(1, 4, 0.0), ConfigError);
  EXPECT_THROW(Gamma::dirichlet(2, 5, 0.1, 4), ConfigError);
  EXPECT_NE(Gamma::independent(2, 4, 0.1).key(), Gamma::independent(4, 2, 0.1).key());
}

TEST(Gamma, TeacherIsSeededAndShaped) {
  const auto g = Gamma::independent(3, 5, 0.1);
  EXPECT_EQ(make_teacher(g, 7), make_teacher(g, 7));
  EXPECT_FALSE(make_teacher(g, 7) == make_teacher(g, 8));
}

TEST(TrialSeed, DistinctAcrossCoordinates) {
  const auto g = Gamma::independent(2, 2, 0.1);
  const auto s = trial_seed(1, g, 4, 0);
  EXPECT_EQ(s, trial_seed(1, g, 4, 0));
  EXPECT_NE(s, trial_seed(2, g, 4, 0));
  EXPECT_NE(s, trial_seed(1, g, 8, 0));
  EXPECT_NE(s, trial_seed(1, g, 4, 1));
  EXPECT_NE(s, trial_seed(1, Gamma::independent(2, 4, 0.1), 4, 0));
}

TEST(RunTrial, DeterministicAndWellFormed) {
  const auto g = Gamma::independent(2, 2, 0.1);
  const auto cfg = tiny_config();
  const auto a = run_trial(g, 8, 123, cfg);
  const auto b = run_trial(g, 8, 123, cfg);
  EXPECT_EQ(a.error, b.error);
  EXPECT_EQ(a.Q, b.Q);
  EXPECT_EQ(a.width, b.width);
  EXPECT_EQ(a.status, TrialStatus::Ok);
  EXPECT_GE(a.error, 0.0);
  EXPECT_GT(a.Q, 0u);
  const auto [lo, hi] = width_range(8, 2, 2);
  EXPECT_GE(a.width, lo);
  EXPECT_LE(a.width, hi);
  EXPECT_GE(a.widths_evaluated, 2);
  EXPECT_THROW(run_trial(g, 0, 1, cfg), ConfigError);
}

TEST(RunTrial, MoreDataHelpsOnAverage) {
  const auto g = Gamma::independent(1, 1, 0.1);
  auto cfg = tiny_config();
  cfg.train.max_epochs = 200;
  double small = 0, large = 0;
  for (int i = 0; i < 4; ++i) {
    small += run_trial(g, 4, trial_seed(5, g, 4, i), cfg).error;
    large += run_trial(g, 256, trial_seed(5, g, 256, i), cfg).error;
  }
  EXPECT_LT(large, small);
}

TEST(Summaries, HandComputedCells) {
  const auto g = Gamma::independent(1, 1, 0.1);
  const std::vector<TrialRecord> recs{record(g, 2, 3.0, 10), record(g, 2, 1.0, 30),
                                      record(g, 2, 0.0, 0, TrialStatus::Aborted), record(g, 4, 0.4, 100),
                                      record(g, 8, 0.2, 200)};
  const auto cells = summarize(recs);
  ASSERT_EQ(cells.size(), 3u);
  EXPECT_EQ(cells[0].T, 2);
  EXPECT_DOUBLE_EQ(cells[0].mean_error, 2.0);
  EXPECT_DOUBLE_EQ(cells[0].se, 1.0);
  EXPECT_DOUBLE_EQ(cells[0].mean_Q, 20.0);
  EXPECT_EQ(cells[0].n_ok, 2);
  EXPECT_EQ(cells[0].n_aborted, 1);
  const auto table = sample_complexity_table(cells, {1.0, 0.3, 0.01});
  ASSERT_EQ(table.size(), 3u);
  EXPECT_EQ(table[0].T_eps, 4);
  EXPECT_EQ(table[0].T_lower, 2);
  EXPECT_EQ(table[1].T_eps, 8);
  EXPECT_EQ(table[1].T_lower, 4);
  EXPECT_FALSE(table[2].resolved);
  EXPECT_EQ(table[2].T_eps, 0);
}

TEST(Summaries, FirstTestedTHasNoLowerNeighbour) {
  const auto g = Gamma::independent(1, 1, 0.1);
  const auto table = sample_complexity_table(summarize({record(g, 1, 0.1, 1)}), {1.0});
  EXPECT_EQ(table[0].T_eps, 1);
  EXPECT_EQ(table[0].T_lower, 0);
}

TEST(FitScaling, RecoversExactPowerLaw) {
  std::vector<TableEntry> table;
  for (int d : {1, 2, 4, 8}) {
    for (int N : {1, 2, 4, 8}) {
      const auto g = Gamma::independent(d, N, 0.1);
      for (double eps : {1.0, 0.5}) table.push_back(entry(g, eps, static_cast<int>(std::lround(2.0 * d * N / eps))));
    }
  }
  const auto fit = fit_scaling(table);
  EXPECT_NEAR(fit.slope, 1.0, 1e-12);
  EXPECT_NEAR(fit.unit_constant, 2.0, 1e-12);
  EXPECT_NEAR(fit.ratio, 2.0 / 1.79, 1e-12);
  EXPECT_EQ(fit.n_points, 32);
  for (double r : fit.residuals) EXPECT_NEAR(r, 0.0, 1e-12);
}

TEST(FitScaling, SlopeOfSqrtLaw) {
  std::vector<TableEntry> table;
  for (int M : {1, 4, 16, 64}) table.push_back(entry(Gamma::dirichlet(1, M, 0.1), 1.0, 3 * static_cast<int>(std::sqrt(M))));
  const auto fit = fit_scaling(table);
  EXPECT_NEAR(fit.slope, 0.5, 1e-12);
  EXPECT_EQ(fit.reference, 3.92);
}

TEST(FitScaling, RejectsTooFewOrMixed) {
  std::vector<TableEntry> table{entry(Gamma::independent(1, 1, 0.1), 1, 2), entry(Gamma::independent(1, 2, 0.1), 1, 4),
                                entry(Gamma::independent(2, 2, 0.1), 1, 8)};
  EXPECT_THROW(fit_scaling(table), DomainError);
  table.push_back(entry(Gamma::dirichlet(1, 1, 0.1), 1, 2));
  EXPECT_THROW(fit_scaling(table), ConfigError);
}

TEST(QReportTest, LinearQHasUnitSlope) {
  const auto g = Gamma::independent(1, 1, 0.1);
  std::vector<TrialRecord> recs;
  for (int T : {2, 4, 8, 16}) {
    recs.push_back(record(g, T, 0.1, 5u * T));
    recs.push_back(record(g, T, 0.1, 7u * T));
  }
  recs.push_back(record(g, 32, 0.1, 1, TrialStatus::Aborted));
  const auto rep = q_report(recs);
  ASSERT_EQ(rep.rows.size(), 4u);
  EXPECT_NEAR(rep.slope, 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(rep.rows[0].ratio, 6.0);
  EXPECT_EQ(rep.rows[0].n, 2);
  EXPECT_TRUE(std::isnan(q_report({record(g, 2, 0.1, 4)}).slope));
}

TEST(Sweep, SerialMatchesParallelAndStopsWhenMet) {
  const std::vector<Gamma> grid{Gamma::independent(1, 1, 0.1), Gamma::independent(2, 2, 0.1)};
  auto cfg = tiny_config();
  cfg.exec = Exec::Serial;
  const auto serial = sweep(grid, cfg, 99);
  cfg.exec = Exec::Parallel;
  const auto parallel = sweep(grid, cfg, 99);
  ASSERT_EQ(serial.records.size(), parallel.records.size());
  for (std::size_t i = 0; i < serial.records.size(); ++i) {
    EXPECT_EQ(serial.records[i].error, parallel.records[i].error);
    EXPECT_EQ(serial.records[i].Q, parallel.records[i].Q);
    EXPECT_EQ(serial.records[i].seed, parallel.records[i].seed);
  }
  // Records are grouped by gamma in grid order, T ascending within a gamma.
  for (std::size_t i = 1; i < serial.records.size(); ++i) {
    const auto& a = serial.records[i - 1];
    const auto& b = serial.records[i];
    if (a.gamma.key() == b.gamma.key()) EXPECT_LE(a.T, b.T);
  }
  EXPECT_EQ(serial.records.front().gamma.key(), grid[0].key());
  // A gamma is not run past the first T meeting the hardest target.
  for (const auto& e : serial.table) {
    if (e.eps_target != 0.5 || !e.resolved) continue;
    for (const auto& c : serial.cells) {
      if (c.gamma.key() == e.gamma.key()) EXPECT_LE(c.T, e.T_eps);
    }
  }
  EXPECT_EQ(serial.table.size(), grid.size() * cfg.targets.size());
}

TEST(Sweep, ProgressCallbackPerCell) {
  auto cfg = tiny_config();
  cfg.t_cap = 4;
  int calls = 0;
  const auto r = sweep({Gamma::independent(1, 1, 0.1)}, cfg, 3, [&](const CellSummary&) { ++calls; });
  EXPECT_EQ(calls, static_cast<int>(r.cells.size()));
  EXPECT_THROW(sweep({}, cfg, 3), ConfigError);
}

TEST(Csv, TrialsRoundTrip) {
  const auto g = Gamma::dirichlet(2, 3, 0.1);
  auto a = record(g, 8, 0.123456789012345, 4242);
  a.seed = 0xdeadbeefcafef00dULL;
  a.width = 17;
  a.trial = 3;
  auto b = record(Gamma::independent(4, 2, 0.1), 16, std::nan(""), 7, TrialStatus::Aborted);
  std::stringstream ss;
  write_trials_csv(ss, {a, b}, "abc123");
  EXPECT_EQ(ss.str().rfind("# manifest=abc123\n", 0), 0u);
  const auto back = read_trials_csv(ss);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].gamma.key(), g.key());
  EXPECT_EQ(back[0].error, a.error);
  EXPECT_EQ(back[0].seed, a.seed);
  EXPECT_EQ(back[0].Q, a.Q);
  EXPECT_EQ(back[0].width, 17);
  EXPECT_EQ(back[0].trial, 3);
  EXPECT_EQ(back[1].status, TrialStatus::Aborted);
  EXPECT_EQ(back[1].gamma.prior, NetPrior::Independent);
}

TEST(Csv, TableRoundTripAndErrors) {
  auto e = entry(Gamma::independent(2, 8, 0.1), 0.5, 64);
  e.T_lower = 32;
  TableEntry unresolved;
  unresolved.gamma = Gamma::independent(1, 1, 0.1);
  unresolved.eps_target = 1.0;
  std::stringstream ss;
  write_table_csv(ss, {e, unresolved}, "");
  EXPECT_EQ(ss.str().find("# manifest"), std::string::npos);
  const auto back = read_table_csv(ss);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].T_eps, 64);
  EXPECT_EQ(back[0].T_lower, 32);
  EXPECT_TRUE(back[0].resolved);
  EXPECT_FALSE(back[1].resolved);
  std::istringstream bad("prior,d,N,M,sigma,eps_target,T_eps,resolved,T_lower\nindependent,x,1\n");
  EXPECT_THROW(read_table_csv(bad), InputError);
}
