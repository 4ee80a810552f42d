#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "infolearn/bounds.hpp"
#include "infolearn/dgp.hpp"
#include "infolearn/nn_train.hpp"
#include "infolearn/parallel.hpp"

namespace infolearn {

/// Teacher hyperparameters for one experiment cell. `sigma` is the noise
/// standard deviation.
struct Gamma {
  NetPrior prior = NetPrior::Independent;
  int d = 1;
  int N = 1;
  int M = 0;
  double sigma = 0.1;

  static Gamma independent(int d, int N, double sigma);
  /// Hidden width defaults to 4 max(d, M).
  static Gamma dirichlet(int d, int M, double sigma, int N = 0);

  /// dN for the independent prior, dM for the dirichlet prior.
  double regressor() const;
  std::string key() const;
  void validate() const;
};

TeacherNetwork make_teacher(const Gamma& gamma, std::uint64_t seed);

struct ExperimentConfig {
  TrainConfig train;
  int test_size = 10000;
  int trials = 8;
  int t_min = 1;
  int t_cap = 1 << 14;
  std::vector<double> targets{1.0, 0.5};
  double width_tol = 0.25;
  Exec exec = Exec::Parallel;

  void validate() const;
};

enum class TrialStatus { Ok, Aborted };

struct TrialRecord {
  Gamma gamma;
  int T = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  double error = 0.0;
  std::uint64_t Q = 0;
  int width = 0;
  TrialStatus status = TrialStatus::Ok;
  int widths_evaluated = 0;
  int nonfinite_widths = 0;
};

/// Per-trial seed from (master, gamma, T, trial index).
std::uint64_t trial_seed(std::uint64_t master, const Gamma& gamma, int T, int trial);

/// Samples a teacher and T noisy pairs, fits a student with width search and
/// reports the test error E[(f^ - f)^2] / (2 sigma^2) on fresh inputs.
TrialRecord run_trial(const Gamma& gamma, int T, std::uint64_t seed, const ExperimentConfig& config,
                      int trial_index = 0);

struct CellSummary {
  Gamma gamma;
  int T = 0;
  double mean_error = 0.0;
  double se = 0.0;
  double mean_Q = 0.0;
  int n_ok = 0;
  int n_aborted = 0;
};

struct TableEntry {
  Gamma gamma;
  double eps_target = 0.0;
  int T_eps = 0;    ///< smallest tested T with mean error <= target (0 if unresolved)
  int T_lower = 0;  ///< the tested T just below T_eps (0 if T_eps is the first tested)
  bool resolved = false;
};

struct SweepResult {
  std::vector<TrialRecord> records;
  std::vector<CellSummary> cells;
  std::vector<TableEntry> table;
};

using SweepProgress = std::function<void(const CellSummary&)>;

/// Doubles T from t_min until every target is met or t_cap is passed, for each gamma.
SweepResult sweep(const std::vector<Gamma>& grid, const ExperimentConfig& config, std::uint64_t master_seed,
                  const SweepProgress& progress = {});

/// Mean error per (gamma, T) over completed trials.
std::vector<CellSummary> summarize(const std::vector<TrialRecord>& records);
/// T_eps per (gamma, target) from cell summaries.
std::vector<TableEntry> sample_complexity_table(const std::vector<CellSummary>& cells,
                                                const std::vector<double>& targets);

struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
  double unit_constant = 0.0;  ///< exp(mean(log(eps T_eps) - log(regressor)))
  std::vector<double> residuals;
  int n_points = 0;
  double reference = 0.0;  ///< published constant for this prior at sigma = 0.1
  double ratio = 0.0;      ///< unit_constant / reference
};

/// Least squares of log(eps T_eps) on log(dN) or log(dM) over resolved entries.
/// Requires at least 4 resolved entries.
ScalingFit fit_scaling(const std::vector<TableEntry>& table);

/// Published constants: 1.79 (independent) and 3.92 (dirichlet).
double reference_constant(NetPrior prior);

struct QRow {
  int T = 0;
  double mean_Q = 0.0;
  double ratio = 0.0;  ///< mean_Q / T
  int n = 0;
};

struct QReport {
  std::vector<QRow> rows;
  double slope = 0.0;  ///< least-squares slope of log mean_Q on log T
  double reference_ratio = 1940.0;
};

QReport q_report(const std::vector<TrialRecord>& records);

// ---------------------------------------------------------------------------
// IO

/// Columns prior, d, N, M, sigma, T, trial, seed, error, Q, width, status.
void write_trials_csv(std::ostream& os, const std::vector<TrialRecord>& records, const std::string& manifest_hash);
std::vector<TrialRecord> read_trials_csv(std::istream& is);
/// Columns prior, d, N, M, sigma, eps_target, T_eps, resolved, T_lower.
void write_table_csv(std::ostream& os, const std::vector<TableEntry>& table, const std::string& manifest_hash);
std::vector<TableEntry> read_table_csv(std::istream& is);

const char* to_string(TrialStatus s);

}  // namespace infolearn
