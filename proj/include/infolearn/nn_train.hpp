#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "infolearn/dgp.hpp"
#include "infolearn/rng.hpp"

namespace infolearn {

/// Fully connected ReLU regression network with scalar output.
///
/// All parameters live in one flat vector. Layer k holds W_k (widths[k+1] x
/// widths[k], column-major) followed by b_k.
class MlpModel {
 public:
  MlpModel() = default;
  explicit MlpModel(std::vector<int> widths);

  const std::vector<int>& widths() const { return widths_; }
  int n_layers() const { return static_cast<int>(widths_.size()) - 1; }
  int input_dim() const { return widths_.front(); }
  std::size_t param_count() const { return static_cast<std::size_t>(params_.size()); }

  Eigen::VectorXd& params() { return params_; }
  const Eigen::VectorXd& params() const { return params_; }

  Eigen::Map<Eigen::MatrixXd> weight(int k);
  Eigen::Map<const Eigen::MatrixXd> weight(int k) const;
  Eigen::Map<Eigen::VectorXd> bias(int k);
  Eigen::Map<const Eigen::VectorXd> bias(int k) const;
  /// Positions of W_k and b_k within `params()`.
  Eigen::Index weight_offset(int k) const { return offsets_[static_cast<std::size_t>(k)]; }
  Eigen::Index bias_offset(int k) const {
    return offsets_[static_cast<std::size_t>(k)] + static_cast<Eigen::Index>(widths_[k + 1]) * widths_[k];
  }

  /// Outputs for inputs stored column-wise (d x n).
  Eigen::VectorXd forward_batch(const Eigen::MatrixXd& X) const;
  double forward(const Eigen::VectorXd& x) const;

  /// Same network in the serialized network schema, tagged "student".
  TeacherNetwork to_network() const;

 private:
  std::vector<int> widths_;
  std::vector<Eigen::Index> offsets_;  ///< start of W_k; b_k follows it
  Eigen::VectorXd params_;
};

/// Weights uniform on (-1/sqrt(fan_in), 1/sqrt(fan_in)), biases zero.
MlpModel mlp_init(const std::vector<int>& widths, Rng& rng);

/// Mean squared error over a batch (columns of X).
double mse_loss(const MlpModel& model, const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

/// Loss and gradient of the batch mean of (f(x) - y)^2. ReLU'(0) is taken as 0.
double grad(const MlpModel& model, const Eigen::MatrixXd& X, const Eigen::VectorXd& y, Eigen::VectorXd& out);

/// Per-sample, per-parameter loops with no matrix kernels. Used to test `grad`.
double grad_reference(const MlpModel& model, const Eigen::MatrixXd& X, const Eigen::VectorXd& y, Eigen::VectorXd& out);

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long step = 0;
  Eigen::VectorXd m;
  Eigen::VectorXd v;

  explicit AdamState(std::size_t n = 0, double b1 = 0.9, double b2 = 0.999, double e = 1e-8);
};

/// Bias-corrected Adam update of `params` in place.
void adam_step(Eigen::VectorXd& params, AdamState& state, const Eigen::VectorXd& g, double lr);

/// Cumulative count of training points consumed by optimizer steps.
struct QueryCounter {
  std::uint64_t q = 0;
  void add(std::uint64_t n) { q += n; }
};

struct TrainConfig {
  int batch_size = 64;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  double plateau_factor = 10.0;
  int plateau_patience = 12;
  double plateau_threshold = 1e-4;  ///< relative improvement that resets the plateau counter
  double min_lr = 1e-7;
  int early_stop_window = 24;
  double early_stop_rel = 0.01;
  int max_epochs = 1500;
  double val_fraction = 0.2;
  int hidden_layers = 1;  ///< deeper students are experimental

  double lr_start = 1e-8;
  double lr_mult = 1.3;
  double lr_cap = 10.0;
  double lr_smoothing = 0.98;
  double lr_diverge_factor = 4.0;
  double lr_fallback = 1e-3;

  void validate() const;
};

struct Dataset {
  Eigen::MatrixXd X;  ///< d x n
  Eigen::VectorXd y;
  int size() const { return static_cast<int>(y.size()); }
};

/// Seeded shuffle then an 80/20 cut with at least one validation point. A
/// single-point dataset is used for both training and validation.
std::pair<Dataset, Dataset> split_dataset(const Dataset& data, double val_fraction, Rng& rng);

struct LrFindResult {
  double lr = 0.0;
  double steep = 0.0;
  double minimum = 0.0;
  double valley = 0.0;
  int steps = 0;
  bool fell_back = false;
  std::vector<double> lrs;
  std::vector<double> smoothed;
};

/// Learning-rate range test on a copy of `model`; the model itself is untouched.
LrFindResult lr_find(const MlpModel& model, const Dataset& train, const TrainConfig& config, Rng& rng,
                     QueryCounter& queries);

/// Picks steep / minimum / valley from a recorded (lr, smoothed loss) curve.
LrFindResult lr_suggest(const std::vector<double>& lrs, const std::vector<double>& smoothed, double fallback);

enum class TrainStatus { Ok, NonFinite };

struct TrainResult {
  MlpModel model;  ///< weights at the best validation loss
  double best_val_loss = 0.0;
  int epochs = 0;
  double initial_lr = 0.0;
  TrainStatus status = TrainStatus::Ok;
};

/// Adam with plateau decay and early stopping, starting from `lr_find`.
TrainResult train(const MlpModel& model, const Dataset& train_set, const Dataset& val_set, const TrainConfig& config,
                  Rng& rng, QueryCounter& queries);

struct WidthSearchResult {
  int best_width = 0;
  double best_value = 0.0;
  int steps = 0;                      ///< interval reductions performed
  std::map<int, double> evaluations;  ///< width -> value, each width evaluated once
};

/// Golden-section search over log2(width) in [log2 lo, log2 hi] until the
/// interval is at most `tol` wide. Widths are rounded to integers >= 2 and
/// cached; the best evaluated width is returned. Ties keep the lower side.
WidthSearchResult golden_width_search(double lo_width, double hi_width, double tol,
                                      const std::function<double(int)>& evaluator);

/// Upper bound on golden-section steps for a log2 range of `range` at tolerance `tol`.
int golden_step_cap(double range, double tol);

/// (2, 32 + 8 min(T, sqrt(dN) + max(d, N))).
std::pair<int, int> width_range(int T, int d, int N);

}  // namespace infolearn
