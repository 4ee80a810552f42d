#include "infolearn/nn_train.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <numeric>

#include "infolearn/errors.hpp"

namespace infolearn {

// ---------------------------------------------------------------------------
// Model

MlpModel::MlpModel(std::vector<int> widths) : widths_(std::move(widths)) {
  if (widths_.size() < 2) throw ConfigError("MlpModel: need at least input and output widths");
  for (int w : widths_) {
    if (w < 1) throw ConfigError("MlpModel: widths must be >= 1");
  }
  if (widths_.back() != 1) throw ConfigError("MlpModel: output width must be 1");
  Eigen::Index off = 0;
  for (int k = 0; k < n_layers(); ++k) {
    offsets_.push_back(off);
    off += static_cast<Eigen::Index>(widths_[k + 1]) * widths_[k] + widths_[k + 1];
  }
  params_ = Eigen::VectorXd::Zero(off);
}

Eigen::Map<Eigen::MatrixXd> MlpModel::weight(int k) {
  return {params_.data() + offsets_[k], widths_[k + 1], widths_[k]};
}
Eigen::Map<const Eigen::MatrixXd> MlpModel::weight(int k) const {
  return {params_.data() + offsets_[k], widths_[k + 1], widths_[k]};
}
Eigen::Map<Eigen::VectorXd> MlpModel::bias(int k) {
  return {params_.data() + offsets_[k] + static_cast<Eigen::Index>(widths_[k + 1]) * widths_[k], widths_[k + 1]};
}
Eigen::Map<const Eigen::VectorXd> MlpModel::bias(int k) const {
  return {params_.data() + offsets_[k] + static_cast<Eigen::Index>(widths_[k + 1]) * widths_[k], widths_[k + 1]};
}

Eigen::VectorXd MlpModel::forward_batch(const Eigen::MatrixXd& X) const {
  if (X.rows() != input_dim()) throw ShapeError("MlpModel: input dimension mismatch");
  Eigen::MatrixXd h = X;
  for (int k = 0; k < n_layers(); ++k) {
    Eigen::MatrixXd z = weight(k) * h;
    z.colwise() += bias(k);
    if (k + 1 < n_layers()) z = z.cwiseMax(0.0);
    h = std::move(z);
  }
  return h.row(0).transpose();
}

double MlpModel::forward(const Eigen::VectorXd& x) const { return forward_batch(x)(0); }

TeacherNetwork MlpModel::to_network() const {
  TeacherNetwork net;
  net.kind = "student";
  net.prior = "mlp";
  net.input_dim = input_dim();
  for (int k = 0; k < n_layers(); ++k) {
    DenseLayer layer;
    layer.weights = weight(k);
    layer.bias = bias(k);
    layer.relu = k + 1 < n_layers();
    net.layers.push_back(std::move(layer));
    net.block_ends.push_back(k);
  }
  return net;
}

MlpModel mlp_init(const std::vector<int>& widths, Rng& rng) {
  MlpModel m(widths);
  for (int k = 0; k < m.n_layers(); ++k) {
    auto W = m.weight(k);
    const double bound = 1.0 / std::sqrt(static_cast<double>(W.cols()));
    for (Eigen::Index j = 0; j < W.cols(); ++j)
      for (Eigen::Index i = 0; i < W.rows(); ++i) W(i, j) = bound * (2.0 * rng.uniform() - 1.0);
  }
  return m;
}

// ---------------------------------------------------------------------------
// Loss and gradient

double mse_loss(const MlpModel& model, const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  if (X.cols() != y.size() || y.size() == 0) throw ShapeError("mse_loss: batch shape mismatch");
  return (model.forward_batch(X) - y).squaredNorm() / static_cast<double>(y.size());
}

double grad(const MlpModel& model, const Eigen::MatrixXd& X, const Eigen::VectorXd& y, Eigen::VectorXd& out) {
  const Eigen::Index n = y.size();
  if (X.cols() != n || n == 0) throw ShapeError("grad: batch shape mismatch");
  if (X.rows() != model.input_dim()) throw ShapeError("grad: input dimension mismatch");
  const int L = model.n_layers();
  std::vector<Eigen::MatrixXd> acts(static_cast<std::size_t>(L) + 1);
  acts[0] = X;
  for (int k = 0; k < L; ++k) {
    Eigen::MatrixXd z = model.weight(k) * acts[static_cast<std::size_t>(k)];
    z.colwise() += model.bias(k);
    if (k + 1 < L) z = z.cwiseMax(0.0);
    acts[static_cast<std::size_t>(k) + 1] = std::move(z);
  }
  const Eigen::RowVectorXd resid = acts.back().row(0) - y.transpose();
  const double loss = resid.squaredNorm() / static_cast<double>(n);

  out.resize(static_cast<Eigen::Index>(model.param_count()));
  Eigen::MatrixXd delta = (2.0 / static_cast<double>(n)) * resid;
  for (int k = L - 1; k >= 0; --k) {
    const auto& in = acts[static_cast<std::size_t>(k)];
    Eigen::Map<Eigen::MatrixXd> gW(out.data() + model.weight_offset(k), delta.rows(), in.rows());
    Eigen::Map<Eigen::VectorXd> gb(out.data() + model.bias_offset(k), delta.rows());
    gW.noalias() = delta * in.transpose();
    gb = delta.rowwise().sum();
    if (k > 0) {
      Eigen::MatrixXd back = model.weight(k).transpose() * delta;
      // Post-activation > 0 exactly when pre-activation > 0, so ReLU'(0) = 0.
      delta = back.cwiseProduct((in.array() > 0.0).cast<double>().matrix());
    }
  }
  return loss;
}

double grad_reference(const MlpModel& model, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                      Eigen::VectorXd& out) {
  const Eigen::Index n = y.size();
  if (X.cols() != n || n == 0) throw ShapeError("grad_reference: batch shape mismatch");
  const int L = model.n_layers();
  const auto& w = model.widths();
  out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.param_count()));
  MlpModel g = model;
  g.params().setZero();
  double loss = 0.0;
  for (Eigen::Index s = 0; s < n; ++s) {
    std::vector<std::vector<double>> a(static_cast<std::size_t>(L) + 1);
    a[0].assign(X.col(s).data(), X.col(s).data() + X.rows());
    for (int k = 0; k < L; ++k) {
      auto W = model.weight(k);
      auto b = model.bias(k);
      auto& next = a[static_cast<std::size_t>(k) + 1];
      next.assign(static_cast<std::size_t>(w[k + 1]), 0.0);
      for (int i = 0; i < w[k + 1]; ++i) {
        double z = b(i);
        for (int j = 0; j < w[k]; ++j) z += W(i, j) * a[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
        next[static_cast<std::size_t>(i)] = (k + 1 < L && z <= 0.0) ? 0.0 : z;
      }
    }
    const double r = a.back()[0] - y(s);
    loss += r * r;
    std::vector<double> delta{2.0 * r / static_cast<double>(n)};
    for (int k = L - 1; k >= 0; --k) {
      auto W = model.weight(k);
      auto gW = g.weight(k);
      auto gb = g.bias(k);
      const auto& in = a[static_cast<std::size_t>(k)];
      for (int i = 0; i < w[k + 1]; ++i) {
        gb(i) += delta[static_cast<std::size_t>(i)];
        for (int j = 0; j < w[k]; ++j) gW(i, j) += delta[static_cast<std::size_t>(i)] * in[static_cast<std::size_t>(j)];
      }
      if (k > 0) {
        std::vector<double> back(static_cast<std::size_t>(w[k]), 0.0);
        for (int j = 0; j < w[k]; ++j) {
          if (in[static_cast<std::size_t>(j)] <= 0.0) continue;
          for (int i = 0; i < w[k + 1]; ++i) back[static_cast<std::size_t>(j)] += W(i, j) * delta[static_cast<std::size_t>(i)];
        }
        delta = std::move(back);
      }
    }
  }
  out = g.params();
  return loss / static_cast<double>(n);
}

// ---------------------------------------------------------------------------
// Adam

AdamState::AdamState(std::size_t n, double b1, double b2, double e)
    : beta1(b1), beta2(b2), eps(e), m(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n))),
      v(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n))) {}

void adam_step(Eigen::VectorXd& params, AdamState& s, const Eigen::VectorXd& g, double lr) {
  if (g.size() != params.size() || s.m.size() != params.size()) throw ShapeError("adam_step: size mismatch");
  ++s.step;
  s.m = s.beta1 * s.m + (1.0 - s.beta1) * g;
  s.v = s.beta2 * s.v + (1.0 - s.beta2) * g.cwiseAbs2();
  const double c1 = 1.0 - std::pow(s.beta1, static_cast<double>(s.step));
  const double c2 = 1.0 - std::pow(s.beta2, static_cast<double>(s.step));
  params.array() -= lr * (s.m.array() / c1) / ((s.v.array() / c2).sqrt() + s.eps);
}

// ---------------------------------------------------------------------------
// Data

void TrainConfig::validate() const {
  if (batch_size < 1 || plateau_patience < 1 || early_stop_window < 1 || max_epochs < 1 || hidden_layers < 1) {
    throw ConfigError("TrainConfig: integer fields must be positive");
  }
  if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0)) throw ConfigError("TrainConfig: betas in (0,1)");
  if (!(adam_eps > 0.0) || !(plateau_factor > 1.0) || !(min_lr > 0.0) || !(early_stop_rel > 0.0)) {
    throw ConfigError("TrainConfig: tolerances must be positive");
  }
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) throw ConfigError("TrainConfig: val_fraction in (0,1)");
  if (!(lr_start > 0.0) || !(lr_mult > 1.0) || !(lr_cap > lr_start)) throw ConfigError("TrainConfig: lr ramp");
}

namespace {

Dataset gather(const Dataset& data, const std::vector<int>& idx, std::size_t from, std::size_t to) {
  Dataset out;
  const auto n = static_cast<Eigen::Index>(to - from);
  out.X.resize(data.X.rows(), n);
  out.y.resize(n);
  for (std::size_t k = from; k < to; ++k) {
    const auto j = static_cast<Eigen::Index>(k - from);
    out.X.col(j) = data.X.col(idx[k]);
    out.y(j) = data.y(idx[k]);
  }
  return out;
}

void shuffle(std::vector<int>& idx, Rng& rng) {
  for (std::size_t i = idx.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(idx[i - 1], idx[j]);
  }
}

/// Cycles through shuffled minibatches, reshuffling at each epoch boundary.
class BatchStream {
 public:
  BatchStream(const Dataset& data, int batch, Rng& rng) : data_(data), batch_(batch), rng_(rng) {
    idx_.resize(static_cast<std::size_t>(data.size()));
    std::iota(idx_.begin(), idx_.end(), 0);
    shuffle(idx_, rng_);
  }

  /// Next batch; returns false at the end of an epoch (after reshuffling).
  bool next(Eigen::MatrixXd& X, Eigen::VectorXd& y) {
    if (pos_ >= idx_.size()) {
      pos_ = 0;
      shuffle(idx_, rng_);
      return false;
    }
    const std::size_t end = std::min(idx_.size(), pos_ + static_cast<std::size_t>(batch_));
    const auto n = static_cast<Eigen::Index>(end - pos_);
    X.resize(data_.X.rows(), n);
    y.resize(n);
    for (std::size_t k = pos_; k < end; ++k) {
      X.col(static_cast<Eigen::Index>(k - pos_)) = data_.X.col(idx_[k]);
      y(static_cast<Eigen::Index>(k - pos_)) = data_.y(idx_[k]);
    }
    pos_ = end;
    return true;
  }

 private:
  const Dataset& data_;
  int batch_;
  Rng& rng_;
  std::vector<int> idx_;
  std::size_t pos_ = 0;
};

}  // namespace

std::pair<Dataset, Dataset> split_dataset(const Dataset& data, double val_fraction, Rng& rng) {
  const int n = data.size();
  if (n < 1) throw ConfigError("split_dataset: empty dataset");
  if (data.X.cols() != n) throw ShapeError("split_dataset: X and y disagree");
  if (n == 1) return {data, data};
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  shuffle(idx, rng);
  const int n_val = std::clamp(static_cast<int>(std::floor(val_fraction * n)), 1, n - 1);
  const auto cut = static_cast<std::size_t>(n - n_val);
  return {gather(data, idx, 0, cut), gather(data, idx, cut, idx.size())};
}

// ---------------------------------------------------------------------------
// Learning-rate finder

LrFindResult lr_suggest(const std::vector<double>& lrs, const std::vector<double>& smoothed, double fallback) {
  LrFindResult r;
  r.lrs = lrs;
  r.smoothed = smoothed;
  r.steps = static_cast<int>(lrs.size());
  const std::size_t n = std::min(lrs.size(), smoothed.size());
  if (n < 3) {
    r.lr = r.steep = r.minimum = r.valley = fallback;
    r.fell_back = true;
    return r;
  }
  // steep: most negative slope of log(smoothed) against log(lr)
  std::size_t steep = 0;
  double best_slope = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double slope = (std::log(smoothed[i + 1]) - std::log(smoothed[i])) / (std::log(lrs[i + 1]) - std::log(lrs[i]));
    if (slope < best_slope) {
      best_slope = slope;
      steep = i;
    }
  }
  // minimum
  const auto min_it = std::min_element(smoothed.begin(), smoothed.begin() + static_cast<std::ptrdiff_t>(n));
  const auto min_idx = static_cast<std::size_t>(min_it - smoothed.begin());
  const double lo = *min_it;
  const double hi = *std::max_element(smoothed.begin(), smoothed.begin() + static_cast<std::ptrdiff_t>(n));
  // valley: midpoint of the longest run within 5% of the range above the minimum
  const double level = lo + 0.05 * (hi - lo);
  std::size_t best_start = min_idx;
  std::size_t best_len = 0;
  for (std::size_t i = 0; i < n;) {
    if (smoothed[i] > level) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < n && smoothed[j] <= level) ++j;
    if (j - i > best_len) {
      best_len = j - i;
      best_start = i;
    }
    i = j;
  }
  const std::size_t valley = best_start + (best_len > 0 ? (best_len - 1) / 2 : 0);

  r.steep = lrs[steep];
  r.minimum = lrs[min_idx] / 20.0;
  r.valley = lrs[valley];
  std::array<double, 3> c{r.steep, r.minimum, r.valley};
  std::sort(c.begin(), c.end());
  r.lr = c[1];
  return r;
}

LrFindResult lr_find(const MlpModel& model, const Dataset& train_set, const TrainConfig& config, Rng& rng,
                     QueryCounter& queries) {
  if (train_set.size() < 1) throw ConfigError("lr_find: empty dataset");
  MlpModel m = model;
  AdamState adam(m.param_count(), config.beta1, config.beta2, config.adam_eps);
  BatchStream stream(train_set, config.batch_size, rng);
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  Eigen::VectorXd g;
  std::vector<double> lrs;
  std::vector<double> smoothed;
  double avg = 0.0;
  double best = std::numeric_limits<double>::infinity();
  int i = 0;
  for (double lr = config.lr_start; lr <= config.lr_cap; lr *= config.lr_mult, ++i) {
    if (!stream.next(X, y)) stream.next(X, y);
    const double loss = grad(m, X, y, g);
    queries.add(static_cast<std::uint64_t>(y.size()));
    if (!std::isfinite(loss)) break;
    avg = config.lr_smoothing * avg + (1.0 - config.lr_smoothing) * loss;
    const double s = avg / (1.0 - std::pow(config.lr_smoothing, i + 1));
    if (i > 0 && s > config.lr_diverge_factor * best) break;
    best = std::min(best, s);
    lrs.push_back(lr);
    smoothed.push_back(s);
    adam_step(m.params(), adam, g, lr);
    if (!m.params().allFinite()) break;
  }
  LrFindResult r = lr_suggest(lrs, smoothed, config.lr_fallback);
  r.lr = std::min(r.lr, config.lr_cap);
  return r;
}

// ---------------------------------------------------------------------------
// Training

TrainResult train(const MlpModel& model, const Dataset& train_set, const Dataset& val_set, const TrainConfig& config,
                  Rng& rng, QueryCounter& queries) {
  config.validate();
  if (train_set.size() < 1 || val_set.size() < 1) throw ConfigError("train: empty split");
  TrainResult result;
  const LrFindResult finder = lr_find(model, train_set, config, rng, queries);
  result.initial_lr = finder.lr;

  MlpModel m = model;
  AdamState adam(m.param_count(), config.beta1, config.beta2, config.adam_eps);
  BatchStream stream(train_set, config.batch_size, rng);
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  Eigen::VectorXd g;
  double lr = finder.lr;

  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_params = m.params();
  double plateau_best = std::numeric_limits<double>::infinity();
  int plateau_bad = 0;
  double stop_ref = std::numeric_limits<double>::infinity();
  int stop_epoch = 0;

  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    while (stream.next(X, y)) {
      grad(m, X, y, g);
      queries.add(static_cast<std::uint64_t>(y.size()));
      adam_step(m.params(), adam, g, lr);
    }
    result.epochs = epoch + 1;
    const double val = mse_loss(m, val_set.X, val_set.y);
    if (!std::isfinite(val)) {
      result.status = TrainStatus::NonFinite;
      break;
    }
    if (val < best) {
      best = val;
      best_params = m.params();
    }
    // plateau schedule
    if (val < plateau_best * (1.0 - config.plateau_threshold)) {
      plateau_best = val;
      plateau_bad = 0;
    } else if (++plateau_bad > config.plateau_patience) {
      lr = std::max(lr / config.plateau_factor, config.min_lr);
      plateau_bad = 0;
    }
    // early stopping on relative improvement of the best loss
    if (val < stop_ref * (1.0 - config.early_stop_rel)) {
      stop_ref = val;
      stop_epoch = epoch;
    } else if (epoch - stop_epoch >= config.early_stop_window) {
      break;
    }
  }
  m.params() = best_params;
  result.model = std::move(m);
  result.best_val_loss = best;
  return result;
}

// ---------------------------------------------------------------------------
// Width search

int golden_step_cap(double range, double tol) {
  if (!(tol > 0.0)) throw ConfigError("golden_step_cap: tolerance must be positive");
  if (range <= tol) return 0;
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  return static_cast<int>(std::ceil(std::log(range / tol) / std::log(phi) - 1e-12));
}

WidthSearchResult golden_width_search(double lo_width, double hi_width, double tol,
                                      const std::function<double(int)>& evaluator) {
  if (!(lo_width >= 1.0) || !(hi_width >= lo_width)) throw ConfigError("golden_width_search: empty width range");
  if (!(tol > 0.0)) throw ConfigError("golden_width_search: tolerance must be positive");
  WidthSearchResult r;
  auto eval = [&](double log_w) {
    const int w = std::max(2, static_cast<int>(std::lround(std::exp2(log_w))));
    auto it = r.evaluations.find(w);
    if (it == r.evaluations.end()) it = r.evaluations.emplace(w, evaluator(w)).first;
    return it->second;
  };
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = std::log2(lo_width);
  double b = std::log2(hi_width);
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = eval(c);
  double fd = eval(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = eval(d);
    }
    ++r.steps;
  }
  r.best_value = std::numeric_limits<double>::infinity();
  for (const auto& [w, v] : r.evaluations) {
    if (v < r.best_value) {
      r.best_value = v;
      r.best_width = w;
    }
  }
  return r;
}

std::pair<int, int> width_range(int T, int d, int N) {
  if (T < 1 || d < 1 || N < 1) throw ConfigError("width_range: arguments must be positive");
  const double arch = std::sqrt(static_cast<double>(d) * N) + std::max(d, N);
  const double cap = std::min(static_cast<double>(T), arch);
  return {2, static_cast<int>(std::floor(32.0 + 8.0 * cap))};
}

}  // namespace infolearn
