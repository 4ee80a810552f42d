#include "infolearn/dgp.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "infolearn/errors.hpp"

namespace infolearn {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

Eigen::VectorXd with_bias(const TeacherNetwork& net, const Eigen::VectorXd& x) {
  if (x.size() == net.fan_in()) return x;
  if (net.bias_input && x.size() == net.input_dim) {
    Eigen::VectorXd u(net.input_dim + 1);
    u.head(net.input_dim) = x;
    u(net.input_dim) = 1.0;
    return u;
  }
  throw ShapeError("teacher_forward: input has " + std::to_string(x.size()) + " coordinates, network expects " +
                   std::to_string(net.input_dim));
}

Eigen::VectorXd apply(const DenseLayer& layer, const Eigen::VectorXd& u) {
  Eigen::VectorXd z = layer.weights * u;
  if (layer.bias.size() > 0) z += layer.bias;
  if (layer.relu) z = z.cwiseMax(0.0);
  return z;
}

Eigen::MatrixXd gaussian_matrix(int rows, int cols, double variance, Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  const double sd = std::sqrt(variance);
  // Row-major fill so the draw order matches the serialized layout.
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = sd * rng.normal();
  return m;
}

Eigen::MatrixXd sphere_rows(int rows, int cols, Rng& rng) {
  Eigen::MatrixXd m = gaussian_matrix(rows, cols, 1.0, rng);
  for (int i = 0; i < rows; ++i) {
    double n = m.row(i).norm();
    while (n == 0.0) {
      for (int j = 0; j < cols; ++j) m(i, j) = rng.normal();
      n = m.row(i).norm();
    }
    m.row(i) /= n;
  }
  return m;
}

}  // namespace

double prior_entropy(ScalarPrior prior) {
  switch (prior) {
    case ScalarPrior::Gaussian:
      return 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e);
    case ScalarPrior::Uniform:
      return std::log(2.0 * std::sqrt(3.0));
  }
  return 0.0;
}

IndepNetSpec experiment_independent_teacher(int d, int N, double sigma2) {
  return IndepNetSpec{.d = d, .N = N, .K = 2, .sigma2 = sigma2, .include_bias_dim = true};
}

DirichletNetSpec experiment_dirichlet_teacher(int d, int M, int N, double sigma2) {
  return DirichletNetSpec{.d = d,
                          .M = M,
                          .N = N,
                          .K = 1,
                          .sigma2 = sigma2,
                          .row_law = RowLaw::UnitSphere,
                          .signs = SignMode::PerEntry};
}

// ---------------------------------------------------------------------------

double TeacherNetwork::forward(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd out = forward_vec(x);
  if (out.size() != 1) throw ShapeError("forward: network output is not scalar");
  return out(0);
}

Eigen::VectorXd TeacherNetwork::forward_vec(const Eigen::VectorXd& x) const {
  Eigen::VectorXd u = with_bias(*this, x);
  for (const auto& layer : layers) u = apply(layer, u);
  return u;
}

Eigen::VectorXd TeacherNetwork::forward_batch(const Eigen::MatrixXd& X) const {
  if (X.rows() != input_dim && X.rows() != fan_in()) throw ShapeError("forward_batch: input dimension mismatch");
  Eigen::MatrixXd u;
  if (X.rows() == fan_in()) {
    u = X;
  } else {
    u.resize(fan_in(), X.cols());
    u.topRows(input_dim) = X;
    u.row(input_dim).setOnes();
  }
  for (const auto& layer : layers) {
    Eigen::MatrixXd z = layer.weights * u;
    if (layer.bias.size() > 0) z.colwise() += layer.bias;
    if (layer.relu) z = z.cwiseMax(0.0);
    u = std::move(z);
  }
  if (u.rows() != 1) throw ShapeError("forward_batch: network output is not scalar");
  return u.row(0).transpose();
}

std::pair<Eigen::VectorXd, ActivationTrace> TeacherNetwork::forward_trace(const Eigen::VectorXd& x) const {
  ActivationTrace trace;
  Eigen::VectorXd u = with_bias(*this, x);
  trace.push_back(u);
  std::size_t next_block = 0;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    u = apply(layers[i], u);
    if (next_block < block_ends.size() && block_ends[next_block] == static_cast<int>(i)) {
      trace.push_back(u);
      ++next_block;
    }
  }
  return {u, std::move(trace)};
}

bool TeacherNetwork::operator==(const TeacherNetwork& o) const {
  if (kind != o.kind || prior != o.prior || input_dim != o.input_dim || bias_input != o.bias_input ||
      seed != o.seed || block_ends != o.block_ends || layers.size() != o.layers.size())
    return false;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& a = layers[i];
    const auto& b = o.layers[i];
    if (a.relu != b.relu || a.weights.rows() != b.weights.rows() || a.weights.cols() != b.weights.cols() ||
        a.bias.size() != b.bias.size())
      return false;
    if (a.weights != b.weights) return false;
    if (a.bias.size() > 0 && a.bias != b.bias) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

double sample_env(const ScalarEnvSpec& spec, Rng& rng) {
  require(spec.sigma2 > 0.0, "ScalarEnvSpec: sigma2 must be positive");
  switch (spec.prior) {
    case ScalarPrior::Gaussian:
      return rng.normal();
    case ScalarPrior::Uniform:
      return std::sqrt(3.0) * (2.0 * rng.uniform() - 1.0);
  }
  return 0.0;
}

Eigen::VectorXd sample_env(const LinRegSpec& spec, Rng& rng) {
  require(spec.d >= 1, "LinRegSpec: d must be >= 1");
  require(spec.sigma2 > 0.0, "LinRegSpec: sigma2 must be positive");
  Eigen::VectorXd theta = standard_normal_vector(spec.d, rng);
  if (spec.prior_mean.size() > 0) {
    if (spec.prior_mean.size() != spec.d) throw ConfigError("LinRegSpec: prior_mean has wrong dimension");
    theta += spec.prior_mean;
  }
  return theta;
}

TeacherNetwork sample_env(const IndepNetSpec& spec, Rng& rng) {
  require(spec.d >= 1 && spec.N >= 1 && spec.K >= 1, "IndepNetSpec: d, N, K must be >= 1");
  require(spec.sigma2 > 0.0, "IndepNetSpec: sigma2 must be positive");
  TeacherNetwork net;
  net.prior = "independent";
  net.input_dim = spec.d;
  net.bias_input = spec.include_bias_dim;
  const int fan_in = net.fan_in();
  for (int k = 0; k < spec.K; ++k) {
    const bool last = (k == spec.K - 1);
    const int rows = last ? 1 : spec.N;
    const int cols = (k == 0) ? fan_in : spec.N;
    DenseLayer layer;
    layer.weights = gaussian_matrix(rows, cols, 1.0 / cols, rng);
    layer.relu = !last;
    net.layers.push_back(std::move(layer));
    net.block_ends.push_back(k);
  }
  return net;
}

TeacherNetwork sample_env(const DirichletNetSpec& spec, Rng& rng) {
  require(spec.d >= 1 && spec.M >= 1 && spec.N >= 1 && spec.K >= 1, "DirichletNetSpec: d, M, N, K must be >= 1");
  require(spec.M <= spec.N, "DirichletNetSpec: M must not exceed N");
  require(spec.sigma2 > 0.0, "DirichletNetSpec: sigma2 must be positive");
  TeacherNetwork net;
  net.prior = "dirichlet";
  net.input_dim = spec.d;
  const double alpha = static_cast<double>(spec.M) / spec.N;
  const double scale = std::sqrt(static_cast<double>(spec.M));
  for (int k = 0; k < spec.K; ++k) {
    const bool last = (k == spec.K - 1);
    DenseLayer a;
    a.weights = spec.row_law == RowLaw::UnitSphere ? sphere_rows(spec.N, spec.d, rng)
                                                   : gaussian_matrix(spec.N, spec.d, 1.0 / spec.d, rng);
    a.relu = true;
    DenseLayer b;
    b.weights = scaled_dirichlet_rows(last ? 1 : spec.d, spec.N, alpha, scale, spec.signs, rng);
    b.relu = !last;
    net.layers.push_back(std::move(a));
    net.layers.push_back(std::move(b));
    net.block_ends.push_back(static_cast<int>(net.layers.size()) - 1);
  }
  return net;
}

TeacherNetwork sample_teacher(const IndepNetSpec& spec, std::uint64_t seed) {
  Rng rng = Rng::derive(seed, "teacher");
  TeacherNetwork net = sample_env(spec, rng);
  net.seed = seed;
  return net;
}

TeacherNetwork sample_teacher(const DirichletNetSpec& spec, std::uint64_t seed) {
  Rng rng = Rng::derive(seed, "teacher");
  TeacherNetwork net = sample_env(spec, rng);
  net.seed = seed;
  return net;
}

// ---------------------------------------------------------------------------

Eigen::VectorXd standard_normal_vector(int dim, Rng& rng) {
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v(i) = rng.normal();
  return v;
}

Eigen::MatrixXd standard_normal_matrix(int rows, int cols, Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  // Column-major fill: each column is one sample when used as a batch.
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = rng.normal();
  return m;
}

DataPair sample_pair(double theta, double sigma2, Rng& rng) {
  if (!(sigma2 > 0.0)) throw DomainError("sample_pair: sigma2 must be positive");
  DataPair p;
  p.x = Eigen::VectorXd::Ones(1);
  p.noiseless = theta;
  p.y = theta + std::sqrt(sigma2) * rng.normal();
  return p;
}

DataPair sample_pair(const Eigen::VectorXd& theta, double sigma2, Rng& rng) {
  if (!(sigma2 > 0.0)) throw DomainError("sample_pair: sigma2 must be positive");
  DataPair p;
  p.x = standard_normal_vector(static_cast<int>(theta.size()), rng);
  p.noiseless = theta.dot(p.x);
  p.y = p.noiseless + std::sqrt(sigma2) * rng.normal();
  return p;
}

DataPair sample_pair(const TeacherNetwork& net, double sigma2, Rng& rng) {
  if (!(sigma2 > 0.0)) throw DomainError("sample_pair: sigma2 must be positive");
  DataPair p;
  p.x = standard_normal_vector(net.input_dim, rng);
  p.noiseless = net.forward(p.x);
  p.y = p.noiseless + std::sqrt(sigma2) * rng.normal();
  return p;
}

Eigen::MatrixXd scaled_dirichlet_rows(int rows, int cols, double alpha, double scale, SignMode signs, Rng& rng) {
  if (rows < 1 || cols < 1) throw ConfigError("scaled_dirichlet_rows: empty shape");
  if (!(alpha > 0.0) || !(scale > 0.0)) throw DomainError("scaled_dirichlet_rows: alpha and scale must be positive");
  Eigen::MatrixXd m(rows, cols);
  std::vector<double> p(static_cast<std::size_t>(cols));
  for (int i = 0; i < rows; ++i) {
    rng.dirichlet(alpha, p);
    const double row_sign = signs == SignMode::PerRow ? rng.rademacher() : 1.0;
    for (int j = 0; j < cols; ++j) {
      const double s = signs == SignMode::PerEntry ? rng.rademacher() : row_sign;
      m(i, j) = scale * s * p[static_cast<std::size_t>(j)];
    }
  }
  return m;
}

Eigen::MatrixXd multinomial_quantize_rows(const Eigen::MatrixXd& A, double scale, int r, Rng& rng) {
  if (r < 1) throw DomainError("multinomial_quantize_rows: r must be >= 1");
  if (!(scale > 0.0)) throw DomainError("multinomial_quantize_rows: scale must be positive");
  const auto cols = static_cast<std::size_t>(A.cols());
  Eigen::MatrixXd out(A.rows(), A.cols());
  std::vector<double> probs(cols);
  std::vector<std::uint64_t> counts(cols);
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    const double l1 = A.row(i).cwiseAbs().sum();
    if (std::abs(l1 - scale) > 1e-9) {
      throw InputError("multinomial_quantize_rows: row " + std::to_string(i) + " has absolute sum " +
                       std::to_string(l1) + ", expected " + std::to_string(scale));
    }
    for (std::size_t j = 0; j < cols; ++j) probs[j] = std::abs(A(i, static_cast<Eigen::Index>(j))) / l1;
    rng.multinomial(static_cast<std::uint64_t>(r), probs, counts);
    for (std::size_t j = 0; j < cols; ++j) {
      const double a = A(i, static_cast<Eigen::Index>(j));
      const double sign = (a > 0.0) - (a < 0.0);
      out(i, static_cast<Eigen::Index>(j)) = scale / r * sign * static_cast<double>(counts[j]);
    }
  }
  return out;
}

}  // namespace infolearn
