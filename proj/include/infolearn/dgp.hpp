#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "infolearn/rng.hpp"

namespace infolearn {

// ---------------------------------------------------------------------------
// Environment specifications

enum class ScalarPrior {
  Gaussian,  ///< theta ~ N(0, 1)
  Uniform,   ///< theta ~ U(-sqrt 3, sqrt 3), also variance 1
};

struct ScalarEnvSpec {
  double sigma2 = 0.1;
  ScalarPrior prior = ScalarPrior::Gaussian;
};

/// Differential entropy of the scalar prior (nats).
double prior_entropy(ScalarPrior prior);

struct LinRegSpec {
  int d = 1;
  double sigma2 = 0.1;
  Eigen::VectorXd prior_mean;  ///< empty means zero
};

/// Deep ReLU network with independent weights: K weight matrices
/// (N x d), (N x N) ... (1 x N), variance 1/fan-in. With `include_bias_dim`
/// a constant 1 is appended to the input so the first layer has fan-in d + 1.
struct IndepNetSpec {
  int d = 1;
  int N = 1;
  int K = 2;
  double sigma2 = 0.01;
  bool include_bias_dim = false;
};

/// How rows of the inner matrices A are drawn for the dirichlet prior.
enum class RowLaw {
  Gaussian,    ///< A_i ~ N(0, I / fan_in)
  UnitSphere,  ///< A_i uniform on the unit sphere
};

/// Sign flips applied to the scaled Dirichlet rows of B.
enum class SignMode { PerEntry, PerRow };

/// Dirichlet-prior network: K blocks U_k = ReLU(B ReLU(A U_{k-1})) with
/// A: N x d and B: d x N (1 x N and no outer ReLU in the last block). Each row
/// of B is sqrt(M) * sign * Dirichlet(M/N, ..., M/N).
struct DirichletNetSpec {
  int d = 1;
  int M = 1;
  int N = 4;
  int K = 1;
  double sigma2 = 0.01;
  RowLaw row_law = RowLaw::Gaussian;
  SignMode signs = SignMode::PerEntry;
};

/// Teacher used by the SGD experiments with the independent prior:
/// f(x) = B ReLU(A [x; 1]), A ~ N(0, 1/(d+1)), B ~ N(0, 1/N).
IndepNetSpec experiment_independent_teacher(int d, int N, double sigma2);

/// Teacher used by the SGD experiments with the dirichlet prior: one block, rows
/// of A uniform on the unit sphere, B = sqrt(M) * sign (per entry) * Dirichlet(M/N).
DirichletNetSpec experiment_dirichlet_teacher(int d, int M, int N, double sigma2);

// ---------------------------------------------------------------------------
// Networks

struct DenseLayer {
  Eigen::MatrixXd weights;  ///< out x in
  Eigen::VectorXd bias;     ///< empty or size out
  bool relu = false;
};

/// Activations at block boundaries: trace[0] = U_0 (the network input, with any
/// bias coordinate appended), trace[k] = U_k.
using ActivationTrace = std::vector<Eigen::VectorXd>;

struct TeacherNetwork {
  std::string kind = "teacher";  ///< "teacher" or "student"
  std::string prior;             ///< "independent", "dirichlet", "mlp", ...
  int input_dim = 0;             ///< d, excluding the bias coordinate
  bool bias_input = false;       ///< append a constant 1 to inputs
  std::uint64_t seed = 0;
  std::vector<DenseLayer> layers;
  std::vector<int> block_ends;   ///< layer indices closing a block (U_k boundary)

  int fan_in() const { return input_dim + (bias_input ? 1 : 0); }
  int output_dim() const { return layers.empty() ? 0 : static_cast<int>(layers.back().weights.rows()); }
  int depth() const { return static_cast<int>(block_ends.size()); }

  /// Scalar output U_K for one input (d or d+1 coordinates).
  double forward(const Eigen::VectorXd& x) const;
  /// Output vector for networks with multi-dimensional output.
  Eigen::VectorXd forward_vec(const Eigen::VectorXd& x) const;
  /// Outputs for a batch of inputs stored column-wise (d x n).
  Eigen::VectorXd forward_batch(const Eigen::MatrixXd& X) const;
  /// Output plus U_0 ... U_K.
  std::pair<Eigen::VectorXd, ActivationTrace> forward_trace(const Eigen::VectorXd& x) const;

  bool operator==(const TeacherNetwork& other) const;
};

// ---------------------------------------------------------------------------
// Sampling

double sample_env(const ScalarEnvSpec& spec, Rng& rng);
Eigen::VectorXd sample_env(const LinRegSpec& spec, Rng& rng);
TeacherNetwork sample_env(const IndepNetSpec& spec, Rng& rng);
TeacherNetwork sample_env(const DirichletNetSpec& spec, Rng& rng);

/// Sample a teacher from a dedicated stream derived from `seed`; the seed is
/// recorded on the network.
TeacherNetwork sample_teacher(const IndepNetSpec& spec, std::uint64_t seed);
TeacherNetwork sample_teacher(const DirichletNetSpec& spec, std::uint64_t seed);

struct DataPair {
  Eigen::VectorXd x;
  double y = 0.0;
  double noiseless = 0.0;
};

/// Scalar estimation: x is the singleton {1}, y = theta + w.
DataPair sample_pair(double theta, double sigma2, Rng& rng);
/// Linear regression: x ~ N(0, I_d), y = theta^T x + w.
DataPair sample_pair(const Eigen::VectorXd& theta, double sigma2, Rng& rng);
/// Network: x ~ N(0, I_d), y = f(x) + w.
DataPair sample_pair(const TeacherNetwork& net, double sigma2, Rng& rng);

Eigen::VectorXd standard_normal_vector(int dim, Rng& rng);
Eigen::MatrixXd standard_normal_matrix(int rows, int cols, Rng& rng);

/// rows x cols matrix whose rows are scale * sign * Dirichlet(alpha, ..., alpha).
Eigen::MatrixXd scaled_dirichlet_rows(int rows, int cols, double alpha, double scale, SignMode signs, Rng& rng);

/// Replace each row A_i = scale * sign(A_i) * p_i (p_i on the simplex) by
/// (scale / r) * sign(A_i) * Multinomial(r, |A_i| / scale).
/// Throws InputError when a row's absolute sum differs from `scale` by more than 1e-9.
Eigen::MatrixXd multinomial_quantize_rows(const Eigen::MatrixXd& A, double scale, int r, Rng& rng);

}  // namespace infolearn
