#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "infolearn/core_info.hpp"
#include "infolearn/parallel.hpp"

namespace infolearn {

/// A rate-distortion function (or a bound on one) on (eps_min, eps_max].
/// `eps_max_inclusive` marks functions that are defined, usually as 0, at the
/// right end.
struct RdFunction {
  std::string family;
  std::vector<std::pair<std::string, double>> params;
  double eps_min = 0.0;
  double eps_max = 0.0;
  bool eps_max_inclusive = false;
  std::function<double(double)> fn;

  bool contains(double eps) const;
  /// Throws DomainError outside the validity interval.
  Nats operator()(double eps) const;
  /// Lower end of the search grid: eps_min, or eps_max * 1e-9 when eps_min is 0.
  double grid_lo() const;
  double grid_hi() const;
  /// "k1=v1;k2=v2"
  std::string param_string() const;
};

struct Bracket {
  double lower = 0.0;
  double upper = 0.0;
  double lower_arg = 0.0;  ///< optimizing epsilon (or delta) for the lower side
  double upper_arg = 0.0;  ///< optimizing epsilon (or delta) for the upper side
  std::optional<double> loose_cap;
};

// ---------------------------------------------------------------------------
// Generic machinery

struct EntropyCaps {
  double regret_cap = 0.0;
  double t_eps_cap = 0.0;
  bool vacuous = false;  ///< entropy infinite: neither cap says anything
};

/// (H, ceil(H / eps)).
EntropyCaps entropy_bounds(double entropy, double eps);

/// sup_eps min{H_eps, eps T} <= R(T) <= inf_eps (H_eps + eps T).
Bracket regret_bracket(const RdFunction& rd, int T);
/// Same with separate lower and upper bounds on the rate-distortion function.
Bracket regret_bracket(const RdFunction& lower_rd, const RdFunction& upper_rd, int T);

/// H_eps / eps <= T_eps <= min_delta ceil(H_{eps - delta} / delta); the loose
/// cap ceil(2 H_{eps/2} / eps) is reported alongside.
Bracket sample_complexity_bracket(const RdFunction& rd, double eps);
Bracket sample_complexity_bracket(const RdFunction& lower_rd, const RdFunction& upper_rd, double eps);

/// Minimizes a function over [lo, hi] on a log grid of `grid` points followed by
/// golden-section refinement to relative tolerance `rtol`. Returns (argmin, min).
std::pair<double, double> log_grid_minimize(const std::function<double(double)>& f, double lo, double hi,
                                            int grid = 128, double rtol = 1e-6);

// ---------------------------------------------------------------------------
// Scalar estimation and linear regression

/// R(1) = 0.5 ln(1 + 1 / sigma2).
double scalar_r1(double sigma2);

/// Exact rate-distortion function for theta ~ N(0, 1): 0.5 ln((1/sigma2) / (e^{2 eps} - 1)).
Nats scalar_rd(double sigma2, double eps);
/// Upper bound for a variance-1 theta with differential entropy h_theta.
Nats scalar_rd(double sigma2, double eps, double h_theta);
RdFunction scalar_rd_function(double sigma2, std::optional<double> h_theta = std::nullopt);

struct LinRegRd {
  std::optional<double> lower;  ///< absent outside d > 2, eps <= 1 / (2 (4d + sigma2))
  std::optional<double> upper;  ///< absent outside eps < 0.5 ln(1 + d / sigma2)
};

/// Upper (d/2) ln(d / (sigma2 (e^{2 eps} - 1))) and lower (d/2) ln(d / (2 (4d + sigma2) eps)).
LinRegRd linreg_rd(int d, double sigma2, double eps);
/// Upper bound in entropy form for a theta with iid variance-1 components;
/// `r1` is the caller's value of R(1).
Nats linreg_rd_upper_entropy_form(int d, double sigma2, double eps, double h_theta, double r1);
RdFunction linreg_rd_lower_function(int d, double sigma2);
RdFunction linreg_rd_upper_function(int d, double sigma2);

/// (d / 2eps) ln(d / (2 (4d + sigma2) eps)) <= T_eps <= (d / eps) ln(d / (sigma2 eps)).
Bracket linreg_t_eps(int d, double sigma2, double eps);

// ---------------------------------------------------------------------------
// Neural-network environments

enum class NetPrior { Independent, Dirichlet };

const char* to_string(NetPrior p);
NetPrior net_prior_from_string(const std::string& s);

/// Independent single layer with d inputs and N outputs: (dN / 2) ln(N / (2 sigma2 eps)).
Nats single_layer_rd_independent(int d, int N, double sigma2, double eps);
/// Dirichlet layer with d outputs: d^2 M ln^2(3d / (sigma2 eps)).
Nats single_layer_rd_dirichlet(int d, int M, double sigma2, double eps);
/// Dirichlet teacher network with scalar output: d M ln^2(3d / (sigma2 eps)).
Nats dirichlet_teacher_rd(int d, int M, double sigma2, double eps);

/// Rate-distortion bound for one independent layer with n_in inputs, n_out
/// outputs and effective noise sigma2_eff.
RdFunction independent_layer_rd(int n_in, int n_out, double sigma2_eff);

/// Layer functions for an independent network with dimension schedule
/// (d, N, ..., N, 1). Hidden layers see noise sigma2 * N, which is the
/// stability-weighted noise level at the output.
std::vector<RdFunction> independent_network_layers(int d, int N, int K, double sigma2);

/// sum_k H_k(eps / K).
Nats multilayer_compose(const std::vector<RdFunction>& layers, double eps);

struct NetworkBounds {
  Nats rd;           ///< bound on H_eps
  double t_eps = 0;  ///< upper bound on T_eps
};

/// Independent: H = ((K N^2 + d N)/2) ln(K / (2 sigma2 eps)), T = ((K N^2 + d N)/eps) ln(K / (sigma2 eps)).
/// Dirichlet (`width_or_m` = M): H = d^2 M K ln^2(3K / (sigma2 eps)), T = (2 d^2 M K / eps) ln(6K / (sigma2 eps)).
NetworkBounds network_bounds(NetPrior prior, int d, int width_or_m, int K, double sigma2, double eps);

// ---------------------------------------------------------------------------
// Stability

struct LayerSpec {
  NetPrior prior = NetPrior::Independent;
  int d_in = 1;
  int d_out = 1;
  int M = 0;  ///< dirichlet only
  int N = 0;  ///< dirichlet hidden width
};

struct StabilityConstant {
  double L = 0.0;
  bool closed_form = true;  ///< false when the explicit second moment was used
  std::string layer;
};

StabilityConstant stability(const LayerSpec& layer);
/// Operator norm of an explicit E[A^T A].
double stability_from_moment(const Eigen::MatrixXd& second_moment);

/// E |f(x) - f(y)|^2 / |x - y|^2 over fresh weights and x, y ~ N(0, I) for an
/// independent layer f(u) = ReLU(A u) (or A u when `relu` is false).
MeanSe mc_layer_stability(int d_in, int d_out, bool relu, int n_draws, std::uint64_t seed, Exec exec = Exec::Parallel);

/// 0.5 ln(1 + (prod L) mse / sigma2).
Nats multilayer_distortion(const std::vector<double>& L, double layer_mse, double sigma2);

// ---------------------------------------------------------------------------
// Proxies

enum class ProxyFamily { Scalar, LinReg };

/// Additive-noise proxy theta~ = theta + V, V ~ N(0, delta2 I).
struct AdditiveNoiseProxy {
  double delta2 = 0.0;
  double eps = 0.0;
};

AdditiveNoiseProxy make_proxy(ProxyFamily family, int d, double sigma2, double eps);

struct ProxyReport {
  ProxyFamily family = ProxyFamily::Scalar;
  int d = 1;
  double sigma2 = 0.0;
  double eps = 0.0;
  double delta2 = 0.0;
  double distortion = 0.0;
  double se = 0.0;
  double rate_cap = 0.0;  ///< 0.5 ln(1 + 1/delta2), times d for linear regression
  bool within = false;    ///< distortion <= eps + 3 se
};

ProxyReport proxy_check(ProxyFamily family, int d, double sigma2, double eps, int mc_samples, std::uint64_t seed,
                        Exec exec = Exec::Parallel);

struct MultinomialReport {
  double mse = 0.0;
  double se = 0.0;
  double bound = 0.0;            ///< sqrt(c) M / r for X ~ N(0, I_N)
  bool within = false;           ///< mse <= bound + 3 se
  double corrected_bound = 0.0;  ///< c M / r, valid for every c
  bool within_corrected = false;
};

/// Monte Carlo check of the multinomial quantizer: rows A_i = sqrt(c) * sign * Dir(alpha),
/// A~ from `multinomial_quantize_rows`, error |A X - A~ X|^2 with X ~ N(0, I_N).
/// The sqrt(c) M / r bound only holds for c <= 1; the quantizer's covariance
/// (c / r)(diag p - p p^T) gives c M / r in general.
MultinomialReport multinomial_proxy_check(int M, int N, int r, double c, double alpha, int samples,
                                          std::uint64_t seed, Exec exec = Exec::Parallel);

// ---------------------------------------------------------------------------
// Curves

struct CurveRow {
  std::string family;
  std::string params;
  double epsilon = 0.0;
  double value = 0.0;
  bool vacuous = false;
};

/// Evaluates `rd` on `eps_grid`; points outside its interval are marked vacuous.
std::vector<CurveRow> rd_curve(const RdFunction& rd, const std::vector<double>& eps_grid);
std::vector<double> log_spaced(double lo, double hi, int n);
/// Columns family, params, epsilon, value, status.
void write_curve_csv(std::ostream& os, const std::vector<CurveRow>& rows);

}  // namespace infolearn
