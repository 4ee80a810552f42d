#include "infolearn/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "infolearn/dgp.hpp"
#include "infolearn/errors.hpp"
#include "infolearn/rng.hpp"

namespace infolearn {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(what) + " must be positive and finite");
}

double log_arg_checked(double arg, const char* what) {
  if (!(arg > 1.0)) throw DomainError(std::string(what) + ": log argument <= 1, bound is vacuous");
  return std::log(arg);
}

}  // namespace

// ---------------------------------------------------------------------------
// RdFunction

bool RdFunction::contains(double eps) const {
  if (!(eps > eps_min)) return false;
  return eps_max_inclusive ? eps <= eps_max : eps < eps_max;
}

Nats RdFunction::operator()(double eps) const {
  if (!contains(eps)) {
    std::ostringstream msg;
    msg << family << ": epsilon " << eps << " outside (" << eps_min << ", " << eps_max << (eps_max_inclusive ? "]" : ")");
    throw DomainError(msg.str());
  }
  return Nats(fn(eps));
}

double RdFunction::grid_lo() const { return eps_min > 0.0 ? eps_min * (1.0 + 1e-12) : eps_max * 1e-9; }

double RdFunction::grid_hi() const { return eps_max_inclusive ? eps_max : eps_max * (1.0 - 1e-12); }

std::string RdFunction::param_string() const {
  std::ostringstream os;
  os.precision(10);
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i) os << ';';
    os << params[i].first << '=' << params[i].second;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Generic machinery

EntropyCaps entropy_bounds(double entropy, double eps) {
  if (!(eps > 0.0)) throw DomainError("entropy_bounds: epsilon must be positive");
  if (!(entropy >= 0.0)) throw DomainError("entropy_bounds: entropy must be nonnegative");
  EntropyCaps caps;
  if (std::isinf(entropy)) {
    caps.regret_cap = caps.t_eps_cap = std::numeric_limits<double>::infinity();
    caps.vacuous = true;
    return caps;
  }
  caps.regret_cap = entropy;
  caps.t_eps_cap = std::ceil(entropy / eps);
  return caps;
}

std::pair<double, double> log_grid_minimize(const std::function<double(double)>& f, double lo, double hi, int grid,
                                            double rtol) {
  if (!(lo > 0.0) || !(hi >= lo)) throw DomainError("log_grid_minimize: empty interval");
  if (grid < 2 || hi == lo) return {lo, f(lo)};
  const double a = std::log(lo);
  const double b = std::log(hi);
  std::vector<double> xs(static_cast<std::size_t>(grid));
  std::vector<double> fs(xs.size());
  std::size_t best = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xs[i] = i + 1 == xs.size() ? hi : std::exp(a + (b - a) * static_cast<double>(i) / (grid - 1));
    fs[i] = f(xs[i]);
    if (fs[i] < fs[best]) best = i;
  }
  // Golden-section refinement in log space between the neighbours of the best grid point.
  double l = std::log(xs[best == 0 ? 0 : best - 1]);
  double r = std::log(xs[std::min(best + 1, xs.size() - 1)]);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = r - inv_phi * (r - l);
  double d = l + inv_phi * (r - l);
  double fc = f(std::exp(c));
  double fd = f(std::exp(d));
  while (std::abs(r - l) > rtol) {
    if (fc < fd) {
      r = d;
      d = c;
      fd = fc;
      c = r - inv_phi * (r - l);
      fc = f(std::exp(c));
    } else {
      l = c;
      c = d;
      fc = fd;
      d = l + inv_phi * (r - l);
      fd = f(std::exp(d));
    }
  }
  double x_best = xs[best];
  double f_best = fs[best];
  if (fc < f_best) {
    x_best = std::exp(c);
    f_best = fc;
  }
  if (fd < f_best) {
    x_best = std::exp(d);
    f_best = fd;
  }
  return {x_best, f_best};
}

namespace {

void lower_regret(const RdFunction& rd, int T, Bracket& out) {
  const auto [arg, val] = log_grid_minimize(
      [&](double e) { return -std::min(rd.fn(e), e * T); }, rd.grid_lo(), rd.grid_hi());
  out.lower = std::max(0.0, -val);
  out.lower_arg = arg;
}

void upper_regret(const RdFunction& rd, int T, Bracket& out) {
  const auto [arg, val] = log_grid_minimize([&](double e) { return rd.fn(e) + e * T; }, rd.grid_lo(), rd.grid_hi());
  out.upper = val;
  out.upper_arg = arg;
}

void check_interval(const RdFunction& rd) {
  if (!(rd.eps_max > rd.eps_min) || !rd.fn) throw DomainError(rd.family + ": empty validity interval");
}

}  // namespace

Bracket regret_bracket(const RdFunction& rd, int T) { return regret_bracket(rd, rd, T); }

Bracket regret_bracket(const RdFunction& lower_rd, const RdFunction& upper_rd, int T) {
  if (T < 1) throw DomainError("regret_bracket: T must be >= 1");
  check_interval(lower_rd);
  check_interval(upper_rd);
  Bracket b;
  lower_regret(lower_rd, T, b);
  upper_regret(upper_rd, T, b);
  return b;
}

Bracket sample_complexity_bracket(const RdFunction& rd, double eps) { return sample_complexity_bracket(rd, rd, eps); }

Bracket sample_complexity_bracket(const RdFunction& lower_rd, const RdFunction& upper_rd, double eps) {
  check_interval(lower_rd);
  check_interval(upper_rd);
  if (!upper_rd.contains(eps)) throw DomainError(upper_rd.family + ": epsilon outside the validity interval");
  Bracket b;
  if (lower_rd.contains(eps)) {
    b.lower = lower_rd.fn(eps) / eps;
    b.lower_arg = eps;
  } else {
    b.lower = 0.0;
    b.lower_arg = kNaN;
  }
  const double floor = upper_rd.eps_min > 0.0 ? upper_rd.eps_min : eps * 1e-9;
  const double delta_hi = (eps - floor) * (1.0 - 1e-12);
  const double delta_lo = std::min(eps * 1e-6, delta_hi);
  auto objective = [&](double delta) { return upper_rd.fn(eps - delta) / delta; };
  auto [arg, val] = log_grid_minimize(objective, delta_lo, delta_hi);
  if (upper_rd.contains(eps / 2.0)) {
    const double half = objective(eps / 2.0);
    b.loose_cap = std::ceil(half);
    if (half < val) {
      val = half;
      arg = eps / 2.0;
    }
  }
  b.upper = std::ceil(val);
  b.upper_arg = arg;
  return b;
}

// ---------------------------------------------------------------------------
// Scalar estimation and linear regression

double scalar_r1(double sigma2) {
  require_positive(sigma2, "scalar_r1: sigma2");
  return 0.5 * std::log1p(1.0 / sigma2);
}

Nats scalar_rd(double sigma2, double eps) {
  const double r1 = scalar_r1(sigma2);
  if (!(eps > 0.0) || !(eps < r1)) throw DomainError("scalar_rd: epsilon must lie in (0, R(1))");
  // e^{2 R(1)} - 1 = 1 / sigma2
  return Nats(0.5 * (-std::log(sigma2) - std::log(std::expm1(2.0 * eps))));
}

Nats scalar_rd(double sigma2, double eps, double h_theta) {
  const double gaussian = scalar_rd(sigma2, eps);
  const double excess = std::log(2.0 * std::numbers::pi * std::numbers::e) - 2.0 * h_theta;
  return Nats(gaussian + 0.5 * excess);
}

RdFunction scalar_rd_function(double sigma2, std::optional<double> h_theta) {
  RdFunction rd;
  rd.family = h_theta ? "scalar_upper" : "scalar";
  rd.params = {{"sigma2", sigma2}};
  if (h_theta) rd.params.emplace_back("h_theta", *h_theta);
  rd.eps_min = 0.0;
  rd.eps_max = scalar_r1(sigma2);
  rd.eps_max_inclusive = !h_theta.has_value();
  const double r1 = rd.eps_max;
  rd.fn = [sigma2, h_theta, r1](double eps) {
    if (eps >= r1) return 0.0;
    return h_theta ? scalar_rd(sigma2, eps, *h_theta).value : scalar_rd(sigma2, eps).value;
  };
  return rd;
}

LinRegRd linreg_rd(int d, double sigma2, double eps) {
  if (d < 1) throw DomainError("linreg_rd: d must be >= 1");
  require_positive(sigma2, "linreg_rd: sigma2");
  LinRegRd out;
  if (!(eps > 0.0)) return out;
  const double dd = d;
  if (eps < 0.5 * std::log1p(dd / sigma2)) {
    out.upper = 0.5 * dd * (std::log(dd / sigma2) - std::log(std::expm1(2.0 * eps)));
  }
  if (d > 2 && eps <= 1.0 / (2.0 * (4.0 * dd + sigma2))) {
    out.lower = 0.5 * dd * std::log(dd / (2.0 * (4.0 * dd + sigma2) * eps));
  }
  return out;
}

Nats linreg_rd_upper_entropy_form(int d, double sigma2, double eps, double h_theta, double r1) {
  if (d < 2) throw DomainError("linreg_rd_upper_entropy_form: d must be >= 2");
  require_positive(sigma2, "linreg_rd_upper_entropy_form: sigma2");
  const double dd = d;
  if (!(eps > 0.0) || !(eps < 0.5 * std::log1p(dd / sigma2))) {
    throw DomainError("linreg_rd_upper_entropy_form: epsilon outside [0, 0.5 ln(1 + d/sigma2))");
  }
  const double arg = std::expm1(6.0 * r1) / std::expm1(2.0 * eps) * 2.0 * std::numbers::pi * std::numbers::e *
                     std::exp(-2.0 * h_theta / dd);
  return Nats(0.5 * dd * std::log(arg));
}

RdFunction linreg_rd_lower_function(int d, double sigma2) {
  if (d <= 2) throw DomainError("linreg_rd_lower_function: requires d > 2");
  require_positive(sigma2, "linreg_rd_lower_function: sigma2");
  RdFunction rd;
  rd.family = "linreg_lower";
  rd.params = {{"d", static_cast<double>(d)}, {"sigma2", sigma2}};
  rd.eps_max = 1.0 / (2.0 * (4.0 * d + sigma2));
  rd.eps_max_inclusive = true;
  rd.fn = [d, sigma2](double eps) { return *linreg_rd(d, sigma2, eps).lower; };
  return rd;
}

RdFunction linreg_rd_upper_function(int d, double sigma2) {
  if (d < 1) throw DomainError("linreg_rd_upper_function: d must be >= 1");
  require_positive(sigma2, "linreg_rd_upper_function: sigma2");
  RdFunction rd;
  rd.family = "linreg_upper";
  rd.params = {{"d", static_cast<double>(d)}, {"sigma2", sigma2}};
  rd.eps_max = 0.5 * std::log1p(d / sigma2);
  rd.eps_max_inclusive = true;
  const double emax = rd.eps_max;
  rd.fn = [d, sigma2, emax](double eps) {
    if (eps >= emax) return 0.0;
    return std::max(0.0, *linreg_rd(d, sigma2, eps).upper);
  };
  return rd;
}

Bracket linreg_t_eps(int d, double sigma2, double eps) {
  if (d <= 2) throw DomainError("linreg_t_eps: requires d > 2");
  require_positive(sigma2, "linreg_t_eps: sigma2");
  const double dd = d;
  if (!(eps > 0.0) || eps > 1.0 / (2.0 * (4.0 * dd + sigma2))) {
    throw DomainError("linreg_t_eps: epsilon must lie in (0, 1 / (2 (4d + sigma2))]");
  }
  Bracket b;
  b.lower = dd / (2.0 * eps) * std::log(dd / (2.0 * (4.0 * dd + sigma2) * eps));
  b.upper = dd / eps * std::log(dd / (sigma2 * eps));
  b.lower_arg = b.upper_arg = eps;
  return b;
}

// ---------------------------------------------------------------------------
// Neural-network environments

const char* to_string(NetPrior p) { return p == NetPrior::Independent ? "independent" : "dirichlet"; }

NetPrior net_prior_from_string(const std::string& s) {
  if (s == "independent") return NetPrior::Independent;
  if (s == "dirichlet") return NetPrior::Dirichlet;
  throw ConfigError("unknown prior '" + s + "' (expected independent or dirichlet)");
}

Nats single_layer_rd_independent(int d, int N, double sigma2, double eps) {
  if (d < 1 || N < 1) throw DomainError("single_layer_rd_independent: d and N must be >= 1");
  require_positive(sigma2, "single_layer_rd_independent: sigma2");
  require_positive(eps, "single_layer_rd_independent: epsilon");
  return Nats(0.5 * d * N * log_arg_checked(N / (2.0 * sigma2 * eps), "single_layer_rd_independent"));
}

Nats single_layer_rd_dirichlet(int d, int M, double sigma2, double eps) {
  if (d < 1 || M < 1) throw DomainError("single_layer_rd_dirichlet: d and M must be >= 1");
  require_positive(sigma2, "single_layer_rd_dirichlet: sigma2");
  require_positive(eps, "single_layer_rd_dirichlet: epsilon");
  const double l = log_arg_checked(3.0 * d / (sigma2 * eps), "single_layer_rd_dirichlet");
  return Nats(static_cast<double>(d) * d * M * l * l);
}

Nats dirichlet_teacher_rd(int d, int M, double sigma2, double eps) {
  if (d < 1 || M < 1) throw DomainError("dirichlet_teacher_rd: d and M must be >= 1");
  require_positive(sigma2, "dirichlet_teacher_rd: sigma2");
  require_positive(eps, "dirichlet_teacher_rd: epsilon");
  const double l = log_arg_checked(3.0 * d / (sigma2 * eps), "dirichlet_teacher_rd");
  return Nats(static_cast<double>(d) * M * l * l);
}

RdFunction independent_layer_rd(int n_in, int n_out, double sigma2_eff) {
  if (n_in < 1 || n_out < 1) throw DomainError("independent_layer_rd: dimensions must be >= 1");
  require_positive(sigma2_eff, "independent_layer_rd: sigma2");
  RdFunction rd;
  rd.family = "independent_layer";
  rd.params = {{"n_in", static_cast<double>(n_in)}, {"n_out", static_cast<double>(n_out)}, {"sigma2", sigma2_eff}};
  rd.eps_max = n_out / (2.0 * sigma2_eff);
  rd.fn = [n_in, n_out, sigma2_eff](double eps) {
    return single_layer_rd_independent(n_in, n_out, sigma2_eff, eps).value;
  };
  return rd;
}

std::vector<RdFunction> independent_network_layers(int d, int N, int K, double sigma2) {
  if (K < 1) throw DomainError("independent_network_layers: K must be >= 1");
  std::vector<RdFunction> layers;
  for (int k = 0; k < K; ++k) {
    const int n_in = k == 0 ? d : N;
    const bool last = k == K - 1;
    const int n_out = last ? 1 : N;
    layers.push_back(independent_layer_rd(n_in, n_out, last ? sigma2 : sigma2 * N));
  }
  return layers;
}

Nats multilayer_compose(const std::vector<RdFunction>& layers, double eps) {
  if (layers.empty()) throw DomainError("multilayer_compose: need at least one layer");
  const double share = eps / static_cast<double>(layers.size());
  double total = 0.0;
  for (const auto& layer : layers) total += layer(share);
  return Nats(total);
}

NetworkBounds network_bounds(NetPrior prior, int d, int width_or_m, int K, double sigma2, double eps) {
  if (d < 1 || width_or_m < 1 || K < 1) throw DomainError("network_bounds: d, N or M, K must be >= 1");
  require_positive(sigma2, "network_bounds: sigma2");
  require_positive(eps, "network_bounds: epsilon");
  const double kk = K;
  NetworkBounds out;
  if (prior == NetPrior::Independent) {
    const double n = width_or_m;
    const double params = kk * n * n + d * n;
    out.rd = Nats(0.5 * params * log_arg_checked(kk / (2.0 * sigma2 * eps), "network_bounds(independent)"));
    out.t_eps = params / eps * std::log(kk / (sigma2 * eps));
  } else {
    const double scale = static_cast<double>(d) * d * width_or_m * kk;
    const double l = log_arg_checked(3.0 * kk / (sigma2 * eps), "network_bounds(dirichlet)");
    out.rd = Nats(scale * l * l);
    out.t_eps = 2.0 * scale / eps * std::log(6.0 * kk / (sigma2 * eps));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Stability

double stability_from_moment(const Eigen::MatrixXd& second_moment) {
  if (second_moment.rows() != second_moment.cols()) throw ShapeError("stability_from_moment: matrix must be square");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (second_moment + second_moment.transpose()),
                                                    Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

StabilityConstant stability(const LayerSpec& layer) {
  if (layer.d_in < 1 || layer.d_out < 1) throw ConfigError("stability: dimensions must be >= 1");
  StabilityConstant s;
  const double ratio = static_cast<double>(layer.d_out) / layer.d_in;
  std::ostringstream name;
  name << to_string(layer.prior) << ' ' << layer.d_in << "->" << layer.d_out;
  if (layer.prior == NetPrior::Independent) {
    s.L = ratio;
  } else {
    if (layer.M < 1 || layer.N < layer.M) throw ConfigError("stability: dirichlet layer needs 1 <= M <= N");
    name << " M=" << layer.M << " N=" << layer.N;
    const double m = layer.M;
    const double n = layer.N;
    if (m * m <= n) {
      s.L = ratio;
    } else {
      // E[B^T B] = d_out M (N + M) / ((M + 1) N^2) I and E[A^T A] = (N / d_in) I.
      const double b_diag = layer.d_out * m * (n + m) / ((m + 1.0) * n * n);
      const Eigen::MatrixXd moment = Eigen::MatrixXd::Identity(layer.d_in, layer.d_in) * (b_diag * n / layer.d_in);
      s.L = stability_from_moment(moment);
      s.closed_form = false;
    }
  }
  s.layer = name.str();
  return s;
}

MeanSe mc_layer_stability(int d_in, int d_out, bool relu, int n_draws, std::uint64_t seed, Exec exec) {
  if (d_in < 1 || d_out < 1 || n_draws < 1) throw ConfigError("mc_layer_stability: invalid arguments");
  const auto ratios = map_indexed(
      static_cast<std::size_t>(n_draws),
      [&](std::size_t i) {
        Rng rng = Rng::derive(seed, "stability", i);
        const Eigen::MatrixXd A = standard_normal_matrix(d_out, d_in, rng) / std::sqrt(static_cast<double>(d_in));
        const Eigen::VectorXd x = standard_normal_vector(d_in, rng);
        const Eigen::VectorXd y = standard_normal_vector(d_in, rng);
        Eigen::VectorXd fx = A * x;
        Eigen::VectorXd fy = A * y;
        if (relu) {
          fx = fx.cwiseMax(0.0);
          fy = fy.cwiseMax(0.0);
        }
        return (fx - fy).squaredNorm() / (x - y).squaredNorm();
      },
      exec);
  return mean_se(ratios);
}

Nats multilayer_distortion(const std::vector<double>& L, double layer_mse, double sigma2) {
  require_positive(sigma2, "multilayer_distortion: sigma2");
  if (!(layer_mse >= 0.0)) throw DomainError("multilayer_distortion: mse must be nonnegative");
  double prod = 1.0;
  for (double l : L) {
    if (!(l >= 0.0)) throw DomainError("multilayer_distortion: stability constants must be nonnegative");
    prod *= l;
  }
  return Nats(0.5 * std::log1p(prod * layer_mse / sigma2));
}

// ---------------------------------------------------------------------------
// Proxies

AdditiveNoiseProxy make_proxy(ProxyFamily family, int d, double sigma2, double eps) {
  require_positive(sigma2, "make_proxy: sigma2");
  if (!(eps > 0.0)) throw DomainError("make_proxy: epsilon must be positive");
  const double dim = family == ProxyFamily::Scalar ? 1.0 : static_cast<double>(d);
  if (dim < 1.0) throw DomainError("make_proxy: d must be >= 1");
  const double a = sigma2 * std::expm1(2.0 * eps);
  const double denom = dim - a;
  if (!(denom > 0.0)) throw DomainError("make_proxy: delta^2 would be negative for this epsilon");
  return AdditiveNoiseProxy{a / denom, eps};
}

ProxyReport proxy_check(ProxyFamily family, int d, double sigma2, double eps, int mc_samples, std::uint64_t seed,
                        Exec exec) {
  if (mc_samples < 2) throw ConfigError("proxy_check: need at least 2 samples");
  const int dim = family == ProxyFamily::Scalar ? 1 : d;
  const AdditiveNoiseProxy proxy = make_proxy(family, dim, sigma2, eps);
  const double delta = std::sqrt(proxy.delta2);
  const double shrink = 1.0 / (1.0 + proxy.delta2);
  const double v = proxy.delta2 * shrink;
  const auto kl = map_indexed(
      static_cast<std::size_t>(mc_samples),
      [&](std::size_t i) {
        Rng rng = Rng::derive(seed, "proxy", i);
        const Eigen::VectorXd theta = standard_normal_vector(dim, rng);
        const Eigen::VectorXd tilde = theta + delta * standard_normal_vector(dim, rng);
        // The scalar environment observes x = 1; regression draws x ~ N(0, I).
        const Eigen::VectorXd x =
            family == ProxyFamily::Scalar ? Eigen::VectorXd::Ones(1) : standard_normal_vector(dim, rng);
        const GaussianDist target{theta.dot(x), sigma2};
        const GaussianDist proxy_pred{shrink * tilde.dot(x), sigma2 + v * x.squaredNorm()};
        return kl_gaussian(target, proxy_pred).value;
      },
      exec);
  const MeanSe m = mean_se(kl);
  ProxyReport r;
  r.family = family;
  r.d = dim;
  r.sigma2 = sigma2;
  r.eps = eps;
  r.delta2 = proxy.delta2;
  r.distortion = m.mean;
  r.se = m.se;
  r.rate_cap = 0.5 * dim * std::log1p(1.0 / proxy.delta2);
  r.within = m.mean <= eps + 3.0 * m.se;
  return r;
}

MultinomialReport multinomial_proxy_check(int M, int N, int r, double c, double alpha, int samples, std::uint64_t seed,
                                          Exec exec) {
  if (M < 1 || N < 1 || r < 1 || samples < 2) throw ConfigError("multinomial_proxy_check: invalid arguments");
  require_positive(c, "multinomial_proxy_check: c");
  require_positive(alpha, "multinomial_proxy_check: alpha");
  const double scale = std::sqrt(c);
  const auto err = map_indexed(
      static_cast<std::size_t>(samples),
      [&](std::size_t i) {
        Rng rng = Rng::derive(seed, "multinomial", i);
        const Eigen::MatrixXd A = scaled_dirichlet_rows(M, N, alpha, scale, SignMode::PerRow, rng);
        const Eigen::MatrixXd Aq = multinomial_quantize_rows(A, scale, r, rng);
        const Eigen::VectorXd x = standard_normal_vector(N, rng);
        return ((A - Aq) * x).squaredNorm();
      },
      exec);
  const MeanSe m = mean_se(err);
  MultinomialReport rep;
  rep.mse = m.mean;
  rep.se = m.se;
  rep.bound = scale * M / r;
  rep.within = m.mean <= rep.bound + 3.0 * m.se;
  rep.corrected_bound = c * M / r;
  rep.within_corrected = m.mean <= rep.corrected_bound + 3.0 * m.se;
  return rep;
}

// ---------------------------------------------------------------------------
// Curves

std::vector<double> log_spaced(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi >= lo) || n < 1) throw DomainError("log_spaced: invalid range");
  std::vector<double> out(static_cast<std::size_t>(n));
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (n - 1));
  out.back() = hi;
  return out;
}

std::vector<CurveRow> rd_curve(const RdFunction& rd, const std::vector<double>& eps_grid) {
  std::vector<CurveRow> rows;
  const std::string params = rd.param_string();
  for (double e : eps_grid) {
    CurveRow row{rd.family, params, e, kNaN, true};
    if (rd.contains(e)) {
      try {
        row.value = rd.fn(e);
        row.vacuous = !std::isfinite(row.value);
      } catch (const DomainError&) {
        row.vacuous = true;
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_curve_csv(std::ostream& os, const std::vector<CurveRow>& rows) {
  os << "family,params,epsilon,value,status\n";
  os.precision(17);
  for (const auto& r : rows) {
    os << r.family << ',' << r.params << ',' << r.epsilon << ',';
    if (r.vacuous) {
      os << ",vacuous\n";
    } else {
      os << r.value << ",ok\n";
    }
  }
}

}  // namespace infolearn
