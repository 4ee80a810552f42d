#include "infolearn/cli.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "infolearn/bayes_agent.hpp"
#include "infolearn/bounds.hpp"
#include "infolearn/errors.hpp"
#include "infolearn/experiment.hpp"
#include "infolearn/misspec.hpp"
#include "infolearn/parallel.hpp"
#include "infolearn/rng.hpp"

namespace infolearn {

namespace fs = std::filesystem;
using nlohmann::json;

std::string config_hash(const std::string& canonical_config) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(canonical_config);
  return os.str();
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Common {
  std::string out = "out";
  int workers = 0;
  std::string format = "csv";
  std::uint64_t seed = 0;
};

void add_common(CLI::App* sub, Common& c, bool stochastic) {
  sub->add_option("--out", c.out, "Output directory")->configurable(false);
  sub->add_option("--workers", c.workers, "Worker threads (0: INFOLEARN_WORKERS or all cores)")
      ->configurable(false)
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--format", c.format, "Result file format")->check(CLI::IsMember({"csv", "json"}));
  if (stochastic) sub->add_option("--seed", c.seed, "Master seed")->required();
}

json csv_to_json(const std::string& csv, const std::string& hash) {
  json doc;
  doc["manifest"] = hash;
  json rows = json::array();
  std::istringstream is(csv);
  std::string line;
  std::vector<std::string> columns;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
      const auto pos = line.find(',', start);
      fields.push_back(line.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    if (columns.empty()) {
      columns = fields;
      continue;
    }
    json row = json::object();
    for (std::size_t i = 0; i < columns.size() && i < fields.size(); ++i) {
      const std::string& f = fields[i];
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (f.empty() || f == "nan" || f == "-nan") {
        row[columns[i]] = nullptr;
      } else if (ec == std::errc() && ptr == f.data() + f.size()) {
        row[columns[i]] = std::isfinite(v) ? json(v) : json(nullptr);
      } else {
        row[columns[i]] = f;
      }
    }
    rows.push_back(std::move(row));
  }
  doc["columns"] = columns;
  doc["rows"] = std::move(rows);
  return doc;
}

std::string canonical_value(const std::string& v) {
  if (v.find_first_of(".eE") != std::string::npos) {
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec == std::errc() && ptr == v.data() + v.size() && std::isfinite(x)) {
      char buf[32];
      const auto res = std::to_chars(buf, buf + sizeof buf, x);
      return std::string(buf, res.ptr);
    }
  }
  long long i = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), i);
  if (ec == std::errc() && ptr == v.data() + v.size()) return v;
  unsigned long long u = 0;
  const auto [uptr, uec] = std::from_chars(v.data(), v.data() + v.size(), u);
  if (uec == std::errc() && uptr == v.data() + v.size()) return v;
  return "\"" + v + "\"";
}

/// TOML document of every configurable option of `sub`, with values
/// normalized so that equal configurations give identical text.
std::string canonical_config(const CLI::App& sub) {
  std::string doc = "[" + sub.get_name() + "]\n";
  for (const CLI::Option* opt : sub.get_options()) {
    if (!opt->get_configurable() || opt->get_single_name().empty() || opt->get_single_name() == "help") continue;
    std::vector<std::string> values = opt->results();
    if (opt->count() == 0) {
      std::string def = opt->get_default_str();
      if (!def.empty() && def.front() == '[' && def.back() == ']') def = def.substr(1, def.size() - 2);
      values.clear();
      std::istringstream is(def);
      std::string item;
      while (std::getline(is, item, ',')) values.push_back(item);
    }
    if (values.empty()) continue;
    doc += opt->get_single_name() + "=";
    if (opt->get_items_expected_max() > 1) {
      doc += "[";
      for (std::size_t i = 0; i < values.size(); ++i) doc += (i ? "," : "") + canonical_value(values[i]);
      doc += "]";
    } else {
      doc += canonical_value(values.back());
    }
    doc += '\n';
  }
  return doc;
}

/// One invocation's output directory: manifest, config and result files.
class Run {
 public:
  Run(const CLI::App& sub, const Common& common, bool stochastic)
      : dir_(common.out), format_(common.format), start_(std::chrono::steady_clock::now()) {
    const std::string canonical = canonical_config(sub);
    hash_ = config_hash(canonical);
    fs::create_directories(dir_);
    manifest_["config_hash"] = hash_;
    manifest_["master_seed"] = stochastic ? json(common.seed) : json(nullptr);
    manifest_["artifact_version"] = kArtifactVersion;
    manifest_["subcommand"] = sub.get_name();
    manifest_["workers"] = resolve_workers(common.workers);
    manifest_["wall_time_s"] = 0.0;
    manifest_["status"] = "running";
    manifest_["files"] = json::array();
    write_manifest();
    write_file("config.toml", canonical);
  }

  const std::string& hash() const { return hash_; }
  const fs::path& dir() const { return dir_; }

  /// Writes a result table given as CSV text, converted to JSON if requested.
  void emit(const std::string& name, const std::string& csv) {
    if (format_ == "json") {
      write_result(name + ".json", csv_to_json(csv, hash_).dump(1) + "\n");
    } else {
      write_result(name + ".csv", "# manifest=" + hash_ + "\n" + csv);
    }
  }

  void emit_json(const std::string& name, json doc) {
    doc["manifest"] = hash_;
    write_result(name + ".json", doc.dump(1) + "\n");
  }

  void finish(bool aborted) {
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start_;
    manifest_["wall_time_s"] = elapsed.count();
    manifest_["status"] = aborted ? "aborted" : "completed";
    write_manifest();
  }

 private:
  void write_file(const std::string& name, const std::string& text) const {
    std::ofstream os(dir_ / name, std::ios::binary);
    if (!os) throw InputError("cannot write " + (dir_ / name).string());
    os << text;
  }
  void write_result(const std::string& name, const std::string& text) {
    write_file(name, text);
    manifest_["files"].push_back(name);
    write_manifest();
  }
  void write_manifest() const { write_file("manifest.json", manifest_.dump(1) + "\n"); }

  fs::path dir_;
  std::string format_;
  std::string hash_;
  json manifest_;
  std::chrono::steady_clock::time_point start_;
};

template <typename Fn>
std::string to_csv(Fn&& fn) {
  std::ostringstream os;
  fn(os);
  return os.str();
}

std::string fmt(double v) {
  if (!std::isfinite(v)) return "";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// bounds

struct BoundsArgs {
  std::string family = "scalar";
  double sigma2 = 0.1;
  int d = 10;
  int N = 4;
  int M = 2;
  int K = 2;
  std::optional<double> h_theta;
  std::optional<double> eps_lo;
  std::optional<double> eps_hi;
  int points = 50;
  std::vector<int> T{1, 10, 100};
};

int cmd_bounds(const CLI::App& sub, const Common& common, const BoundsArgs& a, std::ostream& out) {
  Run run(sub, common, false);
  std::vector<CurveRow> curve;
  std::ostringstream sc;
  sc.precision(17);
  sc << "family,params,epsilon,lower,upper,loose_cap,status\n";
  std::ostringstream rg;
  rg.precision(17);
  rg << "family,params,T,lower,upper\n";

  auto sc_row = [&](const std::string& fam, const std::string& params, double eps, auto&& bracket) {
    try {
      const Bracket b = bracket();
      sc << fam << ',' << params << ',' << eps << ',' << fmt(b.lower) << ',' << fmt(b.upper) << ','
         << (b.loose_cap ? fmt(*b.loose_cap) : std::string()) << ",ok\n";
    } catch (const DomainError&) {
      sc << fam << ',' << params << ',' << eps << ",,,,vacuous\n";
    }
  };

  if (a.family == "scalar" || a.family == "linreg") {
    std::vector<RdFunction> fns;
    if (a.family == "scalar") {
      fns.push_back(scalar_rd_function(a.sigma2, a.h_theta));
    } else {
      if (a.d > 2) fns.push_back(linreg_rd_lower_function(a.d, a.sigma2));
      fns.push_back(linreg_rd_upper_function(a.d, a.sigma2));
    }
    const RdFunction& hi_fn = fns.back();
    const double lo = a.eps_lo.value_or(hi_fn.grid_hi() * 1e-4);
    const double hi = a.eps_hi.value_or(hi_fn.grid_hi());
    const auto grid = log_spaced(lo, hi, a.points);
    for (const auto& f : fns) {
      auto rows = rd_curve(f, grid);
      curve.insert(curve.end(), rows.begin(), rows.end());
    }
    const RdFunction& lower = fns.front();
    const std::string params = hi_fn.param_string();
    for (double eps : grid) {
      if (a.family == "scalar") {
        sc_row("scalar", params, eps, [&] { return sample_complexity_bracket(hi_fn, eps); });
      } else {
        sc_row("linreg", params, eps, [&] { return linreg_t_eps(a.d, a.sigma2, eps); });
      }
    }
    for (int T : a.T) {
      const Bracket b = regret_bracket(lower, hi_fn, T);
      rg << a.family << ',' << params << ',' << T << ',' << fmt(b.lower) << ',' << fmt(b.upper) << '\n';
    }
  } else {
    const NetPrior prior = net_prior_from_string(a.family);
    const int width = prior == NetPrior::Independent ? a.N : a.M;
    std::ostringstream ps;
    ps.precision(10);
    ps << "d=" << a.d << (prior == NetPrior::Independent ? ";N=" : ";M=") << width << ";K=" << a.K
       << ";sigma2=" << a.sigma2;
    const double lo = a.eps_lo.value_or(1e-4);
    const double hi = a.eps_hi.value_or(1.0);
    for (double eps : log_spaced(lo, hi, a.points)) {
      CurveRow row{a.family, ps.str(), eps, kNaN, true};
      try {
        const NetworkBounds nb = network_bounds(prior, a.d, width, a.K, a.sigma2, eps);
        row.value = nb.rd;
        row.vacuous = !std::isfinite(row.value);
        sc << a.family << ',' << ps.str() << ',' << eps << ",," << fmt(nb.t_eps) << ",,ok\n";
      } catch (const DomainError&) {
        sc << a.family << ',' << ps.str() << ',' << eps << ",,,,vacuous\n";
      }
      curve.push_back(row);
    }
  }
  run.emit("rd", to_csv([&](std::ostream& os) { write_curve_csv(os, curve); }));
  run.emit("sample_complexity", sc.str());
  if (a.family == "scalar" || a.family == "linreg") run.emit("regret_bracket", rg.str());
  run.finish(false);
  out << "bounds: " << curve.size() << " rows written to " << run.dir().string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// regret

struct RegretArgs {
  std::string family = "scalar";
  double sigma2 = 0.1;
  int d = 10;
  std::string prior = "gaussian";
  int T = 100;
  int trials = 1000;
  std::string estimator = "analytic";
};

int cmd_regret(const CLI::App& sub, const Common& common, const RegretArgs& a, std::ostream& out) {
  Run run(sub, common, true);
  RegretOptions opts;
  opts.estimator = a.estimator == "sampled" ? StepEstimator::Sampled : StepEstimator::Analytic;
  RegretCurve curve;
  if (a.family == "scalar") {
    ScalarEnvSpec spec{a.sigma2, a.prior == "uniform" ? ScalarPrior::Uniform : ScalarPrior::Gaussian};
    curve = simulate_regret(spec, a.T, a.trials, common.seed, opts);
  } else {
    LinRegSpec spec;
    spec.d = a.d;
    spec.sigma2 = a.sigma2;
    curve = simulate_regret(spec, a.T, a.trials, common.seed, opts);
  }
  run.emit("regret", to_csv([&](std::ostream& os) { curve.write_csv(os); }));
  run.finish(false);
  out << "regret: R(" << a.T << ") = " << curve.total() << " +- " << curve.total_se() << " nats\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// misspec

struct MisspecArgs {
  std::string kind = "mean";
  int d = 4;
  double sigma2 = 0.1;
  double mu_norm = 1.0;
  std::vector<int> t{16, 32, 64, 128, 256};
  int paths = 200;
  std::string model = "marginalized";
  int omitted = -1;
  std::vector<double> fixed_theta;
};

int cmd_misspec(const CLI::App& sub, const Common& common, const MisspecArgs& a, std::ostream& out) {
  Run run(sub, common, true);
  LinRegSpec base;
  base.d = a.d;
  base.sigma2 = a.sigma2;
  ExcessCurve curve;
  if (a.kind == "mean") {
    MisspecMeanConfig cfg{base, Eigen::VectorXd::Constant(a.d, a.mu_norm / std::sqrt(static_cast<double>(a.d)))};
    curve = mean_misspec_curve(cfg, a.t, a.paths, common.seed);
  } else {
    MissingFeatureConfig cfg;
    cfg.base = base;
    cfg.omitted = a.omitted;
    cfg.model = a.model == "nominal" ? MissingFeatureModel::Nominal : MissingFeatureModel::Marginalized;
    if (!a.fixed_theta.empty()) {
      if (static_cast<int>(a.fixed_theta.size()) != a.d) throw ConfigError("--fixed-theta needs d values");
      cfg.fixed_theta = Eigen::Map<const Eigen::VectorXd>(a.fixed_theta.data(), a.d);
    }
    curve = missing_feature_curve(cfg, a.t, a.paths, common.seed);
  }
  run.emit("excess", to_csv([&](std::ostream& os) { curve.write_csv(os); }));
  run.finish(false);
  out << "misspec: " << curve.t.size() << " rows written to " << run.dir().string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// proxy-check

struct ProxyArgs {
  std::string family = "scalar";
  int d = 4;
  double sigma2 = 0.1;
  double eps = 0.05;
  int samples = 100000;
  int M = 4;
  int N = 64;
  int r = 16;
  double c = 1.0;
  std::optional<double> alpha;
};

int cmd_proxy(const CLI::App& sub, const Common& common, const ProxyArgs& a, std::ostream& out) {
  Run run(sub, common, true);
  std::ostringstream os;
  os.precision(17);
  bool within = false;
  if (a.family == "multinomial") {
    const double alpha = a.alpha.value_or(a.c / a.M);
    const MultinomialReport r = multinomial_proxy_check(a.M, a.N, a.r, a.c, alpha, a.samples, common.seed);
    os << "family,M,N,r,c,alpha,mse,se,bound,within,corrected_bound,within_corrected\n";
    os << "multinomial," << a.M << ',' << a.N << ',' << a.r << ',' << a.c << ',' << alpha << ',' << r.mse << ','
       << r.se << ',' << r.bound << ',' << (r.within ? 1 : 0) << ',' << r.corrected_bound << ','
       << (r.within_corrected ? 1 : 0) << '\n';
    within = r.within;
  } else {
    const ProxyFamily fam = a.family == "linreg" ? ProxyFamily::LinReg : ProxyFamily::Scalar;
    const ProxyReport r = proxy_check(fam, a.d, a.sigma2, a.eps, a.samples, common.seed);
    os << "family,d,sigma2,eps,delta2,distortion,se,rate_cap,within\n";
    os << a.family << ',' << r.d << ',' << r.sigma2 << ',' << r.eps << ',' << r.delta2 << ',' << r.distortion << ','
       << r.se << ',' << r.rate_cap << ',' << (r.within ? 1 : 0) << '\n';
    within = r.within;
  }
  run.emit("proxy", os.str());
  run.finish(false);
  out << "proxy-check: " << (within ? "within" : "outside") << " the distortion budget\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// teach

struct TeachArgs {
  std::string prior = "independent";
  std::vector<int> d{1};
  std::vector<int> N{1};
  std::vector<int> M{1};
  double sigma = 0.1;
  std::vector<double> targets{1.0, 0.5};
  int trials = 8;
  int t_min = 1;
  int t_cap = 1 << 14;
  int test_size = 10000;
  int max_epochs = 1500;
  int batch_size = 64;
  int hidden_layers = 1;
  double width_tol = 0.25;
};

int cmd_teach(const CLI::App& sub, const Common& common, const TeachArgs& a, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg;
  cfg.trials = a.trials;
  cfg.t_min = a.t_min;
  cfg.t_cap = a.t_cap;
  cfg.test_size = a.test_size;
  cfg.targets = a.targets;
  cfg.width_tol = a.width_tol;
  cfg.train.max_epochs = a.max_epochs;
  cfg.train.batch_size = a.batch_size;
  cfg.train.hidden_layers = a.hidden_layers;
  cfg.validate();
  std::vector<Gamma> grid;
  const NetPrior prior = net_prior_from_string(a.prior);
  for (int d : a.d) {
    if (prior == NetPrior::Independent) {
      for (int n : a.N) grid.push_back(Gamma::independent(d, n, a.sigma));
    } else {
      for (int m : a.M) grid.push_back(Gamma::dirichlet(d, m, a.sigma, sub.count("--N") ? a.N.front() : 0));
    }
  }

  Run run(sub, common, true);
  const SweepResult res = sweep(grid, cfg, common.seed, [&](const CellSummary& c) {
    err << "teach: " << c.gamma.key() << " T=" << c.T << " error=" << c.mean_error << " ok=" << c.n_ok
        << " aborted=" << c.n_aborted << '\n';
  });
  run.emit("trials", to_csv([&](std::ostream& os) { write_trials_csv(os, res.records, ""); }));
  run.emit("table", to_csv([&](std::ostream& os) { write_table_csv(os, res.table, ""); }));
  bool aborted = false;
  for (const auto& r : res.records) aborted = aborted || r.status == TrialStatus::Aborted;
  run.finish(aborted);
  out << "teach: " << res.records.size() << " trials, " << res.table.size() << " table rows\n";
  return aborted ? kExitAborted : kExitOk;
}

// ---------------------------------------------------------------------------
// report

struct ReportArgs {
  std::string in;
};

std::ifstream open_input(const fs::path& p) {
  std::ifstream is(p);
  if (!is) throw InputError("cannot read " + p.string());
  return is;
}

int cmd_report(const CLI::App& sub, Common common, const ReportArgs& a, std::ostream& out) {
  const fs::path in_dir(a.in);
  if (!sub.count("--out")) common.out = (in_dir / "report").string();
  std::ifstream trials_in = open_input(in_dir / "trials.csv");
  std::ifstream table_in = open_input(in_dir / "table.csv");
  const auto records = read_trials_csv(trials_in);
  const auto table = read_table_csv(table_in);

  Run run(sub, common, false);
  json doc;
  doc["source"] = in_dir.string();
  json fits = json::array();
  std::map<std::string, std::vector<TableEntry>> by_prior;
  for (const auto& e : table) by_prior[to_string(e.gamma.prior)].push_back(e);
  for (const auto& [prior, entries] : by_prior) {
    json f;
    f["prior"] = prior;
    f["reference_constant"] = reference_constant(net_prior_from_string(prior));
    int resolved = 0;
    for (const auto& e : entries) resolved += e.resolved ? 1 : 0;
    f["resolved_cells"] = resolved;
    try {
      const ScalingFit fit = fit_scaling(entries);
      f["status"] = "ok";
      f["slope"] = fit.slope;
      f["intercept"] = fit.intercept;
      f["unit_constant"] = fit.unit_constant;
      f["ratio_to_reference"] = fit.ratio;
      f["residuals"] = fit.residuals;
    } catch (const DomainError&) {
      f["status"] = "insufficient_cells";
    }
    fits.push_back(std::move(f));
  }
  doc["scaling_fits"] = std::move(fits);

  json q;
  if (!records.empty()) {
    const QReport qr = q_report(records);
    q["slope"] = std::isfinite(qr.slope) ? json(qr.slope) : json(nullptr);
    q["reference_ratio"] = qr.reference_ratio;
    json rows = json::array();
    for (const auto& r : qr.rows) rows.push_back({{"T", r.T}, {"mean_Q", r.mean_Q}, {"ratio", r.ratio}, {"n", r.n}});
    q["rows"] = std::move(rows);
  }
  doc["queries"] = std::move(q);
  run.emit_json("report", std::move(doc));
  run.finish(false);
  out << "report: written to " << run.dir().string() << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Information-theoretic learning bounds and experiments", "infolearn"};
  app.option_defaults()->always_capture_default();
  app.set_config("--config", "", "TOML config file; flags override it");
  app.require_subcommand(1);
  app.set_version_flag("--version", kArtifactVersion);

  Common c_bounds, c_regret, c_misspec, c_proxy, c_teach, c_report;

  BoundsArgs ba;
  auto* bounds = app.add_subcommand("bounds", "Rate-distortion, regret and sample-complexity curves")->configurable();
  bounds->add_option("--family", ba.family)->check(CLI::IsMember({"scalar", "linreg", "independent", "dirichlet"}));
  bounds->add_option("--sigma2", ba.sigma2)->check(CLI::PositiveNumber);
  bounds->add_option("--d", ba.d)->check(CLI::PositiveNumber);
  bounds->add_option("--N", ba.N)->check(CLI::PositiveNumber);
  bounds->add_option("--M", ba.M)->check(CLI::PositiveNumber);
  bounds->add_option("--K", ba.K)->check(CLI::PositiveNumber);
  bounds->add_option("--h-theta", ba.h_theta, "Differential entropy of a non-Gaussian scalar prior");
  bounds->add_option("--eps-lo", ba.eps_lo)->check(CLI::PositiveNumber);
  bounds->add_option("--eps-hi", ba.eps_hi)->check(CLI::PositiveNumber);
  bounds->add_option("--points", ba.points)->check(CLI::Range(2, 1000000));
  bounds->add_option("--T", ba.T, "Horizons for the regret bracket")->delimiter(',');
  add_common(bounds, c_bounds, false);

  RegretArgs ra;
  auto* regret = app.add_subcommand("regret", "Monte Carlo regret of the Bayes-optimal agent")->configurable();
  regret->add_option("--family", ra.family)->check(CLI::IsMember({"scalar", "linreg"}));
  regret->add_option("--sigma2", ra.sigma2)->check(CLI::PositiveNumber);
  regret->add_option("--d", ra.d)->check(CLI::PositiveNumber);
  regret->add_option("--prior", ra.prior)->check(CLI::IsMember({"gaussian", "uniform"}));
  regret->add_option("--T", ra.T)->check(CLI::PositiveNumber);
  regret->add_option("--trials", ra.trials)->check(CLI::PositiveNumber);
  regret->add_option("--estimator", ra.estimator)->check(CLI::IsMember({"analytic", "sampled"}));
  add_common(regret, c_regret, true);

  MisspecArgs ma;
  auto* misspec = app.add_subcommand("misspec", "Excess error of a misspecified agent")->configurable();
  misspec->add_option("--kind", ma.kind)->check(CLI::IsMember({"mean", "missing-feature"}));
  misspec->add_option("--d", ma.d)->check(CLI::PositiveNumber);
  misspec->add_option("--sigma2", ma.sigma2)->check(CLI::PositiveNumber);
  misspec->add_option("--mu-norm", ma.mu_norm, "Norm of the agent's prior mean (spread evenly)");
  misspec->add_option("--t", ma.t, "History lengths")->delimiter(',');
  misspec->add_option("--paths", ma.paths)->check(CLI::PositiveNumber);
  misspec->add_option("--model", ma.model)->check(CLI::IsMember({"nominal", "marginalized"}));
  misspec->add_option("--omitted", ma.omitted, "Omitted coordinate (-1: last)");
  misspec->add_option("--fixed-theta", ma.fixed_theta, "Fixed parameter vector instead of prior draws")
      ->delimiter(',');
  add_common(misspec, c_misspec, true);

  ProxyArgs pa;
  auto* proxy = app.add_subcommand("proxy-check", "Monte Carlo check of a proxy construction")->configurable();
  proxy->add_option("--family", pa.family)->check(CLI::IsMember({"scalar", "linreg", "multinomial"}));
  proxy->add_option("--d", pa.d)->check(CLI::PositiveNumber);
  proxy->add_option("--sigma2", pa.sigma2)->check(CLI::PositiveNumber);
  proxy->add_option("--eps", pa.eps)->check(CLI::PositiveNumber);
  proxy->add_option("--samples", pa.samples)->check(CLI::PositiveNumber);
  proxy->add_option("--M", pa.M)->check(CLI::PositiveNumber);
  proxy->add_option("--N", pa.N)->check(CLI::PositiveNumber);
  proxy->add_option("--r", pa.r)->check(CLI::PositiveNumber);
  proxy->add_option("--c", pa.c)->check(CLI::PositiveNumber);
  proxy->add_option("--alpha", pa.alpha, "Dirichlet concentration, default c / M")->check(CLI::PositiveNumber);
  add_common(proxy, c_proxy, true);

  TeachArgs ta;
  auto* teach = app.add_subcommand("teach", "Teacher-student sample-complexity sweep")->configurable();
  teach->add_option("--prior", ta.prior)->check(CLI::IsMember({"independent", "dirichlet"}));
  teach->add_option("--d", ta.d, "Input dimensions")->delimiter(',')->check(CLI::PositiveNumber);
  teach->add_option("--N", ta.N, "Hidden widths")->delimiter(',')->check(CLI::PositiveNumber);
  teach->add_option("--M", ta.M, "Dirichlet M values")->delimiter(',')->check(CLI::PositiveNumber);
  teach->add_option("--sigma", ta.sigma, "Noise standard deviation")->check(CLI::PositiveNumber);
  teach->add_option("--targets", ta.targets, "Error targets")->delimiter(',')->check(CLI::PositiveNumber);
  teach->add_option("--trials", ta.trials)->check(CLI::PositiveNumber);
  teach->add_option("--t-min", ta.t_min)->check(CLI::PositiveNumber);
  teach->add_option("--t-cap", ta.t_cap)->check(CLI::PositiveNumber);
  teach->add_option("--test-size", ta.test_size)->check(CLI::PositiveNumber);
  teach->add_option("--max-epochs", ta.max_epochs)->check(CLI::PositiveNumber);
  teach->add_option("--batch-size", ta.batch_size)->check(CLI::PositiveNumber);
  teach->add_option("--hidden-layers", ta.hidden_layers)->check(CLI::PositiveNumber);
  teach->add_option("--width-tol", ta.width_tol)->check(CLI::PositiveNumber);
  add_common(teach, c_teach, true);

  ReportArgs rpa;
  auto* report = app.add_subcommand("report", "Scaling fit and query report for a teach run")->configurable();
  report->add_option("--in", rpa.in, "Directory written by teach")->required();
  add_common(report, c_report, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  int code = kExitOk;
  try {
    auto dispatch = [&](int workers, auto&& fn) { with_workers(workers, [&] { code = fn(); }); };
    if (bounds->parsed()) {
      dispatch(c_bounds.workers, [&] { return cmd_bounds(*bounds, c_bounds, ba, out); });
    } else if (regret->parsed()) {
      dispatch(c_regret.workers, [&] { return cmd_regret(*regret, c_regret, ra, out); });
    } else if (misspec->parsed()) {
      dispatch(c_misspec.workers, [&] { return cmd_misspec(*misspec, c_misspec, ma, out); });
    } else if (proxy->parsed()) {
      dispatch(c_proxy.workers, [&] { return cmd_proxy(*proxy, c_proxy, pa, out); });
    } else if (teach->parsed()) {
      dispatch(c_teach.workers, [&] { return cmd_teach(*teach, c_teach, ta, out, err); });
    } else if (report->parsed()) {
      dispatch(c_report.workers, [&] { return cmd_report(*report, c_report, rpa, out); });
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return code;
}

}  // namespace infolearn
