#include "infolearn/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "infolearn/errors.hpp"

namespace infolearn {

// ---------------------------------------------------------------------------
// Gamma

Gamma Gamma::independent(int d, int N, double sigma) {
  Gamma g{NetPrior::Independent, d, N, 0, sigma};
  g.validate();
  return g;
}

Gamma Gamma::dirichlet(int d, int M, double sigma, int N) {
  Gamma g{NetPrior::Dirichlet, d, N > 0 ? N : 4 * std::max(d, M), M, sigma};
  g.validate();
  return g;
}

double Gamma::regressor() const {
  return prior == NetPrior::Independent ? static_cast<double>(d) * N : static_cast<double>(d) * M;
}

std::string Gamma::key() const {
  std::ostringstream os;
  os.precision(17);
  os << to_string(prior) << "/d=" << d << "/N=" << N << "/M=" << M << "/sigma=" << sigma;
  return os.str();
}

void Gamma::validate() const {
  if (d < 1 || N < 1) throw ConfigError("gamma: d and N must be >= 1");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ConfigError("gamma: sigma must be positive");
  if (prior == NetPrior::Dirichlet && (M < 1 || M > N)) throw ConfigError("gamma: dirichlet needs 1 <= M <= N");
}

TeacherNetwork make_teacher(const Gamma& gamma, std::uint64_t seed) {
  gamma.validate();
  const double s2 = gamma.sigma * gamma.sigma;
  if (gamma.prior == NetPrior::Independent) {
    return sample_teacher(experiment_independent_teacher(gamma.d, gamma.N, s2), seed);
  }
  return sample_teacher(experiment_dirichlet_teacher(gamma.d, gamma.M, gamma.N, s2), seed);
}

void ExperimentConfig::validate() const {
  train.validate();
  if (test_size < 1 || trials < 1 || t_min < 1 || t_cap < t_min) throw ConfigError("experiment: invalid sizes");
  if (targets.empty()) throw ConfigError("experiment: need at least one target");
  for (double t : targets) {
    if (!(t > 0.0)) throw ConfigError("experiment: targets must be positive");
  }
  if (!(width_tol > 0.0)) throw ConfigError("experiment: width tolerance must be positive");
}

// ---------------------------------------------------------------------------
// Trials

std::uint64_t trial_seed(std::uint64_t master, const Gamma& gamma, int T, int trial) {
  return Rng::hash_seed(master, "trial/" + gamma.key() + "/T=" + std::to_string(T), static_cast<std::uint64_t>(trial));
}

TrialRecord run_trial(const Gamma& gamma, int T, std::uint64_t seed, const ExperimentConfig& config, int trial_index) {
  if (T < 1) throw ConfigError("run_trial: T must be >= 1");
  gamma.validate();
  TrialRecord rec;
  rec.gamma = gamma;
  rec.T = T;
  rec.trial = trial_index;
  rec.seed = seed;

  const TeacherNetwork teacher = make_teacher(gamma, seed);
  Rng data_rng = Rng::derive(seed, "data");
  Dataset data;
  data.X = standard_normal_matrix(gamma.d, T, data_rng);
  data.y = teacher.forward_batch(data.X);
  for (Eigen::Index i = 0; i < data.y.size(); ++i) data.y(i) += gamma.sigma * data_rng.normal();

  Rng split_rng = Rng::derive(seed, "split");
  const auto [train_set, val_set] = split_dataset(data, config.train.val_fraction, split_rng);

  QueryCounter queries;
  std::map<int, MlpModel> trained;
  auto evaluate = [&](int width) {
    std::vector<int> widths{gamma.d};
    for (int k = 0; k < config.train.hidden_layers; ++k) widths.push_back(width);
    widths.push_back(1);
    Rng init_rng = Rng::derive(seed, "init", static_cast<std::uint64_t>(width));
    Rng train_rng = Rng::derive(seed, "train", static_cast<std::uint64_t>(width));
    TrainResult r = train(mlp_init(widths, init_rng), train_set, val_set, config.train, train_rng, queries);
    if (r.status != TrainStatus::Ok) ++rec.nonfinite_widths;
    if (!std::isfinite(r.best_val_loss)) return std::numeric_limits<double>::infinity();
    trained.emplace(width, std::move(r.model));
    return r.best_val_loss;
  };
  const auto [lo, hi] = width_range(T, gamma.d, gamma.N);
  const WidthSearchResult search = golden_width_search(lo, hi, config.width_tol, evaluate);
  rec.widths_evaluated = static_cast<int>(search.evaluations.size());
  rec.Q = queries.q;

  if (!std::isfinite(search.best_value)) {
    rec.status = TrialStatus::Aborted;
    rec.error = std::numeric_limits<double>::quiet_NaN();
    return rec;
  }
  rec.width = search.best_width;
  const MlpModel& student = trained.at(search.best_width);

  Rng test_rng = Rng::derive(seed, "test");
  const Eigen::MatrixXd X_test = standard_normal_matrix(gamma.d, config.test_size, test_rng);
  const Eigen::VectorXd diff = student.forward_batch(X_test) - teacher.forward_batch(X_test);
  rec.error = diff.squaredNorm() / static_cast<double>(config.test_size) / (2.0 * gamma.sigma * gamma.sigma);
  if (!std::isfinite(rec.error)) rec.status = TrialStatus::Aborted;
  return rec;
}

// ---------------------------------------------------------------------------
// Sweep

std::vector<CellSummary> summarize(const std::vector<TrialRecord>& records) {
  std::vector<CellSummary> cells;
  std::map<std::pair<std::string, int>, std::size_t> index;
  std::vector<std::vector<double>> errors;
  std::vector<double> q_sums;
  for (const auto& r : records) {
    const auto key = std::make_pair(r.gamma.key(), r.T);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, cells.size()).first;
      CellSummary c;
      c.gamma = r.gamma;
      c.T = r.T;
      cells.push_back(c);
      errors.emplace_back();
      q_sums.push_back(0.0);
    }
    auto& c = cells[it->second];
    if (r.status == TrialStatus::Ok) {
      ++c.n_ok;
      errors[it->second].push_back(r.error);
      q_sums[it->second] += static_cast<double>(r.Q);
    } else {
      ++c.n_aborted;
    }
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i].n_ok == 0) {
      cells[i].mean_error = std::numeric_limits<double>::quiet_NaN();
      cells[i].mean_Q = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    const MeanSe m = mean_se(errors[i]);
    cells[i].mean_error = m.mean;
    cells[i].se = m.se;
    cells[i].mean_Q = q_sums[i] / cells[i].n_ok;
  }
  return cells;
}

std::vector<TableEntry> sample_complexity_table(const std::vector<CellSummary>& cells,
                                                const std::vector<double>& targets) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<const CellSummary*>> by_gamma;
  for (const auto& c : cells) {
    const std::string k = c.gamma.key();
    if (!by_gamma.count(k)) order.push_back(k);
    by_gamma[k].push_back(&c);
  }
  std::vector<TableEntry> table;
  for (const auto& k : order) {
    auto& list = by_gamma[k];
    std::sort(list.begin(), list.end(), [](const CellSummary* a, const CellSummary* b) { return a->T < b->T; });
    for (double eps : targets) {
      TableEntry e;
      e.gamma = list.front()->gamma;
      e.eps_target = eps;
      int prev = 0;
      for (const CellSummary* c : list) {
        if (c->n_ok > 0 && c->mean_error <= eps) {
          e.T_eps = c->T;
          e.T_lower = prev;
          e.resolved = true;
          break;
        }
        prev = c->T;
      }
      table.push_back(e);
    }
  }
  return table;
}

SweepResult sweep(const std::vector<Gamma>& grid, const ExperimentConfig& config, std::uint64_t master_seed,
                  const SweepProgress& progress) {
  if (grid.empty()) throw ConfigError("sweep: empty gamma grid");
  config.validate();
  for (const auto& g : grid) g.validate();
  const double hardest = *std::min_element(config.targets.begin(), config.targets.end());

  SweepResult result;
  std::vector<bool> active(grid.size(), true);
  for (long long T = config.t_min; T <= config.t_cap; T *= 2) {
    std::vector<std::size_t> live;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      if (active[g]) live.push_back(g);
    }
    if (live.empty()) break;
    const auto trials = static_cast<std::size_t>(config.trials);
    // One work item per (gamma, trial); results come back in index order.
    auto records = map_indexed(
        live.size() * trials,
        [&](std::size_t i) {
          const Gamma& g = grid[live[i / trials]];
          const int trial = static_cast<int>(i % trials);
          return run_trial(g, static_cast<int>(T), trial_seed(master_seed, g, static_cast<int>(T), trial), config,
                           trial);
        },
        config.exec);
    for (std::size_t j = 0; j < live.size(); ++j) {
      const std::vector<TrialRecord> cell_records(records.begin() + static_cast<std::ptrdiff_t>(j * trials),
                                                  records.begin() + static_cast<std::ptrdiff_t>((j + 1) * trials));
      const CellSummary cell = summarize(cell_records).front();
      if (cell.n_ok > 0 && cell.mean_error <= hardest) active[live[j]] = false;
      result.cells.push_back(cell);
      if (progress) progress(cell);
    }
    result.records.insert(result.records.end(), records.begin(), records.end());
  }
  // Cells are appended T-major; regroup by gamma for readability.
  std::map<std::string, std::size_t> rank;
  for (std::size_t g = 0; g < grid.size(); ++g) rank.emplace(grid[g].key(), g);
  std::stable_sort(result.records.begin(), result.records.end(), [&](const TrialRecord& a, const TrialRecord& b) {
    return rank.at(a.gamma.key()) < rank.at(b.gamma.key());
  });
  result.cells = summarize(result.records);
  result.table = sample_complexity_table(result.cells, config.targets);
  return result;
}

// ---------------------------------------------------------------------------
// Fits

double reference_constant(NetPrior prior) { return prior == NetPrior::Independent ? 1.79 : 3.92; }

ScalingFit fit_scaling(const std::vector<TableEntry>& table) {
  std::vector<double> xs;
  std::vector<double> ys;
  std::optional<NetPrior> prior;
  for (const auto& e : table) {
    if (!e.resolved) continue;
    if (prior && *prior != e.gamma.prior) throw ConfigError("fit_scaling: table mixes priors");
    prior = e.gamma.prior;
    xs.push_back(std::log(e.gamma.regressor()));
    ys.push_back(std::log(e.eps_target * e.T_eps));
  }
  if (xs.size() < 4) throw DomainError("fit_scaling: need at least 4 resolved cells");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  ScalingFit fit;
  fit.n_points = static_cast<int>(xs.size());
  fit.slope = sxx > 0.0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
  fit.intercept = my - fit.slope * mx;
  for (std::size_t i = 0; i < xs.size(); ++i) fit.residuals.push_back(ys[i] - (fit.intercept + fit.slope * xs[i]));
  fit.unit_constant = std::exp(my - mx);
  fit.reference = reference_constant(*prior);
  fit.ratio = fit.unit_constant / fit.reference;
  return fit;
}

QReport q_report(const std::vector<TrialRecord>& records) {
  if (records.empty()) throw ConfigError("q_report: no records");
  std::map<int, std::pair<double, int>> by_t;
  for (const auto& r : records) {
    if (r.status != TrialStatus::Ok) continue;
    auto& [sum, n] = by_t[r.T];
    sum += static_cast<double>(r.Q);
    ++n;
  }
  QReport rep;
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& [T, acc] : by_t) {
    QRow row{T, acc.first / acc.second, acc.first / acc.second / T, acc.second};
    rep.rows.push_back(row);
    xs.push_back(std::log(static_cast<double>(T)));
    ys.push_back(std::log(row.mean_Q));
  }
  rep.slope = std::numeric_limits<double>::quiet_NaN();
  if (xs.size() >= 2) {
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(xs.size());
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxx += (xs[i] - mx) * (xs[i] - mx);
      sxy += (xs[i] - mx) * (ys[i] - my);
    }
    rep.slope = sxy / sxx;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// IO

const char* to_string(TrialStatus s) { return s == TrialStatus::Ok ? "ok" : "aborted"; }

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

template <typename Fn>
void for_each_row(std::istream& is, std::size_t min_fields, Fn&& fn) {
  std::string line;
  bool header = true;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    const auto f = split_csv(line);
    if (f.size() < min_fields) throw InputError("csv line " + std::to_string(line_no) + ": too few fields");
    try {
      fn(f);
    } catch (const std::invalid_argument& e) {
      throw InputError("csv line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

Gamma parse_gamma(const std::vector<std::string>& f) {
  Gamma g;
  g.prior = net_prior_from_string(f[0]);
  g.d = std::stoi(f[1]);
  g.N = std::stoi(f[2]);
  g.M = std::stoi(f[3]);
  g.sigma = std::stod(f[4]);
  return g;
}

void write_gamma(std::ostream& os, const Gamma& g) {
  os << to_string(g.prior) << ',' << g.d << ',' << g.N << ',' << g.M << ',' << g.sigma;
}

}  // namespace

void write_trials_csv(std::ostream& os, const std::vector<TrialRecord>& records, const std::string& manifest_hash) {
  if (!manifest_hash.empty()) os << "# manifest=" << manifest_hash << '\n';
  os << "prior,d,N,M,sigma,T,trial,seed,error,Q,width,status\n";
  os.precision(17);
  for (const auto& r : records) {
    write_gamma(os, r.gamma);
    os << ',' << r.T << ',' << r.trial << ',' << r.seed << ',' << r.error << ',' << r.Q << ',' << r.width << ','
       << to_string(r.status) << '\n';
  }
}

std::vector<TrialRecord> read_trials_csv(std::istream& is) {
  std::vector<TrialRecord> out;
  for_each_row(is, 12, [&](const std::vector<std::string>& f) {
    TrialRecord r;
    r.gamma = parse_gamma(f);
    r.T = std::stoi(f[5]);
    r.trial = std::stoi(f[6]);
    r.seed = std::stoull(f[7]);
    r.error = std::stod(f[8]);
    r.Q = std::stoull(f[9]);
    r.width = std::stoi(f[10]);
    r.status = f[11] == "ok" ? TrialStatus::Ok : TrialStatus::Aborted;
    out.push_back(r);
  });
  return out;
}

void write_table_csv(std::ostream& os, const std::vector<TableEntry>& table, const std::string& manifest_hash) {
  if (!manifest_hash.empty()) os << "# manifest=" << manifest_hash << '\n';
  os << "prior,d,N,M,sigma,eps_target,T_eps,resolved,T_lower\n";
  os.precision(17);
  for (const auto& e : table) {
    write_gamma(os, e.gamma);
    os << ',' << e.eps_target << ',' << e.T_eps << ',' << (e.resolved ? 1 : 0) << ',' << e.T_lower << '\n';
  }
}

std::vector<TableEntry> read_table_csv(std::istream& is) {
  std::vector<TableEntry> out;
  for_each_row(is, 8, [&](const std::vector<std::string>& f) {
    TableEntry e;
    e.gamma = parse_gamma(f);
    e.eps_target = std::stod(f[5]);
    e.T_eps = std::stoi(f[6]);
    e.resolved = f[7] == "1";
    if (f.size() > 8) e.T_lower = std::stoi(f[8]);
    out.push_back(e);
  });
  return out;
}

}  // namespace infolearn
