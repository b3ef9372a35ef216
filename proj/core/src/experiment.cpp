#include "sbmsdp/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "sbmsdp/random.hpp"

namespace sbmsdp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {
      "model",     "n",          "k",          "p",     "q",        "alpha", "eps",
      "s",         "seed",       "formulation", "lambda", "iterations", "converged",
      "runtime_ms", "gamma",     "relative",   "err",   "exact",    "prop5_ok", "pilot_ok"};
  return cols;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double d = 0.0;
  try {
    d = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != v.size()) {
    throw std::invalid_argument("'" + key + "': expected a number, got '" + v + "'");
  }
  return d;
}

std::uint64_t parse_uint(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  unsigned long long u = 0;
  try {
    if (!v.empty() && v[0] != '-') u = std::stoull(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != v.size()) {
    throw std::invalid_argument("'" + key + "': expected a non-negative integer, got '" + v + "'");
  }
  return u;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "off" || v == "no") return false;
  throw std::invalid_argument("'" + key + "': expected a boolean, got '" + v + "'");
}

bool is_cell_key(const std::string& key) {
  static const std::vector<std::string> keys = {"model",  "n",           "k",     "p",
                                                "q",      "alpha",       "eps",   "attack_fraction",
                                                "formulation", "lambda", "shuffle"};
  return std::find(keys.begin(), keys.end(), key) != keys.end();
}

void apply_cell_key(Cell& c, const std::string& key, const std::string& v) {
  if (key == "model") c.model = parse_model_kind(v);
  else if (key == "n") c.n = parse_uint(key, v);
  else if (key == "k") c.k = parse_uint(key, v);
  else if (key == "p") c.p = parse_double(key, v);
  else if (key == "q") c.q = parse_double(key, v);
  else if (key == "alpha") c.alpha = parse_double(key, v);
  else if (key == "eps") c.eps = parse_double(key, v);
  else if (key == "attack_fraction") c.attack_fraction = parse_double(key, v);
  else if (key == "formulation") c.formulation = parse_formulation(v);
  else if (key == "lambda") c.lambda_mode = LambdaMode::parse(v);
  else if (key == "shuffle") c.shuffle = parse_bool(key, v);
  else throw std::invalid_argument("unknown cell key '" + key + "'");
}

void apply_global_key(SweepConfig& cfg, const std::string& key, const std::string& v) {
  if (key == "base_seed") cfg.base_seed = parse_uint(key, v);
  else if (key == "trials") cfg.trials = parse_uint(key, v);
  else if (key == "max_iters") cfg.solver.max_iters = static_cast<int>(parse_uint(key, v));
  else if (key == "tol") cfg.solver.tol = parse_double(key, v);
  else if (key == "penalty") cfg.solver.penalty = parse_double(key, v);
  else if (key == "adaptive_penalty") cfg.solver.adaptive_penalty = parse_bool(key, v);
  else if (key == "eigen") {
    if (v == "jacobi") cfg.solver.eigen_method = EigenMethod::kJacobi;
    else if (v == "tridiagonal") cfg.solver.eigen_method = EigenMethod::kTridiagonal;
    else throw std::invalid_argument("'eigen': expected jacobi or tridiagonal");
  } else if (key == "record_runtime") cfg.record_runtime = parse_bool(key, v);
  else throw std::invalid_argument("unknown key '" + key + "'");
}

using Block = std::vector<std::pair<std::string, std::vector<std::string>>>;

// Cartesian product over the value lists of a block, first key outermost.
void expand_block(const Cell& defaults, const Block& block, std::vector<Cell>& out) {
  std::vector<std::size_t> pos(block.size(), 0);
  while (true) {
    Cell c = defaults;
    for (std::size_t b = 0; b < block.size(); ++b) apply_cell_key(c, block[b].first, block[b].second[pos[b]]);
    out.push_back(c);
    bool done = true;
    for (std::size_t b = block.size(); b-- > 0;) {
      if (++pos[b] < block[b].second.size()) {
        done = false;
        break;
      }
      pos[b] = 0;
    }
    if (done) return;
  }
}

double box_violation(const SymMatrix& y) {
  const Matrix& m = y.dense();
  if (m.size() == 0) return 0.0;
  const double below = std::max(0.0, -m.minCoeff());
  const double above = std::max(0.0, m.maxCoeff() - 1.0);
  return std::max(below, above);
}

}  // namespace

std::string to_string(ModelKind m) {
  switch (m) {
    case ModelKind::kSbm: return "sbm";
    case ModelKind::kHeterogeneous: return "heterogeneous";
    case ModelKind::kSemirandom: return "semirandom";
    case ModelKind::kCensored: return "censored";
  }
  return "unknown";
}

ModelKind parse_model_kind(const std::string& s) {
  if (s == "sbm") return ModelKind::kSbm;
  if (s == "heterogeneous") return ModelKind::kHeterogeneous;
  if (s == "semirandom") return ModelKind::kSemirandom;
  if (s == "censored") return ModelKind::kCensored;
  throw std::invalid_argument("unknown model '" + s +
                              "' (expected sbm, heterogeneous, semirandom or censored)");
}

std::pair<double, double> Cell::effective_pq() const {
  if (model == ModelKind::kCensored) return {alpha * (1.0 - eps), alpha * eps};
  return {p, q};
}

std::string Cell::data_key() const {
  std::ostringstream os;
  os << std::setprecision(17) << to_string(model) << ";n=" << n << ";k=" << k;
  if (model == ModelKind::kCensored) {
    os << ";alpha=" << alpha << ";eps=" << eps;
  } else {
    os << ";p=" << p << ";q=" << q;
  }
  if (model == ModelKind::kHeterogeneous || model == ModelKind::kSemirandom) {
    os << ";attack=" << attack_fraction;
  }
  if (shuffle) os << ";shuffle";
  return os.str();
}

std::string Cell::key() const {
  std::string k = data_key() + ";" + to_string(formulation);
  if (formulation == Formulation::kSdp1) k += ";lambda=" + lambda_mode.str();
  return k;
}

void Cell::validate() const {
  if (model == ModelKind::kCensored) {
    SbmParams shape{n, k, 1.0, 0.0};
    shape.validate();
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("cell: alpha must lie in (0, 1]");
    if (!(eps >= 0.0 && eps < 0.5)) throw std::invalid_argument("cell: eps must lie in [0, 1/2)");
  } else {
    SbmParams{n, k, p, q}.validate();
  }
  if (!(attack_fraction >= 0.0 && attack_fraction <= 1.0)) {
    throw std::invalid_argument("cell: attack_fraction must lie in [0, 1]");
  }
  if (formulation == Formulation::kSdp1 && lambda_mode.kind == LambdaMode::Kind::kExplicit &&
      !(lambda_mode.value > 0.0 && lambda_mode.value < 1.0)) {
    throw std::invalid_argument("cell: lambda must lie in (0, 1)");
  }
}

std::uint64_t trial_seed(std::uint64_t base_seed, const Cell& cell, std::size_t trial_index) {
  return mix_seed(base_seed, fnv1a(cell.data_key()), trial_index);
}

void SweepConfig::validate() const {
  if (trials < 1) throw std::invalid_argument("sweep: trials must be >= 1");
  if (cells.empty()) throw std::invalid_argument("sweep: no cells");
  solver.validate();
  for (const Cell& c : cells) c.validate();
}

TrialOutcome run_trial_detailed(const Cell& cell, std::size_t trial_index,
                                std::uint64_t base_seed, const SolverConfig& solver,
                                bool record_runtime) {
  const auto start = std::chrono::steady_clock::now();
  cell.validate();

  TrialOutcome out;
  TrialRecord& r = out.record;
  const auto [p, q] = cell.effective_pq();
  r.model = cell.model;
  r.n = cell.n;
  r.k = cell.k;
  r.p = p;
  r.q = q;
  r.alpha = cell.model == ModelKind::kCensored ? cell.alpha : kNaN;
  r.eps = cell.model == ModelKind::kCensored ? cell.eps : kNaN;
  r.s = snr(p, q, cell.k);
  r.seed = trial_seed(base_seed, cell, trial_index);
  r.formulation = cell.formulation;
  r.trial_index = trial_index;

  const SbmParams params{cell.n, cell.k, p, q};
  const ClusterLabels truth = cell.shuffle ? ClusterLabels::shuffled(cell.n, cell.k, r.seed)
                                           : ClusterLabels::contiguous(cell.n, cell.k);
  const SymMatrix ystar = cluster_matrix(truth);

  Graph graph;
  switch (cell.model) {
    case ModelKind::kSbm:
      graph = generate_sbm(params, truth, r.seed);
      break;
    case ModelKind::kHeterogeneous:
      graph = generate_heterogeneous(
          params, truth, HeterogeneousRates::monotone_attack(truth, cell.attack_fraction, r.seed),
          r.seed);
      break;
    case ModelKind::kSemirandom:
      graph = generate_semirandom(params, truth,
                                  PairSet::random_fraction(cell.n, cell.attack_fraction, r.seed),
                                  r.seed);
      break;
    case ModelKind::kCensored:
      graph = censored_to_adjacency(
          generate_censored(params, truth, cell.alpha, cell.eps, r.seed), cell.k);
      break;
  }

  SdpSolution sol;
  SymMatrix objective;
  if (cell.formulation == Formulation::kSdp1) {
    r.lambda = resolve_lambda(graph, cell.lambda_mode);
    sol = solve_sdp1(graph, r.lambda, solver);
    objective = sdp1_objective(graph, r.lambda);
  } else {
    r.lambda = kNaN;
    sol = solve_sdp2(graph, cell.k, solver);
    objective = graph.adjacency();
  }
  r.iterations = sol.iterations;
  r.converged = sol.converged;

  const MedoidModel medoids = kmedians_extract(sol.yhat, cell.k, r.seed);
  const L1Error l1 = l1_error(sol.yhat, ystar);
  r.gamma = l1.gamma;
  r.relative = l1.relative;
  r.err = misclassification_rate(medoids.assignment, truth, cell.k);
  r.exact = round_matrix(sol.yhat) == ystar;
  r.prop5_ok = prop5_check(r.err, r.relative, kLocalSearchRatio);
  r.pilot_ok = pilot_bound_check(r.gamma, cell.n, r.s);

  TrialDiagnostics& d = out.diagnostics;
  d.diag_exact = (sol.yhat.dense().diagonal().array() == 1.0).all();
  d.box_violation = box_violation(sol.yhat);
  d.min_eigenvalue = sym_eigen(sol.yhat, EigenMethod::kTridiagonal).values.minCoeff();
  if (cell.formulation == Formulation::kSdp2) {
    const double nd = static_cast<double>(cell.n);
    d.sum_violation = std::abs(sol.yhat.sum() - nd * nd / static_cast<double>(cell.k));
  }
  d.objective_gap = objective_gap_vs_truth(sol, ystar, objective);
  d.optimality_tolerance = default_optimality_tolerance(objective);
  d.rounding_disagreements = rounding_disagreements(sol.yhat, ystar);
  d.kmedians_cost = medoids.cost;

  if (record_runtime) {
    r.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                       .count();
  }
  return out;
}

TrialRecord run_trial(const Cell& cell, std::size_t trial_index, std::uint64_t base_seed,
                      const SolverConfig& solver, bool record_runtime) {
  try {
    return run_trial_detailed(cell, trial_index, base_seed, solver, record_runtime).record;
  } catch (const std::exception& e) {
    TrialRecord r;
    const auto [p, q] = cell.effective_pq();
    r.model = cell.model;
    r.n = cell.n;
    r.k = cell.k;
    r.p = p;
    r.q = q;
    r.alpha = cell.model == ModelKind::kCensored ? cell.alpha : kNaN;
    r.eps = cell.model == ModelKind::kCensored ? cell.eps : kNaN;
    r.s = kNaN;
    try {
      r.s = snr(p, q, cell.k);
    } catch (const std::exception&) {
    }
    r.seed = trial_seed(base_seed, cell, trial_index);
    r.formulation = cell.formulation;
    r.lambda = r.gamma = r.relative = r.err = kNaN;
    r.failed = true;
    r.failure = e.what();
    r.trial_index = trial_index;
    return r;
  }
}

std::vector<TrialRecord> run_sweep(const SweepConfig& config, const SweepOptions& options) {
  config.validate();
  const std::size_t total = config.cells.size() * config.trials;
  std::vector<std::optional<TrialRecord>> slots(total);
  std::atomic<std::size_t> next{0};
  std::mutex callback_mutex;

  auto worker = [&] {
    while (true) {
      if (options.stop && options.stop->load()) return;
      const std::size_t task = next.fetch_add(1);
      if (task >= total) return;
      const std::size_t cell = task / config.trials;
      const std::size_t trial = task % config.trials;
      TrialRecord r = run_trial(config.cells[cell], trial, config.base_seed, config.solver,
                                config.record_runtime);
      r.cell_index = cell;
      if (options.on_complete) {
        std::lock_guard<std::mutex> lock(callback_mutex);
        options.on_complete(r);
      }
      slots[task] = std::move(r);
    }
  };

  const unsigned jobs = std::max(1u, options.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::vector<TrialRecord> records;
  records.reserve(total);
  for (auto& s : slots)
    if (s) records.push_back(std::move(*s));
  return records;
}

void write_csv_header(std::ostream& os) {
  os << "# schema=" << kCsvSchemaVersion << '\n';
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
}

void write_csv_row(std::ostream& os, const TrialRecord& r) {
  os << to_string(r.model) << ',' << r.n << ',' << r.k << ',' << num(r.p) << ',' << num(r.q)
     << ',' << num(r.alpha) << ',' << num(r.eps) << ',' << num(r.s) << ',' << r.seed << ','
     << to_string(r.formulation) << ',' << num(r.lambda) << ',' << r.iterations << ','
     << int{r.converged} << ',' << num(r.runtime_ms) << ',' << num(r.gamma) << ','
     << num(r.relative) << ',' << num(r.err) << ',' << int{r.exact} << ',' << int{r.prop5_ok}
     << ',' << int{r.pilot_ok} << '\n';
}

void write_csv(std::ostream& os, const std::vector<TrialRecord>& records) {
  write_csv_header(os);
  for (const auto& r : records) write_csv_row(os, r);
}

std::vector<TrialRecord> read_csv(std::istream& is) {
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    throw std::runtime_error("csv: " + what + " (line " + std::to_string(line_no) + ")");
  };

  bool schema_seen = false;
  std::vector<std::string> header;
  while (std::getline(is, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind("# schema=", 0) == 0) {
        if (line != "# schema=" + std::to_string(kCsvSchemaVersion)) fail("unsupported schema");
        schema_seen = true;
      }
      continue;
    }
    header = split(line, ',');
    break;
  }
  if (!schema_seen) fail("missing '# schema=' line");
  if (header != csv_columns()) fail("unexpected column header");

  std::vector<TrialRecord> records;
  std::map<std::string, std::size_t> cells;
  while (std::getline(is, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto f = split(line, ',');
    if (f.size() != header.size()) fail("wrong number of fields");
    TrialRecord r;
    try {
      r.model = parse_model_kind(f[0]);
      r.n = parse_uint("n", f[1]);
      r.k = parse_uint("k", f[2]);
      r.p = parse_double("p", f[3]);
      r.q = parse_double("q", f[4]);
      r.alpha = parse_double("alpha", f[5]);
      r.eps = parse_double("eps", f[6]);
      r.s = parse_double("s", f[7]);
      r.seed = parse_uint("seed", f[8]);
      r.formulation = parse_formulation(f[9]);
      r.lambda = parse_double("lambda", f[10]);
      r.iterations = static_cast<int>(parse_uint("iterations", f[11]));
      r.converged = parse_bool("converged", f[12]);
      r.runtime_ms = parse_double("runtime_ms", f[13]);
      r.gamma = parse_double("gamma", f[14]);
      r.relative = parse_double("relative", f[15]);
      r.err = parse_double("err", f[16]);
      r.exact = parse_bool("exact", f[17]);
      r.prop5_ok = parse_bool("prop5_ok", f[18]);
      r.pilot_ok = parse_bool("pilot_ok", f[19]);
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
    r.failed = std::isnan(r.relative);
    // Group rows into cells by everything except the per-trial columns.
    const std::string key = f[0] + ',' + f[1] + ',' + f[2] + ',' + f[3] + ',' + f[4] + ',' +
                            f[5] + ',' + f[6] + ',' + f[9] + ',' + f[10];
    const auto it = cells.emplace(key, cells.size()).first;
    r.cell_index = it->second;
    records.push_back(r);
  }
  return records;
}

SweepConfig parse_sweep_config(std::istream& is) {
  SweepConfig cfg;
  Cell defaults;
  std::vector<Block> blocks;
  bool in_cells = false;

  std::string line;
  std::size_t line_no = 0;
  try {
    while (std::getline(is, line)) {
      ++line_no;
      line = trim(line);
      if (line.empty() || line[0] == '#') continue;
      if (line == "cell:") {
        blocks.emplace_back();
        in_cells = true;
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("expected key=value or 'cell:'");
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (in_cells) {
        if (!is_cell_key(key)) throw std::invalid_argument("'" + key + "' is not a cell key");
        auto values = split(value, ',');
        if (values.empty() || std::any_of(values.begin(), values.end(),
                                          [](const std::string& v) { return v.empty(); })) {
          throw std::invalid_argument("'" + key + "': empty value");
        }
        blocks.back().emplace_back(key, std::move(values));
      } else if (is_cell_key(key)) {
        apply_cell_key(defaults, key, value);
      } else {
        apply_global_key(cfg, key, value);
      }
    }
    for (const Block& b : blocks) expand_block(defaults, b, cfg.cells);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument("sweep config line " + std::to_string(line_no) + ": " + e.what());
  }
  cfg.validate();
  return cfg;
}

ExponentialFit fit_exponential(const std::vector<TrialRecord>& records) {
  std::vector<double> xs, ys;
  for (const auto& r : records) {
    if (r.failed || !(r.relative > 1e-6 && r.relative < 0.5)) continue;
    xs.push_back(r.s * static_cast<double>(r.n) / static_cast<double>(r.k));
    ys.push_back(std::log(r.relative));
  }
  if (xs.size() < 3) {
    throw std::invalid_argument("fit_exponential: need at least 3 records with relative error in "
                                "(1e-6, 0.5), have " + std::to_string(xs.size()));
  }
  const double m = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_exponential: all points share one s n / k");

  ExponentialFit fit;
  fit.points = xs.size();
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  // A constant response is fit exactly by a flat line.
  fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

std::vector<CellSummary> summarize_cells(const std::vector<TrialRecord>& records) {
  std::map<std::size_t, CellSummary> by_cell;
  for (const auto& r : records) {
    if (r.failed) continue;
    CellSummary& c = by_cell[r.cell_index];
    c.cell_index = r.cell_index;
    c.n = r.n;
    c.k = r.k;
    c.p = r.p;
    c.q = r.q;
    c.s = r.s;
    ++c.trials;
    c.mean_relative += r.relative;
    c.mean_err += r.err;
    if (r.exact) ++c.exact_count;
  }
  std::vector<CellSummary> out;
  for (auto& [_, c] : by_cell) {
    c.mean_relative /= static_cast<double>(c.trials);
    c.mean_err /= static_cast<double>(c.trials);
    out.push_back(c);
  }
  return out;
}

}  // namespace sbmsdp
