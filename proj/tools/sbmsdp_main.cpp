// sbmsdp: generate block-model graphs, solve the clustering SDPs, extract
// labels, evaluate errors and run reproducible sweeps.

#include <atomic>
#include <csignal>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "sbmsdp/cluster.hpp"
#include "sbmsdp/experiment.hpp"
#include "sbmsdp/io.hpp"
#include "sbmsdp/metrics.hpp"
#include "sbmsdp/model.hpp"
#include "sbmsdp/sdp.hpp"

namespace {

using namespace sbmsdp;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitFailedTrial = 2;

std::atomic<bool> g_stop{false};

extern "C" void on_interrupt(int) { g_stop.store(true); }

struct GenOptions {
  std::string model = "sbm";
  std::size_t n = 0, k = 0;
  double p = 0.0, q = 0.0, alpha = 1.0, eps = 0.0, attack_fraction = 0.0;
  std::uint64_t seed = 0;
  bool shuffle = false;
  std::string out, labels_out;
};

struct SolveOptions {
  std::string graph, censored, out;
  std::string formulation = "sdp1";
  std::string lambda = "half-sum";
  std::optional<double> p, q;
  double alpha = 1.0, eps = 0.0;
  std::size_t k = 0;
  SolverConfig solver;
  bool no_adaptive = false;
  std::string eigen = "tridiagonal";
};

struct ExtractOptions {
  std::string yhat, out, medoids_out, rounded_out;
  std::size_t k = 0;
  std::uint64_t seed = 0;
};

struct EvalOptions {
  std::string yhat, truth, labels;
  std::size_t k = 0;
  std::optional<double> p, q;
  std::uint64_t seed = 0;
};

struct SweepCliOptions {
  std::string config, out;
  unsigned jobs = 1;
  bool no_timing = false;
};

struct FitOptions {
  std::string csv;
  bool cells_in_window = false;
};

int run_gen(const GenOptions& o) {
  const ModelKind kind = parse_model_kind(o.model);
  const SbmParams params{o.n, o.k, o.p, o.q};
  const ClusterLabels labels =
      o.shuffle ? ClusterLabels::shuffled(o.n, o.k, o.seed) : ClusterLabels::contiguous(o.n, o.k);
  switch (kind) {
    case ModelKind::kSbm:
      io::save_graph(o.out, generate_sbm(params, labels, o.seed));
      break;
    case ModelKind::kHeterogeneous:
      io::save_graph(o.out, generate_heterogeneous(
                                params, labels,
                                HeterogeneousRates::monotone_attack(labels, o.attack_fraction, o.seed),
                                o.seed));
      break;
    case ModelKind::kSemirandom:
      io::save_graph(o.out, generate_semirandom(
                                params, labels, PairSet::random_fraction(o.n, o.attack_fraction, o.seed),
                                o.seed));
      break;
    case ModelKind::kCensored:
      io::save_censored(o.out, generate_censored(params, labels, o.alpha, o.eps, o.seed));
      break;
  }
  if (!o.labels_out.empty()) io::save_labels(o.labels_out, labels);
  return kExitOk;
}

int run_solve(SolveOptions o) {
  Graph graph;
  if (!o.censored.empty()) {
    const CensoredObservation obs = io::load_censored(o.censored, o.alpha, o.eps);
    graph = censored_to_adjacency(obs, o.k);
  } else {
    graph = io::load_graph(o.graph);
  }
  if (o.p && o.q) {
    graph = Graph(graph.adjacency(), SbmParams{graph.n(), o.k, *o.p, *o.q});
  }
  o.solver.adaptive_penalty = !o.no_adaptive;
  o.solver.eigen_method = o.eigen == "jacobi" ? EigenMethod::kJacobi : EigenMethod::kTridiagonal;

  const Formulation f = parse_formulation(o.formulation);
  SdpSolution sol;
  if (f == Formulation::kSdp1) {
    sol = solve_sdp1(graph, resolve_lambda(graph, LambdaMode::parse(o.lambda)), o.solver);
  } else {
    if (o.k == 0) throw std::invalid_argument("solve: sdp2 needs --k");
    sol = solve_sdp2(graph, o.k, o.solver);
  }
  io::save_dense(o.out, sol.yhat);
  io::save_key_values(o.out + ".meta", io::solution_metadata(sol));
  std::cerr << "solve: " << to_string(f) << " iterations=" << sol.iterations
            << " converged=" << sol.converged << " objective=" << sol.objective << '\n';
  return kExitOk;
}

int run_extract(const ExtractOptions& o) {
  const SymMatrix yhat = io::load_dense(o.yhat);
  const MedoidModel model = kmedians_extract(yhat, o.k, o.seed);
  io::save_labels(o.out, model.assignment);
  if (!o.medoids_out.empty()) io::save_medoids(o.medoids_out, model);
  if (!o.rounded_out.empty()) io::save_dense(o.rounded_out, round_matrix(yhat));
  std::cerr << "extract: k-medians cost " << model.cost << '\n';
  return kExitOk;
}

int run_eval(const EvalOptions& o) {
  const SymMatrix yhat = io::load_dense(o.yhat);
  const ClusterLabels truth = io::load_labels(o.truth, o.k);
  const ClusterLabels estimate =
      o.labels.empty() ? kmedians_extract(yhat, o.k, o.seed).assignment : io::load_labels(o.labels, o.k);
  const SymMatrix ystar = cluster_matrix(truth);

  ErrorReport report;
  const L1Error l1 = l1_error(yhat, ystar);
  report.gamma = l1.gamma;
  report.relative = l1.relative;
  report.err = misclassification_rate(estimate, truth, o.k);
  report.exact = round_matrix(yhat) == ystar;
  report.prop5_ok = prop5_check(report.err, report.relative, kLocalSearchRatio);

  std::cout << "gamma,relative,err,exact,prop5_ok,pilot_ok\n";
  std::cout.precision(12);
  std::cout << report.gamma << ',' << report.relative << ',' << report.err << ','
            << int{report.exact} << ',' << int{report.prop5_ok} << ',';
  if (o.p && o.q) {
    report.pilot_ok = pilot_bound_check(report.gamma, yhat.size(), snr(*o.p, *o.q, o.k));
    std::cout << int{report.pilot_ok};
  }
  std::cout << '\n';
  return kExitOk;
}

int run_sweep_cmd(const SweepCliOptions& o) {
  std::ifstream cfg_in(o.config);
  if (!cfg_in) throw std::runtime_error("cannot open '" + o.config + "'");
  SweepConfig cfg = parse_sweep_config(cfg_in);
  if (o.no_timing) cfg.record_runtime = false;

  std::signal(SIGINT, on_interrupt);
  std::signal(SIGTERM, on_interrupt);
  SweepOptions opts;
  opts.jobs = o.jobs;
  opts.stop = &g_stop;
  const std::size_t total = cfg.cells.size() * cfg.trials;
  std::size_t done = 0;
  opts.on_complete = [&](const TrialRecord& r) {
    ++done;
    std::cerr << "[" << done << "/" << total << "] cell " << r.cell_index << " trial "
              << r.trial_index << (r.failed ? " FAILED: " + r.failure : "") << '\n';
  };
  const std::vector<TrialRecord> records = run_sweep(cfg, opts);

  std::ofstream out(o.out);
  if (!out) throw std::runtime_error("cannot open '" + o.out + "' for writing");
  write_csv(out, records);

  bool failed = records.size() != total;
  for (const auto& r : records) failed = failed || r.failed;
  if (g_stop.load()) std::cerr << "sweep: interrupted, wrote " << records.size() << " rows\n";
  return failed ? kExitFailedTrial : kExitOk;
}

int run_fit(const FitOptions& o) {
  std::ifstream in(o.csv);
  if (!in) throw std::runtime_error("cannot open '" + o.csv + "'");
  std::vector<TrialRecord> records = read_csv(in);
  if (o.cells_in_window) {
    std::vector<bool> keep;
    for (const auto& c : summarize_cells(records)) {
      if (keep.size() <= c.cell_index) keep.resize(c.cell_index + 1, false);
      keep[c.cell_index] = c.mean_relative > 1e-6 && c.mean_relative < 0.5;
    }
    std::erase_if(records, [&](const TrialRecord& r) {
      return r.cell_index >= keep.size() || !keep[r.cell_index];
    });
  }
  const ExponentialFit fit = fit_exponential(records);
  std::cout.precision(12);
  std::cout << "slope=" << fit.slope << "\nintercept=" << fit.intercept
            << "\nr_squared=" << fit.r_squared << "\npoints=" << fit.points << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SDP community detection for stochastic block models"};
  app.require_subcommand(1);

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a graph (or censored observation) and labels");
  gen_cmd->add_option("--model", gen.model, "sbm | heterogeneous | semirandom | censored")
      ->capture_default_str();
  gen_cmd->add_option("--n", gen.n, "Node count")->required();
  gen_cmd->add_option("--k", gen.k, "Cluster count")->required();
  gen_cmd->add_option("--p", gen.p, "In-cluster edge probability");
  gen_cmd->add_option("--q", gen.q, "Cross-cluster edge probability");
  gen_cmd->add_option("--alpha", gen.alpha, "Observation probability (censored)");
  gen_cmd->add_option("--eps", gen.eps, "Flip probability (censored)");
  gen_cmd->add_option("--attack-fraction", gen.attack_fraction,
                      "Fraction of pairs under monotone attack (heterogeneous, semirandom)");
  gen_cmd->add_option("--seed", gen.seed, "Random seed")->required();
  gen_cmd->add_flag("--shuffle", gen.shuffle, "Permute node identities of the planted labels");
  gen_cmd->add_option("--out", gen.out, "Output graph (or censored) file")->required();
  gen_cmd->add_option("--labels-out", gen.labels_out, "Ground-truth labels file");

  SolveOptions solve;
  auto* solve_cmd = app.add_subcommand("solve", "Solve sdp1 or sdp2 for a graph");
  auto* graph_opt = solve_cmd->add_option("--graph", solve.graph, "Graph file");
  auto* cens_opt = solve_cmd->add_option("--censored", solve.censored, "Censored observation file");
  graph_opt->excludes(cens_opt);
  solve_cmd->add_option("--alpha", solve.alpha, "Observation probability of --censored input");
  solve_cmd->add_option("--eps", solve.eps, "Flip probability of --censored input");
  solve_cmd->add_option("--formulation", solve.formulation, "sdp1 | sdp2")->capture_default_str();
  solve_cmd->add_option("--lambda", solve.lambda, "half-sum or a value in (0, 1)")
      ->capture_default_str();
  solve_cmd->add_option("--p", solve.p, "In-cluster probability (provenance for half-sum)");
  solve_cmd->add_option("--q", solve.q, "Cross-cluster probability (provenance for half-sum)");
  solve_cmd->add_option("--k", solve.k, "Cluster count");
  solve_cmd->add_option("--max-iters", solve.solver.max_iters)->capture_default_str();
  solve_cmd->add_option("--tol", solve.solver.tol)->capture_default_str();
  solve_cmd->add_option("--penalty", solve.solver.penalty)->capture_default_str();
  solve_cmd->add_flag("--no-adaptive", solve.no_adaptive, "Keep the penalty fixed");
  solve_cmd->add_option("--eigen", solve.eigen, "tridiagonal | jacobi")
      ->check(CLI::IsMember({"tridiagonal", "jacobi"}))
      ->capture_default_str();
  solve_cmd->add_option("--out", solve.out, "Output matrix; metadata goes to <out>.meta")
      ->required();

  ExtractOptions extract;
  auto* extract_cmd = app.add_subcommand("extract", "k-medians labels from an SDP solution");
  extract_cmd->add_option("--yhat", extract.yhat, "Dense solution matrix")->required();
  extract_cmd->add_option("--k", extract.k, "Cluster count")->required();
  extract_cmd->add_option("--seed", extract.seed, "Tie-break seed")->capture_default_str();
  extract_cmd->add_option("--out", extract.out, "Labels file")->required();
  extract_cmd->add_option("--medoids-out", extract.medoids_out, "Medoid sidecar file");
  extract_cmd->add_option("--rounded-out", extract.rounded_out, "Element-wise rounded matrix");

  EvalOptions eval;
  auto* eval_cmd = app.add_subcommand("eval", "Error report for an SDP solution");
  eval_cmd->add_option("--yhat", eval.yhat, "Dense solution matrix")->required();
  eval_cmd->add_option("--truth", eval.truth, "Ground-truth labels")->required();
  eval_cmd->add_option("--labels", eval.labels, "Estimated labels (default: run k-medians)");
  eval_cmd->add_option("--k", eval.k, "Cluster count")->required();
  eval_cmd->add_option("--p", eval.p, "In-cluster probability (enables the pilot bound)");
  eval_cmd->add_option("--q", eval.q, "Cross-cluster probability (enables the pilot bound)");
  eval_cmd->add_option("--seed", eval.seed, "Tie-break seed for k-medians")->capture_default_str();

  SweepCliOptions sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a parameter sweep and write CSV");
  sweep_cmd->add_option("--config", sweep.config, "Sweep configuration file")->required();
  sweep_cmd->add_option("--out", sweep.out, "Output CSV")->required();
  sweep_cmd->add_option("--jobs", sweep.jobs, "Worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sweep_cmd->add_flag("--no-timing", sweep.no_timing,
                      "Write runtime_ms as 0 so repeated runs are byte-identical");

  FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit ln(relative error) against s n / k");
  fit_cmd->add_option("--csv", fit.csv, "Sweep CSV")->required();
  fit_cmd->add_flag("--cells-in-window", fit.cells_in_window,
                    "Only use trials of cells whose mean relative error lies in (1e-6, 0.5)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen_cmd) return run_gen(gen);
    if (*solve_cmd) {
      if (solve.graph.empty() && solve.censored.empty()) {
        throw std::invalid_argument("solve: one of --graph or --censored is required");
      }
      return run_solve(solve);
    }
    if (*extract_cmd) return run_extract(extract);
    if (*eval_cmd) return run_eval(eval);
    if (*sweep_cmd) return run_sweep_cmd(sweep);
    if (*fit_cmd) return run_fit(fit);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
