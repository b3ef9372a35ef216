#pragma once

// Trial pipeline (generate -> solve -> extract -> evaluate), reproducible
// parameter sweeps and the exponential-rate fit.

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "sbmsdp/cluster.hpp"
#include "sbmsdp/metrics.hpp"
#include "sbmsdp/model.hpp"
#include "sbmsdp/sdp.hpp"

namespace sbmsdp {

enum class ModelKind { kSbm, kHeterogeneous, kSemirandom, kCensored };

std::string to_string(ModelKind m);
ModelKind parse_model_kind(const std::string& s);

/// One grid point of a sweep.
struct Cell {
  ModelKind model = ModelKind::kSbm;
  std::size_t n = 0;
  std::size_t k = 0;
  double p = 0.0;
  double q = 0.0;
  double alpha = 1.0;  // censored only
  double eps = 0.0;    // censored only
  double attack_fraction = 0.0;  // heterogeneous / semirandom
  Formulation formulation = Formulation::kSdp1;
  LambdaMode lambda_mode;
  bool shuffle = false;

  /// Edge probabilities seen by the solver: (p, q) directly, or
  /// (alpha (1 - eps), alpha eps) for censored cells.
  std::pair<double, double> effective_pq() const;
  /// Canonical text for the data-generating parameters; its hash keys the
  /// trial seeds, so cells differing only in solver settings see the same
  /// graphs.
  std::string data_key() const;
  /// data_key() plus formulation and lambda.
  std::string key() const;
  /// Throws std::invalid_argument if the cell violates a model precondition.
  void validate() const;
};

/// Per-trial seed: a 64-bit mix of (base seed, data key hash, trial index).
/// Depends only on the cell's own parameters, not on its grid position.
std::uint64_t trial_seed(std::uint64_t base_seed, const Cell& cell, std::size_t trial_index);

/// CSV row, columns in declaration order.
struct TrialRecord {
  ModelKind model = ModelKind::kSbm;
  std::size_t n = 0;
  std::size_t k = 0;
  double p = 0.0;
  double q = 0.0;
  double alpha = 0.0;
  double eps = 0.0;
  double s = 0.0;
  std::uint64_t seed = 0;
  Formulation formulation = Formulation::kSdp1;
  double lambda = 0.0;
  int iterations = 0;
  bool converged = false;
  double runtime_ms = 0.0;
  double gamma = 0.0;
  double relative = 0.0;
  double err = 0.0;
  bool exact = false;
  bool prop5_ok = false;
  bool pilot_ok = false;

  // Not serialized.
  bool failed = false;
  std::string failure;
  std::size_t cell_index = 0;
  std::size_t trial_index = 0;
};

/// Solver-side witnesses recorded alongside a trial.
struct TrialDiagnostics {
  bool diag_exact = false;          // every yhat_ii == 1
  double box_violation = 0.0;       // max distance of an entry outside [0, 1]
  double min_eigenvalue = 0.0;
  double sum_violation = 0.0;       // |sum yhat - n^2/k| (sdp2 only)
  double objective_gap = 0.0;       // <yhat, B> - <ystar, B>
  double optimality_tolerance = 0.0;
  std::size_t rounding_disagreements = 0;
  double kmedians_cost = 0.0;
};

struct TrialOutcome {
  TrialRecord record;
  TrialDiagnostics diagnostics;
};

struct SweepConfig {
  std::uint64_t base_seed = 0;
  std::size_t trials = 1;
  std::vector<Cell> cells;
  SolverConfig solver;
  bool record_runtime = true;

  void validate() const;
};

TrialOutcome run_trial_detailed(const Cell& cell, std::size_t trial_index,
                                std::uint64_t base_seed, const SolverConfig& solver,
                                bool record_runtime = true);

/// Solver or generator exceptions are caught and reported as a failed
/// record.
TrialRecord run_trial(const Cell& cell, std::size_t trial_index, std::uint64_t base_seed,
                      const SolverConfig& solver, bool record_runtime = true);

struct SweepOptions {
  unsigned jobs = 1;
  /// Polled between trials; once set, no new trials start and the completed
  /// ones are returned.
  const std::atomic<bool>* stop = nullptr;
  std::function<void(const TrialRecord&)> on_complete;
};

/// All cells x trials, in canonical (cell, trial) order regardless of
/// scheduling. Trials skipped because of `stop` are absent.
std::vector<TrialRecord> run_sweep(const SweepConfig& config, const SweepOptions& options = {});

// CSV ---------------------------------------------------------------------

inline constexpr int kCsvSchemaVersion = 1;

/// "# schema=1" followed by the column header.
void write_csv_header(std::ostream& os);
void write_csv_row(std::ostream& os, const TrialRecord& r);
void write_csv(std::ostream& os, const std::vector<TrialRecord>& records);
/// Throws std::runtime_error on malformed rows or a schema mismatch.
std::vector<TrialRecord> read_csv(std::istream& is);

// Sweep configuration file --------------------------------------------------

/// Line-oriented key=value. Keys before the first "cell:" line are global
/// (base_seed, trials, solver settings, record_runtime) or defaults for
/// every cell; each "cell:" line opens a block of cell keys. A value may be
/// a comma-separated list, which expands the block into the Cartesian
/// product of its lists.
SweepConfig parse_sweep_config(std::istream& is);

// Fitting -------------------------------------------------------------------

struct ExponentialFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
};

/// Least squares of ln(relative) on s n / k over records with relative in
/// (1e-6, 0.5). Throws std::invalid_argument with fewer than 3 such
/// records.
ExponentialFit fit_exponential(const std::vector<TrialRecord>& records);

struct CellSummary {
  std::size_t cell_index = 0;
  std::size_t n = 0;
  std::size_t k = 0;
  double p = 0.0;
  double q = 0.0;
  double s = 0.0;
  std::size_t trials = 0;
  double mean_relative = 0.0;
  double mean_err = 0.0;
  std::size_t exact_count = 0;
};

/// Per-cell means over non-failed records, in cell order.
std::vector<CellSummary> summarize_cells(const std::vector<TrialRecord>& records);

}  // namespace sbmsdp
