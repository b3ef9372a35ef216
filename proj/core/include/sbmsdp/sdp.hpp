#pragma once

// Operator-splitting (ADMM) solver for the two community-detection SDPs:
//
//   sdp1:  max <Y, A - lambda J>  s.t. Y psd, 0 <= Y <= J, Y_ii = 1
//   sdp2:  max <Y, A>             s.t. Y psd, 0 <= Y <= J, Y_ii = 1,
//                                      sum_ij Y_ij = n^2 / k
//
// The Y-block absorbs the linear objective and the polytope (an exact
// clip, plus a scalar shift for sdp2); the Z-block is the PSD projection;
// U is the scaled dual of Y = Z.

#include <cstddef>
#include <string>
#include <vector>

#include "sbmsdp/linalg.hpp"
#include "sbmsdp/model.hpp"

namespace sbmsdp {

enum class Formulation { kSdp1, kSdp2 };

std::string to_string(Formulation f);
/// Accepts "sdp1" / "sdp2"; throws std::invalid_argument otherwise.
Formulation parse_formulation(const std::string& s);

/// Either a fixed lambda or (p + q) / 2 taken from the graph provenance.
struct LambdaMode {
  enum class Kind { kExplicit, kHalfSum };
  Kind kind = Kind::kHalfSum;
  double value = 0.0;

  static LambdaMode half_sum() { return {}; }
  static LambdaMode fixed(double v) { return {Kind::kExplicit, v}; }
  /// "half-sum" or a decimal value.
  static LambdaMode parse(const std::string& s);
  std::string str() const;
};

/// Throws std::invalid_argument for half-sum on a graph without provenance.
double resolve_lambda(const Graph& graph, const LambdaMode& mode);

struct SolverConfig {
  int max_iters = 2000;
  double tol = 1e-5;
  double penalty = 1.0;
  bool adaptive_penalty = true;
  LambdaMode lambda_mode;
  EigenMethod eigen_method = EigenMethod::kTridiagonal;
  /// Record max(primal, dual) residual every 10 iterations.
  bool keep_history = false;

  void validate() const;
};

struct SdpSolution {
  SymMatrix yhat;
  double objective = 0.0;  // <yhat, B>
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double final_penalty = 0.0;
  bool converged = false;
  Formulation formulation = Formulation::kSdp1;
  double lambda = 0.0;  // 0 for sdp2
  std::vector<double> residual_history;
};

/// Objective matrix A - lambda J.
SymMatrix sdp1_objective(const Graph& graph, double lambda);

/// Throws std::invalid_argument unless 0 < lambda < 1.
SdpSolution solve_sdp1(const Graph& graph, double lambda, const SolverConfig& cfg = {});

/// Throws std::invalid_argument unless k divides n.
SdpSolution solve_sdp2(const Graph& graph, std::size_t k, const SolverConfig& cfg = {});

/// <yhat, B> - <ystar, B>. Nonnegative for an exact maximizer whenever
/// ystar is feasible.
double objective_gap_vs_truth(const SdpSolution& solution, const SymMatrix& ystar,
                              const SymMatrix& b);

/// Default slack for the optimality witness: 1e-3 * n^2 * ||B||_max.
double default_optimality_tolerance(const SymMatrix& b);

}  // namespace sbmsdp
