#pragma once

// Error metrics and per-run checks for SDP clustering estimates.

#include <cstddef>
#include <span>
#include <vector>

#include "sbmsdp/linalg.hpp"
#include "sbmsdp/model.hpp"

namespace sbmsdp {

struct ErrorReport {
  double gamma = 0.0;     // ||yhat - ystar||_1
  double relative = 0.0;  // gamma / ||ystar||_1
  double err = 0.0;       // misclassification rate of the extracted labels
  bool exact = false;     // round(yhat) == ystar
  bool prop5_ok = false;  // err <= 2 (1 + 2 rho) relative
  bool pilot_ok = false;  // gamma <= 45 sqrt(n^3 / s)
};

struct L1Error {
  double gamma = 0.0;
  double relative = 0.0;
};

/// gamma = sum |yhat - ystar|, relative = gamma / ||ystar||_1 where the
/// denominator is taken from ystar itself.
L1Error l1_error(const SymMatrix& yhat, const SymMatrix& ystar);

/// Minimum-cost perfect assignment on a square cost matrix (Hungarian
/// method, O(k^3)). Returns column assigned to each row.
std::vector<std::size_t> min_cost_assignment(const Matrix& cost);

/// min over label permutations of the fraction of disagreeing nodes, via
/// optimal assignment on the k x k agreement matrix. Raw label vectors need
/// not use every label; entries >= k throw std::invalid_argument.
double misclassification_rate(std::span<const std::size_t> estimate,
                              std::span<const std::size_t> truth, std::size_t k);
double misclassification_rate(const ClusterLabels& estimate, const ClusterLabels& truth,
                              std::size_t k);

/// Exhaustive min over all k! permutations. Throws for k > 8.
double misclassification_bruteforce(std::span<const std::size_t> estimate,
                                    std::span<const std::size_t> truth, std::size_t k);

/// err <= 2 (1 + 2 rho) relative + 1e-9.
bool prop5_check(double err, double relative, double rho);

/// gamma <= 45 sqrt(n^3 / s). Returns true for s == 0 (vacuous bound).
bool pilot_bound_check(double gamma, std::size_t n, double s);

struct TrimReport {
  std::vector<std::size_t> v_row;
  std::vector<std::size_t> v_col;
  std::size_t trimmed_edge_count = 0;
  double threshold = 0.0;
};

/// Degree-trimming diagnostic on the strictly upper-triangular half of the
/// adjacency: rows (columns) whose sums exceed 40 p n, and the number of
/// ones that zeroing them removes. Never used by the solver.
TrimReport trim_graph(const Graph& graph, double p);

/// max over y, z in {+-1}^n of |y^T M z|, exact. Throws for n > 20.
double inf_to_one_norm(const Matrix& m);

/// Checks <Y* - Y, EA - (p+q)/2 J> == (p-q)/2 ||Y - Y*||_1 within
/// 1e-8 n^2. Throws std::invalid_argument if y is outside the box or its
/// diagonal is not 1.
/// EA has p where ystar is 1 and q elsewhere.
bool population_identity_check(const SymMatrix& y, const SymMatrix& ystar, double p, double q);

/// |{(i,j): round(yhat)_ij != ystar_ij}|.
std::size_t rounding_disagreements(const SymMatrix& yhat, const SymMatrix& ystar);

}  // namespace sbmsdp
