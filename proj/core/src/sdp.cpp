#include "sbmsdp/sdp.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sbmsdp {

namespace {

constexpr int kPenaltyPeriod = 10;
constexpr double kPenaltyBalance = 10.0;
constexpr double kPenaltyFactor = 2.0;

// Runs the two-block splitting for max <Y, B> over {psd} intersect P, where
// project_polytope is the Euclidean projection onto P.
template <typename Projection>
SdpSolution run_admm(const SymMatrix& objective, const SolverConfig& cfg,
                     Projection&& project_polytope) {
  cfg.validate();
  const Eigen::Index n = static_cast<Eigen::Index>(objective.size());
  const double scale = static_cast<double>(n);
  const Matrix& b = objective.dense();

  Matrix y = Matrix::Identity(n, n);
  Matrix z = Matrix::Identity(n, n);
  Matrix u = Matrix::Zero(n, n);
  Matrix z_prev(n, n);
  Matrix work(n, n);
  double mu = cfg.penalty;

  SdpSolution out;
  for (int it = 1; it <= cfg.max_iters; ++it) {
    work = z - u + b / mu;
    project_polytope(work);
    y = work;

    z_prev = z;
    z = y + u;
    detail::psd_project_inplace(z, cfg.eigen_method);

    u += y - z;

    const double primal = (y - z).norm();
    const double dual = mu * (z - z_prev).norm();
    out.iterations = it;
    out.primal_residual = primal;
    out.dual_residual = dual;
    if (cfg.keep_history && it % kPenaltyPeriod == 0) {
      out.residual_history.push_back(std::max(primal, dual));
    }
    if (primal <= cfg.tol * scale && dual <= cfg.tol * scale) {
      out.converged = true;
      break;
    }
    if (cfg.adaptive_penalty && it % kPenaltyPeriod == 0) {
      if (primal > kPenaltyBalance * dual) {
        mu *= kPenaltyFactor;
        u /= kPenaltyFactor;
      } else if (dual > kPenaltyBalance * primal) {
        mu /= kPenaltyFactor;
        u *= kPenaltyFactor;
      }
    }
  }

  // The polytope iterate is returned: it satisfies the box, diagonal (and
  // sum) constraints exactly and is within the primal residual of the cone.
  out.final_penalty = mu;
  out.yhat = SymMatrix(std::move(y));
  out.objective = inner(out.yhat, objective);
  return out;
}

}  // namespace

std::string to_string(Formulation f) { return f == Formulation::kSdp1 ? "sdp1" : "sdp2"; }

Formulation parse_formulation(const std::string& s) {
  if (s == "sdp1") return Formulation::kSdp1;
  if (s == "sdp2") return Formulation::kSdp2;
  throw std::invalid_argument("unknown formulation '" + s + "' (expected sdp1 or sdp2)");
}

LambdaMode LambdaMode::parse(const std::string& s) {
  if (s == "half-sum") return half_sum();
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != s.size()) {
    throw std::invalid_argument("lambda must be 'half-sum' or a number, got '" + s + "'");
  }
  return fixed(v);
}

std::string LambdaMode::str() const {
  if (kind == Kind::kHalfSum) return "half-sum";
  std::ostringstream os;
  os.precision(17);
  os << value;
  return os.str();
}

double resolve_lambda(const Graph& graph, const LambdaMode& mode) {
  if (mode.kind == LambdaMode::Kind::kExplicit) return mode.value;
  if (!graph.params()) {
    throw std::invalid_argument("lambda half-sum requires (p, q) provenance on the graph");
  }
  return 0.5 * (graph.params()->p + graph.params()->q);
}

void SolverConfig::validate() const {
  if (max_iters < 1) throw std::invalid_argument("SolverConfig: max_iters must be >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("SolverConfig: tol must be positive");
  if (!(penalty > 0.0)) throw std::invalid_argument("SolverConfig: penalty must be positive");
}

SymMatrix sdp1_objective(const Graph& graph, double lambda) {
  return SymMatrix(Matrix(graph.adjacency().dense().array() - lambda));
}

SdpSolution solve_sdp1(const Graph& graph, double lambda, const SolverConfig& cfg) {
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw std::invalid_argument("solve_sdp1: lambda must lie in (0, 1)");
  }
  SdpSolution sol = run_admm(sdp1_objective(graph, lambda), cfg,
                             [](Matrix& m) { detail::box_diag_project_inplace(m); });
  sol.formulation = Formulation::kSdp1;
  sol.lambda = lambda;
  return sol;
}

SdpSolution solve_sdp2(const Graph& graph, std::size_t k, const SolverConfig& cfg) {
  const std::size_t n = graph.n();
  if (k == 0 || n % k != 0) throw std::invalid_argument("solve_sdp2: k must divide n");
  const double total = static_cast<double>(n) * static_cast<double>(n) / static_cast<double>(k);
  SdpSolution sol = run_admm(graph.adjacency(), cfg, [total](Matrix& m) {
    detail::box_diag_sum_project_inplace(m, total);
  });
  sol.formulation = Formulation::kSdp2;
  sol.lambda = 0.0;
  return sol;
}

double objective_gap_vs_truth(const SdpSolution& solution, const SymMatrix& ystar,
                              const SymMatrix& b) {
  return inner(solution.yhat, b) - inner(ystar, b);
}

double default_optimality_tolerance(const SymMatrix& b) {
  const double n = static_cast<double>(b.size());
  return 1e-3 * n * n * b.max_abs();
}

}  // namespace sbmsdp
