#include <gtest/gtest.h>

#include "sbmsdp/cluster.hpp"
#include "sbmsdp/metrics.hpp"
#include "sbmsdp/model.hpp"
#include "sbmsdp/sdp.hpp"

namespace sbmsdp {
namespace {

struct Fixture {
  ClusterLabels labels;
  Graph graph;
  SymMatrix ystar;
};

Fixture planted(std::size_t n, std::size_t k, double p, double q, std::uint64_t seed) {
  Fixture f;
  f.labels = ClusterLabels::contiguous(n, k);
  f.graph = generate_sbm({n, k, p, q}, f.labels, seed);
  f.ystar = cluster_matrix(f.labels);
  return f;
}

void expect_feasible(const SdpSolution& sol) {
  const std::size_t n = sol.yhat.size();
  for (std::size_t i = 0; i < n; ++i) {
    EXPECT_EQ(sol.yhat(i, i), 1.0);
    for (std::size_t j = 0; j < n; ++j) {
      EXPECT_GE(sol.yhat(i, j), -1e-6);
      EXPECT_LE(sol.yhat(i, j), 1.0 + 1e-6);
    }
  }
  const auto e = sym_eigen(sol.yhat, EigenMethod::kTridiagonal);
  EXPECT_GE(e.values.minCoeff(), -1e-4 * static_cast<double>(n));
}

double max_entry_gap(const SymMatrix& a, const SymMatrix& b) {
  return (a.dense() - b.dense()).cwiseAbs().maxCoeff();
}

TEST(Formulation, RoundTrip) {
  EXPECT_EQ(parse_formulation("sdp1"), Formulation::kSdp1);
  EXPECT_EQ(parse_formulation(to_string(Formulation::kSdp2)), Formulation::kSdp2);
  EXPECT_THROW(parse_formulation("sdp3"), std::invalid_argument);
}

TEST(LambdaMode, Parse) {
  EXPECT_EQ(LambdaMode::parse("half-sum").kind, LambdaMode::Kind::kHalfSum);
  const auto m = LambdaMode::parse("0.25");
  EXPECT_EQ(m.kind, LambdaMode::Kind::kExplicit);
  EXPECT_EQ(m.value, 0.25);
  EXPECT_THROW(LambdaMode::parse("abc"), std::invalid_argument);
  EXPECT_EQ(LambdaMode::parse(LambdaMode::fixed(0.3).str()).value, 0.3);
}

TEST(ResolveLambda, HalfSumNeedsProvenance) {
  const auto f = planted(8, 2, 0.6, 0.2, 1);
  EXPECT_NEAR(resolve_lambda(f.graph, LambdaMode::half_sum()), 0.4, 1e-15);
  EXPECT_EQ(resolve_lambda(f.graph, LambdaMode::fixed(0.7)), 0.7);
  const Graph bare(f.graph.adjacency());
  EXPECT_THROW(resolve_lambda(bare, LambdaMode::half_sum()), std::invalid_argument);
}

TEST(SolverConfig, Validation) {
  SolverConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.max_iters = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.tol = 0.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.penalty = -1.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(SolveSdp1, NoiselessRecoversTruth) {
  const auto f = planted(24, 3, 1.0, 0.0, 1);
  const auto sol = solve_sdp1(f.graph, 0.5);
  EXPECT_TRUE(sol.converged);
  EXPECT_LE(max_entry_gap(sol.yhat, f.ystar), 1e-3);
  expect_feasible(sol);
  const SymMatrix b = sdp1_objective(f.graph, 0.5);
  EXPECT_NEAR(objective_gap_vs_truth(sol, f.ystar, b), 0.0, default_optimality_tolerance(b));
}

TEST(SolveSdp1, EmptyGraphBeatsIdentity) {
  const Graph g(SymMatrix(4), SbmParams{4, 2, 0.5, 0.1});
  const auto sol = solve_sdp1(g, 0.5);
  EXPECT_GE(sol.objective, -0.5 * 4 - 1e-6);
  expect_feasible(sol);
}

TEST(SolveSdp1, RejectsLambdaOutsideUnitInterval) {
  const auto f = planted(8, 2, 0.6, 0.2, 1);
  EXPECT_THROW(solve_sdp1(f.graph, 0.0), std::invalid_argument);
  EXPECT_THROW(solve_sdp1(f.graph, 1.0), std::invalid_argument);
}

TEST(SolveSdp1, ModerateSnrExactRecovery) {
  const auto f = planted(200, 2, 0.5, 0.1, 1);
  const auto sol = solve_sdp1(f.graph, 0.3);
  EXPECT_TRUE(sol.converged);
  EXPECT_EQ(round_matrix(sol.yhat), f.ystar);
  expect_feasible(sol);
  const SymMatrix b = sdp1_objective(f.graph, 0.3);
  EXPECT_GE(objective_gap_vs_truth(sol, f.ystar, b), -default_optimality_tolerance(b));
}

TEST(SolveSdp1, LambdaRangeInsensitivity) {
  const double p = 0.5, q = 0.1;
  const auto f = planted(200, 2, p, q, 1);
  const SymMatrix reference = round_matrix(solve_sdp1(f.graph, (p + q) / 2).yhat);
  EXPECT_EQ(reference, f.ystar);
  EXPECT_EQ(round_matrix(solve_sdp1(f.graph, 0.25 * p + 0.75 * q).yhat), reference);
}

TEST(SolveSdp1, UpperLambdaEndpointKeepsLabels) {
  // At lambda = 3p/4 + q/4 this instance's optimum is not Y*: the solver
  // beats the truth's objective, so element-wise rounding differs, but the
  // k-medians labels are still exact.
  const double p = 0.5, q = 0.1, lambda = 0.75 * p + 0.25 * q;
  const auto f = planted(200, 2, p, q, 1);
  const auto sol = solve_sdp1(f.graph, lambda);
  EXPECT_TRUE(sol.converged);
  const SymMatrix b = sdp1_objective(f.graph, lambda);
  EXPECT_GT(objective_gap_vs_truth(sol, f.ystar, b), 0.0);
  const auto labels = kmedians_extract(sol.yhat, 2, 0).assignment;
  EXPECT_EQ(misclassification_rate(labels, f.labels, 2), 0.0);
}

TEST(SolveSdp1, Deterministic) {
  const auto f = planted(40, 2, 0.6, 0.2, 3);
  const auto a = solve_sdp1(f.graph, 0.4);
  const auto b = solve_sdp1(f.graph, 0.4);
  EXPECT_EQ(a.yhat, b.yhat);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(SolveSdp1, JacobiBackendAgrees) {
  const auto f = planted(30, 2, 0.7, 0.1, 2);
  SolverConfig jacobi;
  jacobi.eigen_method = EigenMethod::kJacobi;
  const auto a = solve_sdp1(f.graph, 0.4, jacobi);
  const auto b = solve_sdp1(f.graph, 0.4);
  EXPECT_TRUE(a.converged);
  EXPECT_EQ(round_matrix(a.yhat), round_matrix(b.yhat));
  EXPECT_NEAR(a.objective, b.objective, 1e-3 * 30 * 30);
}

TEST(SolveSdp1, IterationLimitReportsNonConvergence) {
  const auto f = planted(40, 2, 0.6, 0.3, 3);
  SolverConfig cfg;
  cfg.max_iters = 2;
  const auto sol = solve_sdp1(f.graph, 0.45, cfg);
  EXPECT_FALSE(sol.converged);
  EXPECT_EQ(sol.iterations, 2);
  // Box and diagonal hold at every iterate; PSD only up to the residual.
  for (std::size_t i = 0; i < 40; ++i) {
    EXPECT_EQ(sol.yhat(i, i), 1.0);
    for (std::size_t j = 0; j < 40; ++j) {
      EXPECT_GE(sol.yhat(i, j), 0.0);
      EXPECT_LE(sol.yhat(i, j), 1.0);
    }
  }
}

TEST(SolveSdp1, FixedPenaltyStillConverges) {
  const auto f = planted(40, 2, 0.8, 0.1, 5);
  SolverConfig cfg;
  cfg.adaptive_penalty = false;
  const auto sol = solve_sdp1(f.graph, 0.45, cfg);
  EXPECT_TRUE(sol.converged);
  EXPECT_EQ(sol.final_penalty, 1.0);
  EXPECT_EQ(round_matrix(sol.yhat), f.ystar);
}

TEST(SolveSdp1, ResidualHistoryNonincreasing) {
  SolverConfig cfg;
  cfg.keep_history = true;
  for (const auto& f : {planted(24, 3, 1.0, 0.0, 1), planted(200, 2, 0.5, 0.1, 1)}) {
    const auto sol = solve_sdp1(f.graph, 0.3, cfg);
    EXPECT_EQ(sol.residual_history.size(), static_cast<std::size_t>(sol.iterations / 10));
    for (std::size_t t = 1; t < sol.residual_history.size(); ++t)
      EXPECT_LE(sol.residual_history[t], sol.residual_history[t - 1]) << "checkpoint " << t;
  }
}

TEST(SolveSdp2, NoiselessRecoversTruth) {
  const auto f = planted(24, 3, 1.0, 0.0, 1);
  const auto sol = solve_sdp2(f.graph, 3);
  EXPECT_TRUE(sol.converged);
  EXPECT_LE(max_entry_gap(sol.yhat, f.ystar), 1e-3);
  EXPECT_EQ(sol.lambda, 0.0);
  EXPECT_EQ(sol.formulation, Formulation::kSdp2);
}

TEST(SolveSdp2, KEqualsNGivesIdentity) {
  const auto f = planted(6, 2, 0.9, 0.4, 2);
  const auto sol = solve_sdp2(f.graph, 6);
  EXPECT_LE(max_entry_gap(sol.yhat, SymMatrix::identity(6)), 1e-9);
}

TEST(SolveSdp2, SumBudgetAndRecovery) {
  const auto f = planted(200, 2, 0.5, 0.1, 1);
  const auto sol = solve_sdp2(f.graph, 2);
  expect_feasible(sol);
  EXPECT_NEAR(sol.yhat.sum(), 200.0 * 200.0 / 2, 1e-4 * 200 * 200);
  EXPECT_EQ(round_matrix(sol.yhat), round_matrix(solve_sdp1(f.graph, 0.3).yhat));
  EXPECT_EQ(round_matrix(sol.yhat), f.ystar);
}

TEST(SolveSdp2, RejectsNonDivisibleK) {
  const auto f = planted(12, 3, 0.9, 0.1, 2);
  EXPECT_THROW(solve_sdp2(f.graph, 5), std::invalid_argument);
}

TEST(ObjectiveGap, ZeroAtTruth) {
  const auto f = planted(12, 2, 0.8, 0.2, 4);
  SdpSolution s;
  s.yhat = f.ystar;
  EXPECT_EQ(objective_gap_vs_truth(s, f.ystar, sdp1_objective(f.graph, 0.5)), 0.0);
}

TEST(Sdp1Objective, SubtractsLambdaEverywhere) {
  const Graph g = Graph::from_edges(3, {{0, 1}});
  const SymMatrix b = sdp1_objective(g, 0.25);
  EXPECT_EQ(b(0, 1), 0.75);
  EXPECT_EQ(b(0, 2), -0.25);
  EXPECT_EQ(b(1, 1), -0.25);
  EXPECT_EQ(default_optimality_tolerance(b), 1e-3 * 9 * 0.75);
}

}  // namespace
}  // namespace sbmsdp
