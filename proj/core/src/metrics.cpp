#include "sbmsdp/metrics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace sbmsdp {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

using Labels = std::span<const std::size_t>;

void check_label_pair(Labels estimate, Labels truth, std::size_t k) {
  if (estimate.size() != truth.size()) {
    throw std::invalid_argument("misclassification: label vectors differ in length");
  }
  if (estimate.empty()) throw std::invalid_argument("misclassification: empty labels");
  auto out_of_range = [k](std::size_t v) { return v >= k; };
  if (std::any_of(estimate.begin(), estimate.end(), out_of_range) ||
      std::any_of(truth.begin(), truth.end(), out_of_range)) {
    throw std::invalid_argument("misclassification: label out of range");
  }
}

// agreement(a, b) = |{i : estimate_i = a, truth_i = b}|
Matrix agreement_matrix(Labels estimate, Labels truth, std::size_t k) {
  Matrix agree = Matrix::Zero(idx(k), idx(k));
  for (std::size_t i = 0; i < estimate.size(); ++i) agree(idx(estimate[i]), idx(truth[i])) += 1.0;
  return agree;
}

}  // namespace

L1Error l1_error(const SymMatrix& yhat, const SymMatrix& ystar) {
  if (yhat.size() != ystar.size()) throw std::invalid_argument("l1_error: dimension mismatch");
  L1Error e;
  e.gamma = l1_distance(yhat, ystar);
  const double norm = ystar.dense().cwiseAbs().sum();
  e.relative = norm > 0.0 ? e.gamma / norm : 0.0;
  return e;
}

std::vector<std::size_t> min_cost_assignment(const Matrix& cost) {
  // Shortest augmenting path with row/column potentials (1-based internals).
  const std::size_t n = static_cast<std::size_t>(cost.rows());
  if (cost.cols() != cost.rows()) throw std::invalid_argument("min_cost_assignment: not square");
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);  // match[col] = row

  for (std::size_t row = 1; row <= n; ++row) {
    match[0] = row;
    std::size_t col0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[col0] = true;
      const std::size_t r = match[col0];
      double delta = inf;
      std::size_t col1 = 0;
      for (std::size_t c = 1; c <= n; ++c) {
        if (used[c]) continue;
        const double cur = cost(idx(r - 1), idx(c - 1)) - u[r] - v[c];
        if (cur < minv[c]) {
          minv[c] = cur;
          way[c] = col0;
        }
        if (minv[c] < delta) {
          delta = minv[c];
          col1 = c;
        }
      }
      for (std::size_t c = 0; c <= n; ++c) {
        if (used[c]) {
          u[match[c]] += delta;
          v[c] -= delta;
        } else {
          minv[c] -= delta;
        }
      }
      col0 = col1;
    } while (match[col0] != 0);
    do {
      const std::size_t col1 = way[col0];
      match[col0] = match[col1];
      col0 = col1;
    } while (col0 != 0);
  }

  std::vector<std::size_t> assignment(n, 0);
  for (std::size_t c = 1; c <= n; ++c) assignment[match[c] - 1] = c - 1;
  return assignment;
}

double misclassification_rate(Labels estimate, Labels truth, std::size_t k) {
  check_label_pair(estimate, truth, k);
  const Matrix agree = agreement_matrix(estimate, truth, k);
  const std::vector<std::size_t> perm = min_cost_assignment(-agree);
  double matched = 0.0;
  for (std::size_t a = 0; a < k; ++a) matched += agree(idx(a), idx(perm[a]));
  const double n = static_cast<double>(estimate.size());
  return (n - matched) / n;
}

double misclassification_rate(const ClusterLabels& estimate, const ClusterLabels& truth,
                              std::size_t k) {
  return misclassification_rate(Labels(estimate.values()), Labels(truth.values()), k);
}

double misclassification_bruteforce(Labels estimate, Labels truth, std::size_t k) {
  if (k > 8) throw std::invalid_argument("misclassification_bruteforce: k must be <= 8");
  check_label_pair(estimate, truth, k);
  std::vector<std::size_t> perm(k);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::size_t best = estimate.size();
  do {
    std::size_t mismatches = 0;
    for (std::size_t i = 0; i < estimate.size(); ++i)
      if (estimate[i] != perm[truth[i]]) ++mismatches;
    best = std::min(best, mismatches);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(best) / static_cast<double>(estimate.size());
}

bool prop5_check(double err, double relative, double rho) {
  return err <= 2.0 * (1.0 + 2.0 * rho) * relative + 1e-9;
}

bool pilot_bound_check(double gamma, std::size_t n, double s) {
  if (s <= 0.0) return true;
  const double nd = static_cast<double>(n);
  return gamma <= 45.0 * std::sqrt(nd * nd * nd / s);
}

TrimReport trim_graph(const Graph& graph, double p) {
  const std::size_t n = graph.n();
  TrimReport report;
  report.threshold = 40.0 * p * static_cast<double>(n);

  std::vector<std::size_t> row_sum(n, 0), col_sum(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (graph.has_edge(i, j)) {
        ++row_sum[i];
        ++col_sum[j];
      }
    }
  }
  std::vector<bool> in_row(n, false), in_col(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (static_cast<double>(row_sum[i]) > report.threshold) {
      report.v_row.push_back(i);
      in_row[i] = true;
    }
    if (static_cast<double>(col_sum[i]) > report.threshold) {
      report.v_col.push_back(i);
      in_col[i] = true;
    }
  }
  if (report.v_row.empty() && report.v_col.empty()) return report;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (graph.has_edge(i, j) && (in_row[i] || in_col[j])) ++report.trimmed_edge_count;
  return report;
}

double inf_to_one_norm(const Matrix& m) {
  const std::size_t n = static_cast<std::size_t>(m.cols());
  if (n > 20 || m.rows() != m.cols()) {
    throw std::invalid_argument("inf_to_one_norm: exhaustive search needs a square matrix, n <= 20");
  }
  if (n == 0) return 0.0;
  // For fixed z the best y is sign(Mz), giving ||Mz||_1. Fix z_0 = +1
  // (the value is invariant under z -> -z) and walk the remaining signs in
  // Gray-code order, updating w = Mz with one column per step.
  Eigen::VectorXd z = Eigen::VectorXd::Ones(idx(n));
  Eigen::VectorXd w = m * z;
  double best = w.lpNorm<1>();
  const std::uint64_t steps = std::uint64_t{1} << (n - 1);
  for (std::uint64_t g = 1; g < steps; ++g) {
    const auto bit = static_cast<std::size_t>(std::countr_zero(g)) + 1;
    w -= 2.0 * z(idx(bit)) * m.col(idx(bit));
    z(idx(bit)) = -z(idx(bit));
    best = std::max(best, w.lpNorm<1>());
  }
  return best;
}

bool population_identity_check(const SymMatrix& y, const SymMatrix& ystar, double p, double q) {
  const std::size_t n = y.size();
  if (ystar.size() != n) throw std::invalid_argument("population_identity_check: size mismatch");
  constexpr double kFeasTol = 1e-9;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(y(i, i) - 1.0) > kFeasTol) {
      throw std::invalid_argument("population_identity_check: diagonal of y must be 1");
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (y(i, j) < -kFeasTol || y(i, j) > 1.0 + kFeasTol) {
        throw std::invalid_argument("population_identity_check: y outside the box [0, 1]");
      }
    }
  }
  const double half = 0.5 * (p + q);
  double lhs = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double ea = ystar(i, j) == 1.0 ? p : q;
      lhs += (ystar(i, j) - y(i, j)) * (ea - half);
    }
  }
  const double rhs = 0.5 * (p - q) * l1_distance(y, ystar);
  const double nd = static_cast<double>(n);
  return std::abs(lhs - rhs) <= 1e-8 * nd * nd;
}

std::size_t rounding_disagreements(const SymMatrix& yhat, const SymMatrix& ystar) {
  if (yhat.size() != ystar.size()) throw std::invalid_argument("rounding_disagreements: size mismatch");
  std::size_t count = 0;
  const std::size_t n = yhat.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if ((yhat(i, j) >= 0.5 ? 1.0 : 0.0) != ystar(i, j)) ++count;
  return count;
}

}  // namespace sbmsdp
