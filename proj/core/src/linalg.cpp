#include "sbmsdp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

namespace sbmsdp {

namespace {

constexpr int kJacobiMaxSweeps = 64;
constexpr double kJacobiRelThreshold = 1e-12;
constexpr int kBisectionIters = 200;
constexpr double kBisectionWidth = 1e-12;

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

void symmetrize(Matrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("SymMatrix: matrix is not square");
  const Eigen::Index n = m.rows();
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double v = 0.5 * (m(i, j) + m(j, i));
      m(i, j) = v;
      m(j, i) = v;
    }
  }
}

void copy_lower_to_upper(Matrix& m) {
  const Eigen::Index n = m.rows();
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = j + 1; i < n; ++i) m(j, i) = m(i, j);
}

// Sorts eigenpairs by descending eigenvalue. Ties keep their input order.
EigenDecomposition sorted_descending(const Vector& values, const Matrix& vectors) {
  const Eigen::Index n = values.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return values(a) > values(b); });
  EigenDecomposition out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    out.values(c) = values(order[static_cast<std::size_t>(c)]);
    out.vectors.col(c) = vectors.col(order[static_cast<std::size_t>(c)]);
  }
  return out;
}

double offdiag_norm(const Matrix& a) {
  double s = 0.0;
  const Eigen::Index n = a.rows();
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = j + 1; i < n; ++i) s += a(i, j) * a(i, j);
  return std::sqrt(2.0 * s);
}

EigenDecomposition jacobi_dense(Matrix a) {
  const Eigen::Index n = a.rows();
  Matrix v = Matrix::Identity(n, n);
  const double threshold = kJacobiRelThreshold * a.norm();

  for (int sweep = 0; sweep <= kJacobiMaxSweeps; ++sweep) {
    if (offdiag_norm(a) <= threshold) {
      return sorted_descending(a.diagonal(), v);
    }
    if (sweep == kJacobiMaxSweeps) break;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= threshold / static_cast<double>(n)) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0.0) t = -t;
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (Eigen::Index r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double g = a(r, p);
          const double h = a(r, q);
          const double rp = c * g - s * h;
          const double rq = s * g + c * h;
          a(r, p) = rp;
          a(p, r) = rp;
          a(r, q) = rq;
          a(q, r) = rq;
        }
        for (Eigen::Index r = 0; r < n; ++r) {
          const double g = v(r, p);
          const double h = v(r, q);
          v(r, p) = c * g - s * h;
          v(r, q) = s * g + c * h;
        }
      }
    }
  }
  std::ostringstream msg;
  msg << "jacobi_eigen: off-diagonal norm " << offdiag_norm(a) << " above threshold "
      << threshold << " after " << kJacobiMaxSweeps << " sweeps (n=" << n << ")";
  throw ConvergenceError(msg.str());
}

EigenDecomposition eigen_dense(const Matrix& m, EigenMethod method) {
  if (m.rows() == 0) return {};
  if (method == EigenMethod::kJacobi) return jacobi_dense(m);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("sym_eigen: tridiagonal QL iteration did not converge");
  }
  return sorted_descending(solver.eigenvalues(), solver.eigenvectors());
}

// Sum of the full matrix after clipping the off-diagonal entries shifted by
// theta; `upper` holds the strictly upper-triangular entries.
double clipped_total(const std::vector<double>& upper, double theta, std::size_t n) {
  double s = 0.0;
  for (double v : upper) s += std::clamp(v - theta, 0.0, 1.0);
  return static_cast<double>(n) + 2.0 * s;
}

}  // namespace

SymMatrix::SymMatrix(std::size_t n, double fill) : m_(Matrix::Constant(idx(n), idx(n), fill)) {}

SymMatrix::SymMatrix(const Matrix& m) : m_(m) { symmetrize(m_); }

SymMatrix::SymMatrix(Matrix&& m) : m_(std::move(m)) { symmetrize(m_); }

SymMatrix SymMatrix::identity(std::size_t n) { return SymMatrix(Matrix::Identity(idx(n), idx(n))); }

SymMatrix SymMatrix::ones(std::size_t n) { return SymMatrix(n, 1.0); }

SymMatrix SymMatrix::diagonal(const Vector& d) { return SymMatrix(Matrix(d.asDiagonal())); }

void SymMatrix::set(std::size_t i, std::size_t j, double v) {
  m_(idx(i), idx(j)) = v;
  m_(idx(j), idx(i)) = v;
}

double inner(const SymMatrix& a, const SymMatrix& b) {
  if (a.size() != b.size()) throw std::invalid_argument("inner: dimension mismatch");
  return a.dense().cwiseProduct(b.dense()).sum();
}

double l1_distance(const SymMatrix& a, const SymMatrix& b) {
  if (a.size() != b.size()) throw std::invalid_argument("l1_distance: dimension mismatch");
  return (a.dense() - b.dense()).cwiseAbs().sum();
}

EigenDecomposition jacobi_eigen(const SymMatrix& m) { return jacobi_dense(m.dense()); }

EigenDecomposition sym_eigen(const SymMatrix& m, EigenMethod method) {
  return eigen_dense(m.dense(), method);
}

SymMatrix psd_project(const SymMatrix& m, EigenMethod method) {
  Matrix out = m.dense();
  detail::psd_project_inplace(out, method);
  return SymMatrix(std::move(out));
}

SymMatrix box_diag_project(const SymMatrix& m) {
  Matrix out = m.dense();
  detail::box_diag_project_inplace(out);
  return SymMatrix(std::move(out));
}

SymMatrix box_diag_sum_project(const SymMatrix& m, double total) {
  Matrix out = m.dense();
  detail::box_diag_sum_project_inplace(out, total);
  return SymMatrix(std::move(out));
}

SpectralNormResult spectral_norm(const SymMatrix& m, int max_iters) {
  const Eigen::Index n = idx(m.size());
  SpectralNormResult result;
  if (n == 0 || m.max_abs() == 0.0) return result;

  Vector x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = 1.0 + 1.0 / static_cast<double>(i + 1);
  x.normalize();

  const Matrix& a = m.dense();
  double estimate = 0.0;
  for (int it = 1; it <= max_iters; ++it) {
    const Vector ax = a * x;
    const double next = ax.norm();  // sqrt(x^T M^2 x) for unit x
    result.iterations = it;
    const Vector y = a * ax;
    const double ynorm = y.norm();
    if (ynorm == 0.0) {
      estimate = next;
      break;
    }
    x = y / ynorm;
    if (it > 1 && std::abs(next - estimate) <= 1e-9 * next) {
      estimate = next;
      break;
    }
    estimate = next;
  }
  // Rayleigh quotient on M^2 at the final iterate.
  result.value = std::max(estimate, (a * x).norm());
  return result;
}

namespace detail {

void psd_project_inplace(Matrix& m, EigenMethod method) {
  const EigenDecomposition eig = eigen_dense(m, method);
  const Eigen::Index n = m.rows();
  Eigen::Index rank = 0;
  while (rank < n && eig.values(rank) > 0.0) ++rank;

  m.setZero();
  if (rank == 0) return;
  Matrix w = eig.vectors.leftCols(rank);
  for (Eigen::Index c = 0; c < rank; ++c) w.col(c) *= std::sqrt(eig.values(c));
  m.selfadjointView<Eigen::Lower>().rankUpdate(w);
  copy_lower_to_upper(m);
}

void box_diag_project_inplace(Matrix& m) {
  const Eigen::Index n = m.rows();
  for (Eigen::Index j = 0; j < n; ++j) {
    m(j, j) = 1.0;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double v = std::clamp(m(i, j), 0.0, 1.0);
      m(i, j) = v;
      m(j, i) = v;
    }
  }
}

void box_diag_sum_project_inplace(Matrix& m, double total) {
  const auto n = static_cast<std::size_t>(m.rows());
  const double nd = static_cast<double>(n);
  if (!(total >= nd && total <= nd * nd)) {
    std::ostringstream msg;
    msg << "box_diag_sum_project: total " << total << " outside feasible range [" << n << ", "
        << n * n << "]";
    throw std::invalid_argument(msg.str());
  }

  std::vector<double> upper;
  upper.reserve(n * (n - 1) / 2);
  for (Eigen::Index j = 0; j < m.rows(); ++j)
    for (Eigen::Index i = 0; i < j; ++i) upper.push_back(m(i, j));

  double theta = 0.0;
  if (!upper.empty()) {
    const double tol = 1e-8 * nd * nd;
    if (std::abs(clipped_total(upper, 0.0, n) - total) > tol) {
      const auto [lo_it, hi_it] = std::minmax_element(upper.begin(), upper.end());
      double lo = *lo_it - 1.0;  // everything clips to 1
      double hi = *hi_it + 1.0;  // everything clips to 0
      for (int it = 0; it < kBisectionIters && hi - lo >= kBisectionWidth; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (clipped_total(upper, mid, n) > total) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      theta = 0.5 * (lo + hi);
    }
  }

  for (Eigen::Index j = 0; j < m.rows(); ++j) {
    m(j, j) = 1.0;
    for (Eigen::Index i = 0; i < j; ++i) {
      const double v = std::clamp(m(i, j) - theta, 0.0, 1.0);
      m(i, j) = v;
      m(j, i) = v;
    }
  }
}

}  // namespace detail

}  // namespace sbmsdp
