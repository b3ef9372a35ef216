#pragma once

// Dense symmetric linear algebra: eigendecomposition, spectral norm and
// the projections used by the SDP splitting solver.

#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace sbmsdp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Dense real symmetric matrix. Symmetry is exact: construction averages
/// the input with its transpose, and element writes go to both triangles.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t n, double fill = 0.0);
  explicit SymMatrix(const Matrix& m);
  explicit SymMatrix(Matrix&& m);

  static SymMatrix identity(std::size_t n);
  static SymMatrix ones(std::size_t n);
  static SymMatrix diagonal(const Vector& d);

  std::size_t size() const { return static_cast<std::size_t>(m_.rows()); }
  double operator()(std::size_t i, std::size_t j) const {
    return m_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  void set(std::size_t i, std::size_t j, double v);
  const Matrix& dense() const { return m_; }

  double sum() const { return m_.sum(); }
  double max_abs() const { return m_.size() == 0 ? 0.0 : m_.cwiseAbs().maxCoeff(); }
  double frobenius() const { return m_.norm(); }

  friend bool operator==(const SymMatrix& a, const SymMatrix& b) {
    return a.m_.rows() == b.m_.rows() && a.m_ == b.m_;
  }

 private:
  Matrix m_;
};

/// Trace inner product <A, B>.
double inner(const SymMatrix& a, const SymMatrix& b);

/// Entrywise l1 norm of the difference.
double l1_distance(const SymMatrix& a, const SymMatrix& b);

/// Thrown when an iterative eigensolver exhausts its sweep budget.
class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

struct EigenDecomposition {
  Vector values;   // descending
  Matrix vectors;  // columns are unit eigenvectors
};

enum class EigenMethod {
  kJacobi,       // cyclic Jacobi rotations
  kTridiagonal,  // Householder tridiagonalization + implicit QL (Eigen)
};

/// Cyclic Jacobi: rotations skip entries below 1e-12 * ||M||_F and the
/// sweep loop stops once the off-diagonal mass drops below that threshold.
/// Throws ConvergenceError after 64 sweeps.
EigenDecomposition jacobi_eigen(const SymMatrix& m);

/// Eigendecomposition with eigenvalues sorted descending. Deterministic for
/// both methods.
EigenDecomposition sym_eigen(const SymMatrix& m, EigenMethod method = EigenMethod::kJacobi);

/// Frobenius-nearest PSD matrix: V diag(max(values, 0)) V^T.
SymMatrix psd_project(const SymMatrix& m, EigenMethod method = EigenMethod::kJacobi);

/// Projection onto {0 <= Y <= J, Y_ii = 1}.
SymMatrix box_diag_project(const SymMatrix& m);

/// Projection onto {0 <= Y <= J, Y_ii = 1, sum_ij Y_ij = total}: off-diagonal
/// entries become clip(M_ij - theta, 0, 1) with theta found by bisection.
/// Throws std::invalid_argument unless n <= total <= n^2.
SymMatrix box_diag_sum_project(const SymMatrix& m, double total);

struct SpectralNormResult {
  double value = 0.0;
  int iterations = 0;
};

/// max |lambda| by power iteration on M^2 (relative tolerance 1e-9).
SpectralNormResult spectral_norm(const SymMatrix& m, int max_iters = 10000);

namespace detail {

// In-place variants on raw Eigen storage, used by the solver loop to avoid
// re-wrapping every iterate. Inputs must be symmetric.
void psd_project_inplace(Matrix& m, EigenMethod method);
void box_diag_project_inplace(Matrix& m);
void box_diag_sum_project_inplace(Matrix& m, double total);

}  // namespace detail

}  // namespace sbmsdp
