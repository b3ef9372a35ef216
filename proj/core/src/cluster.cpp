#include "sbmsdp/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sbmsdp/random.hpp"

namespace sbmsdp {

namespace {

constexpr std::size_t kDistanceCacheLimit = 1500;
constexpr double kSwapRelThreshold = 1e-9;
constexpr std::uint64_t kTieStream = 11;

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

// Column access into the row-distance matrix, cached for n <= 1500 and
// recomputed from yhat above that.
class Distances {
 public:
  explicit Distances(const SymMatrix& yhat) : yhat_(yhat.dense()) {
    if (yhat.size() <= kDistanceCacheLimit) {
      cache_ = row_l1_distances(yhat);
      cached_ = true;
    }
  }
  explicit Distances(const Matrix& d) : yhat_(d), cache_(d), cached_(true) {}

  std::size_t n() const { return static_cast<std::size_t>(yhat_.rows()); }

  Vector column(std::size_t c) const {
    if (cached_) return cache_.col(idx(c));
    Vector out(yhat_.rows());
    for (Eigen::Index i = 0; i < yhat_.rows(); ++i)
      out(i) = (yhat_.col(i) - yhat_.col(idx(c))).cwiseAbs().sum();
    return out;
  }

 private:
  const Matrix& yhat_;
  Matrix cache_;
  bool cached_ = false;
};

struct Nearest {
  std::vector<double> d1, d2;
  std::vector<std::size_t> slot;  // slot of the nearest medoid
};

Nearest nearest_medoids(const std::vector<Vector>& medoid_cols, std::size_t n) {
  Nearest nr;
  nr.d1.assign(n, std::numeric_limits<double>::infinity());
  nr.d2.assign(n, std::numeric_limits<double>::infinity());
  nr.slot.assign(n, 0);
  for (std::size_t s = 0; s < medoid_cols.size(); ++s) {
    for (std::size_t i = 0; i < n; ++i) {
      const double d = medoid_cols[s](idx(i));
      if (d < nr.d1[i]) {
        nr.d2[i] = nr.d1[i];
        nr.d1[i] = d;
        nr.slot[i] = s;
      } else if (d < nr.d2[i]) {
        nr.d2[i] = d;
      }
    }
  }
  return nr;
}

bool swap_search(const Distances& dist, const std::vector<std::size_t>& medoids,
                 double current_cost, double rel_threshold, SwapMove& move) {
  const std::size_t n = dist.n();
  const std::size_t k = medoids.size();
  std::vector<Vector> cols;
  cols.reserve(k);
  for (std::size_t m : medoids) cols.push_back(dist.column(m));
  const Nearest nr = nearest_medoids(cols, n);

  std::vector<bool> is_medoid(n, false);
  for (std::size_t m : medoids) is_medoid[m] = true;

  double best = current_cost - rel_threshold * current_cost;
  bool found = false;
  for (std::size_t c = 0; c < n; ++c) {
    if (is_medoid[c]) continue;
    const Vector dc = dist.column(c);
    for (std::size_t s = 0; s < k; ++s) {
      double cost = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double keep = nr.slot[i] == s ? nr.d2[i] : nr.d1[i];
        cost += std::min(keep, dc(idx(i)));
      }
      if (cost < best) {
        best = cost;
        move = SwapMove{s, c, cost};
        found = true;
      }
    }
  }
  return found;
}

// Priority used to break exact ties reproducibly for a given seed.
std::uint64_t tie_rank(std::uint64_t seed, std::size_t i) { return mix_seed(seed, kTieStream, i); }

std::vector<std::size_t> farthest_point_seeding(const Distances& dist, std::size_t k,
                                                std::uint64_t seed) {
  const std::size_t n = dist.n();
  auto better = [&](double v, std::size_t i, double best_v, std::size_t best_i, bool maximize) {
    if (v != best_v) return maximize ? v > best_v : v < best_v;
    return tie_rank(seed, i) < tie_rank(seed, best_i);
  };

  // First medoid: smallest total distance to all rows.
  std::size_t first = 0;
  double first_total = std::numeric_limits<double>::infinity();
  std::vector<double> totals(n, 0.0);
  for (std::size_t c = 0; c < n; ++c) {
    totals[c] = dist.column(c).sum();
    if (c == 0 || better(totals[c], c, first_total, first, false)) {
      first = c;
      first_total = totals[c];
    }
  }

  std::vector<std::size_t> medoids{first};
  std::vector<bool> chosen(n, false);
  chosen[first] = true;
  Vector gap = dist.column(first);  // distance to the chosen set
  while (medoids.size() < k) {
    std::size_t next = n;
    double next_gap = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (chosen[i]) continue;
      if (next == n || better(gap(idx(i)), i, next_gap, next, true)) {
        next = i;
        next_gap = gap(idx(i));
      }
    }
    medoids.push_back(next);
    chosen[next] = true;
    gap = gap.cwiseMin(dist.column(next));
  }
  return medoids;
}

MedoidModel assign(const Distances& dist, std::vector<std::size_t> medoids) {
  const std::size_t n = dist.n();
  const std::size_t k = medoids.size();
  std::vector<Vector> cols;
  cols.reserve(k);
  for (std::size_t m : medoids) cols.push_back(dist.column(m));

  std::vector<std::size_t> labels(n, 0);
  std::vector<double> d(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t best = 0;
    for (std::size_t s = 1; s < k; ++s)
      if (cols[s](idx(i)) < cols[best](idx(i))) best = s;
    labels[i] = best;
    d[i] = cols[best](idx(i));
  }
  // A medoid always belongs to its own cluster, even when another medoid
  // row is identical.
  for (std::size_t s = 0; s < k; ++s) {
    labels[medoids[s]] = s;
    d[medoids[s]] = 0.0;
  }
  // Any cluster left empty receives an arbitrary (lowest-index non-medoid)
  // point so that all k labels are used.
  std::vector<std::size_t> sizes(k, 0);
  for (std::size_t v : labels) ++sizes[v];
  for (std::size_t s = 0; s < k; ++s) {
    if (sizes[s] != 0) continue;
    for (std::size_t i = 0; i < n; ++i) {
      if (sizes[labels[i]] > 1) {
        --sizes[labels[i]];
        labels[i] = s;
        d[i] = cols[s](idx(i));
        ++sizes[s];
        break;
      }
    }
  }

  MedoidModel model;
  model.medoid_rows = std::move(medoids);
  model.assignment = ClusterLabels(std::move(labels), k);
  for (double v : d) model.cost += v;
  return model;
}

}  // namespace

SymMatrix round_matrix(const SymMatrix& yhat) {
  return SymMatrix(Matrix((yhat.dense().array() >= 0.5).cast<double>()));
}

Matrix row_l1_distances(const SymMatrix& yhat) {
  const Matrix& y = yhat.dense();
  const Eigen::Index n = y.rows();
  Matrix d = Matrix::Zero(n, n);
  // Columns equal rows by symmetry; column access is contiguous.
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double v = (y.col(i) - y.col(j)).cwiseAbs().sum();
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return d;
}

double kmedians_cost(const SymMatrix& yhat, const MedoidModel& model) {
  const Matrix& y = yhat.dense();
  const std::size_t n = yhat.size();
  if (model.assignment.size() != n) throw std::invalid_argument("kmedians_cost: size mismatch");
  double cost = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = model.assignment[i];
    if (c >= model.medoid_rows.size() || model.medoid_rows[c] >= n) {
      throw std::invalid_argument("kmedians_cost: medoid index out of range");
    }
    cost += (y.row(idx(i)) - y.row(idx(model.medoid_rows[c]))).cwiseAbs().sum();
  }
  return cost;
}

bool best_improving_swap(const Matrix& distances, const std::vector<std::size_t>& medoids,
                         double current_cost, double rel_threshold, SwapMove& move) {
  return swap_search(Distances(distances), medoids, current_cost, rel_threshold, move);
}

MedoidModel kmedians_extract(const SymMatrix& yhat, std::size_t k, std::uint64_t seed) {
  const std::size_t n = yhat.size();
  if (k == 0 || k > n) throw std::invalid_argument("kmedians_extract: need 1 <= k <= n");
  const Distances dist(yhat);

  std::vector<std::size_t> medoids = farthest_point_seeding(dist, k, seed);
  MedoidModel model = assign(dist, medoids);
  if (k < n) {
    SwapMove move;
    while (swap_search(dist, medoids, model.cost, kSwapRelThreshold, move)) {
      medoids[move.slot] = move.candidate;
      model = assign(dist, medoids);
    }
  }
  return model;
}

}  // namespace sbmsdp
