#pragma once

// Cluster extraction from an SDP estimate: element-wise rounding and
// medoid-constrained k-medians over the rows under l1 distance.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sbmsdp/linalg.hpp"
#include "sbmsdp/model.hpp"

namespace sbmsdp {

/// Approximation ratio certified by single-swap local search for
/// medoid-constrained k-medians.
inline constexpr double kLocalSearchRatio = 5.0;

struct MedoidModel {
  std::vector<std::size_t> medoid_rows;  // k distinct row indices; cluster c uses medoid_rows[c]
  ClusterLabels assignment;
  double cost = 0.0;
};

/// 1 where the entry is >= 1/2, else 0.
SymMatrix round_matrix(const SymMatrix& yhat);

/// Pairwise l1 distances between the rows of yhat.
Matrix row_l1_distances(const SymMatrix& yhat);

/// Sum over i of ||yhat_i - yhat_{medoid(assignment_i)}||_1.
double kmedians_cost(const SymMatrix& yhat, const MedoidModel& model);

/// Greedy farthest-point seeding followed by best-improvement single-swap
/// local search. The seed only breaks exact ties. Throws
/// std::invalid_argument if k is 0 or exceeds the number of rows.
MedoidModel kmedians_extract(const SymMatrix& yhat, std::size_t k, std::uint64_t seed = 0);

/// Best improving single medoid swap, if any, as (slot, candidate row,
/// new cost). Used by the extractor and by tests that certify local
/// optimality. Returns false when no swap improves the cost by more than
/// rel_threshold * cost.
struct SwapMove {
  std::size_t slot = 0;
  std::size_t candidate = 0;
  double cost = 0.0;
};
bool best_improving_swap(const Matrix& distances, const std::vector<std::size_t>& medoids,
                         double current_cost, double rel_threshold, SwapMove& move);

}  // namespace sbmsdp
