#pragma once

// Block-model generators (standard, heterogeneous, semi-random, censored),
// the SNR measure, and ground-truth cluster matrices.
//
// Node and label indices are 0-based in memory. The text formats in io.hpp
// are 1-based.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "sbmsdp/linalg.hpp"

namespace sbmsdp {

/// Parameters of a balanced k-cluster block model.
struct SbmParams {
  std::size_t n = 0;
  std::size_t k = 0;
  double p = 0.0;  // in-cluster edge probability
  double q = 0.0;  // cross-cluster edge probability

  std::size_t cluster_size() const { return k == 0 ? 0 : n / k; }

  /// Throws std::invalid_argument unless k | n, n >= 4, 2 <= k < n and
  /// 0 <= q <= p <= 1. Equality q = p is allowed for degenerate fixtures.
  void validate() const;
};

/// Cluster assignment with values in [0, k).
class ClusterLabels {
 public:
  ClusterLabels() = default;
  /// Throws std::invalid_argument if any label is >= k or some label in
  /// [0, k) is unused.
  ClusterLabels(std::vector<std::size_t> labels, std::size_t k);

  /// Contiguous blocks: nodes [0, l) get label 0, [l, 2l) label 1, ...
  static ClusterLabels contiguous(std::size_t n, std::size_t k);
  /// Contiguous blocks with node identities permuted by a seeded shuffle.
  static ClusterLabels shuffled(std::size_t n, std::size_t k, std::uint64_t seed);

  std::size_t size() const { return labels_.size(); }
  std::size_t k() const { return k_; }
  std::size_t operator[](std::size_t i) const { return labels_[i]; }
  const std::vector<std::size_t>& values() const { return labels_; }
  std::vector<std::size_t> cluster_sizes() const;
  bool balanced() const;

  friend bool operator==(const ClusterLabels&, const ClusterLabels&) = default;

 private:
  std::vector<std::size_t> labels_;
  std::size_t k_ = 0;
};

/// Simple undirected graph held as a dense symmetric 0/1 adjacency with
/// zero diagonal.
class Graph {
 public:
  Graph() = default;
  /// Throws std::invalid_argument unless the matrix is 0/1 with zero
  /// diagonal.
  explicit Graph(SymMatrix adjacency, std::optional<SbmParams> params = std::nullopt);

  static Graph from_edges(std::size_t n,
                          const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                          std::optional<SbmParams> params = std::nullopt);

  std::size_t n() const { return adjacency_.size(); }
  const SymMatrix& adjacency() const { return adjacency_; }
  const std::optional<SbmParams>& params() const { return params_; }
  bool has_edge(std::size_t i, std::size_t j) const { return adjacency_(i, j) != 0.0; }
  std::size_t edge_count() const;
  /// Edges (i, j) with i < j in row-major order.
  std::vector<std::pair<std::size_t, std::size_t>> edges() const;

 private:
  SymMatrix adjacency_;
  std::optional<SbmParams> params_;
};

/// Strictly upper-triangular set of node pairs.
class PairSet {
 public:
  PairSet() = default;
  /// Pairs are normalized to (min, max); throws on i == j or index >= n.
  PairSet(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& pairs);

  /// Every pair (i, j), i < j, included independently with probability
  /// `fraction`, using a stream independent of the edge draws.
  static PairSet random_fraction(std::size_t n, double fraction, std::uint64_t seed);
  static PairSet all_pairs(std::size_t n);

  std::size_t n() const { return n_; }
  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }
  bool contains(std::size_t i, std::size_t j) const;
  const std::set<std::pair<std::size_t, std::size_t>>& pairs() const { return pairs_; }

 private:
  std::size_t n_ = 0;
  std::set<std::pair<std::size_t, std::size_t>> pairs_;
};

/// Per-pair Bernoulli overrides for the heterogeneous model. Keys are
/// (i, j) with i < j; absent pairs fall back to p or q by block.
struct HeterogeneousRates {
  std::map<std::pair<std::size_t, std::size_t>, double> in_rates;
  std::map<std::pair<std::size_t, std::size_t>, double> cross_rates;

  /// Monotone attack fixed before realization: each pair is selected with
  /// probability `fraction`; selected in-cluster pairs get rate 1 and
  /// selected cross-cluster pairs get rate 0.
  static HeterogeneousRates monotone_attack(const ClusterLabels& labels, double fraction,
                                            std::uint64_t seed);
};

/// Partially observed, sign-flipped view of 2Y* - J.
struct CensoredObservation {
  std::size_t n = 0;
  std::vector<std::int8_t> z;  // row-major n*n, symmetric, zero diagonal
  double alpha = 1.0;
  double eps = 0.0;

  std::int8_t operator()(std::size_t i, std::size_t j) const { return z[i * n + j]; }
  /// Throws std::invalid_argument on asymmetry, nonzero diagonal, or values
  /// outside {-1, 0, 1}.
  void validate() const;
};

/// Y*_ij = 1 iff labels agree (diagonal included).
SymMatrix cluster_matrix(const ClusterLabels& labels);

/// (p - q)^2 / (p/k + (1 - 1/k) q). Throws std::domain_error when the
/// denominator vanishes and std::invalid_argument outside 0 <= q <= p <= 1,
/// k >= 2.
double snr(double p, double q, std::size_t k);

/// Uniform draw in [0, 1) for pair (i, j), a pure function of
/// (seed, stream, min(i,j), max(i,j)).
double pair_uniform(std::uint64_t seed, std::uint64_t stream, std::size_t i, std::size_t j);

Graph generate_sbm(const SbmParams& params, const ClusterLabels& labels, std::uint64_t seed);

Graph generate_heterogeneous(const SbmParams& params, const ClusterLabels& labels,
                             const HeterogeneousRates& rates, std::uint64_t seed);

Graph generate_semirandom(const SbmParams& params, const ClusterLabels& labels,
                          const PairSet& attack, std::uint64_t seed);

CensoredObservation generate_censored(const SbmParams& params, const ClusterLabels& labels,
                                      double alpha, double eps, std::uint64_t seed);

/// A_ij = 1 iff z_ij = +1. The provenance records p = a(1-e), q = a e.
Graph censored_to_adjacency(const CensoredObservation& obs, std::size_t k = 0);

}  // namespace sbmsdp
