#include "sbmsdp/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "sbmsdp/random.hpp"

namespace sbmsdp {

namespace {

// Independent uniform streams derived from one seed.
constexpr std::uint64_t kEdgeStream = 0;
constexpr std::uint64_t kAttackStream = 3;
constexpr std::uint64_t kShuffleStream = 4;

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

void validate_shape(std::size_t n, std::size_t k) {
  require(k >= 2, "SbmParams: k must be at least 2");
  require(n >= 4, "SbmParams: n must be at least 4");
  require(k < n, "SbmParams: k must be smaller than n");
  require(n % k == 0, "SbmParams: k must divide n");
}

void check_labels(const SbmParams& params, const ClusterLabels& labels) {
  require(labels.size() == params.n, "labels length does not match n");
  require(labels.k() == params.k, "labels cluster count does not match k");
}

std::pair<std::size_t, std::size_t> ordered(std::size_t i, std::size_t j) {
  return i < j ? std::pair{i, j} : std::pair{j, i};
}

// Draws every upper-triangular pair with probability rate(i, j) from the
// edge stream.
template <typename RateFn>
Graph draw_graph(const SbmParams& params, std::uint64_t seed, RateFn&& rate) {
  const std::size_t n = params.n;
  Matrix a = Matrix::Zero(idx(n), idx(n));
  for (std::size_t j = 1; j < n; ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      if (pair_uniform(seed, kEdgeStream, i, j) < rate(i, j)) {
        a(idx(i), idx(j)) = 1.0;
        a(idx(j), idx(i)) = 1.0;
      }
    }
  }
  return Graph(SymMatrix(std::move(a)), params);
}

}  // namespace

void SbmParams::validate() const {
  validate_shape(n, k);
  require(q >= 0.0 && p <= 1.0 && q <= p, "SbmParams: need 0 <= q <= p <= 1");
}

ClusterLabels::ClusterLabels(std::vector<std::size_t> labels, std::size_t k)
    : labels_(std::move(labels)), k_(k) {
  require(k_ >= 1, "ClusterLabels: k must be positive");
  std::vector<bool> seen(k_, false);
  for (std::size_t v : labels_) {
    require(v < k_, "ClusterLabels: label out of range");
    seen[v] = true;
  }
  require(std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }),
          "ClusterLabels: every cluster must be non-empty");
}

ClusterLabels ClusterLabels::contiguous(std::size_t n, std::size_t k) {
  require(k >= 1 && n % k == 0, "ClusterLabels::contiguous: k must divide n");
  const std::size_t l = n / k;
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i / l;
  return ClusterLabels(std::move(v), k);
}

ClusterLabels ClusterLabels::shuffled(std::size_t n, std::size_t k, std::uint64_t seed) {
  std::vector<std::size_t> v = contiguous(n, k).values();
  // Fisher-Yates on a counter-based stream so the permutation does not
  // depend on the standard library's shuffle.
  for (std::size_t i = n; i > 1; --i) {
    const std::uint64_t h = mix_seed(seed, kShuffleStream, i);
    const std::size_t j = static_cast<std::size_t>(h % i);
    std::swap(v[i - 1], v[j]);
  }
  return ClusterLabels(std::move(v), k);
}

std::vector<std::size_t> ClusterLabels::cluster_sizes() const {
  std::vector<std::size_t> sizes(k_, 0);
  for (std::size_t v : labels_) ++sizes[v];
  return sizes;
}

bool ClusterLabels::balanced() const {
  const auto sizes = cluster_sizes();
  return std::adjacent_find(sizes.begin(), sizes.end(), std::not_equal_to<>()) == sizes.end();
}

Graph::Graph(SymMatrix adjacency, std::optional<SbmParams> params)
    : adjacency_(std::move(adjacency)), params_(std::move(params)) {
  const std::size_t n = adjacency_.size();
  for (std::size_t j = 0; j < n; ++j) {
    require(adjacency_(j, j) == 0.0, "Graph: adjacency diagonal must be zero");
    for (std::size_t i = 0; i < j; ++i) {
      const double v = adjacency_(i, j);
      require(v == 0.0 || v == 1.0, "Graph: adjacency entries must be 0 or 1");
    }
  }
  if (params_) require(params_->n == n, "Graph: provenance n does not match adjacency");
}

Graph Graph::from_edges(std::size_t n,
                        const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                        std::optional<SbmParams> params) {
  Matrix a = Matrix::Zero(idx(n), idx(n));
  for (auto [i, j] : edges) {
    require(i < n && j < n && i != j, "Graph::from_edges: invalid edge");
    a(idx(i), idx(j)) = 1.0;
    a(idx(j), idx(i)) = 1.0;
  }
  return Graph(SymMatrix(std::move(a)), std::move(params));
}

std::size_t Graph::edge_count() const {
  return static_cast<std::size_t>(adjacency_.sum() / 2.0 + 0.5);
}

std::vector<std::pair<std::size_t, std::size_t>> Graph::edges() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  const std::size_t n = this->n();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (has_edge(i, j)) out.emplace_back(i, j);
  return out;
}

PairSet::PairSet(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& pairs)
    : n_(n) {
  for (auto [i, j] : pairs) {
    require(i < n && j < n, "PairSet: index out of range");
    require(i != j, "PairSet: diagonal pair");
    pairs_.insert(ordered(i, j));
  }
}

PairSet PairSet::random_fraction(std::size_t n, double fraction, std::uint64_t seed) {
  require(fraction >= 0.0 && fraction <= 1.0, "PairSet: fraction must lie in [0, 1]");
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (pair_uniform(seed, kAttackStream, i, j) < fraction) pairs.emplace_back(i, j);
  return PairSet(n, pairs);
}

PairSet PairSet::all_pairs(std::size_t n) { return random_fraction(n, 1.0, 0); }

bool PairSet::contains(std::size_t i, std::size_t j) const {
  return pairs_.count(ordered(i, j)) > 0;
}

HeterogeneousRates HeterogeneousRates::monotone_attack(const ClusterLabels& labels,
                                                       double fraction, std::uint64_t seed) {
  const PairSet selected = PairSet::random_fraction(labels.size(), fraction, seed);
  HeterogeneousRates rates;
  for (const auto& pr : selected.pairs()) {
    if (labels[pr.first] == labels[pr.second]) {
      rates.in_rates.emplace(pr, 1.0);
    } else {
      rates.cross_rates.emplace(pr, 0.0);
    }
  }
  return rates;
}

void CensoredObservation::validate() const {
  require(z.size() == n * n, "CensoredObservation: z has wrong size");
  require(alpha > 0.0 && alpha <= 1.0, "CensoredObservation: alpha must lie in (0, 1]");
  require(eps >= 0.0 && eps < 0.5, "CensoredObservation: eps must lie in [0, 1/2)");
  for (std::size_t i = 0; i < n; ++i) {
    require((*this)(i, i) == 0, "CensoredObservation: diagonal must be zero");
    for (std::size_t j = 0; j < i; ++j) {
      const int v = (*this)(i, j);
      require(v >= -1 && v <= 1, "CensoredObservation: entries must be in {-1, 0, 1}");
      require(v == (*this)(j, i), "CensoredObservation: z must be symmetric");
    }
  }
}

SymMatrix cluster_matrix(const ClusterLabels& labels) {
  const std::size_t n = labels.size();
  Matrix y(idx(n), idx(n));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) y(idx(i), idx(j)) = labels[i] == labels[j] ? 1.0 : 0.0;
  return SymMatrix(std::move(y));
}

double snr(double p, double q, std::size_t k) {
  require(k >= 2, "snr: k must be at least 2");
  require(q >= 0.0 && q <= p && p <= 1.0, "snr: need 0 <= q <= p <= 1");
  const double kd = static_cast<double>(k);
  const double denom = p / kd + (1.0 - 1.0 / kd) * q;
  if (denom == 0.0) throw std::domain_error("snr: undefined for p = q = 0");
  const double d = p - q;
  return d * d / denom;
}

double pair_uniform(std::uint64_t seed, std::uint64_t stream, std::size_t i, std::size_t j) {
  const auto [a, b] = ordered(i, j);
  return to_unit_interval(mix_seed(seed, stream, a, b));
}

Graph generate_sbm(const SbmParams& params, const ClusterLabels& labels, std::uint64_t seed) {
  params.validate();
  check_labels(params, labels);
  return draw_graph(params, seed, [&](std::size_t i, std::size_t j) {
    return labels[i] == labels[j] ? params.p : params.q;
  });
}

Graph generate_heterogeneous(const SbmParams& params, const ClusterLabels& labels,
                             const HeterogeneousRates& rates, std::uint64_t seed) {
  params.validate();
  check_labels(params, labels);
  for (const auto& [pr, r] : rates.in_rates) {
    require(pr.first < pr.second && pr.second < params.n, "in-cluster override: bad pair");
    require(labels[pr.first] == labels[pr.second], "in-cluster override on a cross pair");
    require(r >= params.p && r <= 1.0, "in-cluster override rate must lie in [p, 1]");
  }
  for (const auto& [pr, r] : rates.cross_rates) {
    require(pr.first < pr.second && pr.second < params.n, "cross-cluster override: bad pair");
    require(labels[pr.first] != labels[pr.second], "cross-cluster override on an in pair");
    require(r >= 0.0 && r <= params.q, "cross-cluster override rate must lie in [0, q]");
  }
  return draw_graph(params, seed, [&](std::size_t i, std::size_t j) {
    const std::pair<std::size_t, std::size_t> key{i, j};
    if (labels[i] == labels[j]) {
      const auto it = rates.in_rates.find(key);
      return it == rates.in_rates.end() ? params.p : it->second;
    }
    const auto it = rates.cross_rates.find(key);
    return it == rates.cross_rates.end() ? params.q : it->second;
  });
}

Graph generate_semirandom(const SbmParams& params, const ClusterLabels& labels,
                          const PairSet& attack, std::uint64_t seed) {
  params.validate();
  check_labels(params, labels);
  require(attack.empty() || attack.n() == params.n, "attack set built for a different n");
  for (const auto& pr : attack.pairs())
    require(pr.second < params.n, "attack pair index out of range");
  // Forced pairs still consume their uniform, so unforced pairs match
  // generate_sbm at equal seed.
  return draw_graph(params, seed, [&](std::size_t i, std::size_t j) {
    const bool same = labels[i] == labels[j];
    if (attack.contains(i, j)) return same ? 1.0 : 0.0;
    return same ? params.p : params.q;
  });
}

CensoredObservation generate_censored(const SbmParams& params, const ClusterLabels& labels,
                                      double alpha, double eps, std::uint64_t seed) {
  validate_shape(params.n, params.k);
  check_labels(params, labels);
  require(alpha > 0.0 && alpha <= 1.0, "generate_censored: alpha must lie in (0, 1]");
  require(eps >= 0.0 && eps < 0.5, "generate_censored: eps must lie in [0, 1/2)");

  const std::size_t n = params.n;
  CensoredObservation obs;
  obs.n = n;
  obs.alpha = alpha;
  obs.eps = eps;
  obs.z.assign(n * n, 0);
  const double keep = alpha * (1.0 - eps);
  for (std::size_t j = 1; j < n; ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      const int truth = labels[i] == labels[j] ? 1 : -1;
      const double u = pair_uniform(seed, kEdgeStream, i, j);
      int v = 0;
      if (u < keep) {
        v = truth;
      } else if (u < alpha) {
        v = -truth;
      }
      obs.z[i * n + j] = static_cast<std::int8_t>(v);
      obs.z[j * n + i] = static_cast<std::int8_t>(v);
    }
  }
  return obs;
}

Graph censored_to_adjacency(const CensoredObservation& obs, std::size_t k) {
  obs.validate();
  const std::size_t n = obs.n;
  Matrix a = Matrix::Zero(idx(n), idx(n));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const int z = obs(i, j);
      // |z| (z + 1) / 2
      a(idx(i), idx(j)) = static_cast<double>(std::abs(z) * (z + 1) / 2);
    }
  }
  std::optional<SbmParams> params;
  if (k != 0) params = SbmParams{n, k, obs.alpha * (1.0 - obs.eps), obs.alpha * obs.eps};
  return Graph(SymMatrix(std::move(a)), params);
}

}  // namespace sbmsdp
