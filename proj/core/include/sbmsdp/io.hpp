#pragma once

// Plain-text file formats. All node indices and labels on disk are 1-based.
//
//   graph     "n m", then m lines "i j" with i < j
//   labels    one label per line
//   censored  "n", then "i j z" for every nonzero z_ij with i < j
//   dense     "n", then n rows of n space-separated values
//   medoids   "k", then k row indices
//   metadata  key=value lines

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "sbmsdp/cluster.hpp"
#include "sbmsdp/linalg.hpp"
#include "sbmsdp/model.hpp"
#include "sbmsdp/sdp.hpp"

namespace sbmsdp::io {

/// Malformed input; the message carries the line number when known.
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

void write_graph(std::ostream& os, const Graph& g);
Graph read_graph(std::istream& is);

void write_labels(std::ostream& os, const ClusterLabels& labels);
/// k defaults to the largest label present.
ClusterLabels read_labels(std::istream& is, std::size_t k = 0);

void write_censored(std::ostream& os, const CensoredObservation& obs);
/// The file does not carry alpha or eps; callers supply them.
CensoredObservation read_censored(std::istream& is, double alpha = 1.0, double eps = 0.0);

/// 17 significant digits, so values round-trip exactly.
void write_dense(std::ostream& os, const SymMatrix& m);
SymMatrix read_dense(std::istream& is);

void write_medoids(std::ostream& os, const MedoidModel& model);
std::vector<std::size_t> read_medoids(std::istream& is);

using KeyValues = std::map<std::string, std::string>;
void write_key_values(std::ostream& os, const KeyValues& kv);
KeyValues read_key_values(std::istream& is);

/// Sidecar record of a solver run.
KeyValues solution_metadata(const SdpSolution& sol);

// File-path conveniences; throw std::runtime_error when a file cannot be
// opened.
void save_graph(const std::filesystem::path& path, const Graph& g);
Graph load_graph(const std::filesystem::path& path);
void save_labels(const std::filesystem::path& path, const ClusterLabels& labels);
ClusterLabels load_labels(const std::filesystem::path& path, std::size_t k = 0);
void save_censored(const std::filesystem::path& path, const CensoredObservation& obs);
CensoredObservation load_censored(const std::filesystem::path& path, double alpha = 1.0,
                                  double eps = 0.0);
void save_dense(const std::filesystem::path& path, const SymMatrix& m);
SymMatrix load_dense(const std::filesystem::path& path);
void save_medoids(const std::filesystem::path& path, const MedoidModel& model);
void save_key_values(const std::filesystem::path& path, const KeyValues& kv);
KeyValues load_key_values(const std::filesystem::path& path);

}  // namespace sbmsdp::io
