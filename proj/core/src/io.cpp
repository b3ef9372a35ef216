#include "sbmsdp/io.hpp"

#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace sbmsdp::io {

namespace {

// Reads non-empty, non-comment lines with their 1-based line numbers.
class LineReader {
 public:
  explicit LineReader(std::istream& is) : is_(is) {}

  bool next(std::istringstream& fields) {
    std::string line;
    while (std::getline(is_, line)) {
      ++line_no_;
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      fields.clear();
      fields.str(line);
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const {
    std::ostringstream msg;
    msg << what << " (line " << line_no_ << ")";
    throw FormatError(msg.str());
  }

  void expect(std::istringstream& fields, const std::string& what) {
    if (!next(fields)) fail("unexpected end of input: expected " + what);
  }

 private:
  std::istream& is_;
  std::size_t line_no_ = 0;
};

template <typename T>
T field(std::istringstream& fields, LineReader& reader, const char* name) {
  T v{};
  if (!(fields >> v)) reader.fail(std::string("could not parse ") + name);
  return v;
}

void expect_end(std::istringstream& fields, LineReader& reader) {
  std::string extra;
  if (fields >> extra) reader.fail("trailing data '" + extra + "'");
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  return os;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
  return is;
}

}  // namespace

void write_graph(std::ostream& os, const Graph& g) {
  const auto edges = g.edges();
  os << g.n() << ' ' << edges.size() << '\n';
  for (auto [i, j] : edges) os << i + 1 << ' ' << j + 1 << '\n';
}

Graph read_graph(std::istream& is) {
  LineReader reader(is);
  std::istringstream fields;
  reader.expect(fields, "header 'n m'");
  const auto n = field<std::size_t>(fields, reader, "n");
  const auto m = field<std::size_t>(fields, reader, "m");
  expect_end(fields, reader);

  std::vector<std::pair<std::size_t, std::size_t>> edges;
  edges.reserve(m);
  for (std::size_t e = 0; e < m; ++e) {
    reader.expect(fields, "edge line");
    const auto i = field<std::size_t>(fields, reader, "i");
    const auto j = field<std::size_t>(fields, reader, "j");
    expect_end(fields, reader);
    if (i < 1 || j > n || i >= j) reader.fail("edge must satisfy 1 <= i < j <= n");
    edges.emplace_back(i - 1, j - 1);
  }
  if (reader.next(fields)) reader.fail("more edge lines than the header declares");
  return Graph::from_edges(n, edges);
}

void write_labels(std::ostream& os, const ClusterLabels& labels) {
  for (std::size_t v : labels.values()) os << v + 1 << '\n';
}

ClusterLabels read_labels(std::istream& is, std::size_t k) {
  LineReader reader(is);
  std::istringstream fields;
  std::vector<std::size_t> values;
  std::size_t max_label = 0;
  while (reader.next(fields)) {
    const auto v = field<long long>(fields, reader, "label");
    expect_end(fields, reader);
    if (v < 1) reader.fail("labels are 1-based positive integers");
    values.push_back(static_cast<std::size_t>(v - 1));
    max_label = std::max(max_label, static_cast<std::size_t>(v));
  }
  if (k == 0) k = max_label;
  try {
    return ClusterLabels(std::move(values), k);
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("invalid labels: ") + e.what());
  }
}

void write_censored(std::ostream& os, const CensoredObservation& obs) {
  os << obs.n << '\n';
  for (std::size_t i = 0; i < obs.n; ++i)
    for (std::size_t j = i + 1; j < obs.n; ++j)
      if (obs(i, j) != 0) os << i + 1 << ' ' << j + 1 << ' ' << static_cast<int>(obs(i, j)) << '\n';
}

CensoredObservation read_censored(std::istream& is, double alpha, double eps) {
  LineReader reader(is);
  std::istringstream fields;
  reader.expect(fields, "header 'n'");
  CensoredObservation obs;
  obs.n = field<std::size_t>(fields, reader, "n");
  expect_end(fields, reader);
  obs.alpha = alpha;
  obs.eps = eps;
  obs.z.assign(obs.n * obs.n, 0);
  while (reader.next(fields)) {
    const auto i = field<std::size_t>(fields, reader, "i");
    const auto j = field<std::size_t>(fields, reader, "j");
    const auto z = field<int>(fields, reader, "z");
    expect_end(fields, reader);
    if (i < 1 || j > obs.n || i >= j) reader.fail("entry must satisfy 1 <= i < j <= n");
    if (z != 1 && z != -1) reader.fail("z must be +1 or -1");
    obs.z[(i - 1) * obs.n + (j - 1)] = static_cast<std::int8_t>(z);
    obs.z[(j - 1) * obs.n + (i - 1)] = static_cast<std::int8_t>(z);
  }
  return obs;
}

void write_dense(std::ostream& os, const SymMatrix& m) {
  const std::size_t n = m.size();
  const auto old_precision = os.precision(17);
  os << n << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j) os << ' ';
      os << m(i, j);
    }
    os << '\n';
  }
  os.precision(old_precision);
}

SymMatrix read_dense(std::istream& is) {
  LineReader reader(is);
  std::istringstream fields;
  reader.expect(fields, "header 'n'");
  const auto n = field<std::size_t>(fields, reader, "n");
  expect_end(fields, reader);
  Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    reader.expect(fields, "matrix row");
    for (std::size_t j = 0; j < n; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          field<double>(fields, reader, "matrix entry");
    expect_end(fields, reader);
  }
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < i; ++j)
      if (m(i, j) != m(j, i)) throw FormatError("dense matrix is not symmetric");
  return SymMatrix(std::move(m));
}

void write_medoids(std::ostream& os, const MedoidModel& model) {
  os << model.medoid_rows.size() << '\n';
  for (std::size_t r : model.medoid_rows) os << r + 1 << '\n';
}

std::vector<std::size_t> read_medoids(std::istream& is) {
  LineReader reader(is);
  std::istringstream fields;
  reader.expect(fields, "header 'k'");
  const auto k = field<std::size_t>(fields, reader, "k");
  std::vector<std::size_t> rows;
  for (std::size_t c = 0; c < k; ++c) {
    reader.expect(fields, "medoid row");
    const auto r = field<std::size_t>(fields, reader, "row");
    if (r < 1) reader.fail("medoid rows are 1-based");
    rows.push_back(r - 1);
  }
  return rows;
}

void write_key_values(std::ostream& os, const KeyValues& kv) {
  for (const auto& [k, v] : kv) os << k << '=' << v << '\n';
}

KeyValues read_key_values(std::istream& is) {
  KeyValues kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw FormatError("expected key=value (line " + std::to_string(line_no) + ")");
    }
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

KeyValues solution_metadata(const SdpSolution& sol) {
  auto num = [](double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
  };
  return {
      {"formulation", to_string(sol.formulation)},
      {"lambda", num(sol.lambda)},
      {"objective", num(sol.objective)},
      {"iterations", std::to_string(sol.iterations)},
      {"primal_residual", num(sol.primal_residual)},
      {"dual_residual", num(sol.dual_residual)},
      {"penalty", num(sol.final_penalty)},
      {"converged", sol.converged ? "1" : "0"},
  };
}

void save_graph(const std::filesystem::path& path, const Graph& g) {
  auto os = open_out(path);
  write_graph(os, g);
}

Graph load_graph(const std::filesystem::path& path) {
  auto is = open_in(path);
  return read_graph(is);
}

void save_labels(const std::filesystem::path& path, const ClusterLabels& labels) {
  auto os = open_out(path);
  write_labels(os, labels);
}

ClusterLabels load_labels(const std::filesystem::path& path, std::size_t k) {
  auto is = open_in(path);
  return read_labels(is, k);
}

void save_censored(const std::filesystem::path& path, const CensoredObservation& obs) {
  auto os = open_out(path);
  write_censored(os, obs);
}

CensoredObservation load_censored(const std::filesystem::path& path, double alpha, double eps) {
  auto is = open_in(path);
  return read_censored(is, alpha, eps);
}

void save_dense(const std::filesystem::path& path, const SymMatrix& m) {
  auto os = open_out(path);
  write_dense(os, m);
}

SymMatrix load_dense(const std::filesystem::path& path) {
  auto is = open_in(path);
  return read_dense(is);
}

void save_medoids(const std::filesystem::path& path, const MedoidModel& model) {
  auto os = open_out(path);
  write_medoids(os, model);
}

void save_key_values(const std::filesystem::path& path, const KeyValues& kv) {
  auto os = open_out(path);
  write_key_values(os, kv);
}

KeyValues load_key_values(const std::filesystem::path& path) {
  auto is = open_in(path);
  return read_key_values(is);
}

}  // namespace sbmsdp::io
