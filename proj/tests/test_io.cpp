#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <sstream>

#include "sbmsdp/io.hpp"

namespace sbmsdp {
namespace {

TEST(GraphFormat, RoundTrip) {
  const auto labels = ClusterLabels::contiguous(20, 2);
  const Graph g = generate_sbm({20, 2, 0.5, 0.2}, labels, 3);
  std::stringstream ss;
  io::write_graph(ss, g);
  EXPECT_EQ(io::read_graph(ss).adjacency(), g.adjacency());
}

TEST(GraphFormat, OneBasedUpperTriangle) {
  std::stringstream ss;
  io::write_graph(ss, Graph::from_edges(3, {{0, 2}}));
  EXPECT_EQ(ss.str(), "3 1\n1 3\n");
}

TEST(GraphFormat, CommentsAndBlankLines) {
  std::istringstream in("# header\n4 2\n\n1 2\n# edge\n3 4\n");
  EXPECT_EQ(io::read_graph(in).edge_count(), 2u);
}

TEST(GraphFormat, Errors) {
  for (const char* bad : {"", "4\n", "4 1\n2 1\n", "4 1\n1 5\n", "4 2\n1 2\n", "4 1\n1 2\n3 4\n",
                          "4 1\n1 2 3\n", "4 1\nx y\n"}) {
    std::istringstream in(bad);
    EXPECT_THROW(io::read_graph(in), io::FormatError) << '"' << bad << '"';
  }
}

TEST(GraphFormat, ErrorNamesLine) {
  std::istringstream in("3 1\n\n2 9\n");
  try {
    io::read_graph(in);
    FAIL();
  } catch (const io::FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(LabelsFormat, RoundTrip) {
  const auto labels = ClusterLabels::shuffled(12, 3, 5);
  std::stringstream ss;
  io::write_labels(ss, labels);
  EXPECT_EQ(io::read_labels(ss, 3), labels);
}

TEST(LabelsFormat, InfersKAndRejectsBadValues) {
  std::istringstream in("1\n2\n3\n1\n");
  EXPECT_EQ(io::read_labels(in).k(), 3u);
  std::istringstream zero("0\n1\n");
  EXPECT_THROW(io::read_labels(zero), io::FormatError);
  std::istringstream gap("1\n3\n");
  EXPECT_THROW(io::read_labels(gap), io::FormatError);
}

TEST(CensoredFormat, RoundTrip) {
  const auto obs =
      generate_censored({16, 2, 0, 0}, ClusterLabels::contiguous(16, 2), 0.5, 0.1, 4);
  std::stringstream ss;
  io::write_censored(ss, obs);
  const auto back = io::read_censored(ss, 0.5, 0.1);
  EXPECT_EQ(back.z, obs.z);
  EXPECT_EQ(back.alpha, 0.5);
}

TEST(CensoredFormat, RejectsBadSign) {
  std::istringstream in("3\n1 2 0\n");
  EXPECT_THROW(io::read_censored(in), io::FormatError);
}

TEST(DenseFormat, ExactRoundTrip) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  SymMatrix m(7);
  for (std::size_t i = 0; i < 7; ++i)
    for (std::size_t j = i; j < 7; ++j) m.set(i, j, u(rng) / 3.0);
  std::stringstream ss;
  io::write_dense(ss, m);
  EXPECT_EQ(io::read_dense(ss), m);
}

TEST(DenseFormat, RejectsAsymmetricOrShortInput) {
  std::istringstream asym("2\n1 0.5\n0.4 1\n");
  EXPECT_THROW(io::read_dense(asym), io::FormatError);
  std::istringstream shorter("2\n1 0.5\n");
  EXPECT_THROW(io::read_dense(shorter), io::FormatError);
}

TEST(MedoidsFormat, RoundTrip) {
  const MedoidModel m{{4, 0, 2}, ClusterLabels({1, 1, 2, 2, 0}, 3), 0.0};
  std::stringstream ss;
  io::write_medoids(ss, m);
  EXPECT_EQ(ss.str(), "3\n5\n1\n3\n");
  EXPECT_EQ(io::read_medoids(ss), m.medoid_rows);
}

TEST(KeyValues, RoundTripAndMetadata) {
  SdpSolution sol;
  sol.formulation = Formulation::kSdp2;
  sol.iterations = 17;
  sol.converged = true;
  sol.objective = 1.0 / 3.0;
  const auto kv = io::solution_metadata(sol);
  std::stringstream ss;
  io::write_key_values(ss, kv);
  const auto back = io::read_key_values(ss);
  EXPECT_EQ(back, kv);
  EXPECT_EQ(back.at("formulation"), "sdp2");
  EXPECT_EQ(back.at("iterations"), "17");
  EXPECT_EQ(std::stod(back.at("objective")), 1.0 / 3.0);
  std::istringstream bad("novalue\n");
  EXPECT_THROW(io::read_key_values(bad), io::FormatError);
}

TEST(Files, SaveLoadAndMissingFile) {
  const auto dir = std::filesystem::temp_directory_path() / "sbmsdp_io_test";
  std::filesystem::create_directories(dir);
  const Graph g = Graph::from_edges(5, {{0, 1}, {3, 4}});
  io::save_graph(dir / "g.txt", g);
  EXPECT_EQ(io::load_graph(dir / "g.txt").adjacency(), g.adjacency());
  EXPECT_THROW(io::load_graph(dir / "missing.txt"), std::runtime_error);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace sbmsdp
