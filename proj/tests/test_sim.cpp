#include <cmath>

#include "doctest.h"
#include "lexiphy/sim.hpp"
#include "oracles.hpp"

using namespace lexiphy;

TEST_CASE("language names sort numerically") {
  CHECK(LanguageNames(3) == std::vector<std::string>{"L1", "L2", "L3"});
  const auto many = LanguageNames(12);
  CHECK(many.front() == "L01");
  CHECK(std::is_sorted(many.begin(), many.end()));
}

TEST_CASE("random tree basics") {
  Rng rng(1);
  const PhyloTree cherry = RandomTree({"A", "B"}, 2.0, rng);
  CHECK(TopologyKey(cherry) == "(A,B);");
  for (int trial = 0; trial < 100; ++trial) {
    const PhyloTree tree = RandomTree(LanguageNames(2 + rng.Index(10)), 3.0, rng);
    CHECK_NOTHROW(tree.Validate());
  }
}

TEST_CASE("random topologies are uniform") {
  const auto labels = LanguageNames(4);
  const auto all = oracle::RootedTopologyStrings(labels);
  REQUIRE(all.size() == 15);
  Rng rng(2718);
  std::map<std::string, size_t> counts;
  const size_t draws = 100000;
  for (size_t i = 0; i < draws; ++i) ++counts[TopologyKey(RandomTree(labels, 1.0, rng))];
  CHECK(counts.size() == 15);
  double chi2 = 0.0;
  const double expected = draws / 15.0;
  for (const auto &[key, count] : counts) {
    CHECK(std::abs(count / static_cast<double>(draws) - 1.0 / 15.0) < 0.01);
    chi2 += (count - expected) * (count - expected) / expected;
  }
  // chi-square with 14 degrees of freedom, 0.999 quantile
  CHECK(chi2 < 36.12);
}

TEST_CASE("no substitutions gives constant columns") {
  Rng rng(4);
  const PhyloTree tree = RandomTree(LanguageNames(6), 1.0, rng);
  const auto matrix = EvolveMatrix(tree, {0.3, 0.0}, 500, 9);
  size_t ones = 0;
  for (size_t c = 0; c < matrix.ColumnCount(); ++c) {
    const size_t sum = matrix.ColumnSum(c);
    CHECK((sum == 0 || sum == 6));
    ones += sum == 6;
  }
  CHECK(std::abs(ones / 500.0 - 0.3) < 0.07);
}

TEST_CASE("long branches give independent stationary leaves") {
  PhyloTree tree = ParseNewick("((A:1e6,B:1e6):1e6,(C:1e6,D:1e6):1e6);");
  const auto matrix = EvolveMatrix(tree, {0.3, 1.0}, 10000, 5);
  for (size_t r = 0; r < 4; ++r) {
    size_t ones = 0;
    for (size_t c = 0; c < matrix.ColumnCount(); ++c) ones += matrix(r, c);
    CHECK(std::abs(ones / 10000.0 - 0.3) < 0.02);
  }
  // independence: A and B agree as often as two independent draws would
  size_t agree = 0;
  for (size_t c = 0; c < matrix.ColumnCount(); ++c) agree += matrix(0, c) == matrix(1, c);
  CHECK(std::abs(agree / 10000.0 - (0.09 + 0.49)) < 0.02);
}

TEST_CASE("simulation is deterministic") {
  const SimConfig config;
  const Simulation a = Simulate(config);
  const Simulation b = Simulate(config);
  CHECK(a.matrix == b.matrix);
  CHECK(EmitNewick(a.tree) == EmitNewick(b.tree));
  CHECK(a.matrix.LanguageCount() == 6);
  CHECK(a.matrix.ColumnCount() == 200);
  SimConfig other = config;
  other.seed = 8;
  CHECK_FALSE(Simulate(other).matrix == a.matrix);
}

TEST_CASE("pattern frequencies match pruning likelihoods") {
  const PhyloTree tree = ParseNewick("((A:0.2,B:0.4):0.3,(C:0.5,D:0.1):0.25);");
  const SubstParams p{0.35, 1.0};
  const size_t columns = 10000;
  const auto matrix = EvolveMatrix(tree, p, columns, 31);
  std::map<unsigned, size_t> observed;
  for (size_t c = 0; c < columns; ++c) {
    unsigned code = 0;
    for (size_t r = 0; r < 4; ++r) code |= static_cast<unsigned>(matrix(r, c)) << r;
    ++observed[code];
  }
  double tv = 0.0, total = 0.0;
  for (unsigned code = 0; code < 16; ++code) {
    std::vector<uint8_t> cells;
    for (size_t r = 0; r < 4; ++r) cells.push_back((code >> r) & 1u);
    const double prob = std::exp(PruningLogLikelihood(tree, CharacterMatrix({"A", "B", "C", "D"}, {"x"}, cells), p));
    total += prob;
    const double freq = observed.count(code) ? observed[code] / static_cast<double>(columns) : 0.0;
    tv += std::abs(freq - prob);
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(0.5 * tv < 0.02);
}
