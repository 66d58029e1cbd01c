#pragma once

// Clustering and tree comparison scores: item-level B-Cubed and the
// generalized quartet distance.

#include <array>
#include <cstdint>
#include <string>

#include "lexiphy/cognate.hpp"
#include "lexiphy/tree.hpp"

namespace lexiphy {

struct BcubedScore {
  double precision = 0.0;
  double recall = 0.0;
  double fscore = 0.0;
};

// Unweighted means over items of |C(i) & G(i)| / |C(i)| and / |G(i)|.
// Throws DomainMismatch unless both partitions cover the same ids.
BcubedScore Bcubed(const CognatePartition &predicted, const CognatePartition &gold);

enum class Quartet { kAbCd, kAcBd, kAdBc, kStar };

std::string QuartetName(Quartet quartet, const std::array<std::string, 4> &leaves);

// Unrooted topology induced on four leaves; kStar when no branch separates
// two of them from the other two. Throws UnknownLeaf.
Quartet QuartetTopology(const PhyloTree &tree, const std::array<std::string, 4> &leaves);

struct QuartetReport {
  uint64_t total_quartets = 0;
  uint64_t gold_resolved = 0;
  uint64_t shared = 0;
  double gqd = 0.0;  // (gold_resolved - shared) / gold_resolved
};

// Exhaustive over all four-leaf subsets. Throws LeafSetMismatch when the leaf
// sets differ or hold fewer than four leaves.
QuartetReport Gqd(const PhyloTree &inferred, const PhyloTree &gold);

}  // namespace lexiphy
