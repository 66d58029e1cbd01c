#include "lexiphy/eval.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "lexiphy/error.hpp"

namespace lexiphy {

BcubedScore Bcubed(const CognatePartition &predicted, const CognatePartition &gold) {
  if (predicted.assignment.size() != gold.assignment.size()) {
    Fail(ErrorCode::kDomainMismatch, "partitions cover different numbers of items");
  }
  std::map<std::pair<int64_t, int64_t>, size_t> overlap;
  std::map<int64_t, size_t> predicted_size, gold_size;
  for (const auto &[id, cluster] : predicted.assignment) {
    auto it = gold.assignment.find(id);
    if (it == gold.assignment.end()) {
      Fail(ErrorCode::kDomainMismatch, "item " + std::to_string(id) + " missing from gold");
    }
    ++overlap[{cluster, it->second}];
    ++predicted_size[cluster];
    ++gold_size[it->second];
  }
  BcubedScore score;
  if (predicted.assignment.empty()) return score;
  double precision = 0.0, recall = 0.0;
  for (const auto &[id, cluster] : predicted.assignment) {
    const int64_t truth = gold.assignment.at(id);
    const auto shared = static_cast<double>(overlap[{cluster, truth}]);
    precision += shared / static_cast<double>(predicted_size[cluster]);
    recall += shared / static_cast<double>(gold_size[truth]);
  }
  const auto n = static_cast<double>(predicted.assignment.size());
  score.precision = precision / n;
  score.recall = recall / n;
  const double sum = score.precision + score.recall;
  score.fscore = sum > 0.0 ? 2.0 * score.precision * score.recall / sum : 0.0;
  return score;
}

std::string QuartetName(Quartet quartet, const std::array<std::string, 4> &l) {
  switch (quartet) {
    case Quartet::kAbCd: return l[0] + l[1] + "|" + l[2] + l[3];
    case Quartet::kAcBd: return l[0] + l[2] + "|" + l[1] + l[3];
    case Quartet::kAdBc: return l[0] + l[3] + "|" + l[1] + l[2];
    case Quartet::kStar: return "star";
  }
  return "?";
}

namespace {

// Four-bit membership mask of each non-root clade over the quartet; a clade
// holding exactly two of the four splits them from the other two.
Quartet ResolveQuartet(const std::vector<LeafSet> &clades, NodeId root,
                       const std::array<size_t, 4> &positions) {
  for (size_t node = 0; node < clades.size(); ++node) {
    if (static_cast<NodeId>(node) == root) continue;
    const auto &clade = clades[node];
    unsigned mask = 0;
    for (unsigned k = 0; k < 4; ++k) {
      if (clade.test(positions[k])) mask |= 1u << k;
    }
    switch (mask) {
      case 0b0011: case 0b1100: return Quartet::kAbCd;
      case 0b0101: case 0b1010: return Quartet::kAcBd;
      case 0b1001: case 0b0110: return Quartet::kAdBc;
      default: break;
    }
  }
  return Quartet::kStar;
}

}  // namespace

Quartet QuartetTopology(const PhyloTree &tree, const std::array<std::string, 4> &leaves) {
  const auto labels = tree.LeafLabels();
  std::array<size_t, 4> positions{};
  for (size_t k = 0; k < 4; ++k) {
    auto it = std::lower_bound(labels.begin(), labels.end(), leaves[k]);
    if (it == labels.end() || *it != leaves[k]) {
      Fail(ErrorCode::kUnknownLeaf, "leaf '" + leaves[k] + "' not in tree");
    }
    positions[k] = static_cast<size_t>(it - labels.begin());
  }
  if (std::set<size_t>(positions.begin(), positions.end()).size() != 4) {
    Fail(ErrorCode::kInvalidArgument, "quartet leaves must be distinct");
  }
  return ResolveQuartet(CladeSets(tree, labels), tree.root(), positions);
}

QuartetReport Gqd(const PhyloTree &inferred, const PhyloTree &gold) {
  const auto labels = gold.LeafLabels();
  if (inferred.LeafLabels() != labels) {
    Fail(ErrorCode::kLeafSetMismatch, "trees have different leaf sets");
  }
  if (labels.size() < 4) Fail(ErrorCode::kLeafSetMismatch, "quartet distance needs >= 4 leaves");
  const auto inferred_clades = CladeSets(inferred, labels);
  const auto gold_clades = CladeSets(gold, labels);

  QuartetReport report;
  const size_t n = labels.size();
  for (size_t a = 0; a < n; ++a) {
    for (size_t b = a + 1; b < n; ++b) {
      for (size_t c = b + 1; c < n; ++c) {
        for (size_t d = c + 1; d < n; ++d) {
          const std::array<size_t, 4> positions = {a, b, c, d};
          ++report.total_quartets;
          const Quartet truth = ResolveQuartet(gold_clades, gold.root(), positions);
          if (truth == Quartet::kStar) continue;
          ++report.gold_resolved;
          if (ResolveQuartet(inferred_clades, inferred.root(), positions) == truth) ++report.shared;
        }
      }
    }
  }
  report.gqd = report.gold_resolved == 0
                   ? 0.0
                   : static_cast<double>(report.gold_resolved - report.shared) /
                         static_cast<double>(report.gold_resolved);
  return report;
}

}  // namespace lexiphy
