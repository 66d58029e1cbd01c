#pragma once

// Independent reference computations used to freeze and cross-check expected
// values. Nothing here calls the routine it is meant to check.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "lexiphy/phylo.hpp"
#include "lexiphy/tree.hpp"

namespace lexiphy::oracle {

// Memoized recursive edit distance.
template <typename T>
size_t RecursiveEditDistance(const std::vector<T> &a, const std::vector<T> &b) {
  std::map<std::pair<size_t, size_t>, size_t> memo;
  std::function<size_t(size_t, size_t)> go = [&](size_t i, size_t j) -> size_t {
    if (i == 0) return j;
    if (j == 0) return i;
    auto key = std::make_pair(i, j);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    size_t best = std::min(go(i - 1, j) + 1, go(i, j - 1) + 1);
    best = std::min(best, go(i - 1, j - 1) + (a[i - 1] == b[j - 1] ? 0 : 1));
    memo[key] = best;
    return best;
  };
  return go(a.size(), b.size());
}

// Every order-preserving subsequence of length n, by scanning bit masks.
inline std::set<std::string> SubsequencesByMask(const std::string &s, size_t n) {
  std::set<std::string> out;
  for (unsigned mask = 0; mask < (1u << s.size()); ++mask) {
    if (static_cast<size_t>(__builtin_popcount(mask)) != n) continue;
    std::string gram;
    for (size_t i = 0; i < s.size(); ++i) {
      if (mask & (1u << i)) gram.push_back(s[i]);
    }
    out.insert(gram);
  }
  return out;
}

// Maximum score over every global alignment, enumerated recursively.
inline double BestAlignmentScore(const std::string &a, const std::string &b, double match,
                                 double mismatch, double gap) {
  std::function<double(size_t, size_t)> go = [&](size_t i, size_t j) -> double {
    if (i == a.size() && j == b.size()) return 0.0;
    double best = -1e300;
    if (i < a.size() && j < b.size()) {
      best = std::max(best, (a[i] == b[j] ? match : mismatch) + go(i + 1, j + 1));
    }
    if (i < a.size()) best = std::max(best, gap + go(i + 1, j));
    if (j < b.size()) best = std::max(best, gap + go(i, j + 1));
    return best;
  };
  return go(0, 0);
}

// Distinct rooted binary topologies on `labels`, as canonical parenthesized
// strings, built from every unordered bipartition of each leaf set.
inline std::set<std::string> RootedTopologyStrings(const std::vector<std::string> &labels) {
  std::map<std::vector<std::string>, std::set<std::string>> memo;
  std::function<std::set<std::string>(const std::vector<std::string> &)> go =
      [&](const std::vector<std::string> &set) -> std::set<std::string> {
    if (set.size() == 1) return {set[0]};
    if (auto it = memo.find(set); it != memo.end()) return it->second;
    std::set<std::string> out;
    const size_t n = set.size();
    for (unsigned mask = 1; mask < (1u << n) - 1; ++mask) {
      if (!(mask & 1u)) continue;  // first leaf always on the left
      std::vector<std::string> left, right;
      for (size_t i = 0; i < n; ++i) ((mask >> i) & 1u ? left : right).push_back(set[i]);
      for (const auto &l : go(left)) {
        for (const auto &r : go(right)) {
          out.insert("(" + std::min(l, r) + "," + std::max(l, r) + ")");
        }
      }
    }
    memo[set] = out;
    return out;
  };
  auto sorted = labels;
  std::sort(sorted.begin(), sorted.end());
  return go(sorted);
}

// Rooted trees for every topology with all branches set to `length`.
inline std::vector<PhyloTree> RootedTopologies(const std::vector<std::string> &labels,
                                               double length) {
  std::vector<PhyloTree> trees;
  for (const auto &shape : RootedTopologyStrings(labels)) {
    PhyloTree tree = ParseNewick(shape + ";");
    for (NodeId id = 0; id < static_cast<NodeId>(tree.NodeCount()); ++id) {
      if (id != tree.root()) tree.mutable_node(id).length = length;
    }
    trees.push_back(std::move(tree));
  }
  return trees;
}

inline double TransitionClosedForm(double pi1, double mu, double t, int from, int to) {
  const double pi_to = to == 1 ? pi1 : 1.0 - pi1;
  return pi_to + ((from == to ? 1.0 : 0.0) - pi_to) * std::exp(-mu * t);
}

// Log likelihood by summing over every joint assignment of internal states.
inline double ExhaustiveLogLikelihood(const PhyloTree &tree, const CharacterMatrix &matrix,
                                      const SubstParams &params) {
  std::vector<NodeId> internal;
  for (NodeId id = 0; id < static_cast<NodeId>(tree.NodeCount()); ++id) {
    if (!tree.IsLeaf(id)) internal.push_back(id);
  }
  std::map<std::string, size_t> row;
  for (size_t i = 0; i < matrix.LanguageCount(); ++i) row[matrix.languages()[i]] = i;
  double total = 0.0;
  for (size_t col = 0; col < matrix.ColumnCount(); ++col) {
    double column_sum = 0.0;
    for (unsigned assign = 0; assign < (1u << internal.size()); ++assign) {
      std::vector<int> state(tree.NodeCount(), 0);
      for (size_t k = 0; k < internal.size(); ++k) state[internal[k]] = (assign >> k) & 1u;
      for (NodeId id = 0; id < static_cast<NodeId>(tree.NodeCount()); ++id) {
        if (tree.IsLeaf(id)) state[id] = matrix(row.at(tree.node(id).label), col);
      }
      double p = state[tree.root()] == 1 ? params.pi1 : 1.0 - params.pi1;
      for (NodeId id = 0; id < static_cast<NodeId>(tree.NodeCount()); ++id) {
        if (id == tree.root()) continue;
        p *= TransitionClosedForm(params.pi1, params.mu, tree.node(id).length,
                                  state[tree.node(id).parent], state[id]);
      }
      column_sum += p;
    }
    total += std::log(column_sum);
  }
  return total;
}

// Unrooted path lengths in edges (degree-two root suppressed), then the
// four-point condition: 0 = ab|cd, 1 = ac|bd, 2 = ad|bc, 3 = star.
inline int FourPointQuartet(const PhyloTree &tree, const std::array<std::string, 4> &leaves) {
  const size_t n = tree.NodeCount();
  std::vector<std::vector<NodeId>> adjacency(n);
  const NodeId root = tree.root();
  const auto &rc = tree.node(root).children;
  for (NodeId id = 0; id < static_cast<NodeId>(n); ++id) {
    const NodeId parent = tree.node(id).parent;
    if (parent == kNoNode) continue;
    if (rc.size() == 2 && parent == root) continue;
    adjacency[id].push_back(parent);
    adjacency[parent].push_back(id);
  }
  if (rc.size() == 2) {
    adjacency[rc[0]].push_back(rc[1]);
    adjacency[rc[1]].push_back(rc[0]);
  }
  auto distances_from = [&](NodeId source) {
    std::vector<int> dist(n, -1);
    std::vector<NodeId> queue = {source};
    dist[source] = 0;
    for (size_t q = 0; q < queue.size(); ++q) {
      for (NodeId next : adjacency[queue[q]]) {
        if (dist[next] < 0) {
          dist[next] = dist[queue[q]] + 1;
          queue.push_back(next);
        }
      }
    }
    return dist;
  };
  std::array<NodeId, 4> ids{};
  for (size_t k = 0; k < 4; ++k) ids[k] = *tree.FindLeaf(leaves[k]);
  std::array<std::vector<int>, 4> d;
  for (size_t k = 0; k < 4; ++k) d[k] = distances_from(ids[k]);
  const int s0 = d[0][ids[1]] + d[2][ids[3]];
  const int s1 = d[0][ids[2]] + d[1][ids[3]];
  const int s2 = d[0][ids[3]] + d[1][ids[2]];
  if (s0 < s1 && s0 < s2) return 0;
  if (s1 < s0 && s1 < s2) return 1;
  if (s2 < s0 && s2 < s1) return 2;
  return 3;
}

// B-Cubed by direct pairwise counting.
inline std::array<double, 2> PairwiseBcubed(const std::vector<int> &pred, const std::vector<int> &gold) {
  double precision = 0.0, recall = 0.0;
  for (size_t i = 0; i < pred.size(); ++i) {
    double both = 0, same_pred = 0, same_gold = 0;
    for (size_t j = 0; j < pred.size(); ++j) {
      same_pred += pred[i] == pred[j];
      same_gold += gold[i] == gold[j];
      both += pred[i] == pred[j] && gold[i] == gold[j];
    }
    precision += both / same_pred;
    recall += both / same_gold;
  }
  return {precision / pred.size(), recall / pred.size()};
}

}  // namespace lexiphy::oracle
