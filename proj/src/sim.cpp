#include "lexiphy/sim.hpp"

#include <algorithm>
#include <map>

#include "lexiphy/error.hpp"

namespace lexiphy {

std::vector<std::string> LanguageNames(size_t n) {
  const size_t width = std::to_string(n).size();
  std::vector<std::string> names;
  for (size_t i = 1; i <= n; ++i) {
    std::string digits = std::to_string(i);
    names.push_back("L" + std::string(width - digits.size(), '0') + digits);
  }
  return names;
}

PhyloTree RandomTree(const std::vector<std::string> &labels, double rate, Rng &rng) {
  if (labels.size() < 2) Fail(ErrorCode::kInvalidArgument, "random tree needs at least 2 leaves");
  if (!(rate > 0.0)) Fail(ErrorCode::kInvalidArgument, "branch-length rate must be positive");
  PhyloTree tree;
  const NodeId root = tree.AddNode();
  tree.SetRoot(root);
  tree.AddChild(root, tree.AddNode(labels[0]));
  tree.AddChild(root, tree.AddNode(labels[1]));
  for (size_t k = 2; k < labels.size(); ++k) {
    std::vector<NodeId> positions;  // branch above each node, root included
    for (NodeId id : tree.Preorder()) positions.push_back(id);
    const NodeId target = positions[rng.Index(positions.size())];
    const NodeId joint = tree.AddNode();
    const NodeId leaf = tree.AddNode(labels[k]);
    if (target == tree.root()) {
      tree.AddChild(joint, target);
      tree.SetRoot(joint);
    } else {
      const NodeId parent = tree.node(target).parent;
      auto &siblings = tree.mutable_node(parent).children;
      std::replace(siblings.begin(), siblings.end(), target, joint);
      tree.mutable_node(joint).parent = parent;
      tree.AddChild(joint, target);
    }
    tree.AddChild(joint, leaf);
  }
  for (NodeId id : tree.Preorder()) {
    if (id != tree.root()) tree.mutable_node(id).length = rng.Exponential(rate);
  }
  return tree;
}

CharacterMatrix EvolveMatrix(const PhyloTree &tree, const SubstParams &params, size_t n_columns,
                             uint64_t seed) {
  if (n_columns == 0) Fail(ErrorCode::kInvalidArgument, "need at least one column");
  const auto preorder = tree.Preorder();
  std::vector<TransitionMatrix> transition(tree.NodeCount());
  for (NodeId id : preorder) {
    if (id != tree.root()) transition[static_cast<size_t>(id)] = Transition(params, tree.node(id).length);
  }
  const auto languages = tree.LeafLabels();
  std::map<std::string, size_t> row_of;
  for (size_t i = 0; i < languages.size(); ++i) row_of[languages[i]] = i;

  std::vector<uint8_t> cells(languages.size() * n_columns, 0);
  std::vector<uint8_t> state(tree.NodeCount(), 0);
  for (size_t col = 0; col < n_columns; ++col) {
    Rng rng(DeriveSeed(seed, col));
    for (NodeId id : preorder) {
      const auto &node = tree.node(id);
      if (id == tree.root()) {
        state[static_cast<size_t>(id)] = rng.Bernoulli(params.pi1) ? 1 : 0;
      } else {
        const auto &p = transition[static_cast<size_t>(id)];
        const uint8_t from = state[static_cast<size_t>(node.parent)];
        state[static_cast<size_t>(id)] = rng.Bernoulli(p[from][1]) ? 1 : 0;
      }
      if (node.children.empty()) {
        cells[row_of.at(node.label) * n_columns + col] = state[static_cast<size_t>(id)];
      }
    }
  }
  std::vector<std::string> column_ids;
  for (size_t col = 1; col <= n_columns; ++col) column_ids.push_back("c" + std::to_string(col));
  return CharacterMatrix(languages, std::move(column_ids), std::move(cells));
}

Simulation Simulate(const SimConfig &config) {
  if (config.n_languages < 3) Fail(ErrorCode::kInvalidArgument, "simulation needs >= 3 languages");
  if (!(config.params.pi1 > 0.0 && config.params.pi1 < 1.0) || !(config.params.mu >= 0.0)) {
    Fail(ErrorCode::kInvalidArgument, "pi1 must lie in (0, 1) and mu must be >= 0");
  }
  Rng tree_rng(DeriveSeed(config.seed, UINT64_MAX));
  Simulation sim;
  sim.tree = RandomTree(LanguageNames(config.n_languages), config.branch_rate, tree_rng);
  sim.matrix = EvolveMatrix(sim.tree, config.params, config.n_columns, config.seed);
  return sim;
}

}  // namespace lexiphy
