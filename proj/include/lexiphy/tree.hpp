#pragma once

// Rooted phylogenetic trees stored as a flat node array, plus Newick I/O.

#include <boost/dynamic_bitset.hpp>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lexiphy {

using NodeId = int;
constexpr NodeId kNoNode = -1;

struct TreeNode {
  NodeId parent = kNoNode;
  std::vector<NodeId> children;
  // Length of the branch leading to the parent.
  double length = 0.0;
  std::string label;
  // Clade support in [0, 1], written as the internal-node label.
  std::optional<double> support;
};

class PhyloTree {
 public:
  PhyloTree() = default;

  NodeId AddNode(std::string label = {}, double length = 0.0);
  void AddChild(NodeId parent, NodeId child);
  void SetRoot(NodeId root) { root_ = root; }

  NodeId root() const { return root_; }
  size_t NodeCount() const { return nodes_.size(); }
  const TreeNode &node(NodeId id) const { return nodes_.at(static_cast<size_t>(id)); }
  TreeNode &mutable_node(NodeId id) { return nodes_.at(static_cast<size_t>(id)); }
  const std::vector<TreeNode> &nodes() const { return nodes_; }
  bool IsLeaf(NodeId id) const { return node(id).children.empty(); }

  // Children before parents, children visited in stored order.
  std::vector<NodeId> Postorder() const;
  std::vector<NodeId> Preorder() const;
  std::vector<NodeId> Leaves() const;
  // Leaf labels sorted ascending.
  std::vector<std::string> LeafLabels() const;
  size_t LeafCount() const;
  std::optional<NodeId> FindLeaf(std::string_view label) const;

  // Every internal node has exactly two children.
  bool IsBinary() const;
  // Binary, every non-root branch positive, leaf labels non-empty and unique.
  // Throws InvalidArgument.
  void Validate() const;

  // Rewires `child` (currently under some parent) to sit under `new_parent`.
  void Reattach(NodeId child, NodeId new_parent);

 private:
  std::vector<TreeNode> nodes_;
  NodeId root_ = kNoNode;
};

using LeafSet = boost::dynamic_bitset<>;

// Leaf set below each node, indexed by node id, over `leaf_order` positions.
std::vector<LeafSet> CladeSets(const PhyloTree &tree, const std::vector<std::string> &leaf_order);

// Throws ParseError with the byte offset on malformed input. Numeric
// internal-node labels are read as supports.
PhyloTree ParseNewick(std::string_view text);

struct NewickOptions {
  bool lengths = true;
  bool supports = false;
};
std::string EmitNewick(const PhyloTree &tree, const NewickOptions &options = {});

// Children ordered by the smallest leaf label beneath them.
PhyloTree CanonicalOrder(const PhyloTree &tree);
// Canonical Newick string without lengths or supports; equal keys mean equal
// rooted topologies.
std::string TopologyKey(const PhyloTree &tree);

// Moves the root onto the branch above `node`, splitting it at `fraction`
// of its length measured from `node`. The old root (degree two) is
// suppressed and its two branches merged.
PhyloTree RerootAbove(const PhyloTree &tree, NodeId node, double fraction = 0.5);

// Shortest round-trip decimal form.
std::string FormatDouble(double value);

}  // namespace lexiphy
