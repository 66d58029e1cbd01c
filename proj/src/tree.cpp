#include "lexiphy/tree.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <set>

#include "lexiphy/error.hpp"

namespace lexiphy {

NodeId PhyloTree::AddNode(std::string label, double length) {
  TreeNode node;
  node.label = std::move(label);
  node.length = length;
  nodes_.push_back(std::move(node));
  return static_cast<NodeId>(nodes_.size() - 1);
}

void PhyloTree::AddChild(NodeId parent, NodeId child) {
  mutable_node(parent).children.push_back(child);
  mutable_node(child).parent = parent;
}

void PhyloTree::Reattach(NodeId child, NodeId new_parent) {
  const NodeId old_parent = node(child).parent;
  if (old_parent != kNoNode) {
    auto &siblings = mutable_node(old_parent).children;
    std::replace(siblings.begin(), siblings.end(), child, kNoNode);
    siblings.erase(std::remove(siblings.begin(), siblings.end(), kNoNode), siblings.end());
  }
  AddChild(new_parent, child);
}

std::vector<NodeId> PhyloTree::Preorder() const {
  std::vector<NodeId> order;
  if (root_ == kNoNode) return order;
  std::vector<NodeId> stack = {root_};
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    order.push_back(id);
    const auto &children = node(id).children;
    for (auto it = children.rbegin(); it != children.rend(); ++it) stack.push_back(*it);
  }
  return order;
}

std::vector<NodeId> PhyloTree::Postorder() const {
  std::vector<NodeId> order;
  if (root_ == kNoNode) return order;
  // Reverse of a root-first traversal that pushes children in stored order.
  std::vector<NodeId> stack = {root_};
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    order.push_back(id);
    for (NodeId child : node(id).children) stack.push_back(child);
  }
  std::reverse(order.begin(), order.end());
  return order;
}

std::vector<NodeId> PhyloTree::Leaves() const {
  std::vector<NodeId> leaves;
  for (NodeId id : Preorder()) {
    if (IsLeaf(id)) leaves.push_back(id);
  }
  return leaves;
}

std::vector<std::string> PhyloTree::LeafLabels() const {
  std::vector<std::string> labels;
  for (NodeId id : Leaves()) labels.push_back(node(id).label);
  std::sort(labels.begin(), labels.end());
  return labels;
}

size_t PhyloTree::LeafCount() const { return Leaves().size(); }

std::optional<NodeId> PhyloTree::FindLeaf(std::string_view label) const {
  for (NodeId id : Leaves()) {
    if (node(id).label == label) return id;
  }
  return std::nullopt;
}

bool PhyloTree::IsBinary() const {
  for (NodeId id : Preorder()) {
    const size_t degree = node(id).children.size();
    if (degree != 0 && degree != 2) return false;
  }
  return true;
}

void PhyloTree::Validate() const {
  if (root_ == kNoNode) Fail(ErrorCode::kInvalidArgument, "tree has no root");
  if (!IsBinary()) Fail(ErrorCode::kInvalidArgument, "tree is not binary");
  std::set<std::string> seen;
  for (NodeId id : Preorder()) {
    const auto &n = node(id);
    if (id != root_ && !(n.length > 0.0 && std::isfinite(n.length))) {
      Fail(ErrorCode::kInvalidArgument, "branch lengths must be positive and finite");
    }
    if (n.children.empty()) {
      if (n.label.empty()) Fail(ErrorCode::kInvalidArgument, "unlabelled leaf");
      if (!seen.insert(n.label).second) {
        Fail(ErrorCode::kInvalidArgument, "duplicate leaf label '" + n.label + "'");
      }
    }
  }
}

std::vector<LeafSet> CladeSets(const PhyloTree &tree, const std::vector<std::string> &leaf_order) {
  std::map<std::string, size_t> position;
  for (size_t i = 0; i < leaf_order.size(); ++i) position[leaf_order[i]] = i;
  std::vector<LeafSet> sets(tree.NodeCount(), LeafSet(leaf_order.size()));
  for (NodeId id : tree.Postorder()) {
    const auto &n = tree.node(id);
    if (n.children.empty()) {
      auto it = position.find(n.label);
      if (it == position.end()) Fail(ErrorCode::kUnknownLeaf, "leaf '" + n.label + "'");
      sets[static_cast<size_t>(id)].set(it->second);
    } else {
      for (NodeId child : n.children) sets[static_cast<size_t>(id)] |= sets[static_cast<size_t>(child)];
    }
  }
  return sets;
}

std::string FormatDouble(double value) {
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, end);
}

namespace {

class NewickParser {
 public:
  explicit NewickParser(std::string_view text) : text_(text) {}

  PhyloTree Parse() {
    SkipSpace();
    const NodeId root = ParseSubtree();
    SkipSpace();
    if (Peek() == ':') {
      ++pos_;
      tree_.mutable_node(root).length = ParseNumber();
      SkipSpace();
    }
    Expect(';');
    SkipSpace();
    if (pos_ != text_.size()) Error("trailing characters after ';'");
    tree_.SetRoot(root);
    return std::move(tree_);
  }

 private:
  [[noreturn]] void Error(const std::string &message) const {
    Fail(ErrorCode::kParse, message + " at position " + std::to_string(pos_));
  }

  char Peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void Expect(char c) {
    if (Peek() != c) Error(std::string("expected '") + c + "'");
    ++pos_;
  }

  void SkipSpace() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        ++pos_;
      } else if (c == '[') {
        const auto close = text_.find(']', pos_);
        if (close == std::string_view::npos) Error("unterminated comment");
        pos_ = close + 1;
      } else {
        break;
      }
    }
  }

  NodeId ParseSubtree() {
    NodeId id;
    if (Peek() == '(') {
      ++pos_;
      id = tree_.AddNode();
      while (true) {
        SkipSpace();
        const NodeId child = ParseSubtree();
        tree_.AddChild(id, child);
        SkipSpace();
        if (Peek() == ',') {
          ++pos_;
          continue;
        }
        Expect(')');
        break;
      }
      SkipSpace();
      const std::string label = ParseLabel();
      if (!label.empty()) {
        double value = 0.0;
        auto [end, ec] = std::from_chars(label.data(), label.data() + label.size(), value);
        if (ec == std::errc() && end == label.data() + label.size()) {
          tree_.mutable_node(id).support = value;
        } else {
          tree_.mutable_node(id).label = label;
        }
      }
    } else {
      const std::string label = ParseLabel();
      if (label.empty()) Error("expected a leaf label");
      id = tree_.AddNode(label);
    }
    SkipSpace();
    if (Peek() == ':') {
      ++pos_;
      SkipSpace();
      tree_.mutable_node(id).length = ParseNumber();
    }
    return id;
  }

  std::string ParseLabel() {
    std::string label;
    if (Peek() == '\'') {
      ++pos_;
      while (true) {
        if (pos_ >= text_.size()) Error("unterminated quoted label");
        if (text_[pos_] == '\'') {
          if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '\'') {
            label.push_back('\'');
            pos_ += 2;
            continue;
          }
          ++pos_;
          break;
        }
        label.push_back(text_[pos_++]);
      }
      return label;
    }
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '(' || c == ')' || c == ',' || c == ':' || c == ';' || c == '[' ||
          c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\'') {
        break;
      }
      label.push_back(c == '_' ? ' ' : c);
      ++pos_;
    }
    return label;
  }

  double ParseNumber() {
    const size_t start = pos_;
    while (pos_ < text_.size() &&
           std::string_view("0123456789.eE+-").find(text_[pos_]) != std::string_view::npos) {
      ++pos_;
    }
    double value = 0.0;
    auto [end, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (start == pos_ || ec != std::errc() || end != text_.data() + pos_) {
      pos_ = start;
      Error("malformed branch length");
    }
    return value;
  }

  std::string_view text_;
  size_t pos_ = 0;
  PhyloTree tree_;
};

std::string QuoteLabel(const std::string &label) {
  if (label.find_first_of("()[]':;,_\t") == std::string::npos) {
    std::string out = label;
    std::replace(out.begin(), out.end(), ' ', '_');
    return out;
  }
  std::string out = "'";
  for (char c : label) {
    if (c == '\'') out.push_back('\'');
    out.push_back(c);
  }
  out.push_back('\'');
  return out;
}

void EmitNode(const PhyloTree &tree, NodeId id, const NewickOptions &options, std::string &out) {
  const auto &n = tree.node(id);
  if (!n.children.empty()) {
    out.push_back('(');
    for (size_t i = 0; i < n.children.size(); ++i) {
      if (i > 0) out.push_back(',');
      EmitNode(tree, n.children[i], options, out);
    }
    out.push_back(')');
    if (options.supports && n.support && id != tree.root()) {
      out += FormatDouble(std::round(*n.support * 1e4) / 1e4);
    } else if (!n.label.empty()) {
      out += QuoteLabel(n.label);
    }
  } else {
    out += QuoteLabel(n.label);
  }
  if (options.lengths && (id != tree.root() || n.length != 0.0)) {
    out.push_back(':');
    out += FormatDouble(n.length);
  }
}

}  // namespace

PhyloTree ParseNewick(std::string_view text) { return NewickParser(text).Parse(); }

std::string EmitNewick(const PhyloTree &tree, const NewickOptions &options) {
  if (tree.root() == kNoNode) Fail(ErrorCode::kInvalidArgument, "empty tree");
  std::string out;
  EmitNode(tree, tree.root(), options, out);
  out.push_back(';');
  return out;
}

PhyloTree CanonicalOrder(const PhyloTree &tree) {
  PhyloTree out = tree;
  std::vector<std::string> smallest(tree.NodeCount());
  for (NodeId id : tree.Postorder()) {
    const auto &n = tree.node(id);
    if (n.children.empty()) {
      smallest[static_cast<size_t>(id)] = n.label;
      continue;
    }
    auto &children = out.mutable_node(id).children;
    std::sort(children.begin(), children.end(), [&](NodeId a, NodeId b) {
      return smallest[static_cast<size_t>(a)] < smallest[static_cast<size_t>(b)];
    });
    smallest[static_cast<size_t>(id)] = smallest[static_cast<size_t>(children.front())];
  }
  return out;
}

std::string TopologyKey(const PhyloTree &tree) {
  return EmitNewick(CanonicalOrder(tree), {.lengths = false, .supports = false});
}

PhyloTree RerootAbove(const PhyloTree &tree, NodeId target, double fraction) {
  if (target == tree.root()) Fail(ErrorCode::kInvalidArgument, "cannot reroot above the root");
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    Fail(ErrorCode::kInvalidArgument, "reroot fraction must lie in [0, 1]");
  }
  // Unrooted adjacency with the old root suppressed when it has degree two.
  const size_t count = tree.NodeCount();
  std::vector<std::map<NodeId, double>> adjacency(count);
  const NodeId old_root = tree.root();
  const auto &root_children = tree.node(old_root).children;
  const bool suppress_root = root_children.size() == 2;
  for (NodeId id : tree.Preorder()) {
    const NodeId parent = tree.node(id).parent;
    if (parent == kNoNode || (suppress_root && parent == old_root)) continue;
    adjacency[static_cast<size_t>(id)][parent] = tree.node(id).length;
    adjacency[static_cast<size_t>(parent)][id] = tree.node(id).length;
  }
  if (suppress_root) {
    const NodeId a = root_children[0], b = root_children[1];
    const double merged = tree.node(a).length + tree.node(b).length;
    adjacency[static_cast<size_t>(a)][b] = merged;
    adjacency[static_cast<size_t>(b)][a] = merged;
  }
  // The branch above `target` in the unrooted sense.
  NodeId other = tree.node(target).parent;
  if (suppress_root && other == old_root) {
    other = root_children[0] == target ? root_children[1] : root_children[0];
  }
  const double total = adjacency[static_cast<size_t>(target)].at(other);
  adjacency[static_cast<size_t>(target)].erase(other);
  adjacency[static_cast<size_t>(other)].erase(target);

  PhyloTree out;
  const NodeId new_root = out.AddNode();
  out.SetRoot(new_root);
  std::function<NodeId(NodeId, NodeId, double)> build = [&](NodeId id, NodeId from, double length) {
    const auto &source = tree.node(id);
    const NodeId copy = out.AddNode(source.label, length);
    out.mutable_node(copy).support = source.support;
    for (const auto &[neighbor, edge] : adjacency[static_cast<size_t>(id)]) {
      if (neighbor == from) continue;
      out.AddChild(copy, build(neighbor, id, edge));
    }
    return copy;
  };
  out.AddChild(new_root, build(target, kNoNode, total * fraction));
  out.AddChild(new_root, build(other, kNoNode, total * (1.0 - fraction)));
  return out;
}

}  // namespace lexiphy
