#include "rankorder/tree.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <string>
#include <utility>

#include "rankorder/errors.hpp"

namespace rankorder {

// ============================================================================
// PhyloTree
// ============================================================================

PhyloTree PhyloTree::from_nodes(const std::vector<Node>& nodes, std::size_t root,
                                std::vector<VertexId>* ids) {
  if (nodes.empty()) throw ContractError("empty tree");
  if (root >= nodes.size()) throw ContractError("root index out of range");
  if (nodes.size() >= kNoParent) throw ContractError("tree too large");

  std::vector<int> parent_count(nodes.size(), 0);
  for (const auto& node : nodes) {
    if (node.children.size() == 1) throw ContractError("vertex with exactly one child");
    for (auto c : node.children) {
      if (c >= nodes.size()) throw ContractError("child index out of range");
      if (++parent_count[c] > 1) throw ContractError("vertex with more than one parent");
    }
  }
  if (parent_count[root] != 0) throw ContractError("root has a parent");

  PhyloTree tree;
  const std::size_t n = nodes.size();
  std::vector<std::size_t> order;  // preorder over input positions
  order.reserve(n);
  std::vector<std::size_t> stack{root};
  while (!stack.empty()) {
    const auto x = stack.back();
    stack.pop_back();
    order.push_back(x);
    const auto& kids = nodes[x].children;
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
  }
  if (order.size() != n) throw ContractError("vertices not reachable from the root");

  std::vector<std::uint32_t> new_id(n);
  for (std::size_t k = 0; k < n; ++k) new_id[order[k]] = static_cast<std::uint32_t>(k);
  if (ids) {
    ids->clear();
    for (auto id : new_id) ids->push_back(VertexId{id});
  }

  tree.parent_.assign(n, kNoParent);
  tree.child_offset_.assign(n + 1, 0);
  tree.label_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& node = nodes[order[k]];
    tree.child_offset_[k] = static_cast<std::uint32_t>(tree.child_list_.size());
    for (auto c : node.children) {
      tree.child_list_.push_back(VertexId{new_id[c]});
      tree.parent_[new_id[c]] = static_cast<std::uint32_t>(k);
    }
    tree.label_[k] = node.label;
    if (node.label) {
      if (node.label->empty()) throw ContractError("empty label");
      if (!tree.by_label_.emplace(*node.label, VertexId{static_cast<std::uint32_t>(k)}).second) {
        throw ContractError("duplicate label '" + *node.label + "'");
      }
    }
  }
  tree.child_offset_[n] = static_cast<std::uint32_t>(tree.child_list_.size());

  tree.leaves_below_.assign(n, 0);
  tree.interior_below_.assign(n, 0);
  tree.subtree_size_.assign(n, 1);
  for (std::size_t k = n; k-- > 0;) {
    const VertexId v{static_cast<std::uint32_t>(k)};
    auto kids = tree.children(v);
    if (kids.empty()) {
      tree.leaves_below_[k] = 1;
      continue;
    }
    tree.interior_below_[k] = 1;
    for (auto c : kids) {
      tree.leaves_below_[k] += tree.leaves_below_[c.index];
      tree.interior_below_[k] += tree.interior_below_[c.index];
      tree.subtree_size_[k] += tree.subtree_size_[c.index];
    }
  }
  return tree;
}

std::span<const VertexId> PhyloTree::children(VertexId v) const {
  check(v);
  return std::span<const VertexId>(child_list_).subspan(child_offset_[v.index],
                                                        child_offset_[v.index + 1] - child_offset_[v.index]);
}

std::optional<VertexId> PhyloTree::parent(VertexId v) const {
  check(v);
  if (parent_[v.index] == kNoParent) return std::nullopt;
  return VertexId{parent_[v.index]};
}

const std::optional<std::string>& PhyloTree::label(VertexId v) const {
  check(v);
  return label_[v.index];
}

std::string PhyloTree::name(VertexId v) const {
  check(v);
  if (label_[v.index]) return *label_[v.index];
  return "#" + std::to_string(v.index);
}

std::optional<VertexId> PhyloTree::find(std::string_view name) const {
  if (auto it = by_label_.find(name); it != by_label_.end()) return it->second;
  if (name.size() > 1 && name.front() == '#') {
    std::uint32_t k = 0;
    auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), k);
    if (ec == std::errc{} && ptr == name.data() + name.size() && k < vertex_count()) {
      return VertexId{k};
    }
  }
  return std::nullopt;
}

VertexId PhyloTree::vertex(std::string_view name) const {
  if (auto v = find(name)) return *v;
  throw ContractError("unknown vertex '" + std::string(name) + "'");
}

std::size_t PhyloTree::leaves_below(VertexId v) const {
  check(v);
  return leaves_below_[v.index];
}

std::size_t PhyloTree::interior_below(VertexId v) const {
  check(v);
  return interior_below_[v.index];
}

std::size_t PhyloTree::subtree_size(VertexId v) const {
  check(v);
  return subtree_size_[v.index];
}

bool PhyloTree::is_ancestor(VertexId a, VertexId b) const {
  check(a);
  check(b);
  return a.index < b.index && b.index < a.index + subtree_size_[a.index];
}

void PhyloTree::check(VertexId v) const {
  if (!contains(v)) throw ContractError("unknown vertex #" + std::to_string(v.index));
}

void PhyloTree::check_interior(VertexId v) const {
  check(v);
  if (is_leaf(v)) throw ContractError("vertex '" + name(v) + "' is a leaf");
}

std::vector<VertexId> PhyloTree::vertices() const {
  std::vector<VertexId> out(vertex_count());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = VertexId{static_cast<std::uint32_t>(k)};
  return out;
}

std::vector<VertexId> PhyloTree::interior_vertices() const {
  std::vector<VertexId> out;
  for (auto v : vertices())
    if (!is_leaf(v)) out.push_back(v);
  return out;
}

std::vector<VertexId> PhyloTree::leaves() const {
  std::vector<VertexId> out;
  for (auto v : vertices())
    if (is_leaf(v)) out.push_back(v);
  return out;
}

bool PhyloTree::operator==(const PhyloTree& other) const {
  return parent_ == other.parent_ && child_list_ == other.child_list_ && label_ == other.label_;
}

// ============================================================================
// Newick
// ============================================================================

namespace {

bool is_bare_label_char(char c) {
  if (std::isspace(static_cast<unsigned char>(c))) return false;
  switch (c) {
    case '(': case ')': case ',': case ':': case ';': case '\'': case '[': case ']':
      return false;
    default:
      return true;
  }
}

class NewickParser {
 public:
  explicit NewickParser(std::string_view text) : text_(text) {}

  PhyloTree parse() {
    skip_space();
    if (at_end() || peek() == ';') throw ParseError("empty tree", pos_);
    const auto root = parse_subtree();
    skip_space();
    if (at_end()) throw ParseError("missing ';'", pos_);
    if (peek() == ')') throw ParseError("unbalanced parenthesis: unexpected ')'", pos_);
    if (peek() != ';') throw ParseError(std::string("unexpected '") + peek() + "'", pos_);
    ++pos_;
    skip_space();
    if (!at_end()) throw ParseError("trailing text after ';'", pos_);
    return PhyloTree::from_nodes(nodes_, root);
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::vector<PhyloTree::Node> nodes_;
  std::map<std::string, std::size_t, std::less<>> seen_labels_;

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  void skip_space() {
    while (!at_end()) {
      if (std::isspace(static_cast<unsigned char>(peek()))) {
        ++pos_;
      } else if (peek() == '[') {
        const auto start = pos_;
        const auto close = text_.find(']', pos_);
        if (close == std::string_view::npos) throw ParseError("unterminated comment", start);
        pos_ = close + 1;
      } else {
        break;
      }
    }
  }

  std::size_t parse_subtree() {
    skip_space();
    if (at_end()) throw ParseError("unbalanced parenthesis: unexpected end of input", pos_);
    const auto node = nodes_.size();
    nodes_.emplace_back();

    if (peek() == '(') {
      const auto open = pos_;
      ++pos_;
      std::vector<std::size_t> kids;
      kids.push_back(parse_subtree());
      for (;;) {
        skip_space();
        if (at_end() || peek() == ';') {
          throw ParseError("unbalanced parenthesis: expected ',' or ')'", pos_);
        }
        if (peek() == ',') {
          ++pos_;
          kids.push_back(parse_subtree());
        } else if (peek() == ')') {
          ++pos_;
          break;
        } else {
          throw ParseError(std::string("expected ',' or ')' but found '") + peek() + "'", pos_);
        }
      }
      if (kids.size() == 1) throw ParseError("vertex with exactly one child", open);
      nodes_[node].children = std::move(kids);
      skip_space();
      if (!at_end() && (peek() == '\'' || is_bare_label_char(peek()))) set_label(node);
    } else {
      if (peek() != '\'' && !is_bare_label_char(peek())) {
        throw ParseError(std::string("expected a label or '(' but found '") + peek() + "'", pos_);
      }
      set_label(node);
    }

    skip_space();
    if (!at_end() && peek() == ':') {
      ++pos_;
      skip_length();
    }
    return node;
  }

  void set_label(std::size_t node) {
    const auto start = pos_;
    std::string label = peek() == '\'' ? quoted_label() : bare_label();
    if (label.empty()) throw ParseError("empty label", start);
    if (!seen_labels_.emplace(label, node).second) {
      throw ParseError("duplicate label '" + label + "'", start);
    }
    nodes_[node].label = std::move(label);
  }

  std::string bare_label() {
    const auto start = pos_;
    while (!at_end() && is_bare_label_char(peek())) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string quoted_label() {
    const auto start = pos_;
    ++pos_;
    std::string out;
    for (;;) {
      if (at_end()) throw ParseError("unterminated quoted label", start);
      const char c = text_[pos_++];
      if (c == '\'') {
        if (!at_end() && peek() == '\'') {
          out.push_back('\'');
          ++pos_;
        } else {
          return out;
        }
      } else {
        out.push_back(c);
      }
    }
  }

  void skip_length() {
    skip_space();
    const auto start = pos_;
    while (!at_end() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.' ||
                         peek() == '-' || peek() == '+' || peek() == 'e' || peek() == 'E')) {
      ++pos_;
    }
    double value = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (start == pos_ || ec != std::errc{} || ptr != text_.data() + pos_) {
      throw ParseError("malformed branch length", start);
    }
  }
};

bool needs_quotes(const std::string& label) {
  return std::any_of(label.begin(), label.end(), [](char c) { return !is_bare_label_char(c); });
}

void append_label(std::string& out, const std::string& label) {
  if (!needs_quotes(label)) {
    out += label;
    return;
  }
  out.push_back('\'');
  for (char c : label) {
    if (c == '\'') out.push_back('\'');
    out.push_back(c);
  }
  out.push_back('\'');
}

std::string render(const PhyloTree& tree, const EdgeLengths* lengths, int digits, bool require_all) {
  if (lengths && require_all) {
    for (auto v : tree.vertices()) {
      if (v == tree.root()) continue;
      if (!lengths->contains(v)) {
        throw ContractError("edge lengths missing the edge above '" + tree.name(v) + "'");
      }
    }
  }

  std::string out;
  // Iterative walk: (vertex, next child index).
  std::vector<std::pair<VertexId, std::size_t>> stack{{tree.root(), 0}};
  auto close_vertex = [&](VertexId v) {
    if (const auto& label = tree.label(v)) append_label(out, *label);
    if (!lengths || v == tree.root()) return;
    if (auto it = lengths->find(v); it != lengths->end()) {
      out.push_back(':');
      out += to_decimal_string(it->second, digits);
    }
  };
  while (!stack.empty()) {
    auto& [v, next] = stack.back();
    auto kids = tree.children(v);
    if (kids.empty()) {
      const auto leaf = v;
      stack.pop_back();
      close_vertex(leaf);
      continue;
    }
    if (next == kids.size()) {
      const auto done = v;
      stack.pop_back();
      out.push_back(')');
      close_vertex(done);
      continue;
    }
    out.push_back(next == 0 ? '(' : ',');
    const auto child = kids[next++];
    stack.emplace_back(child, 0);
  }
  out.push_back(';');
  return out;
}

}  // namespace

PhyloTree parse_newick(std::string_view text) { return NewickParser(text).parse(); }

std::string write_newick(const PhyloTree& tree) { return render(tree, nullptr, 6, false); }

std::string write_newick(const PhyloTree& tree, const EdgeLengths& lengths, int significant_digits) {
  return render(tree, &lengths, significant_digits, true);
}

std::string write_newick_partial(const PhyloTree& tree, const EdgeLengths& lengths, int significant_digits) {
  return render(tree, &lengths, significant_digits, false);
}

VertexId mrca(const PhyloTree& tree, VertexId a, VertexId b) {
  tree.check(a);
  tree.check(b);
  VertexId x = a;
  while (x != b && !tree.is_ancestor(x, b)) x = *tree.parent(x);
  return x;
}

bool is_binary(const PhyloTree& tree) {
  for (auto v : tree.vertices()) {
    const auto k = tree.children(v).size();
    if (k != 0 && k != 2) return false;
  }
  return true;
}

}  // namespace rankorder
