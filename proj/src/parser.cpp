#include "opgv/parser.hpp"

#include <algorithm>

namespace opgv {

std::unique_ptr<Node> clone_node(const Node& n, std::ptrdiff_t span_offset) {
  auto out = std::make_unique<Node>();
  out->id = n.id;
  out->rule = n.rule;
  out->token = n.token;
  out->begin = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(n.begin) + span_offset);
  out->end = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(n.end) + span_offset);
  out->children.reserve(n.children.size());
  for (const auto& c : n.children) out->children.push_back(clone_node(*c, span_offset));
  return out;
}

namespace {

const Node* find_in(const Node* n, NodeId id) {
  if (n->id == id) return n;
  for (const auto& c : n->children) {
    if (const Node* f = find_in(c.get(), id)) return f;
  }
  return nullptr;
}

bool path_in(const Node* n, NodeId id, std::vector<const Node*>& path) {
  path.push_back(n);
  if (n->id == id) return true;
  for (const auto& c : n->children) {
    if (path_in(c.get(), id, path)) return true;
  }
  path.pop_back();
  return false;
}

std::size_t count_nodes(const Node* n) {
  std::size_t total = 1;
  for (const auto& c : n->children) total += count_nodes(c.get());
  return total;
}

void number_preorder(const Node* n, const std::set<Symbol>& hidden, int& next,
                     std::unordered_map<NodeId, int>& out) {
  if (n->is_leaf() && hidden.count(n->token.terminal)) return;
  out[n->id] = next++;
  for (const auto& c : n->children) number_preorder(c.get(), hidden, next, out);
}

}  // namespace

const Node* SyntaxTree::find(NodeId id) const {
  return root ? find_in(root.get(), id) : nullptr;
}

std::vector<const Node*> SyntaxTree::path_to(NodeId id) const {
  std::vector<const Node*> path;
  if (root) path_in(root.get(), id, path);
  return path;
}

std::size_t SyntaxTree::node_count() const { return root ? count_nodes(root.get()) : 0; }

SyntaxTree SyntaxTree::clone() const {
  SyntaxTree t;
  t.tokens = tokens;
  t.next_id = next_id;
  if (root) t.root = clone_node(*root);
  return t;
}

std::unordered_map<NodeId, int> SyntaxTree::display_numbering(
    const std::set<Symbol>& hidden) const {
  std::unordered_map<NodeId, int> out;
  int next = 0;
  if (root) number_preorder(root.get(), hidden, next, out);
  return out;
}

bool structurally_equal(const Node& a, const Node& b) {
  if (a.rule != b.rule || a.begin != b.begin || a.end != b.end) return false;
  if (a.is_leaf()) return a.token == b.token;
  if (a.children.size() != b.children.size()) return false;
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    if (!structurally_equal(*a.children[i], *b.children[i])) return false;
  }
  return true;
}

bool structurally_equal(const SyntaxTree& a, const SyntaxTree& b) {
  if (a.tokens.size() != b.tokens.size()) return false;
  for (std::size_t i = 0; i < a.tokens.size(); ++i) {
    if (!(a.tokens[i] == b.tokens[i])) return false;
  }
  if (!a.root || !b.root) return a.root == b.root;
  return structurally_equal(*a.root, *b.root);
}

std::optional<Prec> precedence_between(const PrecedenceMatrix& opm, const Symbol& a,
                                       const Symbol& b) {
  return opm.between(a, b);
}

namespace {

struct StackEntry {
  std::unique_ptr<Node> node;
  bool is_terminal;
  bool shifted_with_yield = false;  // relation recorded when the terminal was shifted
};

// Shared shift-reduce core over tokens[begin, end) in the context
// (left_ctx, right_ctx). On success the range reduces to a single
// nonterminal node. `throwing` selects error reporting (full parse) versus
// null return (incremental probing).
std::unique_ptr<Node> shift_reduce(const Grammar& g, const PrecedenceMatrix& opm,
                                   const std::vector<Token>& tokens, std::size_t begin,
                                   std::size_t end, const Symbol& left_ctx,
                                   const Symbol& right_ctx, NodeId& id_counter,
                                   bool throwing) {
  std::vector<StackEntry> stack;
  auto fail = [&](std::size_t pos, const std::string& msg) -> std::unique_ptr<Node> {
    if (throwing) throw SyntaxError(pos, msg);
    return nullptr;
  };

  auto top_terminal = [&]() -> const Symbol& {
    for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
      if (it->is_terminal) return it->node->token.terminal;
    }
    return left_ctx;
  };

  auto reduce = [&](std::size_t pos) -> bool {
    // Handle: everything above (and including) the most recent terminal
    // shifted with a yields relation, plus one nonterminal right below it.
    std::size_t h = stack.size();
    bool found = false;
    while (h > 0) {
      --h;
      if (stack[h].is_terminal && stack[h].shifted_with_yield) {
        found = true;
        break;
      }
    }
    if (!found) return false;
    if (h > 0 && !stack[h - 1].is_terminal) --h;
    std::vector<Symbol> symbols;
    std::vector<std::unique_ptr<Node>> children;
    for (std::size_t i = h; i < stack.size(); ++i) {
      const Node& n = *stack[i].node;
      symbols.push_back(n.is_leaf() ? n.token.terminal : g.rule(n.rule).lhs);
      children.push_back(std::move(stack[i].node));
    }
    const Rule* rule = g.find_rule_by_rhs(symbols);
    if (!rule) return false;
    auto parent = std::make_unique<Node>();
    parent->id = id_counter++;
    parent->rule = rule->id;
    parent->begin = children.front()->begin;
    parent->end = children.back()->end;
    parent->children = std::move(children);
    stack.resize(h);
    stack.push_back({std::move(parent), false});
    (void)pos;
    return true;
  };

  std::size_t i = begin;
  for (;;) {
    const Symbol& lookahead = (i < end) ? tokens[i].terminal : right_ctx;
    const Symbol& top = top_terminal();
    if (i >= end && stack.size() == 1 && !stack[0].is_terminal) break;  // accepted
    std::optional<Prec> rel = opm.between(top, lookahead);
    if (!rel) return fail(i, "no precedence relation between '" + top + "' and '" +
                                 lookahead + "'");
    if (*rel == Prec::Takes) {
      if (!reduce(i)) return fail(i, "no rule matches the handle");
      continue;
    }
    if (i >= end)  // would shift the right context terminal: handle crosses the border
      return fail(i, "input ends inside an open construct");
    auto leaf = std::make_unique<Node>();
    leaf->id = id_counter++;
    leaf->token = tokens[i];
    leaf->begin = i;
    leaf->end = i + 1;
    stack.push_back({std::move(leaf), true, *rel == Prec::Yields});
    ++i;
  }
  return std::move(stack[0].node);
}

}  // namespace

std::unique_ptr<Node> parse_range(const Grammar& g, const PrecedenceMatrix& opm,
                                  const std::vector<Token>& tokens, std::size_t begin,
                                  std::size_t end, const Symbol& left_ctx,
                                  const Symbol& right_ctx, NodeId& id_counter) {
  if (begin >= end) return nullptr;
  NodeId saved = id_counter;
  try {
    auto node = shift_reduce(g, opm, tokens, begin, end, left_ctx, right_ctx, id_counter,
                             /*throwing=*/false);
    if (!node) id_counter = saved;
    return node;
  } catch (const SyntaxError&) {
    id_counter = saved;
    return nullptr;
  }
}

SyntaxTree parse(const Grammar& g, const PrecedenceMatrix& opm, std::vector<Token> tokens,
                 NodeId first_id) {
  SyntaxTree tree;
  tree.tokens = std::move(tokens);
  tree.next_id = first_id;
  if (tree.tokens.empty()) throw SyntaxError(0, "empty input");
  auto node = shift_reduce(g, opm, tree.tokens, 0, tree.tokens.size(), kSentinel,
                           kSentinel, tree.next_id, /*throwing=*/true);
  // A final renaming step lifts the result to the axiom where FNF allows it.
  const Symbol& nt = g.rule(node->rule).lhs;
  if (nt != g.axiom) {
    const Rule* renaming = g.find_rule_by_rhs({nt});
    if (!renaming || renaming->lhs != g.axiom)
      throw SyntaxError(tree.tokens.size(), "input reduces to '" + nt +
                                                "', not the axiom");
    auto root = std::make_unique<Node>();
    root->id = tree.next_id++;
    root->rule = renaming->id;
    root->begin = node->begin;
    root->end = node->end;
    root->children.push_back(std::move(node));
    node = std::move(root);
  }
  tree.root = std::move(node);
  return tree;
}

}  // namespace opgv
