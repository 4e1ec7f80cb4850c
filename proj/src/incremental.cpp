#include "opgv/incremental.hpp"

#include <algorithm>
#include <stdexcept>

namespace opgv {

bool matching_condition(const Symbol& old_nt, const Symbol& new_nt, const Symbol&,
                        const Symbol&) {
  return old_nt == new_nt;
}

Edit diff_to_edit(const std::vector<Token>& old_tokens,
                  const std::vector<Token>& new_tokens) {
  std::size_t prefix = 0;
  std::size_t max_prefix = std::min(old_tokens.size(), new_tokens.size());
  while (prefix < max_prefix && old_tokens[prefix] == new_tokens[prefix]) ++prefix;
  std::size_t suffix = 0;
  std::size_t max_suffix = max_prefix - prefix;
  while (suffix < max_suffix &&
         old_tokens[old_tokens.size() - 1 - suffix] ==
             new_tokens[new_tokens.size() - 1 - suffix])
    ++suffix;
  Edit e;
  e.begin = prefix;
  e.end = old_tokens.size() - suffix;
  e.replacement.assign(new_tokens.begin() + static_cast<std::ptrdiff_t>(prefix),
                       new_tokens.end() - static_cast<std::ptrdiff_t>(suffix));
  return e;
}

namespace {

// Innermost-first chain of internal nodes whose span covers the edit range.
std::vector<const Node*> covering_path(const Node* root, std::size_t begin,
                                       std::size_t end) {
  std::vector<const Node*> path;
  const Node* cur = root;
  while (cur) {
    path.push_back(cur);
    const Node* next = nullptr;
    for (const auto& c : cur->children) {
      if (!c->is_leaf() && c->begin <= begin && end <= c->end) {
        next = c.get();
        break;
      }
    }
    cur = next;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

bool contains(const Node& n, const Node* target) {
  if (&n == target) return true;
  for (const auto& c : n.children) {
    if (contains(*c, target)) return true;
  }
  return false;
}

// Rebuilds the spine from the root down to the replaced subtree, reusing
// every off-spine sibling (spans shifted right of the edit).
std::unique_ptr<Node> rebuild_spine(const Node& old_node, const Node* replaced,
                                    std::unique_ptr<Node> fresh, std::size_t old_edit_end,
                                    std::ptrdiff_t delta, std::size_t& spine_nodes) {
  if (&old_node == replaced) return fresh;
  ++spine_nodes;
  auto out = std::make_unique<Node>();
  out->id = old_node.id;
  out->rule = old_node.rule;
  out->begin = old_node.begin;
  out->end = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(old_node.end) + delta);
  for (const auto& c : old_node.children) {
    if (contains(*c, replaced)) {
      out->children.push_back(rebuild_spine(*c, replaced, std::move(fresh), old_edit_end,
                                            delta, spine_nodes));
    } else {
      std::ptrdiff_t off = c->begin >= old_edit_end ? delta : 0;
      out->children.push_back(clone_node(*c, off));
    }
  }
  return out;
}

std::size_t subtree_size(const Node& n) {
  std::size_t total = 1;
  for (const auto& c : n.children) total += subtree_size(*c);
  return total;
}

}  // namespace

std::pair<SyntaxTree, ReuseStats> apply_edit(const SyntaxTree& old_tree, const Edit& edit,
                                             const Grammar& g,
                                             const PrecedenceMatrix& opm) {
  if (edit.end > old_tree.tokens.size() || edit.begin > edit.end)
    throw std::out_of_range("edit range outside the token stream");

  std::vector<Token> new_tokens;
  new_tokens.reserve(old_tree.tokens.size() + edit.replacement.size());
  new_tokens.insert(new_tokens.end(), old_tree.tokens.begin(),
                    old_tree.tokens.begin() + static_cast<std::ptrdiff_t>(edit.begin));
  new_tokens.insert(new_tokens.end(), edit.replacement.begin(), edit.replacement.end());
  new_tokens.insert(new_tokens.end(),
                    old_tree.tokens.begin() + static_cast<std::ptrdiff_t>(edit.end),
                    old_tree.tokens.end());
  std::ptrdiff_t delta = static_cast<std::ptrdiff_t>(edit.replacement.size()) -
                         static_cast<std::ptrdiff_t>(edit.end - edit.begin);

  ReuseStats stats;
  if (edit.empty()) {
    SyntaxTree copy = old_tree.clone();
    stats.noop = true;
    stats.nodes_reused = copy.node_count();
    stats.old_subtree_root = stats.new_subtree_root = copy.root ? copy.root->id : 0;
    return {std::move(copy), stats};
  }

  std::vector<const Node*> candidates =
      covering_path(old_tree.root.get(), edit.begin, edit.end);

  for (const Node* cand : candidates) {
    if (cand == old_tree.root.get()) break;  // handled by the full re-parse below
    std::size_t nb = cand->begin;
    std::size_t ne = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(cand->end) + delta);
    const Symbol& a = nb > 0 ? new_tokens[nb - 1].terminal : kSentinel;
    const Symbol& b = ne < new_tokens.size() ? new_tokens[ne].terminal : kSentinel;
    NodeId counter = old_tree.next_id;
    std::unique_ptr<Node> fresh = parse_range(g, opm, new_tokens, nb, ne, a, b, counter);
    if (!fresh) continue;
    if (!matching_condition(g.rule(cand->rule).lhs, g.rule(fresh->rule).lhs, a, b))
      continue;

    SyntaxTree out;
    out.tokens = std::move(new_tokens);
    out.next_id = counter;
    stats.tokens_reparsed = ne - nb;
    stats.subcontext_begin = nb;
    stats.subcontext_end = ne;
    stats.old_subtree_root = cand->id;
    stats.new_subtree_root = fresh->id;
    std::size_t fresh_nodes = subtree_size(*fresh);
    std::size_t spine_nodes = 0;
    out.root = rebuild_spine(*old_tree.root, cand, std::move(fresh), edit.end, delta,
                             spine_nodes);
    stats.nodes_rebuilt = fresh_nodes + spine_nodes;
    stats.nodes_reused = out.node_count() - stats.nodes_rebuilt;
    return {std::move(out), stats};
  }

  // Worst case: re-parse everything. Node ids restart above the old range so
  // reuse accounting stays unambiguous.
  SyntaxTree out = parse(g, opm, std::move(new_tokens), old_tree.next_id);
  stats.tokens_reparsed = out.tokens.size();
  stats.subcontext_begin = 0;
  stats.subcontext_end = out.tokens.size();
  stats.old_subtree_root = old_tree.root->id;
  stats.new_subtree_root = out.root->id;
  stats.nodes_rebuilt = out.node_count();
  stats.nodes_reused = 0;
  stats.full_reparse = true;
  return {std::move(out), stats};
}

}  // namespace opgv
