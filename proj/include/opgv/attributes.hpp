#pragma once

#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "opgv/incremental.hpp"
#include "opgv/parser.hpp"

namespace opgv {

struct SchemaError : std::runtime_error {
  explicit SchemaError(const std::string& msg) : std::runtime_error(msg) {}
};

// Purely synthesized attribute schema over an equality-comparable value
// type. Each grammar rule maps to a function computing the lhs node's
// attributes from its children (leaf lexemes are read off the nodes).
template <class Value>
struct AttributeSchema {
  using Attrs = std::map<std::string, Value>;
  using Fn = std::function<Attrs(const Node& node,
                                 const std::vector<const Attrs*>& child_attrs,
                                 const SyntaxTree& tree)>;
  std::unordered_map<int, Fn> synthesis;  // rule id -> function
};

template <class Value>
using AttributeMap = std::unordered_map<NodeId, std::map<std::string, Value>>;

struct RecomputeStats {
  std::size_t recomputed = 0;
  std::size_t reused = 0;
  std::vector<std::pair<NodeId, std::string>> recomputed_attrs;
  bool cutoff_at_splice = false;
};

namespace detail {

template <class Value>
typename AttributeSchema<Value>::Attrs eval_node(const Node& node,
                                                 const AttributeSchema<Value>& schema,
                                                 const SyntaxTree& tree,
                                                 AttributeMap<Value>& out,
                                                 RecomputeStats* stats) {
  static const typename AttributeSchema<Value>::Attrs kEmpty;
  std::vector<const typename AttributeSchema<Value>::Attrs*> child_attrs;
  child_attrs.reserve(node.children.size());
  for (const auto& c : node.children) {
    if (c->is_leaf()) {
      child_attrs.push_back(&kEmpty);
    } else {
      eval_node(*c, schema, tree, out, stats);
      child_attrs.push_back(&out.at(c->id));
    }
  }
  auto it = schema.synthesis.find(node.rule);
  if (it == schema.synthesis.end())
    throw SchemaError("no synthesis function for rule " + std::to_string(node.rule));
  auto attrs = it->second(node, child_attrs, tree);
  if (stats) {
    stats->recomputed += attrs.size();
    for (const auto& [name, value] : attrs) stats->recomputed_attrs.emplace_back(node.id, name);
  }
  out[node.id] = std::move(attrs);
  return out.at(node.id);
}

inline void collect_ids(const Node& n, std::vector<NodeId>& ids) {
  ids.push_back(n.id);
  for (const auto& c : n.children) collect_ids(*c, ids);
}

}  // namespace detail

// Full bottom-up (post-order) evaluation.
template <class Value>
AttributeMap<Value> evaluate(const SyntaxTree& tree, const AttributeSchema<Value>& schema) {
  AttributeMap<Value> out;
  if (tree.root) detail::eval_node(*tree.root, schema, tree, out, nullptr);
  return out;
}

// Incremental re-evaluation after a splice: evaluates the spliced subtree
// fresh, then walks toward the root recomputing each ancestor from cached
// child values, stopping as soon as every recomputed attribute equals its
// previous value.
template <class Value>
std::pair<AttributeMap<Value>, RecomputeStats> reevaluate(
    const SyntaxTree& new_tree, const AttributeSchema<Value>& schema,
    const ReuseStats& splice, const AttributeMap<Value>& old_values) {
  AttributeMap<Value> out;
  RecomputeStats stats;

  // Carry over cached values for every node id that survived the splice.
  std::vector<NodeId> ids;
  if (new_tree.root) detail::collect_ids(*new_tree.root, ids);
  for (NodeId id : ids) {
    auto it = old_values.find(id);
    if (it != old_values.end()) {
      out[id] = it->second;
      stats.reused += it->second.size();
    }
  }

  if (splice.noop) return {std::move(out), stats};
  if (splice.full_reparse) {
    out.clear();
    stats.reused = 0;
    detail::eval_node(*new_tree.root, schema, new_tree, out, &stats);
    return {std::move(out), stats};
  }

  const Node* spliced = new_tree.find(splice.new_subtree_root);
  if (!spliced) throw std::logic_error("spliced node not found in the new tree");
  detail::eval_node(*spliced, schema, new_tree, out, &stats);

  // Cutoff check against the replaced subtree's previous values.
  auto old_it = old_values.find(splice.old_subtree_root);
  if (old_it != old_values.end() && old_it->second == out.at(spliced->id)) {
    stats.cutoff_at_splice = true;
    return {std::move(out), stats};
  }

  std::vector<const Node*> path = new_tree.path_to(spliced->id);
  for (auto it = path.rbegin(); it != path.rend(); ++it) {
    const Node* anc = *it;
    if (anc == spliced) continue;
    static const typename AttributeSchema<Value>::Attrs kEmpty;
    std::vector<const typename AttributeSchema<Value>::Attrs*> child_attrs;
    child_attrs.reserve(anc->children.size());
    for (const auto& c : anc->children)
      child_attrs.push_back(c->is_leaf() ? &kEmpty : &out.at(c->id));
    auto fn = schema.synthesis.find(anc->rule);
    if (fn == schema.synthesis.end())
      throw SchemaError("no synthesis function for rule " + std::to_string(anc->rule));
    auto attrs = fn->second(*anc, child_attrs, new_tree);
    stats.recomputed += attrs.size();
    for (const auto& [name, value] : attrs) stats.recomputed_attrs.emplace_back(anc->id, name);
    auto prev = old_values.find(anc->id);
    bool unchanged = prev != old_values.end() && prev->second == attrs;
    // The carried-over copy counted this ancestor's attributes as reused;
    // they were recomputed instead.
    if (prev != old_values.end()) stats.reused -= prev->second.size();
    out[anc->id] = std::move(attrs);
    if (unchanged) break;  // everything above keeps its cached value
  }
  return {std::move(out), stats};
}

}  // namespace opgv
