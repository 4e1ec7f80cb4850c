#pragma once

#include <utility>
#include <vector>

#include "opgv/parser.hpp"

namespace opgv {

// A single contiguous token-range replacement.
struct Edit {
  std::size_t begin = 0, end = 0;  // replaced range in the old token stream
  std::vector<Token> replacement;

  bool empty() const { return begin == end && replacement.empty(); }
};

struct ReuseStats {
  std::size_t tokens_reparsed = 0;
  std::size_t nodes_rebuilt = 0;
  std::size_t nodes_reused = 0;
  std::size_t subcontext_begin = 0, subcontext_end = 0;  // re-parsed token range
  NodeId old_subtree_root = 0;
  NodeId new_subtree_root = 0;
  bool noop = false;          // the edit changed nothing
  bool full_reparse = false;  // widening reached the root
};

// True iff the two derivations reduce to the same nonterminal in the same
// terminal context; constant time.
bool matching_condition(const Symbol& old_nt, const Symbol& new_nt, const Symbol& left_ctx,
                        const Symbol& right_ctx);

// Longest-common-prefix/suffix diff producing one contiguous edit.
Edit diff_to_edit(const std::vector<Token>& old_tokens, const std::vector<Token>& new_tokens);

// Applies the edit by re-parsing only the minimal enclosing sub-context,
// widening to the parent subtree whenever the matching condition fails.
// The result is structurally identical to a from-scratch parse of the
// edited stream; unchanged subtrees keep their node ids.
std::pair<SyntaxTree, ReuseStats> apply_edit(const SyntaxTree& old_tree, const Edit& edit,
                                             const Grammar& g, const PrecedenceMatrix& opm);

}  // namespace opgv
