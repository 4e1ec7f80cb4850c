#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "opgv/grammar.hpp"

namespace opgv {

struct Token {
  Symbol terminal;
  std::string lexeme;
  std::size_t offset = 0;  // character offset in the source, for diagnostics

  bool operator==(const Token& o) const {
    return terminal == o.terminal && lexeme == o.lexeme;
  }
};

struct SyntaxError : std::runtime_error {
  SyntaxError(std::size_t token_index, const std::string& msg)
      : std::runtime_error(msg), token_index(token_index) {}
  std::size_t token_index;
};

using NodeId = std::uint64_t;

struct Node {
  NodeId id = 0;
  int rule = -1;  // -1 for leaves
  Token token;    // leaves only
  std::vector<std::unique_ptr<Node>> children;
  std::size_t begin = 0, end = 0;  // covered token range [begin, end)

  bool is_leaf() const { return rule < 0; }
};

std::unique_ptr<Node> clone_node(const Node& n, std::ptrdiff_t span_offset = 0);

struct SyntaxTree {
  std::vector<Token> tokens;
  std::unique_ptr<Node> root;
  NodeId next_id = 0;

  const Node* find(NodeId id) const;
  // Path from the root down to the node with the given id (inclusive).
  std::vector<const Node*> path_to(NodeId id) const;
  std::size_t node_count() const;
  SyntaxTree clone() const;

  // Preorder numbering that skips leaves of the given terminal classes,
  // so dumps can show only structure and value-bearing tokens.
  std::unordered_map<NodeId, int> display_numbering(const std::set<Symbol>& hidden) const;
};

// Structural equality: rule ids, spans and leaf tokens (node ids ignored).
bool structurally_equal(const Node& a, const Node& b);
bool structurally_equal(const SyntaxTree& a, const SyntaxTree& b);

std::optional<Prec> precedence_between(const PrecedenceMatrix& opm, const Symbol& a,
                                       const Symbol& b);

// Deterministic shift-reduce parse of the whole token stream, implicitly
// wrapped in sentinels. Throws SyntaxError on malformed input.
SyntaxTree parse(const Grammar& g, const PrecedenceMatrix& opm, std::vector<Token> tokens,
                 NodeId first_id = 0);

// Parses tokens[begin, end) in the terminal context (left_ctx, right_ctx).
// Returns the single nonterminal node the range reduces to, or null when the
// range does not reduce cleanly inside the context. Renaming to the axiom is
// not applied. Used by incremental re-parsing.
std::unique_ptr<Node> parse_range(const Grammar& g, const PrecedenceMatrix& opm,
                                  const std::vector<Token>& tokens, std::size_t begin,
                                  std::size_t end, const Symbol& left_ctx,
                                  const Symbol& right_ctx, NodeId& id_counter);

}  // namespace opgv
