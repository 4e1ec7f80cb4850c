#pragma once

#include <cstdint>
#include <string_view>

#include "opgv/attributes.hpp"
#include "opgv/grammar.hpp"
#include "opgv/parser.hpp"

namespace opgv::arith {

// Demo language: sums of products over integer literals (terminal "n").
//   S ::= A | B
//   A ::= A + B | B + B
//   B ::= B * n | n

struct RuleIds {
  int sum_axiom;      // S ::= A
  int product_axiom;  // S ::= B
  int sum;            // A ::= A + B
  int sum_base;       // A ::= B + B
  int product;        // B ::= B * n
  int literal;        // B ::= n
};

const Grammar& grammar();
const PrecedenceMatrix& matrix();
const RuleIds& rule_ids();

struct LexError : std::runtime_error {
  LexError(std::size_t offset, const std::string& msg)
      : std::runtime_error(msg), offset(offset) {}
  std::size_t offset;
};

std::vector<Token> tokenize(std::string_view source);

const AttributeSchema<std::int64_t>& value_schema();

// Parses and evaluates an expression in one go.
std::int64_t eval_expression(std::string_view source);

}  // namespace opgv::arith
