#pragma once

#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "opgv/attributes.hpp"
#include "opgv/mini.hpp"
#include "opgv/probexpr.hpp"

namespace opgv {

// Per-function probabilities: success probability and probability of
// returning true given success, plus the placeholder-condition probability.
struct ReliabilityProfile {
  std::map<std::string, Rational> succ;
  std::map<std::string, Rational> ret_true;
  Rational placeholder{1, 2};
};

// Knowledge gathered by an assignment: at most one truth probability per
// variable.
using Knowledge = std::map<std::string, Rational>;

using RelValue = std::variant<ProbExpr, Knowledge, std::string>;

// gamma | theta: substitutes the known variable probabilities into gamma.
ProbExpr refine(const ProbExpr& gamma, const Knowledge& knowledge);

struct DivergenceError : SchemaError {
  DivergenceError(const std::string& msg, std::size_t span_begin, std::size_t span_end)
      : SchemaError(msg), span_begin(span_begin), span_end(span_end) {}
  std::size_t span_begin, span_end;
};

// Expected success probability of a loop with entry probability d and body
// reliability `body`: (1 - d) / (1 - d * body). Throws DivergenceError when
// d is the constant 1.
ProbExpr while_reliability(const ProbExpr& d, const ProbExpr& body,
                           std::size_t span_begin = 0, std::size_t span_end = 0);

struct ReliabilitySchema {
  AttributeSchema<RelValue> schema;
  std::shared_ptr<std::vector<std::string>> warnings;
};

ReliabilitySchema reliability_schema(const ReliabilityProfile& profile);

struct ReliabilityResult {
  ProbExpr value;  // gamma at the root; symbolic if variables stay unresolved
  std::vector<std::string> warnings;
};

ReliabilityResult verify_reliability(const SyntaxTree& tree,
                                     const ReliabilityProfile& profile);

}  // namespace opgv
