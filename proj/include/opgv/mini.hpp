#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "opgv/grammar.hpp"
#include "opgv/parser.hpp"
#include "opgv/probexpr.hpp"

namespace opgv::mini {

// Terminal names
inline const Symbol kVarIdent = "var-ident";
inline const Symbol kFunIdent = "fun-ident";
inline const Symbol kCondLit = "cond-lit";

// Nonterminal names
inline const Symbol kProgram = "S";
inline const Symbol kStmtList = "stmtlist";
inline const Symbol kStmt = "stmt";
inline const Symbol kVarId = "var-id";
inline const Symbol kFunctionId = "function-id";
inline const Symbol kCond = "cond";

struct RuleIds {
  int program;       // S ::= begin stmtlist end
  int seq;           // stmtlist ::= stmt ; stmtlist
  int seq_last;      // stmtlist ::= stmt ;
  int call;          // stmt ::= function-id ( )
  int assign_true;   // stmt ::= var-id := true
  int assign_false;  // stmt ::= var-id := false
  int assign_fun;    // stmt ::= var-id := function-id ( )
  int if_stmt;       // stmt ::= if cond then stmtlist else stmtlist endif
  int while_stmt;    // stmt ::= while cond do stmtlist endwhile
  int var_id;        // var-id ::= var-ident
  int function_id;   // function-id ::= fun-ident
  int cond;          // cond ::= cond-lit
};

const Grammar& grammar();
const PrecedenceMatrix& matrix();
const RuleIds& rule_ids();
// Keyword and punctuation terminals, hidden in tree dumps and numbering.
const std::set<Symbol>& structural_terminals();

struct LexError : std::runtime_error {
  LexError(std::size_t offset, const std::string& msg)
      : std::runtime_error(msg), offset(offset) {}
  std::size_t offset;
};

std::vector<Token> tokenize(std::string_view source);
std::string untokenize(const std::vector<Token>& tokens);

// ---- Condition sub-language ----

struct CondExpr;
using CondPtr = std::shared_ptr<const CondExpr>;

struct CondExpr {
  enum class Kind { VarEqTrue, VarEqFalse, Not, And, Placeholder };
  Kind kind;
  std::string var;    // VarEqTrue / VarEqFalse
  CondPtr lhs, rhs;   // Not uses lhs; And uses both
};

bool cond_equal(const CondExpr& a, const CondExpr& b);
std::string cond_to_string(const CondExpr& e);

struct CondSyntaxError : std::runtime_error {
  CondSyntaxError(std::size_t position, const std::string& msg)
      : std::runtime_error(msg), position(position) {}
  std::size_t position;
};

CondPtr parse_condition(std::string_view text);

enum class Truth { False, True, Unknown };

// Three-valued evaluation under a partial variable map (Kleene semantics);
// placeholders are always unknown.
Truth cond_evaluate(const CondExpr& e, const std::map<std::string, bool>& vm);

// Truth probability of a condition. Variables absent from `known` stay as
// symbolic Pr_T(v) atoms; placeholders use the given probability.
ProbExpr cond_truth_probability(const CondExpr& e,
                                const std::map<std::string, ProbExpr>& known,
                                const ProbExpr& placeholder_prob);

// Variables mentioned in a condition (for warnings and profile checks).
std::set<std::string> cond_variables(const CondExpr& e);
// True when some variable occurs more than once (the product rule then
// assumes an independence that does not hold).
bool cond_has_repeated_variable(const CondExpr& e);

}  // namespace opgv::mini
