#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace opgv {

using Symbol = std::string;

// Reserved sentinel terminal wrapped around every input by the parser.
inline const Symbol kSentinel = "#";

struct Rule {
  Symbol lhs;
  std::vector<Symbol> rhs;
  int id = -1;
};

// A context-free grammar in operator form: no rule right-hand side may
// place two nonterminals next to each other.
struct Grammar {
  std::set<Symbol> nonterminals;
  std::set<Symbol> terminals;
  std::vector<Rule> rules;
  Symbol axiom;

  bool is_nonterminal(const Symbol& s) const { return nonterminals.count(s) > 0; }
  bool is_terminal(const Symbol& s) const { return terminals.count(s) > 0; }

  // Unique rule whose rhs matches the given symbol sequence, or nullptr.
  const Rule* find_rule_by_rhs(const std::vector<Symbol>& rhs) const;
  const Rule& rule(int id) const { return rules.at(static_cast<std::size_t>(id)); }

  // Checks symbol-set consistency (disjointness, axiom membership, rule
  // symbols declared). Throws std::invalid_argument on failure.
  void check_well_formed() const;
};

enum class Prec { Yields, Equal, Takes };

const char* to_string(Prec p);

// Terminal-by-terminal precedence relation table. Sentinel rows/columns
// are implicit: '#' yields to every terminal and every terminal takes
// precedence over '#'.
class PrecedenceMatrix {
 public:
  void set(const Symbol& a, const Symbol& b, Prec p);
  std::optional<Prec> between(const Symbol& a, const Symbol& b) const;

  const std::map<std::pair<Symbol, Symbol>, Prec>& non_sentinel_entries() const {
    return entries_;
  }

 private:
  std::map<std::pair<Symbol, Symbol>, Prec> entries_;
};

struct OpFormViolation {
  int rule_id;
  std::size_t position;  // index of the first of two adjacent nonterminals
};

std::vector<OpFormViolation> validate_operator_form(const Grammar& g);

// Leftmost/rightmost terminal sets per nonterminal, computed as the least
// fixpoint over the rules.
struct BorderSets {
  std::map<Symbol, std::set<Symbol>> left;
  std::map<Symbol, std::set<Symbol>> right;
};

BorderSets terminal_border_sets(const Grammar& g);

struct OpmConflict {
  Symbol a, b;
  Prec existing, attempted;
};

struct OpmResult {
  PrecedenceMatrix matrix;
  std::vector<OpmConflict> conflicts;
  bool ok() const { return conflicts.empty(); }
};

// Populates the matrix with the classical construction:
//   (i)  a = b  when some rhs contains a, b separated by at most one nonterminal
//   (ii) a < b  when some rhs contains a immediately followed by N, b in left(N)
//   (iii) a > b when some rhs contains N immediately followed by b, a in right(N)
// Conflicting cells are reported; a grammar with conflicts is not an OPG.
OpmResult compute_opm(const Grammar& g);

struct FnfViolation {
  enum class Kind { NotInvertible, AxiomInRhs, EmptyRule, RenamingRule };
  Kind kind;
  int rule_id;
  std::string detail;
};

// Fischer Normal Form: invertible, axiom absent from every rhs, the only
// empty rule (if any) is axiom -> empty, renaming rules only for the axiom.
std::vector<FnfViolation> validate_fnf(const Grammar& g);

}  // namespace opgv
