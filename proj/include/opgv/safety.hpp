#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "opgv/attributes.hpp"
#include "opgv/mini.hpp"

namespace opgv {

inline const std::string kErrState = "ERR";

// Deterministic automaton over function-call and assignment symbols.
struct PropertyAutomaton {
  std::vector<std::string> states;
  std::string initial;
  std::set<std::string> alphabet;
  std::map<std::pair<std::string, std::string>, std::string> transitions;

  void check_well_formed() const;  // throws std::invalid_argument
};

// Totalization of a property automaton: every move undefined in the
// original lands in the absorbing ERR location.
struct ImageAutomaton {
  PropertyAutomaton base;

  const std::vector<std::string>& states() const { return base.states; }
  // next() is total over base states; ERR traps everything.
  std::string next(const std::string& state, const std::string& symbol) const;
  bool in_alphabet(const std::string& symbol) const { return base.alphabet.count(symbol) > 0; }
};

ImageAutomaton image_automaton(const PropertyAutomaton& a);

// One step of a configuration transformer: a variable assignment or a path
// condition observed with an expected outcome.
struct Step {
  enum class Kind { Assign, Check };
  Kind kind;
  std::string var;        // Assign
  bool value;             // Assign: assigned value; Check: expected outcome
  mini::CondPtr cond;     // Check
  std::string cond_text;  // Check, for ordering/printing

  bool operator==(const Step& o) const;
  bool operator<(const Step& o) const;
  std::string to_string() const;
};

Step make_assign(std::string var, bool value);
Step make_check(mini::CondPtr cond, std::string text, bool expected);

// An ordered step list; consistency is decided by replaying the steps
// against the variable map they build up. Checks over still-undefined
// variables (or placeholders) stay pending and count as satisfiable.
struct Transformer {
  std::vector<Step> steps;

  bool live() const;  // false means the transformer denotes the invalid configuration
  bool operator==(const Transformer& o) const { return steps == o.steps; }
  bool operator<(const Transformer& o) const { return steps < o.steps; }
  std::string to_string() const;
};

// upd: appends one assignment or one check to a configuration and replays;
// nullopt stands for the invalid configuration.
std::optional<Transformer> upd(const std::optional<Transformer>& c,
                               const std::optional<std::pair<std::string, bool>>& assign,
                               const std::optional<std::pair<mini::CondPtr, bool>>& check);

// A transition template between image-automaton locations. `any` denotes
// the state-identity family <s, c1, s, c2> for every location s.
struct Template {
  bool any = false;
  std::string from, to;  // ignored when any
  Transformer transform;

  bool operator==(const Template& o) const;
  bool operator<(const Template& o) const;
};

// Finite set of live transition templates (dead ones are pruned eagerly).
class TransitionSet {
 public:
  static TransitionSet identity();

  // Inserts if live and not present.
  void insert(Template t);
  const std::vector<Template>& templates() const { return templates_; }
  std::size_t size() const { return templates_.size(); }
  bool operator==(const TransitionSet& o) const { return templates_ == o.templates_; }

 private:
  std::vector<Template> templates_;  // sorted, unique
};

TransitionSet set_union(const TransitionSet& a, const TransitionSet& b);

// Relational join: state components unify (ANY is transparent), transformer
// step lists concatenate and are replayed; dead results are pruned. A
// template already at ERR passes through unchanged: ERR is absorbing.
// `materialized`, when given, counts every candidate tuple before pruning.
TransitionSet compose(const TransitionSet& a, const TransitionSet& b,
                      std::size_t* materialized = nullptr);

// Union of the 0..k fold compositions of g with itself (0 = identity).
TransitionSet relation_iterate(const TransitionSet& g, unsigned k,
                               std::size_t* materialized = nullptr);

using SafetyValue = std::variant<TransitionSet, std::string>;

struct SafetySchema {
  AttributeSchema<SafetyValue> schema;
  std::shared_ptr<std::size_t> tuples_processed;
  std::shared_ptr<std::vector<std::string>> warnings;
};

SafetySchema safety_schema(const ImageAutomaton& img, unsigned unroll_k);

struct SafetyResult {
  bool safe = true;
  std::optional<Transformer> witness;  // step list of a violating template
  std::size_t tuples_processed = 0;
  std::vector<std::string> warnings;
};

// Grounds a root transition set at (initial state, empty configuration).
SafetyResult ground_verdict(const TransitionSet& root_gamma, const ImageAutomaton& img);

SafetyResult verify_safety(const SyntaxTree& tree, const PropertyAutomaton& automaton,
                           unsigned unroll_k);

}  // namespace opgv
