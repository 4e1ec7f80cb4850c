#include "opgv/safety.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace opgv {

void PropertyAutomaton::check_well_formed() const {
  if (states.empty()) throw std::invalid_argument("automaton needs at least one state");
  std::set<std::string> seen(states.begin(), states.end());
  if (seen.size() != states.size())
    throw std::invalid_argument("duplicate state names in automaton");
  if (seen.count(kErrState))
    throw std::invalid_argument("'" + kErrState + "' is a reserved state name");
  if (!seen.count(initial))
    throw std::invalid_argument("initial state '" + initial + "' is not a state");
  for (const auto& [key, to] : transitions) {
    if (!seen.count(key.first))
      throw std::invalid_argument("transition from unknown state '" + key.first + "'");
    if (!alphabet.count(key.second))
      throw std::invalid_argument("transition on symbol '" + key.second +
                                  "' not in the alphabet");
    if (!seen.count(to))
      throw std::invalid_argument("transition to unknown state '" + to + "'");
  }
}

std::string ImageAutomaton::next(const std::string& state, const std::string& symbol) const {
  if (state == kErrState) return kErrState;
  auto it = base.transitions.find({state, symbol});
  return it == base.transitions.end() ? kErrState : it->second;
}

ImageAutomaton image_automaton(const PropertyAutomaton& a) {
  a.check_well_formed();
  return ImageAutomaton{a};
}

bool Step::operator==(const Step& o) const {
  if (kind != o.kind || value != o.value) return false;
  return kind == Kind::Assign ? var == o.var : cond_text == o.cond_text;
}

bool Step::operator<(const Step& o) const {
  auto key = [](const Step& s) {
    return std::tie(s.kind, s.var, s.cond_text, s.value);
  };
  return key(*this) < key(o);
}

std::string Step::to_string() const {
  std::string outcome = value ? "true" : "false";
  if (kind == Kind::Assign) return "Assign(" + var + ", " + outcome + ")";
  return "Check(" + mini::cond_to_string(*cond) + ", " + outcome + ")";
}

Step make_assign(std::string var, bool value) {
  Step s;
  s.kind = Step::Kind::Assign;
  s.var = std::move(var);
  s.value = value;
  return s;
}

Step make_check(mini::CondPtr cond, std::string text, bool expected) {
  Step s;
  s.kind = Step::Kind::Check;
  s.cond = std::move(cond);
  s.cond_text = std::move(text);
  s.value = expected;
  return s;
}

namespace {

// Replays the steps against the variable map they build up. A check whose
// outcome is definite must match its expected value; unknown checks stay
// pending and count as satisfiable.
bool replay(const std::vector<Step>& steps) {
  std::map<std::string, bool> vm;
  for (const Step& s : steps) {
    if (s.kind == Step::Kind::Assign) {
      vm[s.var] = s.value;
    } else {
      mini::Truth t = mini::cond_evaluate(*s.cond, vm);
      if (t == mini::Truth::Unknown) continue;
      if ((t == mini::Truth::True) != s.value) return false;
    }
  }
  return true;
}

}  // namespace

bool Transformer::live() const { return replay(steps); }

std::string Transformer::to_string() const {
  std::string out = "[";
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (i) out += ", ";
    out += steps[i].to_string();
  }
  return out + "]";
}

std::optional<Transformer> upd(const std::optional<Transformer>& c,
                               const std::optional<std::pair<std::string, bool>>& assign,
                               const std::optional<std::pair<mini::CondPtr, bool>>& check) {
  if (!c) return std::nullopt;
  Transformer t = *c;
  if (assign) t.steps.push_back(make_assign(assign->first, assign->second));
  if (check)
    t.steps.push_back(
        make_check(check->first, mini::cond_to_string(*check->first), check->second));
  if (!t.live()) return std::nullopt;
  return t;
}

bool Template::operator==(const Template& o) const {
  if (any != o.any) return false;
  if (!any && (from != o.from || to != o.to)) return false;
  return transform == o.transform;
}

bool Template::operator<(const Template& o) const {
  auto key = [](const Template& t) {
    static const std::string empty;
    return std::tie(t.any, t.any ? empty : t.from, t.any ? empty : t.to,
                    t.transform.steps);
  };
  return key(*this) < key(o);
}

TransitionSet TransitionSet::identity() {
  TransitionSet s;
  Template t;
  t.any = true;
  s.insert(std::move(t));
  return s;
}

void TransitionSet::insert(Template t) {
  if (!t.transform.live()) return;
  auto it = std::lower_bound(templates_.begin(), templates_.end(), t);
  if (it != templates_.end() && *it == t) return;
  templates_.insert(it, std::move(t));
}

TransitionSet set_union(const TransitionSet& a, const TransitionSet& b) {
  TransitionSet out = a;
  for (const Template& t : b.templates()) out.insert(t);
  return out;
}

TransitionSet compose(const TransitionSet& a, const TransitionSet& b,
                      std::size_t* materialized) {
  TransitionSet out;
  for (const Template& ta : a.templates()) {
    // The error location is absorbing: once reached, the rest of the
    // program cannot undo the violation, so the template survives as is.
    if (!ta.any && ta.to == kErrState) {
      if (materialized) ++*materialized;
      out.insert(ta);
      continue;
    }
    for (const Template& tb : b.templates()) {
      Template t;
      if (ta.any && tb.any) {
        t.any = true;
      } else if (ta.any) {
        t.from = tb.from;
        t.to = tb.to;
      } else if (tb.any) {
        t.from = ta.from;
        t.to = ta.to;
      } else {
        if (ta.to != tb.from) continue;
        t.from = ta.from;
        t.to = tb.to;
      }
      if (materialized) ++*materialized;
      t.transform.steps = ta.transform.steps;
      t.transform.steps.insert(t.transform.steps.end(), tb.transform.steps.begin(),
                               tb.transform.steps.end());
      out.insert(std::move(t));
    }
  }
  return out;
}

TransitionSet relation_iterate(const TransitionSet& g, unsigned k,
                               std::size_t* materialized) {
  TransitionSet acc = TransitionSet::identity();
  TransitionSet power = TransitionSet::identity();
  for (unsigned i = 0; i < k; ++i) {
    power = compose(power, g, materialized);
    acc = set_union(acc, power);
  }
  return acc;
}

namespace {

const TransitionSet& as_set(const SafetyValue& v) { return std::get<TransitionSet>(v); }
const std::string& as_string(const SafetyValue& v) { return std::get<std::string>(v); }

}  // namespace

SafetySchema safety_schema(const ImageAutomaton& img, unsigned unroll_k) {
  SafetySchema out;
  out.tuples_processed = std::make_shared<std::size_t>(0);
  out.warnings = std::make_shared<std::vector<std::string>>();
  auto count = out.tuples_processed;

  for (const std::string& sym : img.base.alphabet) {
    if (sym.find(":=") != std::string::npos)
      out.warnings->push_back("alphabet symbol '" + sym +
                              "' is an assignment label; transitions are looked up by "
                              "function name only");
  }

  const mini::RuleIds& ids = mini::rule_ids();
  using Attrs = AttributeSchema<SafetyValue>::Attrs;
  auto& syn = out.schema.synthesis;

  auto literal = [](const Node& node, const std::vector<const Attrs*>&,
                    const SyntaxTree&) -> Attrs {
    return {{"eta", node.children.at(0)->token.lexeme}};
  };
  syn[ids.var_id] = literal;
  syn[ids.function_id] = literal;

  syn[ids.cond] = [count](const Node& node, const std::vector<const Attrs*>&,
                          const SyntaxTree&) -> Attrs {
    const std::string& text = node.children.at(0)->token.lexeme;
    mini::CondPtr e = mini::parse_condition(text);
    TransitionSet on_true, on_false;
    Template t;
    t.any = true;
    t.transform.steps = {make_check(e, text, true)};
    on_true.insert(t);
    t.transform.steps = {make_check(e, text, false)};
    on_false.insert(std::move(t));
    *count += 2;
    return {{"gammaT", on_true}, {"gammaF", on_false}, {"nu", text}};
  };

  syn[ids.call] = [img, count](const Node&, const std::vector<const Attrs*>& ch,
                               const SyntaxTree&) -> Attrs {
    const std::string& f = as_string(ch.at(0)->at("eta"));
    if (!img.in_alphabet(f))
      throw SchemaError("function '" + f + "' is not in the automaton alphabet");
    TransitionSet g;
    for (const std::string& s1 : img.states()) {
      Template t;
      t.from = s1;
      t.to = img.next(s1, f);
      g.insert(std::move(t));
      ++*count;
    }
    return {{"gamma", g}};
  };

  auto assign_const = [count](bool value) {
    return [count, value](const Node&, const std::vector<const Attrs*>& ch,
                          const SyntaxTree&) -> Attrs {
      const std::string& v = as_string(ch.at(0)->at("eta"));
      TransitionSet g;
      Template t;
      t.any = true;
      t.transform.steps = {make_assign(v, value)};
      g.insert(std::move(t));
      ++*count;
      return {{"gamma", g}};
    };
  };
  syn[ids.assign_true] = assign_const(true);
  syn[ids.assign_false] = assign_const(false);

  syn[ids.assign_fun] = [img, count](const Node&, const std::vector<const Attrs*>& ch,
                                     const SyntaxTree&) -> Attrs {
    const std::string& v = as_string(ch.at(0)->at("eta"));
    const std::string& f = as_string(ch.at(2)->at("eta"));
    if (!img.in_alphabet(f))
      throw SchemaError("function '" + f + "' is not in the automaton alphabet");
    TransitionSet g;
    for (const std::string& s1 : img.states()) {
      for (bool value : {true, false}) {
        Template t;
        t.from = s1;
        t.to = img.next(s1, f);
        t.transform.steps = {make_assign(v, value)};
        g.insert(std::move(t));
        ++*count;
      }
    }
    return {{"gamma", g}};
  };

  syn[ids.if_stmt] = [count](const Node&, const std::vector<const Attrs*>& ch,
                             const SyntaxTree&) -> Attrs {
    // children: if cond then stmtlist else stmtlist endif
    const TransitionSet& on_true = as_set(ch.at(1)->at("gammaT"));
    const TransitionSet& on_false = as_set(ch.at(1)->at("gammaF"));
    const TransitionSet& then_g = as_set(ch.at(3)->at("gamma"));
    const TransitionSet& else_g = as_set(ch.at(5)->at("gamma"));
    return {{"gamma", set_union(compose(on_true, then_g, count.get()),
                                compose(on_false, else_g, count.get()))}};
  };

  syn[ids.while_stmt] = [count, unroll_k](const Node&,
                                          const std::vector<const Attrs*>& ch,
                                          const SyntaxTree&) -> Attrs {
    const TransitionSet& on_true = as_set(ch.at(1)->at("gammaT"));
    const TransitionSet& on_false = as_set(ch.at(1)->at("gammaF"));
    const TransitionSet& body = as_set(ch.at(3)->at("gamma"));
    TransitionSet once = compose(on_true, body, count.get());
    return {{"gamma", compose(relation_iterate(once, unroll_k, count.get()), on_false,
                              count.get())}};
  };

  syn[ids.seq] = [count](const Node&, const std::vector<const Attrs*>& ch,
                         const SyntaxTree&) -> Attrs {
    return {{"gamma", compose(as_set(ch.at(0)->at("gamma")),
                              as_set(ch.at(2)->at("gamma")), count.get())}};
  };

  syn[ids.seq_last] = [](const Node&, const std::vector<const Attrs*>& ch,
                         const SyntaxTree&) -> Attrs {
    return {{"gamma", as_set(ch.at(0)->at("gamma"))}};
  };

  syn[ids.program] = [](const Node&, const std::vector<const Attrs*>& ch,
                        const SyntaxTree&) -> Attrs {
    return {{"gamma", as_set(ch.at(1)->at("gamma"))}};
  };

  return out;
}

SafetyResult ground_verdict(const TransitionSet& root_gamma, const ImageAutomaton& img) {
  SafetyResult r;
  for (const Template& t : root_gamma.templates()) {
    if (t.any) continue;  // identity templates never move to the error location
    if (t.from == img.base.initial && t.to == kErrState && t.transform.live()) {
      r.safe = false;
      r.witness = t.transform;
      break;
    }
  }
  return r;
}

SafetyResult verify_safety(const SyntaxTree& tree, const PropertyAutomaton& automaton,
                           unsigned unroll_k) {
  ImageAutomaton img = image_automaton(automaton);
  SafetySchema s = safety_schema(img, unroll_k);
  AttributeMap<SafetyValue> values = evaluate(tree, s.schema);
  SafetyResult r = ground_verdict(as_set(values.at(tree.root->id).at("gamma")), img);
  r.tuples_processed = *s.tuples_processed;
  r.warnings = *s.warnings;
  return r;
}

}  // namespace opgv
