#include "opgv/reliability.hpp"

#include <sstream>

namespace opgv {

namespace {

const ProbExpr& as_expr(const RelValue& v) { return std::get<ProbExpr>(v); }
const Knowledge& as_knowledge(const RelValue& v) { return std::get<Knowledge>(v); }
const std::string& as_string(const RelValue& v) { return std::get<std::string>(v); }

}  // namespace

ProbExpr refine(const ProbExpr& gamma, const Knowledge& knowledge) {
  if (knowledge.empty()) return gamma;
  return gamma.substitute(knowledge);
}

ProbExpr while_reliability(const ProbExpr& d, const ProbExpr& body,
                           std::size_t span_begin, std::size_t span_end) {
  const ProbExpr one{Rational(1)};
  if (d.is_constant() && d.as_rational() == 1) {
    throw DivergenceError("loop condition is always true: no probability of exiting",
                          span_begin, span_end);
  }
  return (one - d) / (one - d * body);
}

ReliabilitySchema reliability_schema(const ReliabilityProfile& profile) {
  ReliabilitySchema out;
  out.warnings = std::make_shared<std::vector<std::string>>();
  auto warnings = out.warnings;
  const mini::RuleIds& ids = mini::rule_ids();
  using Attrs = AttributeSchema<RelValue>::Attrs;
  auto& syn = out.schema.synthesis;

  const ProbExpr one{Rational(1)};
  ProbExpr placeholder{profile.placeholder};

  auto warn_once = [warnings](const std::string& msg) {
    for (const auto& w : *warnings)
      if (w == msg) return;
    warnings->push_back(msg);
  };

  // Identifier leaves carry their literal text upward.
  auto literal = [](const Node& node, const std::vector<const Attrs*>&,
                    const SyntaxTree&) -> Attrs {
    return {{"eta", node.children.at(0)->token.lexeme}};
  };
  syn[ids.var_id] = literal;
  syn[ids.function_id] = literal;

  syn[ids.cond] = [placeholder, warn_once](const Node& node,
                                           const std::vector<const Attrs*>&,
                                           const SyntaxTree&) -> Attrs {
    const std::string& text = node.children.at(0)->token.lexeme;
    mini::CondPtr e = mini::parse_condition(text);
    if (mini::cond_has_repeated_variable(*e))
      warn_once("condition '" + text +
                "' repeats a variable; the product rule assumes independence");
    ProbExpr delta = mini::cond_truth_probability(*e, {}, placeholder);
    return {{"delta", delta}};
  };

  syn[ids.call] = [profile](const Node& node, const std::vector<const Attrs*>& ch,
                             const SyntaxTree&) -> Attrs {
    const std::string& f = as_string(ch.at(0)->at("eta"));
    auto it = profile.succ.find(f);
    if (it == profile.succ.end())
      throw SchemaError("missing success probability for function '" + f + "'");
    (void)node;
    return {{"gamma", ProbExpr{it->second}}, {"theta", Knowledge{}}};
  };

  auto assign_const = [](bool value) {
    return [value](const Node&, const std::vector<const Attrs*>& ch,
                   const SyntaxTree&) -> Attrs {
      const std::string& v = as_string(ch.at(0)->at("eta"));
      return {{"gamma", ProbExpr{Rational(1)}},
              {"theta", Knowledge{{v, Rational(value ? 1 : 0)}}}};
    };
  };
  syn[ids.assign_true] = assign_const(true);
  syn[ids.assign_false] = assign_const(false);

  syn[ids.assign_fun] = [profile, warn_once](const Node&,
                                              const std::vector<const Attrs*>& ch,
                                              const SyntaxTree&) -> Attrs {
    const std::string& v = as_string(ch.at(0)->at("eta"));
    const std::string& f = as_string(ch.at(2)->at("eta"));
    auto it = profile.ret_true.find(f);
    if (it == profile.ret_true.end())
      throw SchemaError("missing return-true probability for function '" + f + "'");
    auto succ = profile.succ.find(f);
    if (succ != profile.succ.end() && succ->second != 1)
      warn_once("function '" + f +
                "' is used in an assignment; its success probability is taken as 1");
    return {{"gamma", ProbExpr{Rational(1)}}, {"theta", Knowledge{{v, it->second}}}};
  };

  syn[ids.if_stmt] = [one](const Node&, const std::vector<const Attrs*>& ch,
                           const SyntaxTree&) -> Attrs {
    // children: if cond then stmtlist else stmtlist endif
    const ProbExpr& delta = as_expr(ch.at(1)->at("delta"));
    const ProbExpr& then_g = as_expr(ch.at(3)->at("gamma"));
    const ProbExpr& else_g = as_expr(ch.at(5)->at("gamma"));
    return {{"gamma", then_g * delta + else_g * (one - delta)},
            {"theta", Knowledge{}}};
  };

  syn[ids.while_stmt] = [](const Node& node, const std::vector<const Attrs*>& ch,
                           const SyntaxTree&) -> Attrs {
    const ProbExpr& delta = as_expr(ch.at(1)->at("delta"));
    const ProbExpr& body = as_expr(ch.at(3)->at("gamma"));
    return {{"gamma", while_reliability(delta, body, node.begin, node.end)},
            {"theta", Knowledge{}}};
  };

  syn[ids.seq] = [](const Node&, const std::vector<const Attrs*>& ch,
                    const SyntaxTree&) -> Attrs {
    // children: stmt ; stmtlist
    const ProbExpr& head = as_expr(ch.at(0)->at("gamma"));
    const Knowledge& theta = as_knowledge(ch.at(0)->at("theta"));
    const ProbExpr& tail = as_expr(ch.at(2)->at("gamma"));
    return {{"gamma", refine(head * tail, theta)}, {"theta", Knowledge{}}};
  };

  syn[ids.seq_last] = [](const Node&, const std::vector<const Attrs*>& ch,
                         const SyntaxTree&) -> Attrs {
    return {{"gamma", as_expr(ch.at(0)->at("gamma"))}, {"theta", Knowledge{}}};
  };

  syn[ids.program] = [](const Node&, const std::vector<const Attrs*>& ch,
                        const SyntaxTree&) -> Attrs {
    return {{"gamma", as_expr(ch.at(1)->at("gamma"))}, {"theta", Knowledge{}}};
  };

  return out;
}

ReliabilityResult verify_reliability(const SyntaxTree& tree,
                                     const ReliabilityProfile& profile) {
  ReliabilitySchema schema = reliability_schema(profile);
  AttributeMap<RelValue> values = evaluate(tree, schema.schema);
  ReliabilityResult result;
  result.value = std::get<ProbExpr>(values.at(tree.root->id).at("gamma"));
  result.warnings = *schema.warnings;
  if (!result.value.is_constant()) {
    std::ostringstream os;
    os << "result depends on unassigned variables:";
    for (const std::string& a : result.value.atoms()) os << " " << a;
    result.warnings.push_back(os.str());
  }
  return result;
}

}  // namespace opgv
