#include "opgv/arith.hpp"

#include <cctype>
#include <stdexcept>

namespace opgv::arith {

namespace {

struct GrammarBundle {
  Grammar g;
  PrecedenceMatrix opm;
  RuleIds ids;
};

GrammarBundle build() {
  GrammarBundle b;
  Grammar& g = b.g;
  g.nonterminals = {"S", "A", "B"};
  g.terminals = {"+", "*", "n"};
  g.axiom = "S";
  auto add = [&](const Symbol& lhs, std::vector<Symbol> rhs) {
    int id = static_cast<int>(g.rules.size());
    g.rules.push_back({lhs, std::move(rhs), id});
    return id;
  };
  b.ids.sum_axiom = add("S", {"A"});
  b.ids.product_axiom = add("S", {"B"});
  b.ids.sum = add("A", {"A", "+", "B"});
  b.ids.sum_base = add("A", {"B", "+", "B"});
  b.ids.product = add("B", {"B", "*", "n"});
  b.ids.literal = add("B", {"n"});
  g.check_well_formed();
  OpmResult opm = compute_opm(g);
  if (!opm.ok()) throw std::logic_error("precedence conflict in the demo grammar");
  b.opm = std::move(opm.matrix);
  return b;
}

const GrammarBundle& bundle() {
  static const GrammarBundle b = build();
  return b;
}

}  // namespace

const Grammar& grammar() { return bundle().g; }
const PrecedenceMatrix& matrix() { return bundle().opm; }
const RuleIds& rule_ids() { return bundle().ids; }

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '+' || c == '*') {
      out.push_back({std::string(1, c), std::string(1, c), i});
      ++i;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      out.push_back({"n", std::string(src.substr(i, j - i)), i});
      i = j;
      continue;
    }
    throw LexError(i, std::string("unexpected character '") + c + "'");
  }
  return out;
}

const AttributeSchema<std::int64_t>& value_schema() {
  static const AttributeSchema<std::int64_t> schema = [] {
    AttributeSchema<std::int64_t> s;
    const RuleIds& ids = rule_ids();
    using Attrs = AttributeSchema<std::int64_t>::Attrs;
    auto leaf_value = [](const Node& n) {
      return static_cast<std::int64_t>(std::stoll(n.token.lexeme));
    };
    auto lift = [](const Node&, const std::vector<const Attrs*>& ch,
                   const SyntaxTree&) -> Attrs {
      return {{"value", ch.at(0)->at("value")}};
    };
    s.synthesis[ids.sum_axiom] = lift;
    s.synthesis[ids.product_axiom] = lift;
    auto sum = [](const Node&, const std::vector<const Attrs*>& ch,
                  const SyntaxTree&) -> Attrs {
      return {{"value", ch.at(0)->at("value") + ch.at(2)->at("value")}};
    };
    s.synthesis[ids.sum] = sum;
    s.synthesis[ids.sum_base] = sum;
    s.synthesis[ids.product] = [leaf_value](const Node& node,
                                            const std::vector<const Attrs*>& ch,
                                            const SyntaxTree&) -> Attrs {
      return {{"value", ch.at(0)->at("value") * leaf_value(*node.children.at(2))}};
    };
    s.synthesis[ids.literal] = [leaf_value](const Node& node,
                                            const std::vector<const Attrs*>&,
                                            const SyntaxTree&) -> Attrs {
      return {{"value", leaf_value(*node.children.at(0))}};
    };
    return s;
  }();
  return schema;
}

std::int64_t eval_expression(std::string_view source) {
  SyntaxTree tree = parse(grammar(), matrix(), tokenize(source));
  AttributeMap<std::int64_t> values = evaluate(tree, value_schema());
  return values.at(tree.root->id).at("value");
}

}  // namespace opgv::arith
