#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "opgv/incremental.hpp"
#include "opgv/reliability.hpp"
#include "testutil.hpp"

using namespace opgv;

namespace {

SyntaxTree parse_mini(const std::string& text) {
  return parse(mini::grammar(), mini::matrix(), mini::tokenize(text));
}

ReliabilityProfile fixture_profile() {
  ReliabilityProfile p;
  p.succ["opA"] = Rational(97, 100);
  p.succ["opB"] = Rational(99, 100);
  return p;
}

}  // namespace

TEST_CASE("refine substitutes knowledge into gamma") {
  ProbExpr g = ProbExpr::atom("x") * ProbExpr{Rational(7, 10)};
  CHECK(refine(g, {{"x", Rational(9, 10)}}) == ProbExpr{Rational(63, 100)});
  ProbExpr h = ProbExpr::atom("x") * ProbExpr{Rational(99, 100)} +
               (ProbExpr{Rational(1)} - ProbExpr::atom("x")) * ProbExpr{Rational(99, 100)};
  CHECK(refine(h, {{"x", Rational(1, 3)}}) == ProbExpr{Rational(99, 100)});
  CHECK(refine(g, {}) == g);  // empty knowledge is the identity
}

TEST_CASE("while formula closed form") {
  ProbExpr one{Rational(1)};
  CHECK(while_reliability(ProbExpr{Rational(0)}, ProbExpr{Rational(1, 2)}) == one);
  CHECK(while_reliability(ProbExpr{Rational(1, 2)}, one) == one);
  ProbExpr r = while_reliability(ProbExpr{Rational(1, 2)}, ProbExpr{Rational(4, 5)});
  CHECK(r == ProbExpr{Rational(5, 6)});

  // Truncated geometric series: sum_{k=0..40} (d b)^k (1-d).
  Rational d(1, 2), b(4, 5), sum = 0, pow = 1;
  for (int k = 0; k <= 40; ++k) {
    sum += pow * (Rational(1) - d);
    pow *= d * b;
  }
  Rational diff = r.as_rational() - sum;
  if (diff < 0) diff = -diff;
  Rational bound = 1;
  for (int k = 0; k < 41; ++k) bound *= Rational(2, 5);
  CHECK(diff <= bound);
}

TEST_CASE("divergent loop raises with the loop span") {
  CHECK_THROWS_AS(while_reliability(ProbExpr{Rational(1)}, ProbExpr{Rational(1, 2)}, 3, 9),
                  DivergenceError);
  ReliabilityProfile p = fixture_profile();
  p.placeholder = Rational(1);
  SyntaxTree t = parse_mini("begin while * do opA(); endwhile; end");
  CHECK_THROWS_AS(verify_reliability(t, p), DivergenceError);
}

TEST_CASE("a loop whose condition refines to certainty yields zero") {
  // delta is the symbolic Pr_T(x) at the loop, so the closed form applies;
  // refinement with x := true then drives the whole expression to 0.
  SyntaxTree t = parse_mini("begin x := true; while x==true do opA(); endwhile; end");
  ReliabilityResult r = verify_reliability(t, fixture_profile());
  CHECK(r.value == ProbExpr{Rational(0)});
}

TEST_CASE("fixture programs give the published values") {
  ReliabilityProfile p = fixture_profile();
  ReliabilityResult v1 = verify_reliability(
      parse_mini(testutil::read_file(testutil::fixture("v1.mini"))), p);
  CHECK(v1.value == ProbExpr{Rational(9603, 10000)});
  CHECK(v1.warnings.empty());
  ReliabilityResult v2 = verify_reliability(
      parse_mini(testutil::read_file(testutil::fixture("v2.mini"))), p);
  CHECK(v2.value == ProbExpr{Rational(9409, 10000)});
}

TEST_CASE("missing profile entries are schema errors") {
  ReliabilityProfile p;  // empty
  CHECK_THROWS_AS(verify_reliability(parse_mini("begin opA(); end"), p), SchemaError);
  CHECK_THROWS_AS(verify_reliability(parse_mini("begin x := f(); end"), p), SchemaError);
}

TEST_CASE("assignment from a function uses its return probability") {
  ReliabilityProfile p;
  p.succ["opA"] = Rational(9, 10);
  p.succ["f"] = Rational(1);
  p.ret_true["f"] = Rational(3, 4);
  SyntaxTree t = parse_mini(
      "begin x := f(); if x==true then opA(); else opA(); opA(); endif; end");
  ReliabilityResult r = verify_reliability(t, p);
  // 3/4 * 9/10 + 1/4 * 81/100
  CHECK(r.value == ProbExpr{Rational(3, 4) * Rational(9, 10) +
                            Rational(1, 4) * Rational(81, 100)});
}

TEST_CASE("non-unit success on an assigned function warns") {
  ReliabilityProfile p;
  p.succ["f"] = Rational(1, 2);
  p.ret_true["f"] = Rational(1, 2);
  ReliabilityResult r = verify_reliability(parse_mini("begin x := f(); end"), p);
  CHECK(r.value == ProbExpr{Rational(1)});  // gamma of the assignment is 1 by rule
  REQUIRE(!r.warnings.empty());
  CHECK(r.warnings[0].find("success probability") != std::string::npos);
}

TEST_CASE("unassigned condition variables stay symbolic and warn") {
  ReliabilityProfile p;
  p.succ["opA"] = Rational(9, 10);
  p.succ["opB"] = Rational(1, 2);
  SyntaxTree t = parse_mini("begin if y==true then opA(); else opB(); endif; end");
  ReliabilityResult r = verify_reliability(t, p);
  CHECK(!r.value.is_constant());
  CHECK(r.value.atoms() == std::set<std::string>{"y"});
  REQUIRE(!r.warnings.empty());
  CHECK(r.warnings.back().find("unassigned") != std::string::npos);
  // Substituting the missing probability recovers a constant.
  ProbExpr grounded = r.value.substitute({{"y", Rational(1, 2)}});
  CHECK(grounded == ProbExpr{Rational(7, 10)});
}

TEST_CASE("repeated variable inside one condition warns") {
  ReliabilityProfile p;
  p.succ["opA"] = Rational(1);
  SyntaxTree t = parse_mini(
      "begin x := true; if x==true && x==false then opA(); else opA(); endif; end");
  ReliabilityResult r = verify_reliability(t, p);
  bool warned = false;
  for (const auto& w : r.warnings) warned = warned || w.find("repeats") != std::string::npos;
  CHECK(warned);
}

TEST_CASE("placeholder conditions use the profile probability") {
  ReliabilityProfile p;
  p.succ["opA"] = Rational(4, 5);
  p.succ["opB"] = Rational(3, 5);
  p.placeholder = Rational(1, 4);
  SyntaxTree t = parse_mini("begin if * then opA(); else opB(); endif; end");
  ReliabilityResult r = verify_reliability(t, p);
  CHECK(r.value == ProbExpr{Rational(1, 4) * Rational(4, 5) + Rational(3, 4) * Rational(3, 5)});
}

TEST_CASE("incremental reevaluation matches full evaluation on the fixtures") {
  ReliabilityProfile p = fixture_profile();
  SyntaxTree v1 = parse_mini(testutil::read_file(testutil::fixture("v1.mini")));
  ReliabilitySchema s1 = reliability_schema(p);
  AttributeMap<RelValue> old_values = evaluate(v1, s1.schema);
  std::vector<Token> v2_tokens =
      mini::tokenize(testutil::read_file(testutil::fixture("v2.mini")));
  auto [v2, splice] = apply_edit(v1, diff_to_edit(v1.tokens, v2_tokens), mini::grammar(),
                                 mini::matrix());
  ReliabilitySchema s2 = reliability_schema(p);
  auto [new_values, stats] = reevaluate(v2, s2.schema, splice, old_values);
  CHECK(std::get<ProbExpr>(new_values.at(v2.root->id).at("gamma")) ==
        ProbExpr{Rational(9409, 10000)});

  // gamma/theta recomputation happens exactly at display nodes 6, 5, 1, 0.
  auto num = v2.display_numbering(mini::structural_terminals());
  std::set<int> gamma_nodes;
  for (const auto& [id, name] : stats.recomputed_attrs)
    if (name == "gamma" || name == "theta") gamma_nodes.insert(num.at(id));
  CHECK(gamma_nodes == std::set<int>{0, 1, 5, 6});
}

TEST_CASE("path-enumeration oracle agrees on random loop-free programs") {
  testutil::Rng rng(424242);
  testutil::GenOptions opt;
  opt.max_statements = 12;
  opt.num_vars = 4;
  opt.num_funs = 4;
  opt.reliability_exact = true;
  for (int i = 0; i < 200; ++i) {
    testutil::Program prog = testutil::generate_program(rng, opt);
    ReliabilityProfile profile = testutil::random_profile(rng, prog);
    SyntaxTree t = parse_mini(testutil::to_source(prog));
    ReliabilityResult r = verify_reliability(t, profile);
    REQUIRE(r.value.is_constant());
    CHECK(r.value.as_rational() == testutil::reliability_oracle(prog, profile));
  }
}
