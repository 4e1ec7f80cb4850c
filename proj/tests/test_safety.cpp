#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "opgv/incremental.hpp"
#include "opgv/safety.hpp"
#include "testutil.hpp"

using namespace opgv;

namespace {

SyntaxTree parse_mini(const std::string& text) {
  return parse(mini::grammar(), mini::matrix(), mini::tokenize(text));
}

PropertyAutomaton fixture_automaton() {
  PropertyAutomaton a;
  a.states = {"q0", "q1"};
  a.initial = "q0";
  a.alphabet = {"opA", "opB"};
  a.transitions[{"q0", "opA"}] = "q1";
  a.transitions[{"q1", "opB"}] = "q0";
  return a;
}

Template concrete(std::string from, std::string to, std::vector<Step> steps = {}) {
  Template t;
  t.from = std::move(from);
  t.to = std::move(to);
  t.transform.steps = std::move(steps);
  return t;
}

Template any_state(std::vector<Step> steps) {
  Template t;
  t.any = true;
  t.transform.steps = std::move(steps);
  return t;
}

TransitionSet make_set(std::vector<Template> ts) {
  TransitionSet s;
  for (auto& t : ts) s.insert(std::move(t));
  return s;
}

Step check_step(const std::string& text, bool expected) {
  return make_check(mini::parse_condition(text), text, expected);
}

TransitionSet root_gamma(const std::string& src, const PropertyAutomaton& a, unsigned k) {
  SyntaxTree t = parse_mini(src);
  SafetySchema s = safety_schema(image_automaton(a), k);
  return std::get<TransitionSet>(evaluate(t, s.schema).at(t.root->id).at("gamma"));
}

}  // namespace

TEST_CASE("image automaton adds the missing edges to the error location") {
  ImageAutomaton img = image_automaton(fixture_automaton());
  CHECK(img.next("q0", "opA") == "q1");
  CHECK(img.next("q1", "opB") == "q0");
  CHECK(img.next("q0", "opB") == kErrState);
  CHECK(img.next("q1", "opA") == kErrState);
  CHECK(img.next(kErrState, "opA") == kErrState);  // absorbing
}

TEST_CASE("an empty transition map traps every symbol") {
  PropertyAutomaton a;
  a.states = {"s"};
  a.initial = "s";
  a.alphabet = {"f"};
  ImageAutomaton img = image_automaton(a);
  CHECK(img.next("s", "f") == kErrState);
}

TEST_CASE("a total automaton is unchanged by totalization") {
  PropertyAutomaton a;
  a.states = {"s"};
  a.initial = "s";
  a.alphabet = {"f"};
  a.transitions[{"s", "f"}] = "s";
  ImageAutomaton img = image_automaton(a);
  CHECK(img.next("s", "f") == "s");
}

TEST_CASE("malformed automata are rejected") {
  PropertyAutomaton a = fixture_automaton();
  SUBCASE("unknown initial") {
    a.initial = "nope";
    CHECK_THROWS_AS(a.check_well_formed(), std::invalid_argument);
  }
  SUBCASE("reserved state name") {
    a.states.push_back(kErrState);
    CHECK_THROWS_AS(a.check_well_formed(), std::invalid_argument);
  }
  SUBCASE("transition on foreign symbol") {
    a.transitions[{"q0", "nope"}] = "q0";
    CHECK_THROWS_AS(a.check_well_formed(), std::invalid_argument);
  }
}

TEST_CASE("upd appends and replays") {
  Transformer empty;
  auto after_assign = upd(empty, std::pair<std::string, bool>{"x", true}, std::nullopt);
  REQUIRE(after_assign);
  CHECK(after_assign->steps.size() == 1);

  auto cond = mini::parse_condition("x==true");
  SUBCASE("contradicting check collapses") {
    CHECK(!upd(after_assign, std::nullopt, std::pair<mini::CondPtr, bool>{cond, false}));
    auto f = upd(empty, std::pair<std::string, bool>{"x", false}, std::nullopt);
    CHECK(!upd(f, std::nullopt, std::pair<mini::CondPtr, bool>{cond, true}));
  }
  SUBCASE("matching check stays live") {
    auto ok = upd(after_assign, std::nullopt, std::pair<mini::CondPtr, bool>{cond, true});
    REQUIRE(ok);
    CHECK(ok->live());
  }
  SUBCASE("pending check on an unknown variable is kept") {
    auto pending = upd(empty, std::nullopt, std::pair<mini::CondPtr, bool>{cond, true});
    REQUIRE(pending);
    CHECK(pending->steps.size() == 1);
  }
  SUBCASE("bottom stays bottom") {
    CHECK(!upd(std::nullopt, std::pair<std::string, bool>{"x", true}, std::nullopt));
  }
}

TEST_CASE("compose has the identity set as unit") {
  TransitionSet g = make_set({concrete("q0", "q1"), any_state({make_assign("x", true)})});
  CHECK(compose(TransitionSet::identity(), g) == g);
  CHECK(compose(g, TransitionSet::identity()) == g);
}

TEST_CASE("compose joins matching state components") {
  TransitionSet a = make_set({concrete("q0", "q1")});
  TransitionSet b = make_set({concrete("q1", kErrState)});
  CHECK(compose(a, b) == make_set({concrete("q0", kErrState)}));
  // Mismatched states produce nothing.
  CHECK(compose(a, make_set({concrete("q0", "q0")})).size() == 0);
}

TEST_CASE("templates at the error location pass through composition") {
  TransitionSet a = make_set({concrete("q1", kErrState)});
  TransitionSet b = make_set({concrete("q1", "q0")});
  CHECK(compose(a, b) == a);
}

TEST_CASE("composition prunes contradicting transformers") {
  // The conditional split of the fixture program: assignment composed with
  // the two condition outcomes and branch moves.
  TransitionSet assign = make_set({any_state({make_assign("x", true)})});
  TransitionSet branches = make_set({
      concrete("q1", "q0", {check_step("(x==true)", true)}),
      concrete("q0", kErrState, {check_step("(x==true)", true)}),
      concrete("q0", "q1", {check_step("(x==true)", false)}),
      concrete("q1", kErrState, {check_step("(x==true)", false)}),
  });
  std::size_t materialized = 0;
  TransitionSet composed = compose(assign, branches, &materialized);
  CHECK(materialized == 4);  // all four pairs unify, two are then pruned
  CHECK(composed ==
        make_set({concrete("q1", "q0", {make_assign("x", true), check_step("(x==true)", true)}),
                  concrete("q0", kErrState,
                           {make_assign("x", true), check_step("(x==true)", true)})}));
}

TEST_CASE("compose is associative") {
  testutil::Rng rng(77);
  std::vector<std::string> states = {"q0", "q1", "q2", kErrState};
  auto random_set = [&]() {
    TransitionSet s;
    int n = testutil::pick(rng, 0, 4);
    for (int i = 0; i < n; ++i) {
      if (testutil::chance(rng, 0.25)) {
        std::vector<Step> steps;
        if (testutil::chance(rng, 0.5))
          steps.push_back(make_assign("v" + std::to_string(testutil::pick(rng, 0, 1)),
                                      testutil::chance(rng, 0.5)));
        s.insert(any_state(std::move(steps)));
      } else {
        std::vector<Step> steps;
        if (testutil::chance(rng, 0.5)) {
          std::string v = "v" + std::to_string(testutil::pick(rng, 0, 1));
          if (testutil::chance(rng, 0.5))
            steps.push_back(make_assign(v, testutil::chance(rng, 0.5)));
          else
            steps.push_back(check_step(v + "==true", testutil::chance(rng, 0.5)));
        }
        s.insert(concrete(states[static_cast<std::size_t>(testutil::pick(rng, 0, 2))],
                          states[static_cast<std::size_t>(testutil::pick(rng, 0, 3))],
                          std::move(steps)));
      }
    }
    return s;
  };
  for (int i = 0; i < 200; ++i) {
    TransitionSet a = random_set(), b = random_set(), c = random_set();
    CHECK(compose(compose(a, b), c) == compose(a, compose(b, c)));
  }
}

TEST_CASE("relation_iterate unions the first K powers") {
  TransitionSet g = make_set({concrete("q0", "q1"), concrete("q1", "q0")});
  CHECK(relation_iterate(g, 0) == TransitionSet::identity());
  CHECK(relation_iterate(g, 1) == set_union(TransitionSet::identity(), g));
  TransitionSet k2 = relation_iterate(g, 2);
  TransitionSet expected = set_union(
      set_union(TransitionSet::identity(), g),
      make_set({concrete("q0", "q0"), concrete("q1", "q1")}));
  CHECK(k2 == expected);
}

TEST_CASE("single call program yields the automaton moves") {
  TransitionSet g = root_gamma("begin opA(); end", fixture_automaton(), 0);
  CHECK(g == make_set({concrete("q0", "q1"), concrete("q1", kErrState)}));
}

TEST_CASE("fixture version 1 grounds to the safe template") {
  TransitionSet g = root_gamma(testutil::read_file(testutil::fixture("v1.mini")),
                               fixture_automaton(), 3);
  std::vector<Template> from_initial;
  for (const Template& t : g.templates()) {
    if (!t.any && t.from == "q0") from_initial.push_back(t);
    // Anything beyond the published tuples is an absorbed violation
    // starting elsewhere.
    if (!t.any && t.from != "q0") CHECK(t.to == kErrState);
  }
  REQUIRE(from_initial.size() == 1);
  CHECK(from_initial[0] ==
        concrete("q0", "q0", {make_assign("x", true), check_step("(x==true)", true)}));
}

TEST_CASE("fixture version 2 grounds to a violation") {
  TransitionSet g = root_gamma(testutil::read_file(testutil::fixture("v2.mini")),
                               fixture_automaton(), 3);
  std::vector<Template> from_initial;
  for (const Template& t : g.templates())
    if (!t.any && t.from == "q0") from_initial.push_back(t);
  REQUIRE(from_initial.size() == 1);
  CHECK(from_initial[0] == concrete("q0", kErrState, {make_assign("x", false),
                                                      check_step("(x==true)", false)}));
}

TEST_CASE("verdicts and witness on the fixtures") {
  SafetyResult v1 = verify_safety(parse_mini(testutil::read_file(testutil::fixture("v1.mini"))),
                                  fixture_automaton(), 3);
  CHECK(v1.safe);
  CHECK(!v1.witness);
  SafetyResult v2 = verify_safety(parse_mini(testutil::read_file(testutil::fixture("v2.mini"))),
                                  fixture_automaton(), 3);
  CHECK(!v2.safe);
  REQUIRE(v2.witness);
  REQUIRE(v2.witness->steps.size() == 2);
  CHECK(v2.witness->steps[0] == make_assign("x", false));
  CHECK(v2.witness->steps[1].kind == Step::Kind::Check);
  CHECK(!v2.witness->steps[1].value);
  CHECK(v2.witness->steps[1].to_string() == "Check(x==true, false)");
}

TEST_CASE("programs without automaton moves are safe") {
  SafetyResult r = verify_safety(parse_mini("begin x := true; end"), fixture_automaton(), 3);
  CHECK(r.safe);
}

TEST_CASE("violations before the end of the program are caught") {
  // q0 -opA-> q1 -opA-> ERR happens mid-program; the trailing opB must not
  // mask it.
  SafetyResult r = verify_safety(parse_mini("begin opA(); opA(); opB(); end"),
                                 fixture_automaton(), 3);
  CHECK(!r.safe);
}

TEST_CASE("calls outside the alphabet are schema errors") {
  CHECK_THROWS_AS(verify_safety(parse_mini("begin other(); end"), fixture_automaton(), 3),
                  SchemaError);
  CHECK_THROWS_AS(verify_safety(parse_mini("begin x := other(); end"), fixture_automaton(), 3),
                  SchemaError);
}

TEST_CASE("assignment labels in the alphabet only warn") {
  PropertyAutomaton a = fixture_automaton();
  a.alphabet.insert("x:=opA");
  SafetyResult r = verify_safety(parse_mini("begin opA(); end"), a, 3);
  REQUIRE(!r.warnings.empty());
  CHECK(r.warnings[0].find("x:=opA") != std::string::npos);
}

TEST_CASE("assignments from functions move the automaton like calls") {
  PropertyAutomaton a = fixture_automaton();
  // x := opA() moves q0 to q1; both branches then return via opB.
  SafetyResult safe_case = verify_safety(
      parse_mini("begin x := opA(); if x==true then opB(); else opB(); endif; end"), a, 3);
  CHECK(safe_case.safe);
  // A second opA from q1 traps, whatever x came back as.
  SafetyResult unsafe_case = verify_safety(parse_mini("begin x := opA(); opA(); end"), a, 3);
  CHECK(!unsafe_case.safe);
}

TEST_CASE("loop unrolling depth decides reachability") {
  PropertyAutomaton a;
  a.states = {"q0", "q1"};
  a.initial = "q0";
  a.alphabet = {"opA"};
  a.transitions[{"q0", "opA"}] = "q1";  // second opA traps
  std::string src = "begin while * do opA(); endwhile; end";
  CHECK(verify_safety(parse_mini(src), a, 0).safe);
  CHECK(verify_safety(parse_mini(src), a, 1).safe);
  CHECK(!verify_safety(parse_mini(src), a, 2).safe);
  CHECK(!verify_safety(parse_mini(src), a, 5).safe);  // monotone in K
}

TEST_CASE("incremental reevaluation reuses the published subtrees") {
  PropertyAutomaton a = fixture_automaton();
  ImageAutomaton img = image_automaton(a);
  SyntaxTree v1 = parse_mini(testutil::read_file(testutil::fixture("v1.mini")));
  SafetySchema s1 = safety_schema(img, 3);
  AttributeMap<SafetyValue> old_values = evaluate(v1, s1.schema);
  std::size_t scratch_tuples = *s1.tuples_processed;

  std::vector<Token> v2_tokens =
      mini::tokenize(testutil::read_file(testutil::fixture("v2.mini")));
  auto [v2, splice] = apply_edit(v1, diff_to_edit(v1.tokens, v2_tokens), mini::grammar(),
                                 mini::matrix());
  SafetySchema s2 = safety_schema(img, 3);
  auto [new_values, stats] = reevaluate(v2, s2.schema, splice, old_values);
  std::size_t incremental_tuples = *s2.tuples_processed;

  SafetyResult verdict =
      ground_verdict(std::get<TransitionSet>(new_values.at(v2.root->id).at("gamma")), img);
  CHECK(!verdict.safe);
  CHECK(incremental_tuples < scratch_tuples);
  CHECK(scratch_tuples == 19);
  CHECK(incremental_tuples == 7);

  // Display nodes 10 (the trailing statement list with the conditional)
  // and 2 (the first call) are reused untouched.
  auto num = v2.display_numbering(mini::structural_terminals());
  for (const auto& [id, name] : stats.recomputed_attrs) {
    auto it = num.find(id);
    if (it != num.end()) {
      CHECK(it->second != 10);
      CHECK(it->second != 2);
    }
  }
}

TEST_CASE("execution-enumeration oracle agrees on random loop-free programs") {
  testutil::Rng rng(987654);
  testutil::GenOptions opt;
  opt.max_statements = 10;
  opt.num_vars = 3;
  opt.num_funs = 3;
  for (int i = 0; i < 200; ++i) {
    testutil::Program prog = testutil::generate_program(rng, opt);
    PropertyAutomaton a = testutil::random_automaton(rng, prog, 4);
    ImageAutomaton img = image_automaton(a);
    SyntaxTree t = parse_mini(testutil::to_source(prog));
    SafetyResult r = verify_safety(t, a, 0);
    CHECK(r.safe == !testutil::safety_oracle_violates(prog, img));
  }
}
