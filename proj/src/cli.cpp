#include "opgv/cli.hpp"

#include <chrono>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "opgv/arith.hpp"
#include "opgv/incremental.hpp"
#include "opgv/mini.hpp"
#include "opgv/reliability.hpp"
#include "opgv/safety.hpp"

namespace opgv::cli {

namespace {

using json = nlohmann::ordered_json;

struct CliError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

json load_json(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw CliError("invalid JSON in '" + path + "': " + e.what());
  }
}

// Numbers are re-rendered to their shortest decimal form first, so 0.97
// becomes exactly 97/100; strings accept both decimals and "a/b".
Rational rational_from_json(const json& v, const std::string& where) {
  try {
    if (v.is_string()) return parse_decimal(v.get<std::string>());
    if (v.is_number()) return parse_decimal(v.dump());
  } catch (const std::invalid_argument& e) {
    throw CliError("bad probability in " + where + ": " + e.what());
  }
  throw CliError("bad probability in " + where + ": expected a number or string");
}

ReliabilityProfile load_profile(const std::string& path) {
  json j = load_json(path);
  ReliabilityProfile p;
  const json succ = j.value("succ", json::object());
  for (auto it = succ.begin(); it != succ.end(); ++it)
    p.succ[it.key()] = rational_from_json(it.value(), "succ." + it.key());
  const json ret_true = j.value("ret_true", json::object());
  for (auto it = ret_true.begin(); it != ret_true.end(); ++it)
    p.ret_true[it.key()] = rational_from_json(it.value(), "ret_true." + it.key());
  if (j.contains("placeholder"))
    p.placeholder = rational_from_json(j.at("placeholder"), "placeholder");
  return p;
}

PropertyAutomaton load_automaton(const std::string& path) {
  json j = load_json(path);
  PropertyAutomaton a;
  try {
    for (const auto& s : j.at("states")) a.states.push_back(s.get<std::string>());
    a.initial = j.at("initial").get<std::string>();
    for (const auto& s : j.at("alphabet")) a.alphabet.insert(s.get<std::string>());
    for (const auto& t : j.value("transitions", json::array()))
      a.transitions[{t.at("from").get<std::string>(), t.at("on").get<std::string>()}] =
          t.at("to").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw CliError("invalid automaton in '" + path + "': " + e.what());
  }
  try {
    a.check_well_formed();
  } catch (const std::invalid_argument& e) {
    throw CliError("invalid automaton in '" + path + "': " + e.what());
  }
  return a;
}

std::string rule_text(const Grammar& g, int id) {
  const Rule& r = g.rule(id);
  std::string out = r.lhs + " ::=";
  for (const Symbol& s : r.rhs) out += " " + s;
  return out;
}

std::string rational_text(const Rational& r) {
  std::ostringstream os;
  os << boost::multiprecision::numerator(r) << "/" << boost::multiprecision::denominator(r);
  return os.str();
}

json value_json(const ProbExpr& v) {
  json out = json::object();
  if (v.is_constant()) {
    out["decimal"] = format_decimal(v.as_rational());
    out["rational"] = rational_text(v.as_rational());
  } else {
    out["expression"] = v.to_string();
  }
  return out;
}

SyntaxTree parse_mini_file(const std::string& path) {
  return parse(mini::grammar(), mini::matrix(), mini::tokenize(read_file(path)));
}

using Numbering = std::unordered_map<NodeId, int>;

void dump_text(const Node& n, const Grammar& g, const Numbering& num, int depth,
               std::ostream& out) {
  auto it = num.find(n.id);
  if (it != num.end()) {
    for (int i = 0; i < depth; ++i) out << "  ";
    out << it->second << ": ";
    if (n.is_leaf())
      out << n.token.terminal << " '" << n.token.lexeme << "'";
    else
      out << rule_text(g, n.rule);
    out << " [" << n.begin << "," << n.end << ")\n";
  }
  int child_depth = it != num.end() ? depth + 1 : depth;
  for (const auto& c : n.children) dump_text(*c, g, num, child_depth, out);
}

json dump_json(const Node& n, const Grammar& g, const Numbering& num) {
  json out = json::object();
  out["id"] = n.id;
  auto it = num.find(n.id);
  if (it != num.end()) out["display"] = it->second;
  out["span"] = {n.begin, n.end};
  if (n.is_leaf()) {
    out["terminal"] = n.token.terminal;
    out["lexeme"] = n.token.lexeme;
  } else {
    out["rule"] = rule_text(g, n.rule);
    json children = json::array();
    for (const auto& c : n.children) children.push_back(dump_json(*c, g, num));
    out["children"] = std::move(children);
  }
  return out;
}

json reuse_json(const ReuseStats& r) {
  json out = json::object();
  out["noop"] = r.noop;
  out["full_reparse"] = r.full_reparse;
  out["tokens_reparsed"] = r.tokens_reparsed;
  out["reparsed_range"] = {r.subcontext_begin, r.subcontext_end};
  out["nodes_rebuilt"] = r.nodes_rebuilt;
  out["nodes_reused"] = r.nodes_reused;
  return out;
}

json recompute_json(const RecomputeStats& r, const Numbering& num) {
  json out = json::object();
  out["attributes_recomputed"] = r.recomputed;
  out["attributes_reused"] = r.reused;
  out["cutoff_at_splice"] = r.cutoff_at_splice;
  json nodes = json::array();
  // Group the per-attribute records by node, keeping evaluation order.
  for (std::size_t i = 0; i < r.recomputed_attrs.size();) {
    NodeId id = r.recomputed_attrs[i].first;
    json entry = json::object();
    auto it = num.find(id);
    if (it != num.end()) entry["node"] = it->second;
    entry["id"] = id;
    json attrs = json::array();
    while (i < r.recomputed_attrs.size() && r.recomputed_attrs[i].first == id)
      attrs.push_back(r.recomputed_attrs[i++].second);
    entry["attributes"] = std::move(attrs);
    nodes.push_back(std::move(entry));
  }
  out["recomputed_nodes"] = std::move(nodes);
  return out;
}

json witness_json(const Transformer& w) {
  json out = json::array();
  for (const Step& s : w.steps) out.push_back(s.to_string());
  return out;
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
  }
};

int cmd_parse(const std::string& file, const std::string& format, std::ostream& out) {
  SyntaxTree tree = parse_mini_file(file);
  Numbering num = tree.display_numbering(mini::structural_terminals());
  if (format == "json") {
    json j = json::object();
    j["command"] = "parse";
    j["program"] = file;
    j["root"] = dump_json(*tree.root, mini::grammar(), num);
    out << j.dump(2) << "\n";
  } else {
    dump_text(*tree.root, mini::grammar(), num, 0, out);
  }
  return 0;
}

int cmd_eval_expr(const std::string& expression, std::ostream& out) {
  out << arith::eval_expression(expression) << "\n";
  return 0;
}

int cmd_verify(const std::string& file, const std::string& schema_name,
               const std::string& profile_path, const std::string& automaton_path,
               unsigned unroll, std::ostream& out) {
  Timer timer;
  SyntaxTree tree = parse_mini_file(file);
  json report = json::object();
  report["command"] = "verify";
  report["schema"] = schema_name;
  report["program"] = file;
  int exit_code = 0;
  if (schema_name == "reliability") {
    if (profile_path.empty()) throw CliError("--profile is required for --schema reliability");
    ReliabilityResult r = verify_reliability(tree, load_profile(profile_path));
    report["value"] = value_json(r.value);
    report["warnings"] = r.warnings;
  } else {
    if (automaton_path.empty()) throw CliError("--automaton is required for --schema safety");
    SafetyResult r = verify_safety(tree, load_automaton(automaton_path), unroll);
    report["verdict"] = r.safe ? "safe" : "unsafe";
    if (r.witness) report["witness"] = witness_json(*r.witness);
    report["unroll"] = unroll;
    report["tuples_processed"] = r.tuples_processed;
    report["warnings"] = r.warnings;
    if (!r.safe) exit_code = 1;
  }
  report["wall_time_ms"] = timer.ms();
  out << report.dump(2) << "\n";
  return exit_code;
}

int cmd_diff_verify(const std::string& old_file, const std::string& new_file,
                    const std::string& schema_name, const std::string& profile_path,
                    const std::string& automaton_path, unsigned unroll, std::ostream& out) {
  Timer timer;
  SyntaxTree old_tree = parse_mini_file(old_file);
  std::vector<Token> new_tokens = mini::tokenize(read_file(new_file));
  Edit edit = diff_to_edit(old_tree.tokens, new_tokens);
  auto [new_tree, reuse] = apply_edit(old_tree, edit, mini::grammar(), mini::matrix());
  Numbering num = new_tree.display_numbering(mini::structural_terminals());

  json report = json::object();
  report["command"] = "diff-verify";
  report["schema"] = schema_name;
  report["old_program"] = old_file;
  report["new_program"] = new_file;
  int exit_code = 0;

  if (schema_name == "reliability") {
    if (profile_path.empty()) throw CliError("--profile is required for --schema reliability");
    ReliabilityProfile profile = load_profile(profile_path);
    ReliabilitySchema old_schema = reliability_schema(profile);
    AttributeMap<RelValue> old_values = evaluate(old_tree, old_schema.schema);
    ReliabilitySchema new_schema = reliability_schema(profile);
    auto [new_values, recompute] = reevaluate(new_tree, new_schema.schema, reuse, old_values);
    json old_report = json::object();
    old_report["value"] =
        value_json(std::get<ProbExpr>(old_values.at(old_tree.root->id).at("gamma")));
    old_report["warnings"] = *old_schema.warnings;
    json new_report = json::object();
    new_report["value"] =
        value_json(std::get<ProbExpr>(new_values.at(new_tree.root->id).at("gamma")));
    new_report["warnings"] = *new_schema.warnings;
    report["old"] = std::move(old_report);
    report["new"] = std::move(new_report);
    report["reuse"] = reuse_json(reuse);
    report["recompute"] = recompute_json(recompute, num);
  } else {
    if (automaton_path.empty()) throw CliError("--automaton is required for --schema safety");
    PropertyAutomaton automaton = load_automaton(automaton_path);
    ImageAutomaton img = image_automaton(automaton);
    SafetySchema old_schema = safety_schema(img, unroll);
    AttributeMap<SafetyValue> old_values = evaluate(old_tree, old_schema.schema);
    SafetyResult old_result = ground_verdict(
        std::get<TransitionSet>(old_values.at(old_tree.root->id).at("gamma")), img);
    SafetySchema new_schema = safety_schema(img, unroll);
    auto [new_values, recompute] = reevaluate(new_tree, new_schema.schema, reuse, old_values);
    SafetyResult new_result = ground_verdict(
        std::get<TransitionSet>(new_values.at(new_tree.root->id).at("gamma")), img);
    auto safety_report = [&](const SafetyResult& r, std::size_t tuples) {
      json j = json::object();
      j["verdict"] = r.safe ? "safe" : "unsafe";
      if (r.witness) j["witness"] = witness_json(*r.witness);
      j["tuples_processed"] = tuples;
      return j;
    };
    report["old"] = safety_report(old_result, *old_schema.tuples_processed);
    report["new"] = safety_report(new_result, *new_schema.tuples_processed);
    report["unroll"] = unroll;
    report["warnings"] = *old_schema.warnings;
    report["reuse"] = reuse_json(reuse);
    report["recompute"] = recompute_json(recompute, num);
    if (!new_result.safe) exit_code = 1;
  }
  report["wall_time_ms"] = timer.ms();
  out << report.dump(2) << "\n";
  return exit_code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Operator-precedence parsing and incremental program verification"};
  app.require_subcommand(1);

  std::string parse_file, parse_format = "text";
  CLI::App* parse_cmd = app.add_subcommand("parse", "Parse a program and dump its tree");
  parse_cmd->add_option("file", parse_file, "program file")->required();
  parse_cmd->add_option("--format", parse_format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));

  std::string expression;
  CLI::App* eval_cmd = app.add_subcommand("eval-expr", "Evaluate an arithmetic expression");
  eval_cmd->add_option("expression", expression, "expression text")->required();

  std::string verify_file, schema_name, profile_path, automaton_path;
  unsigned unroll = 3;
  CLI::App* verify_cmd = app.add_subcommand("verify", "Verify one program version");
  verify_cmd->add_option("file", verify_file, "program file")->required();
  verify_cmd->add_option("--schema", schema_name, "reliability or safety")
      ->required()
      ->check(CLI::IsMember({"reliability", "safety"}));
  verify_cmd->add_option("--profile", profile_path, "reliability profile JSON");
  verify_cmd->add_option("--automaton", automaton_path, "property automaton JSON");
  verify_cmd->add_option("--unroll", unroll, "loop unrolling bound");

  std::string old_file, new_file;
  CLI::App* diff_cmd =
      app.add_subcommand("diff-verify", "Verify two versions, reusing the first analysis");
  diff_cmd->add_option("old-file", old_file, "previous program version")->required();
  diff_cmd->add_option("new-file", new_file, "edited program version")->required();
  diff_cmd->add_option("--schema", schema_name, "reliability or safety")
      ->required()
      ->check(CLI::IsMember({"reliability", "safety"}));
  diff_cmd->add_option("--profile", profile_path, "reliability profile JSON");
  diff_cmd->add_option("--automaton", automaton_path, "property automaton JSON");
  diff_cmd->add_option("--unroll", unroll, "loop unrolling bound");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (parse_cmd->parsed()) return cmd_parse(parse_file, parse_format, out);
    if (eval_cmd->parsed()) return cmd_eval_expr(expression, out);
    if (verify_cmd->parsed())
      return cmd_verify(verify_file, schema_name, profile_path, automaton_path, unroll, out);
    return cmd_diff_verify(old_file, new_file, schema_name, profile_path, automaton_path,
                           unroll, out);
  } catch (const mini::LexError& e) {
    err << "lex error at offset " << e.offset << ": " << e.what() << "\n";
  } catch (const arith::LexError& e) {
    err << "lex error at offset " << e.offset << ": " << e.what() << "\n";
  } catch (const SyntaxError& e) {
    err << "syntax error at token " << e.token_index << ": " << e.what() << "\n";
  } catch (const mini::CondSyntaxError& e) {
    err << "condition error at position " << e.position << ": " << e.what() << "\n";
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << " (tokens " << e.span_begin << ".." << e.span_end << ")\n";
  } catch (const SchemaError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return 2;
}

}  // namespace opgv::cli
