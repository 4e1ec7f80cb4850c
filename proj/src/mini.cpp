#include "opgv/mini.hpp"

#include <cctype>
#include <set>
#include <sstream>
#include <stdexcept>

namespace opgv::mini {

namespace {

struct GrammarBundle {
  Grammar g;
  PrecedenceMatrix opm;
  RuleIds ids;
};

GrammarBundle build() {
  GrammarBundle b;
  Grammar& g = b.g;
  g.nonterminals = {kProgram, kStmtList, kStmt, kVarId, kFunctionId, kCond};
  g.terminals = {"begin", "end", ";",  "(",     ")",    ":=",       "true",
                 "false", "if",  "then", "else",  "endif", "while",    "do",
                 "endwhile", kVarIdent, kFunIdent, kCondLit};
  g.axiom = kProgram;
  auto add = [&](const Symbol& lhs, std::vector<Symbol> rhs) {
    int id = static_cast<int>(g.rules.size());
    g.rules.push_back({lhs, std::move(rhs), id});
    return id;
  };
  b.ids.program = add(kProgram, {"begin", kStmtList, "end"});
  b.ids.seq = add(kStmtList, {kStmt, ";", kStmtList});
  b.ids.seq_last = add(kStmtList, {kStmt, ";"});
  b.ids.call = add(kStmt, {kFunctionId, "(", ")"});
  b.ids.assign_true = add(kStmt, {kVarId, ":=", "true"});
  b.ids.assign_false = add(kStmt, {kVarId, ":=", "false"});
  b.ids.assign_fun = add(kStmt, {kVarId, ":=", kFunctionId, "(", ")"});
  b.ids.if_stmt = add(kStmt, {"if", kCond, "then", kStmtList, "else", kStmtList, "endif"});
  b.ids.while_stmt = add(kStmt, {"while", kCond, "do", kStmtList, "endwhile"});
  b.ids.var_id = add(kVarId, {kVarIdent});
  b.ids.function_id = add(kFunctionId, {kFunIdent});
  b.ids.cond = add(kCond, {kCondLit});
  g.check_well_formed();
  OpmResult opm = compute_opm(g);
  if (!opm.ok()) throw std::logic_error("precedence conflict in the Mini grammar");
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

const std::set<Symbol>& structural_terminals() {
  static const std::set<Symbol> s = {"begin", "end",  ";",     "(",        ")",
                                     ":=",    "if",   "then",  "else",     "endif",
                                     "while", "do",   "endwhile"};
  return s;
}

namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

bool is_keyword(const std::string& w) {
  static const std::set<std::string> kw = {"begin", "end",  "true",  "false", "if",
                                           "then",  "else", "endif", "while", "do",
                                           "endwhile"};
  return kw.count(w) > 0;
}

}  // namespace

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  // After `if` or `while` the condition text runs verbatim up to the next
  // standalone `then` / `do` keyword and is emitted as one token.
  std::optional<std::string> pending_closer;
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (pending_closer) {
      // Scan for the closing keyword as a standalone word.
      std::size_t start = i;
      std::size_t close = std::string::npos;
      for (std::size_t j = i; j < src.size(); ++j) {
        if (!is_ident_start(src[j])) continue;
        std::size_t k = j;
        while (k < src.size() && is_ident_char(src[k])) ++k;
        if (std::string_view(src.substr(j, k - j)) == *pending_closer &&
            (j == 0 || !is_ident_char(src[j - 1]))) {
          close = j;
          break;
        }
        j = k - 1;
      }
      if (close == std::string::npos)
        throw LexError(start, "condition not closed by '" + *pending_closer + "'");
      std::string text(src.substr(start, close - start));
      while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
        text.pop_back();
      if (text.empty()) throw LexError(start, "empty condition");
      out.push_back({kCondLit, text, start});
      out.push_back({*pending_closer, *pending_closer, close});
      i = close + pending_closer->size();
      pending_closer.reset();
      continue;
    }
    if (is_ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && is_ident_char(src[j])) ++j;
      std::string word(src.substr(i, j - i));
      if (is_keyword(word)) {
        out.push_back({word, word, i});
        if (word == "if") pending_closer = "then";
        if (word == "while") pending_closer = "do";
      } else {
        // An identifier directly applied to `(` names a function.
        std::size_t k = j;
        while (k < src.size() && std::isspace(static_cast<unsigned char>(src[k]))) ++k;
        bool is_call = k < src.size() && src[k] == '(';
        out.push_back({is_call ? kFunIdent : kVarIdent, word, i});
      }
      i = j;
      continue;
    }
    if (c == ';' || c == '(' || c == ')') {
      out.push_back({std::string(1, c), std::string(1, c), i});
      ++i;
      continue;
    }
    if (c == ':' && i + 1 < src.size() && src[i + 1] == '=') {
      out.push_back({":=", ":=", i});
      i += 2;
      continue;
    }
    throw LexError(i, std::string("unexpected character '") + c + "'");
  }
  if (pending_closer)
    throw LexError(src.size(), "condition not closed by '" + *pending_closer + "'");
  return out;
}

std::string untokenize(const std::vector<Token>& tokens) {
  std::string out;
  for (const Token& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t.lexeme;
  }
  return out;
}

// ---- Condition sub-language ----

bool cond_equal(const CondExpr& a, const CondExpr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case CondExpr::Kind::Placeholder: return true;
    case CondExpr::Kind::VarEqTrue:
    case CondExpr::Kind::VarEqFalse: return a.var == b.var;
    case CondExpr::Kind::Not: return cond_equal(*a.lhs, *b.lhs);
    case CondExpr::Kind::And:
      return cond_equal(*a.lhs, *b.lhs) && cond_equal(*a.rhs, *b.rhs);
  }
  return false;
}

std::string cond_to_string(const CondExpr& e) {
  switch (e.kind) {
    case CondExpr::Kind::Placeholder: return "*";
    case CondExpr::Kind::VarEqTrue: return e.var + "==true";
    case CondExpr::Kind::VarEqFalse: return e.var + "==false";
    case CondExpr::Kind::Not: return "!(" + cond_to_string(*e.lhs) + ")";
    case CondExpr::Kind::And:
      return "(" + cond_to_string(*e.lhs) + " && " + cond_to_string(*e.rhs) + ")";
  }
  return "?";
}

namespace {

struct CondParser {
  std::string_view text;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }
  bool eat(std::string_view s) {
    skip_ws();
    if (text.substr(pos, s.size()) == s) {
      // Word tokens must not run into identifier characters.
      if (is_ident_start(s[0]) && pos + s.size() < text.size() &&
          is_ident_char(text[pos + s.size()]))
        return false;
      pos += s.size();
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& msg) { throw CondSyntaxError(pos, msg); }

  CondPtr parse() {
    CondPtr e = conjunction();
    skip_ws();
    if (pos != text.size()) fail("trailing input in condition");
    return e;
  }

  CondPtr conjunction() {
    CondPtr e = unary();
    for (;;) {
      if (eat("&&") || eat("and")) {
        CondPtr r = unary();
        e = std::make_shared<CondExpr>(CondExpr{CondExpr::Kind::And, "", e, r});
      } else {
        return e;
      }
    }
  }

  CondPtr unary() {
    if (eat("!") || eat("not"))
      return std::make_shared<CondExpr>(
          CondExpr{CondExpr::Kind::Not, "", unary(), nullptr});
    return primary();
  }

  CondPtr primary() {
    skip_ws();
    if (eat("(")) {
      CondPtr e = conjunction();
      if (!eat(")")) fail("expected ')'");
      return e;
    }
    if (eat("*"))
      return std::make_shared<CondExpr>(
          CondExpr{CondExpr::Kind::Placeholder, "", nullptr, nullptr});
    if (pos < text.size() && is_ident_start(text[pos])) {
      std::size_t j = pos;
      while (j < text.size() && is_ident_char(text[j])) ++j;
      std::string var(text.substr(pos, j - pos));
      pos = j;
      if (!eat("==")) fail("expected '==' after variable");
      if (eat("true"))
        return std::make_shared<CondExpr>(
            CondExpr{CondExpr::Kind::VarEqTrue, var, nullptr, nullptr});
      if (eat("false"))
        return std::make_shared<CondExpr>(
            CondExpr{CondExpr::Kind::VarEqFalse, var, nullptr, nullptr});
      fail("expected 'true' or 'false' after '=='");
    }
    fail("expected a predicate");
  }
};

}  // namespace

CondPtr parse_condition(std::string_view text) { return CondParser{text}.parse(); }

Truth cond_evaluate(const CondExpr& e, const std::map<std::string, bool>& vm) {
  switch (e.kind) {
    case CondExpr::Kind::Placeholder: return Truth::Unknown;
    case CondExpr::Kind::VarEqTrue: {
      auto it = vm.find(e.var);
      if (it == vm.end()) return Truth::Unknown;
      return it->second ? Truth::True : Truth::False;
    }
    case CondExpr::Kind::VarEqFalse: {
      auto it = vm.find(e.var);
      if (it == vm.end()) return Truth::Unknown;
      return it->second ? Truth::False : Truth::True;
    }
    case CondExpr::Kind::Not: {
      Truth t = cond_evaluate(*e.lhs, vm);
      if (t == Truth::Unknown) return Truth::Unknown;
      return t == Truth::True ? Truth::False : Truth::True;
    }
    case CondExpr::Kind::And: {
      Truth a = cond_evaluate(*e.lhs, vm);
      Truth b = cond_evaluate(*e.rhs, vm);
      if (a == Truth::False || b == Truth::False) return Truth::False;
      if (a == Truth::True && b == Truth::True) return Truth::True;
      return Truth::Unknown;
    }
  }
  return Truth::Unknown;
}

ProbExpr cond_truth_probability(const CondExpr& e,
                                const std::map<std::string, ProbExpr>& known,
                                const ProbExpr& placeholder_prob) {
  auto var_prob = [&](const std::string& v) {
    auto it = known.find(v);
    return it != known.end() ? it->second : ProbExpr::atom(v);
  };
  const ProbExpr one{Rational(1)};
  switch (e.kind) {
    case CondExpr::Kind::Placeholder: return placeholder_prob;
    case CondExpr::Kind::VarEqTrue: return var_prob(e.var);
    case CondExpr::Kind::VarEqFalse: return one - var_prob(e.var);
    case CondExpr::Kind::Not:
      return one - cond_truth_probability(*e.lhs, known, placeholder_prob);
    case CondExpr::Kind::And:
      return cond_truth_probability(*e.lhs, known, placeholder_prob) *
             cond_truth_probability(*e.rhs, known, placeholder_prob);
  }
  return ProbExpr{Rational(0)};
}

namespace {

void collect_vars(const CondExpr& e, std::multiset<std::string>& out) {
  switch (e.kind) {
    case CondExpr::Kind::Placeholder: return;
    case CondExpr::Kind::VarEqTrue:
    case CondExpr::Kind::VarEqFalse: out.insert(e.var); return;
    case CondExpr::Kind::Not: collect_vars(*e.lhs, out); return;
    case CondExpr::Kind::And:
      collect_vars(*e.lhs, out);
      collect_vars(*e.rhs, out);
      return;
  }
}

}  // namespace

std::set<std::string> cond_variables(const CondExpr& e) {
  std::multiset<std::string> all;
  collect_vars(e, all);
  return {all.begin(), all.end()};
}

bool cond_has_repeated_variable(const CondExpr& e) {
  std::multiset<std::string> all;
  collect_vars(e, all);
  for (const auto& v : all) {
    if (all.count(v) > 1) return true;
  }
  return false;
}

}  // namespace opgv::mini
