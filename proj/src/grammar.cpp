#include "opgv/grammar.hpp"

#include <sstream>
#include <stdexcept>

namespace opgv {

const Rule* Grammar::find_rule_by_rhs(const std::vector<Symbol>& rhs) const {
  for (const Rule& r : rules) {
    if (r.rhs == rhs) return &r;
  }
  return nullptr;
}

void Grammar::check_well_formed() const {
  for (const Symbol& s : nonterminals) {
    if (terminals.count(s))
      throw std::invalid_argument("symbol is both terminal and nonterminal: " + s);
  }
  if (terminals.count(kSentinel) || nonterminals.count(kSentinel))
    throw std::invalid_argument("the sentinel terminal is reserved");
  if (!nonterminals.count(axiom))
    throw std::invalid_argument("axiom is not a declared nonterminal: " + axiom);
  for (const Rule& r : rules) {
    if (!nonterminals.count(r.lhs))
      throw std::invalid_argument("rule lhs is not a nonterminal: " + r.lhs);
    if (r.rhs.empty() && r.lhs != axiom)
      throw std::invalid_argument("empty rhs outside the axiom: " + r.lhs);
    for (const Symbol& s : r.rhs) {
      if (!nonterminals.count(s) && !terminals.count(s))
        throw std::invalid_argument("undeclared rhs symbol: " + s);
    }
  }
}

const char* to_string(Prec p) {
  switch (p) {
    case Prec::Yields: return "<";
    case Prec::Equal: return "=";
    case Prec::Takes: return ">";
  }
  return "?";
}

void PrecedenceMatrix::set(const Symbol& a, const Symbol& b, Prec p) {
  entries_[{a, b}] = p;
}

std::optional<Prec> PrecedenceMatrix::between(const Symbol& a, const Symbol& b) const {
  if (a == kSentinel && b == kSentinel) return std::nullopt;
  if (a == kSentinel) return Prec::Yields;
  if (b == kSentinel) return Prec::Takes;
  auto it = entries_.find({a, b});
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::vector<OpFormViolation> validate_operator_form(const Grammar& g) {
  std::vector<OpFormViolation> out;
  for (const Rule& r : g.rules) {
    for (std::size_t i = 0; i + 1 < r.rhs.size(); ++i) {
      if (g.is_nonterminal(r.rhs[i]) && g.is_nonterminal(r.rhs[i + 1]))
        out.push_back({r.id, i});
    }
  }
  return out;
}

BorderSets terminal_border_sets(const Grammar& g) {
  BorderSets b;
  for (const Symbol& n : g.nonterminals) {
    b.left[n];
    b.right[n];
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (const Rule& r : g.rules) {
      if (r.rhs.empty()) continue;
      auto add = [&](std::set<Symbol>& dst, const Symbol& s) {
        if (dst.insert(s).second) changed = true;
      };
      auto merge = [&](std::set<Symbol>& dst, const std::set<Symbol>& src) {
        for (const Symbol& s : src) add(dst, s);
      };
      // Leftmost terminal: first rhs symbol if terminal, else the terminal
      // right after the leading nonterminal, plus that nonterminal's set.
      const Symbol& first = r.rhs.front();
      if (g.is_terminal(first)) {
        add(b.left[r.lhs], first);
      } else {
        merge(b.left[r.lhs], b.left[first]);
        if (r.rhs.size() > 1) add(b.left[r.lhs], r.rhs[1]);
      }
      const Symbol& last = r.rhs.back();
      if (g.is_terminal(last)) {
        add(b.right[r.lhs], last);
      } else {
        merge(b.right[r.lhs], b.right[last]);
        if (r.rhs.size() > 1) add(b.right[r.lhs], r.rhs[r.rhs.size() - 2]);
      }
    }
  }
  return b;
}

OpmResult compute_opm(const Grammar& g) {
  OpmResult res;
  BorderSets borders = terminal_border_sets(g);
  std::map<std::pair<Symbol, Symbol>, Prec> cells;
  auto put = [&](const Symbol& a, const Symbol& b, Prec p) {
    auto it = cells.find({a, b});
    if (it == cells.end()) {
      cells.emplace(std::make_pair(a, b), p);
      res.matrix.set(a, b, p);
    } else if (it->second != p) {
      // Report each conflicting cell once per distinct attempted relation.
      bool seen = false;
      for (const OpmConflict& c : res.conflicts)
        if (c.a == a && c.b == b && c.attempted == p) seen = true;
      if (!seen) res.conflicts.push_back({a, b, it->second, p});
    }
  };
  for (const Rule& r : g.rules) {
    const auto& rhs = r.rhs;
    for (std::size_t i = 0; i < rhs.size(); ++i) {
      if (!g.is_terminal(rhs[i])) continue;
      // a b  and  a <N> b  give a = b (nonterminals are transparent).
      if (i + 1 < rhs.size() && g.is_terminal(rhs[i + 1]))
        put(rhs[i], rhs[i + 1], Prec::Equal);
      if (i + 2 < rhs.size() && g.is_nonterminal(rhs[i + 1]) && g.is_terminal(rhs[i + 2]))
        put(rhs[i], rhs[i + 2], Prec::Equal);
      // a <N>  gives a < left(N)
      if (i + 1 < rhs.size() && g.is_nonterminal(rhs[i + 1]))
        for (const Symbol& t : borders.left[rhs[i + 1]]) put(rhs[i], t, Prec::Yields);
      // <N> b  gives right(N) > b
      if (i > 0 && g.is_nonterminal(rhs[i - 1]))
        for (const Symbol& t : borders.right[rhs[i - 1]]) put(t, rhs[i], Prec::Takes);
    }
  }
  return res;
}

std::vector<FnfViolation> validate_fnf(const Grammar& g) {
  std::vector<FnfViolation> out;
  for (std::size_t i = 0; i < g.rules.size(); ++i) {
    const Rule& r = g.rules[i];
    for (std::size_t j = i + 1; j < g.rules.size(); ++j) {
      if (r.rhs == g.rules[j].rhs) {
        std::ostringstream os;
        os << "rules " << r.id << " and " << g.rules[j].id << " share a rhs";
        out.push_back({FnfViolation::Kind::NotInvertible, g.rules[j].id, os.str()});
      }
    }
    for (const Symbol& s : r.rhs) {
      if (s == g.axiom) {
        out.push_back({FnfViolation::Kind::AxiomInRhs, r.id,
                       "axiom occurs in the rhs of rule " + std::to_string(r.id)});
        break;
      }
    }
    if (r.rhs.empty() && r.lhs != g.axiom)
      out.push_back({FnfViolation::Kind::EmptyRule, r.id,
                     "empty rule with non-axiom lhs " + r.lhs});
    if (r.rhs.size() == 1 && g.is_nonterminal(r.rhs.front()) && r.lhs != g.axiom)
      out.push_back({FnfViolation::Kind::RenamingRule, r.id,
                     "renaming rule with non-axiom lhs " + r.lhs});
  }
  return out;
}

}  // namespace opgv
