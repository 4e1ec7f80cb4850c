#include "opgv/probexpr.hpp"

#include <sstream>
#include <stdexcept>

namespace opgv {

using Int = boost::multiprecision::cpp_int;

Rational parse_decimal(const std::string& text) {
  std::size_t i = 0;
  bool negative = false;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
    negative = text[i] == '-';
    ++i;
  }
  Int numerator = 0;
  Int denominator = 1;
  bool any_digit = false, seen_dot = false;
  for (; i < text.size(); ++i) {
    char c = text[i];
    if (c == '.') {
      if (seen_dot) throw std::invalid_argument("malformed decimal: " + text);
      seen_dot = true;
    } else if (c >= '0' && c <= '9') {
      numerator = numerator * 10 + (c - '0');
      if (seen_dot) denominator *= 10;
      any_digit = true;
    } else if (c == '/') {
      // Also accept "a/b" rational notation.
      Rational den = parse_decimal(text.substr(i + 1));
      if (den == 0) throw std::invalid_argument("zero denominator: " + text);
      Rational num(numerator, denominator);
      if (negative) num = -num;
      return num / den;
    } else {
      throw std::invalid_argument("malformed decimal: " + text);
    }
  }
  if (!any_digit) throw std::invalid_argument("malformed decimal: " + text);
  Rational r(numerator, denominator);
  return negative ? -r : r;
}

std::string format_decimal(const Rational& r, int significant_digits) {
  if (r == 0) return "0";
  Int num = boost::multiprecision::numerator(r);
  Int den = boost::multiprecision::denominator(r);
  bool negative = num < 0;
  if (negative) num = -num;
  // Scale so the integer part of num/den has significant_digits digits.
  int exponent = 0;
  Int n = num, d = den;
  while (n < d) {
    n *= 10;
    --exponent;
  }
  while (n >= d * 10) {
    d *= 10;
    ++exponent;
  }
  Int scaled = n;
  for (int k = 1; k < significant_digits; ++k) scaled *= 10;
  Int digits = scaled / d;
  Int rem = scaled % d;
  if (rem * 2 >= d) ++digits;
  std::string ds = digits.str();
  if (static_cast<int>(ds.size()) > significant_digits) {
    // Rounding carried into a new leading digit.
    ds.pop_back();
    ++exponent;
  }
  // Trim trailing zeros (keep at least one digit).
  while (ds.size() > 1 && ds.back() == '0') ds.pop_back();
  std::string out;
  if (exponent >= 0 && exponent < significant_digits + 4) {
    if (exponent + 1 >= static_cast<int>(ds.size())) {
      out = ds + std::string(exponent + 1 - ds.size(), '0');
    } else {
      out = ds.substr(0, exponent + 1) + "." + ds.substr(exponent + 1);
    }
  } else if (exponent < 0 && exponent > -5) {
    out = "0." + std::string(-exponent - 1, '0') + ds;
  } else {
    out = ds.substr(0, 1);
    if (ds.size() > 1) out += "." + ds.substr(1);
    out += "e" + std::to_string(exponent);
  }
  return negative ? "-" + out : out;
}

namespace {

using Monomial = ProbExpr::Monomial;
using Poly = ProbExpr::Poly;

Poly poly_constant(const Rational& v) {
  Poly p;
  if (v != 0) p[{}] = v;
  return p;
}

Poly poly_add(const Poly& a, const Poly& b) {
  Poly out = a;
  for (const auto& [m, c] : b) {
    auto it = out.find(m);
    if (it == out.end()) {
      out.emplace(m, c);
    } else {
      it->second += c;
      if (it->second == 0) out.erase(it);
    }
  }
  return out;
}

Poly poly_neg(const Poly& a) {
  Poly out = a;
  for (auto& [m, c] : out) c = -c;
  return out;
}

Poly poly_mul(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [ma, ca] : a) {
    for (const auto& [mb, cb] : b) {
      Monomial m = ma;
      for (const auto& [atom, e] : mb) m[atom] += e;
      Rational c = ca * cb;
      auto it = out.find(m);
      if (it == out.end()) {
        out.emplace(std::move(m), c);
      } else {
        it->second += c;
        if (it->second == 0) out.erase(it);
      }
    }
  }
  return out;
}

bool poly_is_constant(const Poly& p) {
  return p.empty() || (p.size() == 1 && p.begin()->first.empty());
}

Rational poly_constant_value(const Poly& p) {
  return p.empty() ? Rational(0) : p.begin()->second;
}

Poly poly_substitute(const Poly& p, const std::map<std::string, Rational>& values) {
  Poly out;
  for (const auto& [m, c] : p) {
    Rational coeff = c;
    Monomial rest;
    for (const auto& [atom, e] : m) {
      auto it = values.find(atom);
      if (it == values.end()) {
        rest[atom] = e;
      } else {
        for (int k = 0; k < e; ++k) coeff *= it->second;
      }
    }
    if (coeff == 0) continue;
    auto it = out.find(rest);
    if (it == out.end()) {
      out.emplace(std::move(rest), coeff);
    } else {
      it->second += coeff;
      if (it->second == 0) out.erase(it);
    }
  }
  return out;
}

}  // namespace

ProbExpr::ProbExpr(const Rational& value) : num_(poly_constant(value)), den_(poly_constant(1)) {}

ProbExpr::ProbExpr(Poly num, Poly den) : num_(std::move(num)), den_(std::move(den)) {
  normalize();
}

ProbExpr ProbExpr::atom(const std::string& name) {
  Poly num;
  num[{{name, 1}}] = 1;
  return ProbExpr(std::move(num), poly_constant(1));
}

void ProbExpr::normalize() {
  if (den_.empty()) throw std::domain_error("division by zero in symbolic expression");
  if (num_.empty()) {
    den_ = poly_constant(1);
    return;
  }
  if (poly_is_constant(den_)) {
    Rational d = poly_constant_value(den_);
    if (d != 1) {
      for (auto& [m, c] : num_) c /= d;
    }
    den_ = poly_constant(1);
    return;
  }
  // Make the denominator's leading coefficient 1 so equal representations
  // mostly coincide structurally.
  Rational lead = den_.begin()->second;
  if (lead != 1) {
    for (auto& [m, c] : num_) c /= lead;
    for (auto& [m, c] : den_) c /= lead;
  }
}

ProbExpr operator+(const ProbExpr& a, const ProbExpr& b) {
  return ProbExpr(poly_add(poly_mul(a.num_, b.den_), poly_mul(b.num_, a.den_)),
                  poly_mul(a.den_, b.den_));
}

ProbExpr operator-(const ProbExpr& a, const ProbExpr& b) {
  return ProbExpr(poly_add(poly_mul(a.num_, b.den_), poly_neg(poly_mul(b.num_, a.den_))),
                  poly_mul(a.den_, b.den_));
}

ProbExpr operator*(const ProbExpr& a, const ProbExpr& b) {
  return ProbExpr(poly_mul(a.num_, b.num_), poly_mul(a.den_, b.den_));
}

ProbExpr operator/(const ProbExpr& a, const ProbExpr& b) {
  return ProbExpr(poly_mul(a.num_, b.den_), poly_mul(a.den_, b.num_));
}

bool ProbExpr::operator==(const ProbExpr& o) const {
  return poly_mul(num_, o.den_) == poly_mul(o.num_, den_);
}

ProbExpr ProbExpr::substitute(const std::map<std::string, Rational>& values) const {
  if (values.empty()) return *this;
  return ProbExpr(poly_substitute(num_, values), poly_substitute(den_, values));
}

bool ProbExpr::is_constant() const {
  return poly_is_constant(num_) && poly_is_constant(den_);
}

Rational ProbExpr::as_rational() const {
  if (!is_constant()) throw std::logic_error("symbolic expression is not constant");
  return poly_constant_value(num_) / poly_constant_value(den_);
}

double ProbExpr::to_double() const { return static_cast<double>(as_rational()); }

std::set<std::string> ProbExpr::atoms() const {
  std::set<std::string> out;
  for (const Poly* p : {&num_, &den_}) {
    for (const auto& [m, c] : *p) {
      for (const auto& [atom, e] : m) out.insert(atom);
    }
  }
  return out;
}

namespace {

std::string poly_to_string(const Poly& p) {
  if (p.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : p) {
    Rational coeff = c;
    if (!first) {
      os << (coeff < 0 ? " - " : " + ");
      if (coeff < 0) coeff = -coeff;
    } else if (coeff < 0) {
      os << "-";
      coeff = -coeff;
    }
    first = false;
    bool wrote = false;
    if (coeff != 1 || m.empty()) {
      os << coeff.str();
      wrote = true;
    }
    for (const auto& [atom, e] : m) {
      if (wrote) os << "*";
      os << "Pr_T(" << atom << ")";
      if (e > 1) os << "^" << e;
      wrote = true;
    }
  }
  return os.str();
}

}  // namespace

std::string ProbExpr::to_string() const {
  if (poly_is_constant(den_)) return poly_to_string(num_);
  return "(" + poly_to_string(num_) + ") / (" + poly_to_string(den_) + ")";
}

}  // namespace opgv
