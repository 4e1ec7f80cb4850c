#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <set>
#include <string>
#include <vector>

namespace opgv {

using Rational = boost::multiprecision::cpp_rational;

// Exact decimal-literal parsing: "0.97" -> 97/100. Throws
// std::invalid_argument on malformed input.
Rational parse_decimal(const std::string& text);

// Decimal rendering with the given number of significant digits.
std::string format_decimal(const Rational& r, int significant_digits = 12);

// A symbolic arithmetic expression over rational constants and atoms
// Pr_T(v), kept as a ratio of polynomials with exact coefficients.
// Constant-only expressions reduce to a single rational; equality is
// decided by cross-multiplication, so it is representation-independent.
class ProbExpr {
 public:
  using Monomial = std::map<std::string, int>;  // atom -> exponent
  using Poly = std::map<Monomial, Rational>;

  ProbExpr() : ProbExpr(Rational(0)) {}
  explicit ProbExpr(const Rational& value);
  static ProbExpr constant(const Rational& value) { return ProbExpr(value); }
  static ProbExpr atom(const std::string& name);

  friend ProbExpr operator+(const ProbExpr& a, const ProbExpr& b);
  friend ProbExpr operator-(const ProbExpr& a, const ProbExpr& b);
  friend ProbExpr operator*(const ProbExpr& a, const ProbExpr& b);
  friend ProbExpr operator/(const ProbExpr& a, const ProbExpr& b);

  bool operator==(const ProbExpr& o) const;
  bool operator!=(const ProbExpr& o) const { return !(*this == o); }

  // Replaces the listed atoms by rational values and renormalizes.
  ProbExpr substitute(const std::map<std::string, Rational>& values) const;

  bool is_constant() const;
  // Valid only when is_constant(); throws std::logic_error otherwise.
  Rational as_rational() const;
  double to_double() const;  // constant expressions only

  std::set<std::string> atoms() const;
  std::string to_string() const;

 private:
  ProbExpr(Poly num, Poly den);
  void normalize();

  Poly num_, den_;
};

}  // namespace opgv
