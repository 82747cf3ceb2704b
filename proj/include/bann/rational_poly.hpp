// Polynomials in p with exact rational coefficients, and root isolation by
// Sturm sequences with exact sign evaluation.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace bann {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

class RationalPoly {
 public:
  RationalPoly() = default;
  explicit RationalPoly(std::vector<Rational> coeffs);

  static RationalPoly constant(const Rational& c);
  /// The monomial p.
  static RationalPoly identity();
  /// pbar = (1 - p) / 2.
  static RationalPoly pbar();

  /// -1 for the zero polynomial.
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  const std::vector<Rational>& coefficients() const { return coeffs_; }
  Rational coefficient(std::size_t i) const { return i < coeffs_.size() ? coeffs_[i] : Rational(0); }

  Rational operator()(const Rational& x) const;
  double evaluate(double x) const;

  RationalPoly derivative() const;
  RationalPoly pow(unsigned e) const;

  RationalPoly& operator+=(const RationalPoly& o);
  RationalPoly& operator-=(const RationalPoly& o);
  RationalPoly& operator*=(const RationalPoly& o);
  RationalPoly& operator*=(const Rational& c);
  friend RationalPoly operator+(RationalPoly a, const RationalPoly& b) { return a += b; }
  friend RationalPoly operator-(RationalPoly a, const RationalPoly& b) { return a -= b; }
  friend RationalPoly operator*(RationalPoly a, const RationalPoly& b) { return a *= b; }
  friend RationalPoly operator*(RationalPoly a, const Rational& c) { return a *= c; }
  friend RationalPoly operator-(const RationalPoly& a) { return a * Rational(-1); }
  friend bool operator==(const RationalPoly& a, const RationalPoly& b) { return a.coeffs_ == b.coeffs_; }

  /// Euclidean division; returns (quotient, remainder).
  std::pair<RationalPoly, RationalPoly> divmod(const RationalPoly& divisor) const;

  /// `[c0, c1, ...]` with exact fractions.
  std::string to_fraction_list() const;
  /// LaTeX-style rendering, highest power first.
  std::string to_latex() const;

 private:
  void normalize();
  std::vector<Rational> coeffs_;  // coeffs_[i] multiplies p^i
};

std::string to_string(const Rational& r);
double to_double(const Rational& r);
/// Parses "a/b", "a" or a finite decimal such as "0.32803".
Rational parse_rational(const std::string& text);

struct RootInterval {
  Rational lo;
  Rational hi;
  bool exact() const { return lo == hi; }
  Rational width() const { return hi - lo; }
  bool contains(const Rational& x) const { return lo <= x && x <= hi; }
};

class SturmSequence {
 public:
  explicit SturmSequence(const RationalPoly& poly);
  /// Number of distinct real roots in (a, b].
  int count(const Rational& a, const Rational& b) const;

 private:
  int sign_changes(const Rational& x) const;
  std::vector<RationalPoly> seq_;
};

/// Rational roots of `poly` lying in [lo, hi], by the rational root theorem.
/// Returns nullopt when the candidate enumeration is too large to attempt.
std::optional<std::vector<Rational>> rational_roots(const RationalPoly& poly, const Rational& lo,
                                                    const Rational& hi);

/// Smallest root in (lo, hi]: an exact interval when the root is rational,
/// otherwise a bracketing interval of width <= tol. nullopt when none exists.
std::optional<RootInterval> isolate_smallest_root(const RationalPoly& poly, const Rational& lo,
                                                  const Rational& hi, const Rational& tol);

/// Requires poly(lo) * poly(hi) < 0 in exact arithmetic; throws Error otherwise.
RootInterval smallest_root(const RationalPoly& poly, const Rational& lo, const Rational& hi,
                           const Rational& tol);

}  // namespace bann
