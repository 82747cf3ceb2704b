#include "bann/rational_poly.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bann/model.hpp"

namespace bann {

RationalPoly::RationalPoly(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) { normalize(); }

RationalPoly RationalPoly::constant(const Rational& c) { return RationalPoly({c}); }

RationalPoly RationalPoly::identity() { return RationalPoly({Rational(0), Rational(1)}); }

RationalPoly RationalPoly::pbar() { return RationalPoly({Rational(1, 2), Rational(-1, 2)}); }

void RationalPoly::normalize() {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

Rational RationalPoly::operator()(const Rational& x) const {
  Rational acc = 0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double RationalPoly::evaluate(double x) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + to_double(*it);
  return acc;
}

RationalPoly RationalPoly::derivative() const {
  std::vector<Rational> d;
  for (std::size_t i = 1; i < coeffs_.size(); ++i) d.push_back(coeffs_[i] * static_cast<int>(i));
  return RationalPoly(std::move(d));
}

RationalPoly RationalPoly::pow(unsigned e) const {
  RationalPoly out = constant(1);
  for (unsigned i = 0; i < e; ++i) out *= *this;
  return out;
}

RationalPoly& RationalPoly::operator+=(const RationalPoly& o) {
  if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size());
  for (std::size_t i = 0; i < o.coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  normalize();
  return *this;
}

RationalPoly& RationalPoly::operator-=(const RationalPoly& o) {
  if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size());
  for (std::size_t i = 0; i < o.coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
  normalize();
  return *this;
}

RationalPoly& RationalPoly::operator*=(const RationalPoly& o) {
  if (is_zero() || o.is_zero()) {
    coeffs_.clear();
    return *this;
  }
  std::vector<Rational> out(coeffs_.size() + o.coeffs_.size() - 1);
  for (std::size_t i = 0; i < coeffs_.size(); ++i)
    for (std::size_t j = 0; j < o.coeffs_.size(); ++j) out[i + j] += coeffs_[i] * o.coeffs_[j];
  coeffs_ = std::move(out);
  normalize();
  return *this;
}

RationalPoly& RationalPoly::operator*=(const Rational& c) {
  for (auto& x : coeffs_) x *= c;
  normalize();
  return *this;
}

std::pair<RationalPoly, RationalPoly> RationalPoly::divmod(const RationalPoly& divisor) const {
  if (divisor.is_zero()) throw Error("RationalPoly::divmod: division by zero polynomial");
  std::vector<Rational> rem = coeffs_;
  const int dd = divisor.degree();
  std::vector<Rational> quot(std::max(0, degree() - dd + 1));
  for (int i = degree(); i >= dd; --i) {
    const Rational c = rem[static_cast<std::size_t>(i)] / divisor.coeffs_.back();
    quot[static_cast<std::size_t>(i - dd)] = c;
    if (c == 0) continue;
    for (int j = 0; j <= dd; ++j) rem[static_cast<std::size_t>(i - dd + j)] -= c * divisor.coeffs_[static_cast<std::size_t>(j)];
  }
  return {RationalPoly(std::move(quot)), RationalPoly(std::move(rem))};
}

std::string to_string(const Rational& r) {
  std::string s = boost::multiprecision::numerator(r).str();
  const Integer den = boost::multiprecision::denominator(r);
  if (den != 1) s += "/" + den.str();
  return s;
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

Rational parse_rational(const std::string& text) {
  if (text.empty()) throw Error("parse_rational: empty string");
  if (const auto slash = text.find('/'); slash != std::string::npos) {
    Rational num = parse_rational(text.substr(0, slash));
    Rational den = parse_rational(text.substr(slash + 1));
    if (den == 0) throw Error("parse_rational: zero denominator");
    return num / den;
  }
  std::string mant = text;
  long exponent = 0;
  if (const auto e = text.find_first_of("eE"); e != std::string::npos) {
    mant = text.substr(0, e);
    exponent = std::stol(text.substr(e + 1));
  }
  bool negative = false;
  if (!mant.empty() && (mant[0] == '-' || mant[0] == '+')) {
    negative = mant[0] == '-';
    mant.erase(0, 1);
  }
  std::string digits;
  for (char c : mant) {
    if (c == '.') {
      continue;
    }
    if (c < '0' || c > '9') throw Error("parse_rational: malformed number `" + text + "`");
    digits.push_back(c);
  }
  if (digits.empty()) throw Error("parse_rational: malformed number `" + text + "`");
  if (const auto dot = mant.find('.'); dot != std::string::npos) {
    exponent -= static_cast<long>(mant.size() - dot - 1);
  }
  const auto nonzero = digits.find_first_not_of('0');
  Rational value{Integer(nonzero == std::string::npos ? std::string("0") : digits.substr(nonzero))};
  const Integer ten_pow = boost::multiprecision::pow(Integer(10), static_cast<unsigned>(std::labs(exponent)));
  if (exponent >= 0) value *= ten_pow;
  else value /= ten_pow;
  return negative ? Rational(-value) : value;
}

namespace {

std::string latex_coeff(const Rational& c) {
  const Integer num = boost::multiprecision::numerator(c);
  const Integer den = boost::multiprecision::denominator(c);
  const Integer a = boost::multiprecision::abs(num);
  if (den == 1) return a.str();
  return "\\frac{" + a.str() + "}{" + den.str() + "}";
}

}  // namespace

std::string RationalPoly::to_fraction_list() const {
  std::string s = "[";
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (i) s += ", ";
    s += to_string(coeffs_[i]);
  }
  if (coeffs_.empty()) s += "0";
  return s + "]";
}

std::string RationalPoly::to_latex() const {
  if (coeffs_.empty()) return "0";
  std::string s;
  for (int i = degree(); i >= 0; --i) {
    const Rational& c = coeffs_[static_cast<std::size_t>(i)];
    if (c == 0) continue;
    const bool neg = c < 0;
    if (s.empty()) {
      if (neg) s += "-";
    } else {
      s += neg ? " - " : " + ";
    }
    const bool unit = boost::multiprecision::abs(c) == 1;
    if (i == 0 || !unit) s += latex_coeff(c);
    if (i >= 1) s += "p";
    if (i >= 2) s += "^{" + std::to_string(i) + "}";
  }
  return s;
}

SturmSequence::SturmSequence(const RationalPoly& poly) {
  if (poly.is_zero()) throw Error("SturmSequence: zero polynomial");
  seq_.push_back(poly);
  if (poly.degree() == 0) return;
  seq_.push_back(poly.derivative());
  while (true) {
    RationalPoly r = seq_[seq_.size() - 2].divmod(seq_.back()).second;
    if (r.is_zero()) break;
    seq_.push_back(-r);
  }
}

int SturmSequence::sign_changes(const Rational& x) const {
  int changes = 0;
  int last = 0;
  for (const auto& poly : seq_) {
    const Rational v = poly(x);
    const int s = v > 0 ? 1 : (v < 0 ? -1 : 0);
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

int SturmSequence::count(const Rational& a, const Rational& b) const {
  if (!(a < b)) return 0;
  return sign_changes(a) - sign_changes(b);
}

namespace {

constexpr std::uint64_t kDivisorLimit = 1'000'000'000'000ULL;

std::vector<std::uint64_t> divisors(std::uint64_t n) {
  std::vector<std::uint64_t> small, large;
  for (std::uint64_t d = 1; d * d <= n; ++d) {
    if (n % d != 0) continue;
    small.push_back(d);
    if (d * d != n) large.push_back(n / d);
  }
  small.insert(small.end(), large.rbegin(), large.rend());
  return small;
}

}  // namespace

std::optional<std::vector<Rational>> rational_roots(const RationalPoly& poly, const Rational& lo,
                                                    const Rational& hi) {
  if (poly.is_zero()) throw Error("rational_roots: zero polynomial");
  // Clear denominators and the content.
  Integer lcm = 1;
  for (const auto& c : poly.coefficients()) {
    lcm = boost::multiprecision::lcm(lcm, boost::multiprecision::denominator(c));
  }
  std::vector<Integer> a;
  for (const auto& c : poly.coefficients()) {
    a.push_back(boost::multiprecision::numerator(c) * (lcm / boost::multiprecision::denominator(c)));
  }
  std::vector<Rational> roots;
  std::size_t low = 0;
  while (a[low] == 0) ++low;
  if (low > 0 && lo <= 0 && 0 <= hi) roots.push_back(0);
  const Integer a0 = boost::multiprecision::abs(a[low]);
  const Integer an = boost::multiprecision::abs(a.back());
  if (a0 > kDivisorLimit || an > kDivisorLimit) return std::nullopt;
  for (std::uint64_t d : divisors(a0.convert_to<std::uint64_t>())) {
    for (std::uint64_t e : divisors(an.convert_to<std::uint64_t>())) {
      for (int sign : {1, -1}) {
        const Rational c(Integer(d) * sign, Integer(e));
        if (c < lo || c > hi) continue;
        if (poly(c) == 0) roots.push_back(c);
      }
    }
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  return roots;
}

std::optional<RootInterval> isolate_smallest_root(const RationalPoly& poly, const Rational& lo,
                                                  const Rational& hi, const Rational& tol) {
  if (!(lo < hi)) throw Error("isolate_smallest_root: need lo < hi");
  if (!(tol > 0)) throw Error("isolate_smallest_root: tolerance must be positive");
  const SturmSequence sturm(poly);
  if (sturm.count(lo, hi) == 0) return std::nullopt;
  Rational a = lo;
  Rational b = hi;
  // Invariant: the smallest root in (lo, hi] lies in (a, b].
  while (b - a > tol) {
    const Rational m = (a + b) / 2;
    if (sturm.count(a, m) >= 1) {
      b = m;
    } else {
      a = m;
    }
  }
  if (poly(b) == 0 && sturm.count(a, b) == 1) return RootInterval{b, b};
  if (auto roots = rational_roots(poly, a, b)) {
    for (const Rational& r : *roots) {
      if (r > a && sturm.count(a, r) == 1) return RootInterval{r, r};
    }
  }
  return RootInterval{a, b};
}

RootInterval smallest_root(const RationalPoly& poly, const Rational& lo, const Rational& hi,
                           const Rational& tol) {
  if (!(poly(lo) * poly(hi) < 0)) {
    throw Error("smallest_root: polynomial has no sign change on [" + to_string(lo) + ", " +
                to_string(hi) + "]");
  }
  auto r = isolate_smallest_root(poly, lo, hi, tol);
  if (!r) throw Error("smallest_root: no root found despite a sign change");
  return *r;
}

}  // namespace bann
