#include "bann/cone.hpp"

#include "bann/model.hpp"

namespace bann {

namespace {

using Vec = ConeSet::Vec;

Integer dot(const LinearForm& a, const Vec& v) {
  Integer s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != 0 && v[i] != 0) s += v[i] * a[i];
  }
  return s;
}

void make_primitive(Vec& v) {
  Integer g = 0;
  for (const auto& x : v) {
    if (x != 0) g = boost::multiprecision::gcd(g, boost::multiprecision::abs(x));
  }
  if (g > 1) {
    for (auto& x : v) x /= g;
  }
}

// Splits `gens` against the half-space a.g >= 0 and appends the pieces lying
// on the non-negative side to `out`.
void split(std::vector<Vec> gens, const LinearForm& a, std::vector<ConeSet::Simplicial>& out) {
  std::vector<Integer> vals(gens.size());
  int pos = -1;
  int neg = -1;
  for (std::size_t i = 0; i < gens.size(); ++i) {
    vals[i] = dot(a, gens[i]);
    if (vals[i] > 0 && pos < 0) pos = static_cast<int>(i);
    if (vals[i] < 0 && neg < 0) neg = static_cast<int>(i);
  }
  if (neg < 0) {
    // Entirely on the closed positive side; a form vanishing on every
    // generator of a full-dimensional cone is zero and cuts nothing out.
    if (pos >= 0) out.push_back({std::move(gens)});
    return;
  }
  if (pos < 0) return;
  // w lies on the hyperplane, on the edge between the two generators.
  Vec w(gens[0].size());
  const Integer& ap = vals[static_cast<std::size_t>(pos)];
  const Integer& an = vals[static_cast<std::size_t>(neg)];
  for (std::size_t j = 0; j < w.size(); ++j) {
    w[j] = ap * gens[static_cast<std::size_t>(neg)][j] - an * gens[static_cast<std::size_t>(pos)][j];
  }
  make_primitive(w);
  std::vector<Vec> keep_pos = gens;  // negative generator replaced
  keep_pos[static_cast<std::size_t>(neg)] = w;
  gens[static_cast<std::size_t>(pos)] = std::move(w);  // positive generator replaced
  split(std::move(keep_pos), a, out);
  split(std::move(gens), a, out);
}

Integer determinant(std::vector<Vec> m) {
  // Bareiss fraction-free elimination.
  const std::size_t n = m.size();
  if (n == 0) return 1;
  Integer sign = 1;
  Integer prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      std::size_t r = k + 1;
      while (r < n && m[r][k] == 0) ++r;
      if (r == n) return 0;
      std::swap(m[k], m[r]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
      }
    }
    prev = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

}  // namespace

ConeSet ConeSet::orthant(std::size_t dim) {
  ConeSet c;
  c.dim_ = dim;
  Simplicial s;
  for (std::size_t i = 0; i < dim; ++i) {
    Vec e(dim, 0);
    e[i] = 1;
    s.generators.push_back(std::move(e));
  }
  c.cones_.push_back(std::move(s));
  return c;
}

ConeSet ConeSet::intersect(const LinearForm& form) const {
  if (form.size() != dim_) throw Error("ConeSet::intersect: form dimension mismatch");
  ConeSet out;
  out.dim_ = dim_;
  bool all_zero = true;
  for (auto c : form) all_zero = all_zero && c == 0;
  if (all_zero) return out;
  for (const auto& s : cones_) split(s.generators, form, out.cones_);
  return out;
}

ConeSet ConeSet::intersect(const std::vector<LinearForm>& forms) const {
  ConeSet out = *this;
  for (const auto& f : forms) {
    if (out.empty()) break;
    out = out.intersect(f);
  }
  return out;
}

Rational simplicial_mass(const std::vector<Vec>& generators) {
  Integer den = 1;
  for (const auto& v : generators) {
    Integer s = 0;
    for (const auto& x : v) s += x;
    den *= s;
  }
  if (den == 0) return 0;
  return Rational(boost::multiprecision::abs(determinant(generators)), den);
}

Rational ConeSet::probability() const {
  Rational total = 0;
  for (const auto& s : cones_) total += simplicial_mass(s.generators);
  return total;
}

Rational gap_event_probability(const GapEvent& event, std::size_t dim) {
  if (event.dim != dim) throw Error("gap_event_probability: dimension mismatch");
  if (dim > 5) throw Error("gap_event_probability: dimension above 5 is not supported");
  return ConeSet::orthant(dim).intersect(event.inequalities).probability();
}

}  // namespace bann
