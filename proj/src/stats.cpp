#include "bann/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>

#include "bann/model.hpp"

namespace bann {

Moments::Moments(std::size_t dim)
    : dim_(dim), sum_(dim, 0), cross_(dim * dim, 0) {}

void Moments::add(std::span<const std::int64_t> x) {
  if (x.size() != dim_) throw Error("Moments::add: dimension mismatch");
  ++n_;
  for (std::size_t i = 0; i < dim_; ++i) {
    sum_[i] += x[i];
    for (std::size_t j = 0; j < dim_; ++j) cross_[i * dim_ + j] += x[i] * x[j];
  }
}

void Moments::merge(const Moments& other) {
  if (other.n_ == 0) return;
  if (n_ == 0 && dim_ == 0) {
    *this = other;
    return;
  }
  if (other.dim_ != dim_) throw Error("Moments::merge: dimension mismatch");
  n_ += other.n_;
  for (std::size_t i = 0; i < sum_.size(); ++i) sum_[i] += other.sum_[i];
  for (std::size_t i = 0; i < cross_.size(); ++i) cross_[i] += other.cross_[i];
}

double Moments::mean(std::size_t i) const {
  return n_ == 0 ? 0.0 : static_cast<double>(sum_[i]) / static_cast<double>(n_);
}

double Moments::cov(std::size_t i, std::size_t j) const {
  if (n_ == 0) return 0.0;
  const double n = static_cast<double>(n_);
  return static_cast<double>(cross_[i * dim_ + j]) / n - mean(i) * mean(j);
}

double Moments::delta_stderr(std::span<const double> grad) const {
  if (grad.size() != dim_) throw Error("Moments::delta_stderr: dimension mismatch");
  if (n_ == 0) return 0.0;
  double var = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) {
    if (grad[i] == 0.0) continue;
    for (std::size_t j = 0; j < dim_; ++j) var += grad[i] * grad[j] * cov(i, j);
  }
  return std::sqrt(std::max(var, 0.0) / static_cast<double>(n_));
}

double bernoulli_stderr(double v, std::uint64_t n) {
  return n == 0 ? 0.0 : std::sqrt(std::max(v * (1.0 - v), 0.0) / static_cast<double>(n));
}

double chi_square_sf(double statistic, double df) {
  if (df <= 0.0) return 1.0;
  if (statistic <= 0.0) return 1.0;
  boost::math::chi_squared_distribution<double> dist(df);
  return boost::math::cdf(boost::math::complement(dist, statistic));
}

TestResult chi_square_gof(std::span<const std::uint64_t> observed,
                          std::span<const double> probs, double min_expected) {
  if (observed.size() != probs.size() || observed.empty()) {
    throw Error("chi_square_gof: observed/probability size mismatch");
  }
  const double n = static_cast<double>(std::accumulate(observed.begin(), observed.end(), std::uint64_t{0}));
  std::vector<double> obs(observed.begin(), observed.end());
  std::vector<double> exp;
  for (double pr : probs) exp.push_back(pr * n);
  // Pool from the tail into the previous category.
  while (exp.size() > 1 && exp.back() < min_expected) {
    exp[exp.size() - 2] += exp.back();
    obs[obs.size() - 2] += obs.back();
    exp.pop_back();
    obs.pop_back();
  }
  TestResult r;
  for (std::size_t i = 0; i < exp.size(); ++i) {
    if (exp[i] <= 0.0) continue;
    r.statistic += (obs[i] - exp[i]) * (obs[i] - exp[i]) / exp[i];
  }
  r.df = static_cast<double>(exp.size()) - 1.0;
  r.p_value = chi_square_sf(r.statistic, r.df);
  return r;
}

namespace {

// Folds row `from` into row `into` of a table.
void fold_row(std::vector<std::vector<std::uint64_t>>& t, std::size_t from, std::size_t into) {
  for (std::size_t c = 0; c < t[from].size(); ++c) t[into][c] += t[from][c];
  t.erase(t.begin() + static_cast<std::ptrdiff_t>(from));
}

std::vector<std::vector<std::uint64_t>> transpose(const std::vector<std::vector<std::uint64_t>>& t) {
  if (t.empty()) return {};
  std::vector<std::vector<std::uint64_t>> out(t[0].size(), std::vector<std::uint64_t>(t.size()));
  for (std::size_t r = 0; r < t.size(); ++r)
    for (std::size_t c = 0; c < t[r].size(); ++c) out[c][r] = t[r][c];
  return out;
}

std::uint64_t row_sum(const std::vector<std::uint64_t>& row) {
  return std::accumulate(row.begin(), row.end(), std::uint64_t{0});
}

// Repeatedly folds the row with the smallest margin into a neighbour while the
// smallest expected cell count (row margin * min column margin / n) is below
// the threshold.
void pool_rows(std::vector<std::vector<std::uint64_t>>& t, double min_col_share, double min_expected) {
  while (t.size() > 2) {
    std::size_t smallest = 0;
    for (std::size_t r = 1; r < t.size(); ++r)
      if (row_sum(t[r]) < row_sum(t[smallest])) smallest = r;
    if (static_cast<double>(row_sum(t[smallest])) * min_col_share >= min_expected) break;
    const std::size_t into = smallest == 0 ? 1
                             : smallest + 1 == t.size() ? smallest - 1
                             : (row_sum(t[smallest - 1]) <= row_sum(t[smallest + 1]) ? smallest - 1
                                                                                     : smallest + 1);
    fold_row(t, smallest, into);
  }
}

}  // namespace

TestResult chi_square_independence(std::vector<std::vector<std::uint64_t>> table,
                                   double min_expected) {
  // Drop empty rows and columns.
  std::erase_if(table, [](const auto& row) { return row_sum(row) == 0; });
  table = transpose(table);
  std::erase_if(table, [](const auto& row) { return row_sum(row) == 0; });
  table = transpose(table);
  if (table.size() < 2 || table[0].size() < 2) return {};

  auto total = [&]() {
    std::uint64_t s = 0;
    for (const auto& row : table) s += row_sum(row);
    return static_cast<double>(s);
  };
  for (int pass = 0; pass < 4; ++pass) {
    const double n = total();
    auto cols = transpose(table);
    std::uint64_t min_col = row_sum(cols[0]);
    for (const auto& c : cols) min_col = std::min(min_col, row_sum(c));
    pool_rows(table, static_cast<double>(min_col) / n, min_expected);
    cols = transpose(table);
    std::uint64_t min_row = row_sum(table[0]);
    for (const auto& r : table) min_row = std::min(min_row, row_sum(r));
    pool_rows(cols, static_cast<double>(min_row) / n, min_expected);
    table = transpose(cols);
  }
  if (table.size() < 2 || table[0].size() < 2) return {};

  const double n = total();
  const auto cols = transpose(table);
  TestResult r;
  for (std::size_t i = 0; i < table.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const double e = static_cast<double>(row_sum(table[i])) * static_cast<double>(row_sum(cols[j])) / n;
      const double d = static_cast<double>(table[i][j]) - e;
      r.statistic += d * d / e;
    }
  }
  r.df = static_cast<double>((table.size() - 1) * (cols.size() - 1));
  r.p_value = chi_square_sf(r.statistic, r.df);
  return r;
}

TestResult chi_square_two_sample(std::span<const std::uint64_t> a,
                                 std::span<const std::uint64_t> b, double min_expected) {
  if (a.size() != b.size()) throw Error("chi_square_two_sample: category count mismatch");
  std::vector<std::vector<std::uint64_t>> table(a.size(), std::vector<std::uint64_t>(2));
  for (std::size_t i = 0; i < a.size(); ++i) {
    table[i][0] = a[i];
    table[i][1] = b[i];
  }
  return chi_square_independence(std::move(table), min_expected);
}

double kolmogorov_sf(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 == 1 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

TestResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  TestResult r;
  if (a.empty() || b.empty()) return r;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  r.statistic = d;
  r.df = ne * ne;
  r.p_value = kolmogorov_sf((ne + 0.12 + 0.11 / ne) * d);
  return r;
}

IdentityCheck make_check(std::string name, double lhs, double rhs, double std_error,
                         double threshold) {
  IdentityCheck c;
  c.name = std::move(name);
  c.lhs = lhs;
  c.rhs = rhs;
  c.std_error = std_error;
  const double diff = std::abs(lhs - rhs);
  c.z = std_error > 0.0 ? (lhs - rhs) / std_error : (diff == 0.0 ? 0.0 : INFINITY);
  c.pass = diff <= threshold * std_error;
  return c;
}

}  // namespace bann
