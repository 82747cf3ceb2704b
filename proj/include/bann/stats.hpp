// Aggregation and hypothesis-test helpers shared by the estimators.
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace bann {

/// First and second moments of an integer-valued per-trial vector, kept as
/// exact integer sums so that merging partial results is order-independent.
class Moments {
 public:
  Moments() = default;
  explicit Moments(std::size_t dim);

  std::size_t dim() const { return dim_; }
  std::uint64_t n() const { return n_; }

  void add(std::span<const std::int64_t> x);
  void merge(const Moments& other);

  std::int64_t sum(std::size_t i) const { return sum_[i]; }
  double mean(std::size_t i) const;
  /// Population covariance (divides by n): for an indicator this is v(1-v).
  double cov(std::size_t i, std::size_t j) const;
  /// Standard error of a smooth function of the means, by the delta method.
  double delta_stderr(std::span<const double> grad) const;

  friend bool operator==(const Moments&, const Moments&) = default;

 private:
  std::size_t dim_ = 0;
  std::uint64_t n_ = 0;
  std::vector<std::int64_t> sum_;
  std::vector<std::int64_t> cross_;  // row-major dim x dim
};

double bernoulli_stderr(double v, std::uint64_t n);

struct TestResult {
  double statistic = 0.0;
  double df = 0.0;
  double p_value = 1.0;
  bool rejected(double level) const { return p_value < level; }
};

/// Upper tail of the chi-square distribution.
double chi_square_sf(double statistic, double df);

/// Goodness of fit of `observed` counts against category probabilities.
/// Adjacent categories are pooled from the right until each expected count
/// is at least `min_expected`.
TestResult chi_square_gof(std::span<const std::uint64_t> observed,
                          std::span<const double> probs, double min_expected = 5.0);

/// Pearson independence test on a rows x cols contingency table. Sparse
/// rows/columns (margin expected below `min_expected` in any cell) are
/// folded into their neighbour first.
TestResult chi_square_independence(std::vector<std::vector<std::uint64_t>> table,
                                   double min_expected = 5.0);

/// Two-sample homogeneity test on categorical counts.
TestResult chi_square_two_sample(std::span<const std::uint64_t> a,
                                 std::span<const std::uint64_t> b,
                                 double min_expected = 5.0);

/// Two-sample Kolmogorov-Smirnov test, asymptotic p-value.
TestResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Kolmogorov survival function Q(lambda) = 2 sum (-1)^{j-1} exp(-2 j^2 lambda^2).
double kolmogorov_sf(double lambda);

struct IdentityCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double std_error = 0.0;
  double z = 0.0;
  bool pass = false;
};

/// |lhs - rhs| <= threshold * std_error (a zero residual with zero std_error passes).
IdentityCheck make_check(std::string name, double lhs, double rhs, double std_error,
                         double threshold = 3.0);

}  // namespace bann
