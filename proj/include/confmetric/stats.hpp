#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace confmetric::stats {

/// 1-based ranks; tied values share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

double pearson(std::span<const double> x, std::span<const double> y);

/// Pearson correlation of average ranks. Throws UsageError for unequal
/// lengths, fewer than two values, or a constant input.
double spearman(std::span<const double> x, std::span<const double> y);

bool is_constant(std::span<const double> values);

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Two-tailed tail probability of Student's t with `dof` degrees of freedom.
double student_t_two_tailed(double t, double dof);

/// Paired two-tailed t-test on a - b. All-zero differences give t = 0 and
/// p = 1; constant nonzero differences throw DataError.
TestResult paired_t_test(std::span<const double> a, std::span<const double> b);

enum class Alternative { two_sided, greater, less };

/// Wilcoxon signed-rank test on paired differences. Zero differences are
/// dropped; the statistic is W+, the rank sum of positive differences
/// (average ranks for tied magnitudes). The null distribution is exact for up
/// to kWilcoxonExactLimit nonzero differences, normal with tie correction
/// beyond. No nonzero difference gives W+ = 0 and p = 1.
TestResult wilcoxon_signed_rank(std::span<const double> differences, Alternative alternative = Alternative::two_sided);

inline constexpr std::size_t kWilcoxonExactLimit = 25;

double mean(std::span<const double> v);
/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double sample_sd(std::span<const double> v);

}  // namespace confmetric::stats
