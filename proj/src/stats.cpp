#include "confmetric/stats.hpp"

#include <algorithm>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "confmetric/error.hpp"

namespace confmetric::stats {

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

double mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_sd(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

bool is_constant(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(), [&](double v) { return v == values.front(); });
}

double pearson(std::span<const double> x, std::span<const double> y) {
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw UsageError("spearman: inputs differ in length");
  if (x.size() < 2) throw UsageError("spearman: needs at least two observations");
  if (is_constant(x) || is_constant(y)) throw UsageError("spearman: constant input has no ranking");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return std::clamp(pearson(rx, ry), -1.0, 1.0);
}

double student_t_two_tailed(double t, double dof) {
  if (!(dof > 0.0)) throw UsageError("t distribution needs positive degrees of freedom");
  if (!std::isfinite(t)) return 0.0;
  const double x = dof / (dof + t * t);
  return std::clamp(boost::math::ibeta(0.5 * dof, 0.5, x), 0.0, 1.0);
}

TestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw UsageError("paired t-test: samples differ in length");
  if (a.size() < 2) throw UsageError("paired t-test: needs at least two pairs");
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  const double m = mean(d);
  const double sd = sample_sd(d);
  if (sd == 0.0) {
    if (m == 0.0) return {0.0, 1.0};
    throw DataError("paired t-test: differences are constant and nonzero; the t statistic is undefined");
  }
  const double t = m / (sd / std::sqrt(static_cast<double>(d.size())));
  return {t, student_t_two_tailed(t, static_cast<double>(d.size() - 1))};
}

TestResult wilcoxon_signed_rank(std::span<const double> differences, Alternative alternative) {
  std::vector<double> nonzero;
  for (double d : differences)
    if (d != 0.0) nonzero.push_back(d);
  const std::size_t n = nonzero.size();
  if (n == 0) return {0.0, 1.0};

  std::vector<double> magnitude(n);
  for (std::size_t i = 0; i < n; ++i) magnitude[i] = std::abs(nonzero[i]);
  const auto ranks = average_ranks(magnitude);
  double w_plus = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (nonzero[i] > 0.0) w_plus += ranks[i];

  double p_lower = 0.0;  // P(W+ <= observed)
  double p_upper = 0.0;  // P(W+ >= observed)
  if (n <= kWilcoxonExactLimit) {
    // Average ranks are multiples of 1/2, so doubled ranks are integers and
    // the null distribution of 2 W+ is a subset-sum count.
    std::vector<int> doubled(n);
    int total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      doubled[i] = static_cast<int>(std::lround(2.0 * ranks[i]));
      total += doubled[i];
    }
    std::vector<std::uint64_t> count(static_cast<std::size_t>(total) + 1, 0);
    count[0] = 1;
    int reach = 0;
    for (int r : doubled) {
      for (int s = reach; s >= 0; --s) count[static_cast<std::size_t>(s + r)] += count[static_cast<std::size_t>(s)];
      reach += r;
    }
    const double outcomes = std::ldexp(1.0, static_cast<int>(n));
    const int observed = static_cast<int>(std::lround(2.0 * w_plus));
    std::uint64_t lower = 0;
    std::uint64_t upper = 0;
    for (int s = 0; s <= total; ++s) {
      if (s <= observed) lower += count[static_cast<std::size_t>(s)];
      if (s >= observed) upper += count[static_cast<std::size_t>(s)];
    }
    p_lower = static_cast<double>(lower) / outcomes;
    p_upper = static_cast<double>(upper) / outcomes;
  } else {
    const double nn = static_cast<double>(n);
    const double mu = nn * (nn + 1.0) / 4.0;
    double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0;
    std::vector<double> sorted = magnitude;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < n;) {
      std::size_t j = i;
      while (j < n && sorted[j] == sorted[i]) ++j;
      const double t = static_cast<double>(j - i);
      var -= (t * t * t - t) / 48.0;
      i = j;
    }
    const double sd = std::sqrt(var);
    auto upper_tail = [](double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); };
    p_upper = upper_tail((w_plus - mu - 0.5) / sd);
    p_lower = upper_tail((mu - w_plus - 0.5) / sd);
  }

  double p = 1.0;
  switch (alternative) {
    case Alternative::greater: p = p_upper; break;
    case Alternative::less: p = p_lower; break;
    case Alternative::two_sided: p = std::min(1.0, 2.0 * std::min(p_lower, p_upper)); break;
  }
  return {w_plus, std::clamp(p, 0.0, 1.0)};
}

}  // namespace confmetric::stats
