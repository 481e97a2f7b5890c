#include "rmsel/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "rmsel/errors.hpp"
#include "rmsel/kernels.hpp"

namespace rmsel::stats {

namespace {

void check_pair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw ValidationError(errc::length_mismatch,
                          std::to_string(x.size()) + " vs " +
                              std::to_string(y.size()));
  }
  if (x.size() < 3) {
    throw ValidationError(errc::out_of_range,
                          "need at least 3 samples, got " +
                              std::to_string(x.size()));
  }
}

bool is_constant(std::span<const double> v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *lo == *hi;
}

double pearson_unchecked(std::span<const double> x,
                         std::span<const double> y) {
  const std::size_t n = x.size();
  const double mx = kernels::sum(x.data(), n) / static_cast<double>(n);
  const double my = kernels::sum(y.data(), n) / static_cast<double>(n);
  std::vector<double> dx(n), dy(n);
  for (std::size_t i = 0; i < n; ++i) {
    dx[i] = x[i] - mx;
    dy[i] = y[i] - my;
  }
  const double sxy = kernels::dot(dx.data(), dy.data(), n);
  const double sxx = kernels::dot(dx.data(), dx.data(), n);
  const double syy = kernels::dot(dy.data(), dy.data(), n);
  const double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

// Continued fraction for the incomplete beta (modified Lentz).
double beta_cf(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  constexpr int max_iter = 500;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-14) return h;
  }
  throw NumericalError("incomplete beta continued fraction did not converge");
}

}  // namespace

double pearson(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  if (is_constant(x) || is_constant(y)) {
    throw ValidationError(errc::constant_input,
                          "correlation undefined on a constant sequence");
  }
  return pearson_unchecked(x, y);
}

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    // positions i..j (0-based) share the average 1-based rank
    const double shared =
        (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  if (is_constant(x) || is_constant(y)) {
    throw ValidationError(errc::constant_input,
                          "correlation undefined on a constant sequence");
  }
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson_unchecked(rx, ry);
}

double t_statistic(double r, std::size_t n) {
  if (n < 3) {
    throw ValidationError(errc::out_of_range,
                          "need n >= 3, got " + std::to_string(n));
  }
  if (std::abs(r) > 1.0) {
    throw ValidationError(errc::out_of_range, "|r| > 1");
  }
  if (std::abs(r) == 1.0) {
    throw ValidationError(errc::infinite_statistic, "|r| = 1");
  }
  return r * std::sqrt(static_cast<double>(n - 2)) / std::sqrt(1.0 - r * r);
}

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw ValidationError(errc::out_of_range,
                          "incomplete beta needs a, b > 0");
  }
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = a * std::log(x) + b * std::log1p(-x) -
                          (std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_cf(a, b, x) / a;
  }
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double correlation_p_value(double r, std::size_t n) {
  if (n < 3) {
    throw ValidationError(errc::out_of_range,
                          "need n >= 3, got " + std::to_string(n));
  }
  if (std::abs(r) >= 1.0) return 0.0;
  // With t = r*sqrt(n-2)/sqrt(1-r^2) and nu = n-2 the two-tailed p-value
  // reduces to I_{1-r^2}(nu/2, 1/2).
  const double nu = static_cast<double>(n - 2);
  return incomplete_beta(nu / 2.0, 0.5, 1.0 - r * r);
}

double significance_threshold(std::size_t n, double alpha) {
  if (n < 4) {
    throw ValidationError(errc::out_of_range,
                          "need n >= 4, got " + std::to_string(n));
  }
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw ValidationError(errc::out_of_range, "alpha must be in (0, 1)");
  }
  double lo = 0.0;
  double hi = 1.0;
  // p is continuous and strictly decreasing in r: p(0)=1, p(1-)=0.
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    if (correlation_p_value(mid, n) < alpha) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

CorrelationReport correlation_report(const ingest::ScoreMatrix& matrix,
                                     const ingest::RewardBenchTable& rb,
                                     double alpha) {
  std::vector<std::string> ids;
  std::set<std::string> matrix_rows(matrix.row_ids.begin(),
                                    matrix.row_ids.end());
  for (const auto& [id, scores] : rb.scores) {
    (void)scores;
    if (matrix_rows.count(id)) ids.push_back(id);
  }
  if (ids.empty()) {
    throw ValidationError(errc::empty_input,
                          "no models shared between matrix and scores");
  }
  if (ids.size() < 4) {
    throw ValidationError(errc::out_of_range,
                          "need at least 4 shared models, got " +
                              std::to_string(ids.size()));
  }

  CorrelationReport report;
  report.alpha = alpha;
  report.n = ids.size();
  report.r_crit = significance_threshold(ids.size(), alpha);

  std::vector<std::string> columns = matrix.column_ids;
  std::sort(columns.begin(), columns.end());

  for (const auto& column : columns) {
    const std::size_t c = *matrix.column_index(column);
    std::vector<double> x(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
      x[i] = matrix.at(*matrix.row_index(ids[i]), c);
    }
    for (const auto category : ingest::kAllCategories) {
      std::vector<double> y(ids.size());
      for (std::size_t i = 0; i < ids.size(); ++i) {
        y[i] = rb.scores.at(ids[i]).category(category);
      }
      CorrelationEntry entry;
      entry.benchmark = column;
      entry.category = category;
      if (!is_constant(x) && !is_constant(y)) {
        entry.pearson = pearson_unchecked(x, y);
        const auto rx = average_ranks(x);
        const auto ry = average_ranks(y);
        entry.spearman = pearson_unchecked(rx, ry);
        entry.significant_pearson = std::abs(*entry.pearson) >= report.r_crit;
        entry.significant_spearman =
            std::abs(*entry.spearman) >= report.r_crit;
      }
      report.entries.push_back(std::move(entry));
    }
  }
  return report;
}

}  // namespace rmsel::stats
