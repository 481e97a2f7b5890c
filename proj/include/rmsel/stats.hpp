#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rmsel/ingest.hpp"

namespace rmsel::stats {

// Sample Pearson correlation. Requires equal lengths >= 3 and two
// non-constant sequences.
double pearson(std::span<const double> x, std::span<const double> y);

// Pearson correlation of average-fractional ranks (ties share the mean of
// the rank positions they occupy).
double spearman(std::span<const double> x, std::span<const double> y);

// 1-based average-fractional ranks; exposed for the rank-convention tests.
std::vector<double> average_ranks(std::span<const double> values);

// t = r*sqrt(n-2)/sqrt(1-r^2). |r| = 1 is reported as a distinct
// infinite-statistic error.
double t_statistic(double r, std::size_t n);

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

// Two-tailed p-value of a sample correlation r at sample size n under the
// t(n-2) null.
double correlation_p_value(double r, std::size_t n);

// Smallest r whose two-tailed p-value is below alpha; the significance
// cutoff applied to correlation reports.
double significance_threshold(std::size_t n, double alpha);

struct CorrelationEntry {
  std::string benchmark;
  ingest::Category category;
  // Empty when the benchmark (or category) column is constant: correlation
  // undefined.
  std::optional<double> pearson;
  std::optional<double> spearman;
  bool significant_pearson = false;
  bool significant_spearman = false;
};

struct CorrelationReport {
  double alpha = 0.0;
  double r_crit = 0.0;
  std::size_t n = 0;
  std::vector<CorrelationEntry> entries;  // ordered by (benchmark, category)
};

CorrelationReport correlation_report(const ingest::ScoreMatrix& matrix,
                                     const ingest::RewardBenchTable& rb,
                                     double alpha);

}  // namespace rmsel::stats
