#pragma once

#include <map>
#include <string>
#include <vector>

namespace rmsel::coverage {

// The k ids with the highest score; ties broken by ascending id so the
// result is a total, reproducible order.
std::vector<std::string> top_k(const std::map<std::string, double>& scores,
                               std::size_t k);

// |top_k(bench) intersect top_k(target)| / k over identical key sets.
double coverage_at_k(const std::map<std::string, double>& bench,
                     const std::map<std::string, double>& target,
                     std::size_t k);

struct CoverageCurve {
  std::string benchmark;
  std::vector<std::pair<std::size_t, double>> points;  // (k, coverage)
};

CoverageCurve coverage_curve(const std::map<std::string, double>& bench,
                             const std::map<std::string, double>& target,
                             std::size_t k_min, std::size_t k_max,
                             std::string benchmark_name = {});

// Keep a benchmark iff coverage(k) >= threshold(k) for every threshold k
// (inclusive). Returns retained ids sorted ascending.
std::vector<std::string> filter_benchmarks(
    const std::vector<CoverageCurve>& curves,
    const std::map<std::size_t, double>& thresholds);

}  // namespace rmsel::coverage
