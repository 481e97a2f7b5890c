#include "rmsel/coverage.hpp"

#include <algorithm>
#include <set>

#include "rmsel/errors.hpp"

namespace rmsel::coverage {

std::vector<std::string> top_k(const std::map<std::string, double>& scores,
                               std::size_t k) {
  if (k < 1 || k > scores.size()) {
    throw ValidationError(errc::out_of_range,
                          "k = " + std::to_string(k) + " outside [1, " +
                              std::to_string(scores.size()) + "]");
  }
  std::vector<std::pair<std::string, double>> entries(scores.begin(),
                                                      scores.end());
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<std::string> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(entries[i].first);
  return out;
}

double coverage_at_k(const std::map<std::string, double>& bench,
                     const std::map<std::string, double>& target,
                     std::size_t k) {
  if (bench.size() != target.size() ||
      !std::equal(bench.begin(), bench.end(), target.begin(),
                  [](const auto& a, const auto& b) {
                    return a.first == b.first;
                  })) {
    throw ValidationError(errc::key_mismatch,
                          "benchmark and target cover different model sets");
  }
  const auto top_bench = top_k(bench, k);
  const auto top_target = top_k(target, k);
  const std::set<std::string> target_set(top_target.begin(),
                                         top_target.end());
  std::size_t shared = 0;
  for (const auto& id : top_bench) shared += target_set.count(id);
  return static_cast<double>(shared) / static_cast<double>(k);
}

CoverageCurve coverage_curve(const std::map<std::string, double>& bench,
                             const std::map<std::string, double>& target,
                             std::size_t k_min, std::size_t k_max,
                             std::string benchmark_name) {
  if (k_min < 1 || k_min > k_max || k_max > bench.size()) {
    throw ValidationError(errc::out_of_range,
                          "k range [" + std::to_string(k_min) + ", " +
                              std::to_string(k_max) + "] outside [1, " +
                              std::to_string(bench.size()) + "]");
  }
  CoverageCurve curve;
  curve.benchmark = std::move(benchmark_name);
  for (std::size_t k = k_min; k <= k_max; ++k) {
    curve.points.emplace_back(k, coverage_at_k(bench, target, k));
  }
  return curve;
}

std::vector<std::string> filter_benchmarks(
    const std::vector<CoverageCurve>& curves,
    const std::map<std::size_t, double>& thresholds) {
  std::vector<std::string> retained;
  for (const auto& curve : curves) {
    bool keep = true;
    for (const auto& [k, min_coverage] : thresholds) {
      const auto it = std::find_if(
          curve.points.begin(), curve.points.end(),
          [k = k](const auto& point) { return point.first == k; });
      if (it == curve.points.end()) {
        throw ValidationError(errc::missing_key,
                              curve.benchmark + ": curve has no k = " +
                                  std::to_string(k));
      }
      if (it->second < min_coverage) {
        keep = false;
        break;
      }
    }
    if (keep) retained.push_back(curve.benchmark);
  }
  std::sort(retained.begin(), retained.end());
  return retained;
}

}  // namespace rmsel::coverage
