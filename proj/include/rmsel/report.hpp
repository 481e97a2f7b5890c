#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rmsel/coverage.hpp"
#include "rmsel/leaderboard.hpp"
#include "rmsel/pca.hpp"
#include "rmsel/predictor.hpp"
#include "rmsel/stats.hpp"

namespace rmsel::report {

// Metadata embedded in every artifact: tool version, seed, input hashes.
// Deliberately excludes runtime knobs (thread count) so identical inputs
// and config give byte-identical outputs at any parallelism.
struct Meta {
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> input_hashes;
};

std::vector<std::string> meta_lines(const Meta& meta);

std::string gains_to_csv(const std::vector<leaderboard::GroupGains>& groups,
                         const Meta& meta);
std::string gains_to_json(const std::vector<leaderboard::GroupGains>& groups,
                          const Meta& meta);

std::string deltas_to_csv(const std::vector<leaderboard::StageDeltas>& deltas,
                          const Meta& meta);
std::string deltas_to_json(const std::vector<leaderboard::StageDeltas>& deltas,
                           const Meta& meta);

std::string method_diff_to_csv(
    const std::vector<std::pair<std::string, double>>& diffs,
    const Meta& meta);
std::string method_diff_to_json(
    const std::vector<std::pair<std::string, double>>& diffs,
    const Meta& meta);

std::string correlation_to_csv(const stats::CorrelationReport& report,
                               const Meta& meta);
std::string correlation_to_json(const stats::CorrelationReport& report,
                                const Meta& meta);

std::string curves_to_csv(const std::vector<coverage::CoverageCurve>& curves,
                          const Meta& meta);
std::string retained_to_json(const std::vector<std::string>& retained,
                             const std::map<std::size_t, double>& thresholds,
                             const Meta& meta);

std::string cv_to_json(const predictor::CVResult& result, const Meta& meta);
std::string coefficients_to_csv(const predictor::ElasticNetModel& model,
                                const Meta& meta);

struct ReportConfig {
  std::filesystem::path fixtures_dir;
  std::optional<std::filesystem::path> matrix_path;
  std::optional<std::filesystem::path> topics_path;
  std::optional<std::filesystem::path> presence_path;
  std::optional<std::filesystem::path> alias_path;
  std::optional<std::filesystem::path> pairs_path;
  std::filesystem::path out_dir = "out";
  std::uint64_t seed = 0;
  unsigned threads = 1;
  double alpha = 0.05;
  std::size_t k_min = 5;
  std::size_t k_max = 30;
  std::map<std::size_t, double> retain_thresholds{{5, 0.4}, {10, 0.7}};
  std::size_t bins = 100;
  std::size_t token_limit = 2048;
  predictor::HyperGrid grid;
};

struct ReportOutcome {
  std::vector<std::string> produced;
  std::vector<std::pair<std::string, std::string>> skipped;  // name, reason
  std::filesystem::path manifest_path;
};

// Produces every artifact the available inputs allow, skipping (and
// recording) the rest; writes manifest.json with input and artifact
// fingerprints.
ReportOutcome report_all(const ReportConfig& config);

}  // namespace rmsel::report
