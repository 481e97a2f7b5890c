#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace rmsel::pretrain_probe {

inline constexpr std::size_t kDefaultTokenLimit = 2048;
inline constexpr std::size_t kDefaultBins = 100;

extern const std::array<std::string_view, 5> kCanonicalCategories;

struct TokenLogProbDoc {
  std::string doc_id;
  std::string category;
  std::string model_id;
  std::vector<double> logprobs;  // natural log, each <= 0
};

// Mean of the first min(token_limit, length) per-token log-probs. Shorter
// documents normalize by their actual length.
double presence_score(const TokenLogProbDoc& doc, std::size_t token_limit);

struct CategoryStats {
  std::size_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample (n-1); 0 for singleton categories
};

struct PresenceScoreSet {
  std::string model_id;
  std::size_t token_limit = kDefaultTokenLimit;

  struct DocScore {
    std::string doc_id;
    std::string category;
    double score = 0.0;
  };
  std::vector<DocScore> docs;
  std::map<std::string, CategoryStats> category_stats;

  std::vector<double> all_scores() const;
  std::vector<double> category_scores(std::string_view category) const;
};

PresenceScoreSet score_set(const std::vector<TokenLogProbDoc>& docs,
                           const std::string& model_id,
                           std::size_t token_limit = kDefaultTokenLimit);

// Jensen-Shannon distance between two score samples: equal-width histograms
// over the pooled range, 1e-12 mass smoothing, base-2 logs, square root.
// Always in [0, 1]; exactly symmetric; exactly 0 on identical inputs.
double jsd(std::span<const double> scores_a, std::span<const double> scores_b,
           std::size_t bins = kDefaultBins);

// Same, with an explicit shared bin range (used for matrix recomputation).
double jsd(std::span<const double> scores_a, std::span<const double> scores_b,
           std::size_t bins, double lo, double hi);

struct JsdMatrix {
  std::vector<std::string> model_ids;
  std::vector<double> values;  // row-major, symmetric, zero diagonal
  double bin_lo = 0.0;
  double bin_hi = 0.0;
  std::size_t bins = kDefaultBins;

  double at(std::size_t i, std::size_t j) const {
    return values[i * model_ids.size() + j];
  }
};

// Pairwise distances over each model's pooled scores, one global bin range
// shared by every pair.
JsdMatrix jsd_matrix(const std::vector<PresenceScoreSet>& sets,
                     std::size_t bins = kDefaultBins);

// Category-mean features in canonical order (presence_github, ...); every
// canonical category must be present.
std::vector<std::pair<std::string, double>> export_presence_features(
    const PresenceScoreSet& set);

// alias model id -> source model id; aliased models share the source's
// extracted score set.
using AliasTable = std::vector<std::pair<std::string, std::string>>;

AliasTable load_alias_table(const std::filesystem::path& path);

std::vector<PresenceScoreSet> apply_aliases(std::vector<PresenceScoreSet> sets,
                                            const AliasTable& aliases);

// Line-delimited JSON records: doc_id, category, model_id, log_base
// ("e", "2" or "10"; converted to natural), logprobs.
std::vector<TokenLogProbDoc> load_docs(const std::filesystem::path& path);

std::string scores_to_csv(const PresenceScoreSet& set,
                          const std::vector<std::string>& meta_lines = {});
std::string stats_to_json(const PresenceScoreSet& set);
std::string histogram_to_json(const PresenceScoreSet& set, std::size_t bins);
std::string matrix_to_csv(const JsdMatrix& matrix,
                          const std::vector<std::string>& meta_lines = {});

}  // namespace rmsel::pretrain_probe
