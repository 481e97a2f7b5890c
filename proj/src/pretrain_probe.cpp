#include "rmsel/pretrain_probe.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "rmsel/csv.hpp"
#include "rmsel/errors.hpp"
#include "rmsel/kernels.hpp"

namespace rmsel::pretrain_probe {

const std::array<std::string_view, 5> kCanonicalCategories{
    "Github", "Book", "ArXiv", "Wikipedia", "StackExchange"};

namespace {

using nlohmann::json;

constexpr double kSmoothing = 1e-12;

std::vector<double> histogram_probs(std::span<const double> scores,
                                    std::size_t bins, double lo, double hi) {
  std::vector<double> probs(bins, 0.0);
  const double width = hi - lo;
  const double n = static_cast<double>(scores.size());
  for (const double x : scores) {
    std::size_t bin = 0;
    if (width > 0.0) {
      const double t = (x - lo) / width * static_cast<double>(bins);
      bin = t <= 0.0 ? 0
                     : std::min(bins - 1, static_cast<std::size_t>(t));
    }
    probs[bin] += 1.0;
  }
  // epsilon mass smoothing, then renormalize
  const double total = 1.0 + static_cast<double>(bins) * kSmoothing;
  for (auto& p : probs) p = (p / n + kSmoothing) / total;
  return probs;
}

double js_divergence_bits(const std::vector<double>& p,
                          const std::vector<double>& q) {
  double kl_p = 0.0;
  double kl_q = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    kl_p += p[i] * std::log2(p[i] / m);
    kl_q += q[i] * std::log2(q[i] / m);
  }
  return 0.5 * kl_p + 0.5 * kl_q;
}

void check_nonempty(std::span<const double> scores, const char* which) {
  if (scores.empty()) {
    throw ValidationError(errc::empty_input,
                          std::string(which) + " score collection is empty");
  }
}

std::pair<double, double> pooled_range(
    std::initializer_list<std::span<const double>> collections) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& scores : collections) {
    for (const double x : scores) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  }
  return {lo, hi};
}

}  // namespace

double presence_score(const TokenLogProbDoc& doc, std::size_t token_limit) {
  if (doc.logprobs.empty()) {
    throw ValidationError(errc::empty_input, "doc " + doc.doc_id);
  }
  if (token_limit < 1) {
    throw ValidationError(errc::out_of_range, "token limit must be >= 1");
  }
  const std::size_t n = std::min(token_limit, doc.logprobs.size());
  return kernels::sum(doc.logprobs.data(), n) / static_cast<double>(n);
}

std::vector<double> PresenceScoreSet::all_scores() const {
  std::vector<double> out;
  out.reserve(docs.size());
  for (const auto& doc : docs) out.push_back(doc.score);
  return out;
}

std::vector<double> PresenceScoreSet::category_scores(
    std::string_view category) const {
  std::vector<double> out;
  for (const auto& doc : docs) {
    if (doc.category == category) out.push_back(doc.score);
  }
  return out;
}

PresenceScoreSet score_set(const std::vector<TokenLogProbDoc>& docs,
                           const std::string& model_id,
                           std::size_t token_limit) {
  if (docs.empty()) {
    throw ValidationError(errc::empty_input, "no documents");
  }
  PresenceScoreSet set;
  set.model_id = model_id;
  set.token_limit = token_limit;
  for (const auto& doc : docs) {
    if (doc.model_id != model_id) {
      throw ValidationError(errc::key_mismatch,
                            "doc " + doc.doc_id + " belongs to " +
                                doc.model_id + ", expected " + model_id);
    }
    set.docs.push_back({doc.doc_id, doc.category,
                        presence_score(doc, token_limit)});
  }
  std::map<std::string, std::vector<double>> by_category;
  for (const auto& doc : set.docs) by_category[doc.category].push_back(doc.score);
  for (const auto& [category, scores] : by_category) {
    CategoryStats stats;
    stats.count = scores.size();
    stats.mean = kernels::sum(scores.data(), scores.size()) /
                 static_cast<double>(scores.size());
    if (scores.size() > 1) {
      double ss = 0.0;
      for (const double s : scores) ss += (s - stats.mean) * (s - stats.mean);
      stats.stddev = std::sqrt(ss / static_cast<double>(scores.size() - 1));
    }
    set.category_stats[category] = stats;
  }
  return set;
}

double jsd(std::span<const double> scores_a, std::span<const double> scores_b,
           std::size_t bins, double lo, double hi) {
  check_nonempty(scores_a, "first");
  check_nonempty(scores_b, "second");
  if (bins < 2) {
    throw ValidationError(errc::out_of_range, "need at least 2 bins");
  }
  const auto p = histogram_probs(scores_a, bins, lo, hi);
  const auto q = histogram_probs(scores_b, bins, lo, hi);
  const double js = js_divergence_bits(p, q);
  return std::sqrt(std::clamp(js, 0.0, 1.0));
}

double jsd(std::span<const double> scores_a, std::span<const double> scores_b,
           std::size_t bins) {
  check_nonempty(scores_a, "first");
  check_nonempty(scores_b, "second");
  const auto [lo, hi] = pooled_range({scores_a, scores_b});
  return jsd(scores_a, scores_b, bins, lo, hi);
}

JsdMatrix jsd_matrix(const std::vector<PresenceScoreSet>& sets,
                     std::size_t bins) {
  if (sets.size() < 2) {
    throw ValidationError(errc::out_of_range,
                          "need at least 2 models, got " +
                              std::to_string(sets.size()));
  }
  std::vector<std::vector<double>> pooled;
  pooled.reserve(sets.size());
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& set : sets) {
    auto scores = set.all_scores();
    check_nonempty(scores, set.model_id.c_str());
    for (const double x : scores) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    pooled.push_back(std::move(scores));
  }

  JsdMatrix matrix;
  matrix.bins = bins;
  matrix.bin_lo = lo;
  matrix.bin_hi = hi;
  for (const auto& set : sets) matrix.model_ids.push_back(set.model_id);
  const std::size_t m = sets.size();
  matrix.values.assign(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const double d = jsd(pooled[i], pooled[j], bins, lo, hi);
      matrix.values[i * m + j] = d;
      matrix.values[j * m + i] = d;
    }
  }
  return matrix;
}

std::vector<std::pair<std::string, double>> export_presence_features(
    const PresenceScoreSet& set) {
  std::vector<std::pair<std::string, double>> features;
  for (const auto category : kCanonicalCategories) {
    const auto it = set.category_stats.find(std::string(category));
    if (it == set.category_stats.end()) {
      throw ValidationError(errc::missing_category,
                            "no documents in category '" +
                                std::string(category) + "'");
    }
    std::string name = "presence_" + std::string(category);
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    features.emplace_back(std::move(name), it->second.mean);
  }
  return features;
}

AliasTable load_alias_table(const std::filesystem::path& path) {
  const auto table = csv::read_file(path);
  const auto alias_col = table.column("alias");
  const auto source_col = table.column("source");
  if (!alias_col || !source_col) {
    throw ValidationError(errc::bad_schema,
                          path.string() + ": need alias,source columns");
  }
  AliasTable aliases;
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) {
      throw ValidationError(errc::malformed_row, path.string());
    }
    aliases.emplace_back(row[*alias_col], row[*source_col]);
  }
  return aliases;
}

std::vector<PresenceScoreSet> apply_aliases(std::vector<PresenceScoreSet> sets,
                                            const AliasTable& aliases) {
  for (const auto& [alias, source] : aliases) {
    const auto it =
        std::find_if(sets.begin(), sets.end(), [&](const auto& set) {
          return set.model_id == source;
        });
    if (it == sets.end()) {
      throw ValidationError(errc::missing_key,
                            "alias source '" + source + "' has no score set");
    }
    PresenceScoreSet copy = *it;
    copy.model_id = alias;
    const auto existing =
        std::find_if(sets.begin(), sets.end(), [&](const auto& set) {
          return set.model_id == alias;
        });
    if (existing != sets.end()) {
      *existing = std::move(copy);
    } else {
      sets.push_back(std::move(copy));
    }
  }
  return sets;
}

std::vector<TokenLogProbDoc> load_docs(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError(errc::missing_file, "cannot open " + path.string());
  }
  std::vector<TokenLogProbDoc> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json doc = json::parse(line, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
      throw ValidationError(errc::bad_schema,
                            path.string() + ":" + std::to_string(line_no));
    }
    TokenLogProbDoc record;
    record.doc_id = doc.value("doc_id", "");
    record.category = doc.value("category", "");
    record.model_id = doc.value("model_id", "");
    if (record.doc_id.empty() || record.category.empty() ||
        record.model_id.empty()) {
      throw ValidationError(errc::bad_schema,
                            path.string() + ":" + std::to_string(line_no) +
                                ": doc_id/category/model_id required");
    }
    const std::string base = doc.value("log_base", "");
    double factor = 1.0;
    if (base == "e") {
      factor = 1.0;
    } else if (base == "2") {
      factor = std::log(2.0);
    } else if (base == "10") {
      factor = std::log(10.0);
    } else {
      throw ValidationError(errc::bad_schema,
                            record.doc_id + ": log_base must be e, 2 or 10");
    }
    if (!doc.contains("logprobs") || !doc["logprobs"].is_array() ||
        doc["logprobs"].empty()) {
      throw ValidationError(errc::empty_input,
                            record.doc_id + ": logprobs missing or empty");
    }
    record.logprobs.reserve(doc["logprobs"].size());
    for (const auto& v : doc["logprobs"]) {
      if (!v.is_number()) {
        throw ValidationError(errc::non_numeric_cell, record.doc_id);
      }
      const double lp = v.get<double>() * factor;
      if (!std::isfinite(lp) || lp > 0.0) {
        throw ValidationError(errc::out_of_range,
                              record.doc_id +
                                  ": log-probs must be finite and <= 0");
      }
      record.logprobs.push_back(lp);
    }
    docs.push_back(std::move(record));
  }
  if (docs.empty()) {
    throw ValidationError(errc::no_records, path.string());
  }
  return docs;
}

std::string scores_to_csv(const PresenceScoreSet& set,
                          const std::vector<std::string>& meta_lines) {
  std::string out;
  for (const auto& line : meta_lines) out += "# " + line + "\n";
  out += "doc_id,category,score\n";
  for (const auto& doc : set.docs) {
    out += csv::to_line({doc.doc_id, doc.category,
                         csv::format_double(doc.score)}) +
           "\n";
  }
  return out;
}

std::string stats_to_json(const PresenceScoreSet& set) {
  json doc;
  doc["schema"] = "rmsel.presence_stats.v1";
  doc["model_id"] = set.model_id;
  doc["token_limit"] = set.token_limit;
  doc["doc_count"] = set.docs.size();
  json categories = json::object();
  for (const auto& [category, stats] : set.category_stats) {
    categories[category] = {{"count", stats.count},
                            {"mean", stats.mean},
                            {"stddev", stats.stddev}};
  }
  doc["categories"] = categories;
  return doc.dump(2);
}

std::string histogram_to_json(const PresenceScoreSet& set, std::size_t bins) {
  if (bins < 2) {
    throw ValidationError(errc::out_of_range, "need at least 2 bins");
  }
  const auto all = set.all_scores();
  const auto [lo, hi] = pooled_range({std::span<const double>(all)});
  json doc;
  doc["schema"] = "rmsel.presence_histogram.v1";
  doc["model_id"] = set.model_id;
  doc["bins"] = bins;
  doc["lo"] = lo;
  doc["hi"] = hi;
  json categories = json::object();
  for (const auto& [category, stats] : set.category_stats) {
    (void)stats;
    const auto scores = set.category_scores(category);
    std::vector<std::size_t> counts(bins, 0);
    const double width = hi - lo;
    for (const double x : scores) {
      std::size_t bin = 0;
      if (width > 0.0) {
        const double t = (x - lo) / width * static_cast<double>(bins);
        bin = t <= 0.0 ? 0 : std::min(bins - 1, static_cast<std::size_t>(t));
      }
      ++counts[bin];
    }
    categories[category] = counts;
  }
  doc["categories"] = categories;
  return doc.dump(2);
}

std::string matrix_to_csv(const JsdMatrix& matrix,
                          const std::vector<std::string>& meta_lines) {
  std::string out;
  for (const auto& line : meta_lines) out += "# " + line + "\n";
  std::vector<std::string> header{"model"};
  header.insert(header.end(), matrix.model_ids.begin(),
                matrix.model_ids.end());
  out += csv::to_line(header) + "\n";
  const std::size_t m = matrix.model_ids.size();
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<std::string> fields{matrix.model_ids[i]};
    for (std::size_t j = 0; j < m; ++j) {
      fields.push_back(csv::format_double(matrix.at(i, j)));
    }
    out += csv::to_line(fields) + "\n";
  }
  return out;
}

}  // namespace rmsel::pretrain_probe
