#include "rmsel/report.hpp"

#include <fstream>
#include <functional>
#include <set>

#include <json.hpp>

#include "rmsel/csv.hpp"
#include "rmsel/errors.hpp"
#include "rmsel/hash.hpp"
#include "rmsel/merge_search.hpp"
#include "rmsel/pretrain_probe.hpp"
#include "rmsel/version.hpp"

namespace rmsel::report {

namespace {

using nlohmann::json;

json meta_to_json(const Meta& meta) {
  json doc;
  doc["version"] = kVersion;
  doc["seed"] = meta.seed;
  json inputs = json::object();
  for (const auto& [path, digest] : meta.input_hashes) inputs[path] = digest;
  doc["inputs"] = inputs;
  return doc;
}

std::string category_label(ingest::Category c) {
  return std::string(ingest::category_name(c));
}

}  // namespace

std::vector<std::string> meta_lines(const Meta& meta) {
  std::vector<std::string> lines;
  lines.push_back("rmsel " + std::string(kVersion));
  lines.push_back("seed: " + std::to_string(meta.seed));
  for (const auto& [path, digest] : meta.input_hashes) {
    lines.push_back("input: " + path + " fnv1a:" + digest);
  }
  return lines;
}

std::string gains_to_csv(const std::vector<leaderboard::GroupGains>& groups,
                         const Meta& meta) {
  std::string out;
  for (const auto& line : meta_lines(meta)) out += "# " + line + "\n";
  out += "group,model,reference,category,gain_pct\n";
  for (const auto& group : groups) {
    for (const auto& gain : group.gains) {
      out += csv::to_line({std::string(ingest::size_group_name(group.group)),
                           gain.model, gain.reference, gain.category,
                           csv::format_double(gain.gain_pct)}) +
             "\n";
    }
  }
  return out;
}

std::string gains_to_json(const std::vector<leaderboard::GroupGains>& groups,
                          const Meta& meta) {
  json doc;
  doc["schema"] = "rmsel.gains.v1";
  doc["meta"] = meta_to_json(meta);
  doc["groups"] = json::array();
  for (const auto& group : groups) {
    json g;
    g["group"] = std::string(ingest::size_group_name(group.group));
    g["reference"] = group.reference;
    g["gains"] = json::array();
    for (const auto& gain : group.gains) {
      g["gains"].push_back({{"model", gain.model},
                            {"category", gain.category},
                            {"gain_pct", gain.gain_pct}});
    }
    doc["groups"].push_back(std::move(g));
  }
  return doc.dump(2);
}

std::string deltas_to_csv(const std::vector<leaderboard::StageDeltas>& deltas,
                          const Meta& meta) {
  std::string out;
  for (const auto& line : meta_lines(meta)) out += "# " + line + "\n";
  out += "model,stage,category,delta_pct\n";
  for (const auto& row : deltas) {
    for (std::size_t k = 0; k < ingest::kAllCategories.size(); ++k) {
      out += csv::to_line({row.model, row.stage,
                           category_label(ingest::kAllCategories[k]),
                           csv::format_double(row.deltas[k])}) +
             "\n";
    }
  }
  return out;
}

std::string deltas_to_json(const std::vector<leaderboard::StageDeltas>& deltas,
                           const Meta& meta) {
  json doc;
  doc["schema"] = "rmsel.post_deltas.v1";
  doc["meta"] = meta_to_json(meta);
  doc["rows"] = json::array();
  for (const auto& row : deltas) {
    json r;
    r["model"] = row.model;
    r["stage"] = row.stage;
    for (std::size_t k = 0; k < ingest::kAllCategories.size(); ++k) {
      r[category_label(ingest::kAllCategories[k])] = row.deltas[k];
    }
    doc["rows"].push_back(std::move(r));
  }
  return doc.dump(2);
}

std::string method_diff_to_csv(
    const std::vector<std::pair<std::string, double>>& diffs,
    const Meta& meta) {
  std::string out;
  for (const auto& line : meta_lines(meta)) out += "# " + line + "\n";
  out += "model,regression_minus_bt\n";
  for (const auto& [model, diff] : diffs) {
    out += csv::to_line({model, csv::format_double(diff)}) + "\n";
  }
  return out;
}

std::string method_diff_to_json(
    const std::vector<std::pair<std::string, double>>& diffs,
    const Meta& meta) {
  json doc;
  doc["schema"] = "rmsel.method_diff.v1";
  doc["meta"] = meta_to_json(meta);
  doc["rows"] = json::array();
  for (const auto& [model, diff] : diffs) {
    doc["rows"].push_back({{"model", model}, {"regression_minus_bt", diff}});
  }
  return doc.dump(2);
}

std::string correlation_to_csv(const stats::CorrelationReport& report,
                               const Meta& meta) {
  std::string out;
  for (const auto& line : meta_lines(meta)) out += "# " + line + "\n";
  out += "# alpha: " + csv::format_double(report.alpha) + "\n";
  out += "# r_crit: " + csv::format_double(report.r_crit) + "\n";
  out += "# n: " + std::to_string(report.n) + "\n";
  out += "benchmark,category,pearson,spearman,sig_pearson,sig_spearman\n";
  for (const auto& entry : report.entries) {
    const std::string p =
        entry.pearson ? csv::format_double(*entry.pearson) : "undefined";
    const std::string s =
        entry.spearman ? csv::format_double(*entry.spearman) : "undefined";
    out += csv::to_line({entry.benchmark, category_label(entry.category), p, s,
                         entry.significant_pearson ? "true" : "false",
                         entry.significant_spearman ? "true" : "false"}) +
           "\n";
  }
  return out;
}

std::string correlation_to_json(const stats::CorrelationReport& report,
                                const Meta& meta) {
  json doc;
  doc["schema"] = "rmsel.correlation.v1";
  doc["meta"] = meta_to_json(meta);
  doc["alpha"] = report.alpha;
  doc["r_crit"] = report.r_crit;
  doc["n"] = report.n;
  doc["entries"] = json::array();
  for (const auto& entry : report.entries) {
    json e;
    e["benchmark"] = entry.benchmark;
    e["category"] = category_label(entry.category);
    if (entry.pearson) e["pearson"] = *entry.pearson;
    else e["pearson"] = "undefined";
    if (entry.spearman) e["spearman"] = *entry.spearman;
    else e["spearman"] = "undefined";
    e["sig_pearson"] = entry.significant_pearson;
    e["sig_spearman"] = entry.significant_spearman;
    doc["entries"].push_back(std::move(e));
  }
  return doc.dump(2);
}

std::string curves_to_csv(const std::vector<coverage::CoverageCurve>& curves,
                          const Meta& meta) {
  std::string out;
  for (const auto& line : meta_lines(meta)) out += "# " + line + "\n";
  out += "benchmark,k,coverage\n";
  for (const auto& curve : curves) {
    for (const auto& [k, value] : curve.points) {
      out += csv::to_line({curve.benchmark, std::to_string(k),
                           csv::format_double(value)}) +
             "\n";
    }
  }
  return out;
}

std::string retained_to_json(const std::vector<std::string>& retained,
                             const std::map<std::size_t, double>& thresholds,
                             const Meta& meta) {
  json doc;
  doc["schema"] = "rmsel.retained.v1";
  doc["meta"] = meta_to_json(meta);
  json th = json::object();
  for (const auto& [k, v] : thresholds) th[std::to_string(k)] = v;
  doc["thresholds"] = th;
  doc["retained"] = retained;
  return doc.dump(2);
}

std::string cv_to_json(const predictor::CVResult& result, const Meta& meta) {
  json doc;
  doc["schema"] = "rmsel.cv_report.v1";
  doc["meta"] = meta_to_json(meta);
  doc["folds"] = result.folds;
  doc["cv_seed"] = result.seed;
  doc["best_index"] = result.best_index;
  doc["points"] = json::array();
  for (const auto& point : result.points) {
    doc["points"].push_back({{"degree", point.point.degree},
                             {"alpha", point.point.alpha},
                             {"l1_ratio", point.point.l1_ratio},
                             {"mean_mae", point.mean_mae},
                             {"all_converged", point.all_converged}});
  }
  return doc.dump(2);
}

std::string coefficients_to_csv(const predictor::ElasticNetModel& model,
                                const Meta& meta) {
  std::string out;
  for (const auto& line : meta_lines(meta)) out += "# " + line + "\n";
  out += "feature,coefficient\n";
  for (const auto& [name, coef] : predictor::nonzero_features(model)) {
    out += csv::to_line({name, csv::format_double(coef)}) + "\n";
  }
  return out;
}

namespace {

struct ArtifactSink {
  std::filesystem::path out_dir;
  std::vector<std::pair<std::string, std::string>> artifacts;  // name, hash
  std::vector<std::pair<std::string, std::string>> skipped;

  void write(const std::string& name, const std::string& content) {
    const auto path = out_dir / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << content;
    out.close();
    artifacts.emplace_back(name, hash::fingerprint(content));
  }

  void attempt(const std::string& name, const std::function<std::string()>& make) {
    try {
      write(name, make());
    } catch (const std::exception& e) {
      skipped.emplace_back(name, e.what());
    }
  }

  void skip(const std::string& name, const std::string& reason) {
    skipped.emplace_back(name, reason);
  }
};

}  // namespace

ReportOutcome report_all(const ReportConfig& config) {
  std::filesystem::create_directories(config.out_dir);

  Meta meta;
  meta.seed = config.seed;
  auto note_input = [&](const std::filesystem::path& path) {
    meta.input_hashes.emplace_back(path.generic_string(),
                                   hash::file_fingerprint(path));
  };
  for (const auto name :
       {"models.csv", "rewardbench_bt.csv", "rewardbench_regression.csv",
        "post_training.csv"}) {
    note_input(config.fixtures_dir / name);
  }
  if (config.matrix_path) note_input(*config.matrix_path);
  if (config.topics_path) note_input(*config.topics_path);
  if (config.presence_path) note_input(*config.presence_path);
  if (config.alias_path) note_input(*config.alias_path);
  if (config.pairs_path) note_input(*config.pairs_path);

  const auto fixtures = ingest::load_fixture_set(config.fixtures_dir);

  ArtifactSink sink;
  sink.out_dir = config.out_dir;

  // Fixture integrity: category mean vs reported overall, both tables.
  sink.attempt("fixture_integrity.csv", [&]() {
    std::string out;
    for (const auto& line : meta_lines(meta)) out += "# " + line + "\n";
    out += "table,model,category_mean,overall,consistent\n";
    for (const auto& [label, table] :
         {std::pair<std::string, const ingest::RewardBenchTable*>{
              "bradley_terry", &fixtures.bradley_terry},
          {"regression", &fixtures.regression}}) {
      for (const auto& id : table->order) {
        const auto& s = table->scores.at(id);
        const double mean =
            (s.chat + s.chat_hard + s.safety + s.reasoning) / 4.0;
        out += csv::to_line({label, id, csv::format_double(mean),
                             csv::format_double(s.overall),
                             ingest::overall_consistent(s) ? "true" : "false"}) +
               "\n";
      }
    }
    return out;
  });

  for (const auto& [suffix, table] :
       {std::pair<std::string, const ingest::RewardBenchTable*>{
            "bt", &fixtures.bradley_terry},
        {"regression", &fixtures.regression}}) {
    const auto* table_ptr = table;
    sink.attempt("gains_" + suffix + ".csv", [&, table_ptr]() {
      return gains_to_csv(leaderboard::group_gains(*table_ptr, fixtures.models),
                          meta);
    });
    sink.attempt("gains_" + suffix + ".json", [&, table_ptr]() {
      return gains_to_json(leaderboard::group_gains(*table_ptr, fixtures.models),
                           meta);
    });
  }

  sink.attempt("post_deltas.csv", [&]() {
    return deltas_to_csv(leaderboard::post_training_deltas(fixtures.post_training),
                         meta);
  });
  sink.attempt("post_deltas.json", [&]() {
    return deltas_to_json(leaderboard::post_training_deltas(fixtures.post_training),
                          meta);
  });

  sink.attempt("method_diff.csv", [&]() {
    return method_diff_to_csv(
        leaderboard::method_diff(fixtures.bradley_terry, fixtures.regression),
        meta);
  });
  sink.attempt("method_diff.json", [&]() {
    return method_diff_to_json(
        leaderboard::method_diff(fixtures.bradley_terry, fixtures.regression),
        meta);
  });

  if (config.matrix_path) {
    ingest::ScoreMatrix matrix =
        config.topics_path
            ? ingest::load_score_matrix(*config.matrix_path, *config.topics_path)
            : ingest::load_score_matrix(*config.matrix_path);

    sink.attempt("correlation.csv", [&]() {
      return correlation_to_csv(
          stats::correlation_report(matrix, fixtures.regression, config.alpha),
          meta);
    });
    sink.attempt("correlation.json", [&]() {
      return correlation_to_json(
          stats::correlation_report(matrix, fixtures.regression, config.alpha),
          meta);
    });

    const std::size_t k_max = std::min(config.k_max, matrix.rows());
    const std::size_t k_min = std::min(config.k_min, k_max);

    std::map<std::string, double> target;
    bool target_ok = true;
    for (const auto& id : matrix.row_ids) {
      const auto it = fixtures.regression.scores.find(id);
      if (it == fixtures.regression.scores.end()) {
        target_ok = false;
        break;
      }
      target[id] = it->second.overall;
    }

    if (target_ok) {
      std::vector<coverage::CoverageCurve> curves;
      for (std::size_t c = 0; c < matrix.cols(); ++c) {
        std::map<std::string, double> bench;
        for (std::size_t r = 0; r < matrix.rows(); ++r) {
          bench[matrix.row_ids[r]] = matrix.at(r, c);
        }
        curves.push_back(coverage::coverage_curve(bench, target, k_min, k_max,
                                                  matrix.column_ids[c]));
      }
      sink.attempt("coverage.csv", [&]() { return curves_to_csv(curves, meta); });
      sink.attempt("retained.json", [&]() {
        return retained_to_json(
            coverage::filter_benchmarks(curves, config.retain_thresholds),
            config.retain_thresholds, meta);
      });

      std::vector<predictor::Row> X;
      std::vector<double> y;
      for (std::size_t r = 0; r < matrix.rows(); ++r) {
        predictor::Row row(matrix.cols());
        for (std::size_t c = 0; c < matrix.cols(); ++c) row[c] = matrix.at(r, c);
        X.push_back(std::move(row));
        y.push_back(target.at(matrix.row_ids[r]));
      }
      try {
        const auto cv =
            predictor::cross_validate(X, y, matrix.column_ids, config.grid, 10,
                                      config.seed, config.threads);
        const auto model = predictor::fit_final(X, y, matrix.column_ids,
                                                cv.best().point, config.seed);
        sink.attempt("cv_report.json", [&]() { return cv_to_json(cv, meta); });
        sink.attempt("model.json",
                     [&]() { return predictor::model_to_json(model); });
        sink.attempt("coefficients.csv",
                     [&]() { return coefficients_to_csv(model, meta); });
        sink.attempt("predicted_coverage.csv", [&]() {
          return curves_to_csv({predictor::predicted_coverage(
                                   model, matrix, fixtures.regression, k_min,
                                   k_max)},
                               meta);
        });
      } catch (const std::exception& e) {
        sink.skip("cv_report.json", e.what());
        sink.skip("model.json", e.what());
        sink.skip("coefficients.csv", e.what());
        sink.skip("predicted_coverage.csv", e.what());
      }
    } else {
      const std::string reason =
          "matrix rows missing from the regression score table";
      for (const auto name : {"coverage.csv", "retained.json",
                              "cv_report.json", "model.json",
                              "coefficients.csv", "predicted_coverage.csv"}) {
        sink.skip(name, reason);
      }
    }

    sink.attempt("pca_ratios.csv", [&]() {
      return pca::ratios_to_csv(pca::pca_fit(matrix), meta_lines(meta));
    });
    sink.attempt("pca_loadings.csv", [&]() {
      return pca::loadings_to_csv(pca::pca_fit(matrix), meta_lines(meta));
    });
    sink.attempt("pca_scree.json", [&]() {
      return pca::scree_to_json(pca::pca_fit(matrix));
    });
  } else {
    const std::string reason = "no benchmark matrix supplied";
    for (const auto name :
         {"correlation.csv", "correlation.json", "coverage.csv",
          "retained.json", "cv_report.json", "model.json", "coefficients.csv",
          "predicted_coverage.csv", "pca_ratios.csv", "pca_loadings.csv",
          "pca_scree.json"}) {
      sink.skip(name, reason);
    }
  }

  if (config.presence_path) {
    try {
      const auto docs = pretrain_probe::load_docs(*config.presence_path);
      std::map<std::string, std::vector<pretrain_probe::TokenLogProbDoc>>
          by_model;
      for (const auto& doc : docs) by_model[doc.model_id].push_back(doc);
      std::vector<pretrain_probe::PresenceScoreSet> sets;
      for (const auto& [model_id, model_docs] : by_model) {
        sets.push_back(pretrain_probe::score_set(model_docs, model_id,
                                                 config.token_limit));
      }
      if (config.alias_path) {
        sets = pretrain_probe::apply_aliases(
            sets, pretrain_probe::load_alias_table(*config.alias_path));
      }
      std::sort(sets.begin(), sets.end(), [](const auto& a, const auto& b) {
        return a.model_id < b.model_id;
      });

      for (const auto& set : sets) {
        sink.attempt("presence_scores_" + set.model_id + ".csv", [&]() {
          return pretrain_probe::scores_to_csv(set, meta_lines(meta));
        });
        sink.attempt("presence_stats_" + set.model_id + ".json",
                     [&]() { return pretrain_probe::stats_to_json(set); });
        sink.attempt("presence_histogram_" + set.model_id + ".json", [&]() {
          return pretrain_probe::histogram_to_json(set, config.bins);
        });
      }

      sink.attempt("presence_features.csv", [&]() {
        std::string out;
        for (const auto& line : meta_lines(meta)) out += "# " + line + "\n";
        out += "model";
        for (const auto category : pretrain_probe::kCanonicalCategories) {
          std::string name(category);
          std::transform(name.begin(), name.end(), name.begin(),
                         [](unsigned char c) { return std::tolower(c); });
          out += ",presence_" + name;
        }
        out += "\n";
        for (const auto& set : sets) {
          const auto features = pretrain_probe::export_presence_features(set);
          std::vector<std::string> fields{set.model_id};
          for (const auto& [name, value] : features) {
            (void)name;
            fields.push_back(csv::format_double(value));
          }
          out += csv::to_line(fields) + "\n";
        }
        return out;
      });

      if (sets.size() >= 2) {
        sink.attempt("jsd_matrix.csv", [&]() {
          return pretrain_probe::matrix_to_csv(
              pretrain_probe::jsd_matrix(sets, config.bins), meta_lines(meta));
        });
      } else {
        sink.skip("jsd_matrix.csv", "need score sets for at least 2 models");
      }
    } catch (const std::exception& e) {
      sink.skip("presence artifacts", e.what());
    }
  } else {
    sink.skip("presence artifacts", "no per-token log-prob file supplied");
  }

  if (config.pairs_path) {
    sink.attempt("merge_result.json", [&]() {
      const auto samples = merge_search::load_samples(*config.pairs_path);
      return merge_search::result_to_json(
          merge_search::search(samples, config.threads));
    });
  } else {
    sink.skip("merge_result.json", "no attribute pairs file supplied");
  }

  // Manifest: inputs, artifact fingerprints, skip reasons.
  json manifest;
  manifest["schema"] = "rmsel.manifest.v1";
  manifest["meta"] = meta_to_json(meta);
  manifest["artifacts"] = json::array();
  for (const auto& [name, digest] : sink.artifacts) {
    manifest["artifacts"].push_back({{"name", name}, {"fnv1a", digest}});
  }
  manifest["skipped"] = json::array();
  for (const auto& [name, reason] : sink.skipped) {
    manifest["skipped"].push_back({{"name", name}, {"reason", reason}});
  }
  const auto manifest_path = config.out_dir / "manifest.json";
  {
    std::ofstream out(manifest_path, std::ios::binary);
    if (!out) throw IoError("cannot write " + manifest_path.string());
    out << manifest.dump(2) << "\n";
  }

  ReportOutcome outcome;
  for (const auto& [name, digest] : sink.artifacts) {
    (void)digest;
    outcome.produced.push_back(name);
  }
  outcome.skipped = sink.skipped;
  outcome.manifest_path = manifest_path;
  return outcome;
}

}  // namespace rmsel::report
