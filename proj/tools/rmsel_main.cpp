// rmsel: reward-model base-model selection toolkit.
//
// Subcommands analyze ingested score tables: leaderboard gains and
// post-training deltas, correlation/coverage screens, an elastic-net
// performance predictor, merge-weight grid search, desk-scale reward-head
// training, pre-training presence scores with JSD matrices, and PCA.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rmsel/coverage.hpp"
#include "rmsel/csv.hpp"
#include "rmsel/errors.hpp"
#include "rmsel/hash.hpp"
#include "rmsel/ingest.hpp"
#include "rmsel/kernels.hpp"
#include "rmsel/leaderboard.hpp"
#include "rmsel/merge_search.hpp"
#include "rmsel/pca.hpp"
#include "rmsel/predictor.hpp"
#include "rmsel/pretrain_probe.hpp"
#include "rmsel/report.hpp"
#include "rmsel/rng.hpp"
#include "rmsel/stats.hpp"
#include "rmsel/toy_rm.hpp"
#include "rmsel/version.hpp"

namespace {

namespace fs = std::filesystem;
using rmsel::report::Meta;

struct GlobalOptions {
  std::uint64_t seed = 0;
  unsigned threads = 1;
  fs::path out_dir = "out";
};

void write_artifact(const GlobalOptions& global, const std::string& name,
                    const std::string& content) {
  fs::create_directories(global.out_dir);
  const fs::path path = global.out_dir / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw rmsel::IoError("cannot write " + path.string());
  out << content;
  std::cout << "wrote " << path.string() << "\n";
}

Meta make_meta(const GlobalOptions& global, const std::vector<fs::path>& inputs) {
  Meta meta;
  meta.seed = global.seed;
  for (const auto& path : inputs) {
    meta.input_hashes.emplace_back(path.generic_string(),
                                   rmsel::hash::file_fingerprint(path));
  }
  return meta;
}

std::map<std::string, double> rb_category_map(
    const rmsel::ingest::RewardBenchTable& table,
    rmsel::ingest::Category category,
    const std::vector<std::string>& restrict_ids) {
  std::map<std::string, double> out;
  for (const auto& id : restrict_ids) {
    const auto it = table.scores.find(id);
    if (it == table.scores.end()) {
      throw rmsel::ValidationError(rmsel::errc::missing_key,
                                   id + " missing from score table");
    }
    out[id] = it->second.category(category);
  }
  return out;
}

rmsel::ingest::Category parse_category(const std::string& name) {
  for (const auto category : rmsel::ingest::kAllCategories) {
    if (rmsel::ingest::category_name(category) == name) return category;
  }
  throw rmsel::ValidationError(rmsel::errc::out_of_range,
                               "unknown category '" + name + "'");
}

std::map<std::size_t, double> parse_retain(
    const std::vector<std::string>& pairs) {
  std::map<std::size_t, double> thresholds;
  for (const auto& pair : pairs) {
    const auto eq = pair.find('=');
    bool ok = eq != std::string::npos;
    std::size_t k = 0;
    double v = 0.0;
    if (ok) {
      try {
        k = std::stoul(pair.substr(0, eq));
      } catch (...) {
        ok = false;
      }
      v = rmsel::csv::parse_double(pair.substr(eq + 1), ok);
    }
    if (!ok) {
      throw rmsel::ValidationError(rmsel::errc::out_of_range,
                                   "--retain expects k=coverage, got '" +
                                       pair + "'");
    }
    thresholds[k] = v;
  }
  return thresholds;
}

const rmsel::ingest::RewardBenchTable& pick_table(
    const rmsel::ingest::FixtureSet& fixtures, const std::string& method) {
  if (method == "regression") return fixtures.regression;
  if (method == "bt") return fixtures.bradley_terry;
  throw rmsel::ValidationError(rmsel::errc::out_of_range,
                               "method must be 'regression' or 'bt'");
}

std::vector<rmsel::coverage::CoverageCurve> matrix_curves(
    const rmsel::ingest::ScoreMatrix& matrix,
    const std::map<std::string, double>& target, std::size_t k_min,
    std::size_t k_max) {
  std::vector<rmsel::coverage::CoverageCurve> curves;
  for (std::size_t c = 0; c < matrix.cols(); ++c) {
    std::map<std::string, double> bench;
    for (std::size_t r = 0; r < matrix.rows(); ++r) {
      bench[matrix.row_ids[r]] = matrix.at(r, c);
    }
    curves.push_back(rmsel::coverage::coverage_curve(bench, target, k_min,
                                                     k_max,
                                                     matrix.column_ids[c]));
  }
  return curves;
}

void build_xy(const rmsel::ingest::ScoreMatrix& matrix,
              const rmsel::ingest::RewardBenchTable& table,
              std::vector<rmsel::predictor::Row>& X, std::vector<double>& y) {
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    const auto it = table.scores.find(matrix.row_ids[r]);
    if (it == table.scores.end()) {
      throw rmsel::ValidationError(rmsel::errc::missing_key,
                                   matrix.row_ids[r] +
                                       " missing from score table");
    }
    rmsel::predictor::Row row(matrix.cols());
    for (std::size_t c = 0; c < matrix.cols(); ++c) row[c] = matrix.at(r, c);
    X.push_back(std::move(row));
    y.push_back(it->second.overall);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reward-model base-model selection toolkit"};
  app.set_version_flag("--version", std::string("rmsel ") + rmsel::kVersion);
  app.set_config("--config", "", "flat key=value config file");
  app.require_subcommand(1);

  GlobalOptions global;
  app.add_option("--seed", global.seed, "seed recorded in artifacts")
      ->capture_default_str();
  app.add_option("--threads", global.threads, "worker thread budget")
      ->capture_default_str();
  app.add_option("--out", global.out_dir, "output directory")
      ->capture_default_str();

  fs::path fixtures_dir = "data/fixtures";
  std::string method = "regression";
  std::string category_name = "overall";
  fs::path matrix_path;
  fs::path topics_path;
  double alpha = 0.05;
  std::size_t k_min = 5;
  std::size_t k_max = 30;
  std::vector<std::string> retain_args;
  std::vector<std::string> reference_ids;
  bool emit_json_mirrors = false;

  // ---- ingest-check ----
  auto* cmd_ingest = app.add_subcommand(
      "ingest-check", "load and validate fixtures (and optional matrix)");
  cmd_ingest->add_option("--fixtures", fixtures_dir, "fixtures directory")
      ->capture_default_str();
  cmd_ingest->add_option("--matrix", matrix_path, "benchmark score matrix");
  cmd_ingest->add_option("--topics", topics_path, "metric,topic sidecar");
  cmd_ingest->add_flag("--emit-json", emit_json_mirrors,
                       "write JSON mirrors of each table");

  // ---- gains ----
  auto* cmd_gains = app.add_subcommand(
      "gains", "within-group relative gains vs the reference model");
  cmd_gains->add_option("--fixtures", fixtures_dir, "fixtures directory")
      ->capture_default_str();
  cmd_gains->add_option("--method", method, "regression or bt")
      ->capture_default_str();
  cmd_gains->add_option("--category", category_name, "score category")
      ->capture_default_str();
  cmd_gains->add_option("--reference", reference_ids,
                        "explicit reference model id (repeatable)");

  // ---- post-deltas ----
  auto* cmd_deltas =
      app.add_subcommand("post-deltas", "post-training stage deltas");
  cmd_deltas->add_option("--fixtures", fixtures_dir, "fixtures directory")
      ->capture_default_str();

  // ---- method-diff ----
  auto* cmd_diff = app.add_subcommand(
      "method-diff", "regression minus Bradley-Terry overall per model");
  cmd_diff->add_option("--fixtures", fixtures_dir, "fixtures directory")
      ->capture_default_str();

  // ---- correlate ----
  auto* cmd_correlate = app.add_subcommand(
      "correlate", "benchmark vs category correlations with significance");
  cmd_correlate->add_option("--fixtures", fixtures_dir, "fixtures directory")
      ->capture_default_str();
  cmd_correlate->add_option("--matrix", matrix_path, "benchmark score matrix")
      ->required();
  cmd_correlate->add_option("--topics", topics_path, "metric,topic sidecar");
  cmd_correlate->add_option("--method", method, "target table")
      ->capture_default_str();
  cmd_correlate->add_option("--alpha", alpha, "significance level")
      ->capture_default_str();

  // ---- coverage ----
  auto* cmd_coverage =
      app.add_subcommand("coverage", "top-k coverage curves per benchmark");
  cmd_coverage->add_option("--fixtures", fixtures_dir, "fixtures directory")
      ->capture_default_str();
  cmd_coverage->add_option("--matrix", matrix_path, "benchmark score matrix")
      ->required();
  cmd_coverage->add_option("--method", method, "target table")
      ->capture_default_str();
  cmd_coverage->add_option("--category", category_name, "target category")
      ->capture_default_str();
  cmd_coverage->add_option("--k-min", k_min, "smallest k")
      ->capture_default_str();
  cmd_coverage->add_option("--k-max", k_max, "largest k")
      ->capture_default_str();

  // ---- filter ----
  auto* cmd_filter = app.add_subcommand(
      "filter", "retain benchmarks meeting coverage thresholds");
  cmd_filter->add_option("--fixtures", fixtures_dir, "fixtures directory")
      ->capture_default_str();
  cmd_filter->add_option("--matrix", matrix_path, "benchmark score matrix")
      ->required();
  cmd_filter->add_option("--method", method, "target table")
      ->capture_default_str();
  cmd_filter->add_option("--k-min", k_min, "smallest k")
      ->capture_default_str();
  cmd_filter->add_option("--k-max", k_max, "largest k")
      ->capture_default_str();
  cmd_filter->add_option("--retain", retain_args,
                         "k=coverage threshold (repeatable)");

  // ---- fit ----
  fs::path presence_features_path;
  fs::path model_out = "model.json";
  std::size_t folds = 10;
  std::vector<int> degrees;
  std::vector<double> alphas;
  std::vector<double> l1_ratios;
  auto* cmd_fit = app.add_subcommand(
      "fit", "cross-validated elastic-net fit of overall score");
  cmd_fit->add_option("--fixtures", fixtures_dir, "fixtures directory")
      ->capture_default_str();
  cmd_fit->add_option("--matrix", matrix_path, "benchmark score matrix")
      ->required();
  cmd_fit->add_option("--method", method, "target table")
      ->capture_default_str();
  cmd_fit->add_option("--folds", folds, "cross-validation folds")
      ->capture_default_str();
  cmd_fit->add_option("--degrees", degrees, "degree grid override");
  cmd_fit->add_option("--alphas", alphas, "alpha grid override");
  cmd_fit->add_option("--l1-ratios", l1_ratios, "l1_ratio grid override");
  cmd_fit->add_option("--presence", presence_features_path,
                      "presence feature table to augment with");
  cmd_fit->add_option("--model-out", model_out,
                      "model file name inside --out")
      ->capture_default_str();

  // ---- predict ----
  fs::path model_path;
  std::vector<std::string> feature_args;
  auto* cmd_predict =
      app.add_subcommand("predict", "predict overall score from a model");
  cmd_predict->add_option("--model", model_path, "fitted model JSON")
      ->required();
  cmd_predict->add_option("--matrix", matrix_path,
                          "predict every row of this matrix");
  cmd_predict->add_option("--feature", feature_args,
                          "name=value raw feature (repeatable)");

  // ---- coefficients ----
  auto* cmd_coefficients =
      app.add_subcommand("coefficients", "non-zero model coefficients");
  cmd_coefficients->add_option("--model", model_path, "fitted model JSON")
      ->required();

  // ---- merge-search ----
  fs::path pairs_path;
  std::size_t subsample_count = 0;
  auto* cmd_merge = app.add_subcommand(
      "merge-search", "exhaustive merge-weight grid search");
  cmd_merge->add_option("--pairs", pairs_path, "attribute pair CSV")
      ->required();
  cmd_merge->add_option("--subsample", subsample_count,
                        "use a seeded subset of pairs");

  // ---- toy-train ----
  std::string toy_mode = "bt";
  fs::path toy_data;
  std::size_t toy_pairs = 500;
  std::size_t toy_dim = 8;
  std::size_t toy_attributes = 5;
  std::size_t toy_epochs = 10;
  double toy_lr = 1e-2;
  std::size_t toy_batch = 64;
  std::size_t toy_warmup = 20;
  auto* cmd_toy = app.add_subcommand(
      "toy-train", "train a linear reward head on feature vectors");
  cmd_toy->add_option("--mode", toy_mode, "bt or reg")->capture_default_str();
  cmd_toy->add_option("--data", toy_data,
                      "dataset CSV (synthetic when omitted)");
  cmd_toy->add_option("--pairs-n", toy_pairs, "synthetic pair count")
      ->capture_default_str();
  cmd_toy->add_option("--dim", toy_dim, "feature dimension")
      ->capture_default_str();
  cmd_toy->add_option("--attributes", toy_attributes,
                      "attribute count (reg mode)")
      ->capture_default_str();
  cmd_toy->add_option("--epochs", toy_epochs, "epochs")->capture_default_str();
  cmd_toy->add_option("--lr", toy_lr, "learning rate")->capture_default_str();
  cmd_toy->add_option("--batch-size", toy_batch, "batch size")
      ->capture_default_str();
  cmd_toy->add_option("--warmup", toy_warmup, "warm-up steps")
      ->capture_default_str();

  // ---- probe-score ----
  fs::path docs_path;
  fs::path alias_path;
  std::size_t token_limit = rmsel::pretrain_probe::kDefaultTokenLimit;
  std::size_t bins = rmsel::pretrain_probe::kDefaultBins;
  auto* cmd_probe_score = app.add_subcommand(
      "probe-score", "presence scores from per-token log-prob files");
  cmd_probe_score->add_option("--docs", docs_path, "JSONL log-prob records")
      ->required();
  cmd_probe_score->add_option("--alias", alias_path,
                              "alias,source model table");
  cmd_probe_score->add_option("--n-limit", token_limit, "token limit")
      ->capture_default_str();
  cmd_probe_score->add_option("--bins", bins, "histogram bins")
      ->capture_default_str();

  // ---- probe-jsd ----
  auto* cmd_probe_jsd = app.add_subcommand(
      "probe-jsd", "pairwise Jensen-Shannon distances between models");
  cmd_probe_jsd->add_option("--docs", docs_path, "JSONL log-prob records")
      ->required();
  cmd_probe_jsd->add_option("--alias", alias_path, "alias,source model table");
  cmd_probe_jsd->add_option("--n-limit", token_limit, "token limit")
      ->capture_default_str();
  cmd_probe_jsd->add_option("--bins", bins, "histogram bins")
      ->capture_default_str();

  // ---- pca ----
  bool no_standardize = false;
  auto* cmd_pca = app.add_subcommand(
      "pca", "principal components of the benchmark matrix");
  cmd_pca->add_option("--matrix", matrix_path, "benchmark score matrix")
      ->required();
  cmd_pca->add_option("--topics", topics_path, "metric,topic sidecar");
  cmd_pca->add_flag("--no-standardize", no_standardize,
                    "center only, skip unit-variance scaling");

  // ---- report-all ----
  auto* cmd_report =
      app.add_subcommand("report-all", "every artifact the inputs allow");
  cmd_report->add_option("--fixtures", fixtures_dir, "fixtures directory")
      ->capture_default_str();
  cmd_report->add_option("--matrix", matrix_path, "benchmark score matrix");
  cmd_report->add_option("--topics", topics_path, "metric,topic sidecar");
  cmd_report->add_option("--presence", docs_path, "JSONL log-prob records");
  cmd_report->add_option("--alias", alias_path, "alias,source model table");
  cmd_report->add_option("--pairs", pairs_path, "attribute pair CSV");
  cmd_report->add_option("--alpha", alpha, "significance level")
      ->capture_default_str();
  cmd_report->add_option("--k-min", k_min, "smallest k")
      ->capture_default_str();
  cmd_report->add_option("--k-max", k_max, "largest k")
      ->capture_default_str();
  cmd_report->add_option("--retain", retain_args,
                         "k=coverage threshold (repeatable)");
  cmd_report->add_option("--bins", bins, "histogram bins")
      ->capture_default_str();
  cmd_report->add_option("--n-limit", token_limit, "token limit")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (cmd_ingest->parsed()) {
      const auto fixtures = rmsel::ingest::load_fixture_set(fixtures_dir);
      std::cout << "models: " << fixtures.models.size() << "\n"
                << "bradley-terry rows: "
                << fixtures.bradley_terry.order.size() << "\n"
                << "regression rows: " << fixtures.regression.order.size()
                << "\n"
                << "post-training stages: "
                << fixtures.post_training.stages.size() << "\n";
      if (!matrix_path.empty()) {
        const auto matrix =
            topics_path.empty()
                ? rmsel::ingest::load_score_matrix(matrix_path)
                : rmsel::ingest::load_score_matrix(matrix_path, topics_path);
        std::cout << "matrix: " << matrix.rows() << " x " << matrix.cols()
                  << "\n";
        if (emit_json_mirrors) {
          write_artifact(global, "score_matrix.json",
                         rmsel::ingest::score_matrix_to_json(matrix));
        }
      }
      if (emit_json_mirrors) {
        write_artifact(global, "models.json",
                       rmsel::ingest::model_records_to_json(fixtures.models));
        write_artifact(global, "rewardbench_bt.json",
                       rmsel::ingest::rewardbench_to_json(
                           fixtures.bradley_terry));
        write_artifact(global, "rewardbench_regression.json",
                       rmsel::ingest::rewardbench_to_json(fixtures.regression));
      }
      std::cout << "ok\n";
    } else if (cmd_gains->parsed()) {
      const auto fixtures = rmsel::ingest::load_fixture_set(fixtures_dir);
      const auto& table = pick_table(fixtures, method);
      rmsel::leaderboard::ReferenceRule rule;
      rule.explicit_ids = reference_ids;
      const auto gains = rmsel::leaderboard::group_gains(
          table, fixtures.models, parse_category(category_name), rule);
      const auto meta =
          make_meta(global, {fixtures_dir / "models.csv",
                             fixtures_dir / (method == "bt"
                                                 ? "rewardbench_bt.csv"
                                                 : "rewardbench_regression.csv")});
      write_artifact(global, "gains_" + method + ".csv",
                     rmsel::report::gains_to_csv(gains, meta));
      write_artifact(global, "gains_" + method + ".json",
                     rmsel::report::gains_to_json(gains, meta));
      for (const auto& group : gains) {
        std::cout << rmsel::ingest::size_group_name(group.group)
                  << " reference: " << group.reference << "\n";
      }
    } else if (cmd_deltas->parsed()) {
      const auto fixtures = rmsel::ingest::load_fixture_set(fixtures_dir);
      const auto deltas =
          rmsel::leaderboard::post_training_deltas(fixtures.post_training);
      const auto meta =
          make_meta(global, {fixtures_dir / "post_training.csv"});
      write_artifact(global, "post_deltas.csv",
                     rmsel::report::deltas_to_csv(deltas, meta));
      write_artifact(global, "post_deltas.json",
                     rmsel::report::deltas_to_json(deltas, meta));
    } else if (cmd_diff->parsed()) {
      const auto fixtures = rmsel::ingest::load_fixture_set(fixtures_dir);
      const auto diffs = rmsel::leaderboard::method_diff(
          fixtures.bradley_terry, fixtures.regression);
      const auto meta = make_meta(
          global, {fixtures_dir / "rewardbench_bt.csv",
                   fixtures_dir / "rewardbench_regression.csv"});
      write_artifact(global, "method_diff.csv",
                     rmsel::report::method_diff_to_csv(diffs, meta));
      write_artifact(global, "method_diff.json",
                     rmsel::report::method_diff_to_json(diffs, meta));
    } else if (cmd_correlate->parsed()) {
      const auto fixtures = rmsel::ingest::load_fixture_set(fixtures_dir);
      const auto matrix =
          topics_path.empty()
              ? rmsel::ingest::load_score_matrix(matrix_path)
              : rmsel::ingest::load_score_matrix(matrix_path, topics_path);
      const auto report = rmsel::stats::correlation_report(
          matrix, pick_table(fixtures, method), alpha);
      const auto meta = make_meta(global, {matrix_path});
      write_artifact(global, "correlation.csv",
                     rmsel::report::correlation_to_csv(report, meta));
      write_artifact(global, "correlation.json",
                     rmsel::report::correlation_to_json(report, meta));
      std::cout << "n = " << report.n << ", r_crit = " << report.r_crit
                << "\n";
    } else if (cmd_coverage->parsed() || cmd_filter->parsed()) {
      const auto fixtures = rmsel::ingest::load_fixture_set(fixtures_dir);
      const auto matrix = rmsel::ingest::load_score_matrix(matrix_path);
      const auto& table = pick_table(fixtures, method);
      const auto target = rb_category_map(table, parse_category(category_name),
                                          matrix.row_ids);
      const std::size_t clamped_k_max = std::min(k_max, matrix.rows());
      const std::size_t clamped_k_min = std::min(k_min, clamped_k_max);
      const auto curves =
          matrix_curves(matrix, target, clamped_k_min, clamped_k_max);
      const auto meta = make_meta(global, {matrix_path});
      write_artifact(global, "coverage.csv",
                     rmsel::report::curves_to_csv(curves, meta));
      if (cmd_filter->parsed()) {
        const auto thresholds = retain_args.empty()
                                    ? std::map<std::size_t, double>{{5, 0.4},
                                                                    {10, 0.7}}
                                    : parse_retain(retain_args);
        const auto retained =
            rmsel::coverage::filter_benchmarks(curves, thresholds);
        write_artifact(
            global, "retained.json",
            rmsel::report::retained_to_json(retained, thresholds, meta));
        std::cout << "retained " << retained.size() << " of "
                  << curves.size() << " benchmarks\n";
      }
    } else if (cmd_fit->parsed()) {
      const auto fixtures = rmsel::ingest::load_fixture_set(fixtures_dir);
      const auto matrix = rmsel::ingest::load_score_matrix(matrix_path);
      std::vector<rmsel::predictor::Row> X;
      std::vector<double> y;
      build_xy(matrix, pick_table(fixtures, method), X, y);
      rmsel::predictor::HyperGrid grid;
      if (!degrees.empty()) grid.degrees = degrees;
      if (!alphas.empty()) grid.alphas = alphas;
      if (!l1_ratios.empty()) grid.l1_ratios = l1_ratios;

      std::vector<fs::path> inputs{matrix_path};
      std::vector<std::string> names = matrix.column_ids;
      rmsel::predictor::CVResult cv;
      if (!presence_features_path.empty()) {
        inputs.push_back(presence_features_path);
        const auto table = rmsel::csv::read_file(presence_features_path);
        const auto model_col = table.column("model");
        if (!model_col) {
          throw rmsel::ValidationError(rmsel::errc::bad_schema,
                                       "presence table needs a model column");
        }
        std::vector<std::string> presence_names;
        std::vector<std::size_t> presence_cols;
        for (std::size_t c = 0; c < table.header.size(); ++c) {
          if (c == *model_col) continue;
          presence_names.push_back(table.header[c]);
          presence_cols.push_back(c);
        }
        std::map<std::string, rmsel::predictor::Row> by_model;
        for (const auto& row : table.rows) {
          rmsel::predictor::Row values;
          for (const auto c : presence_cols) {
            bool ok = false;
            values.push_back(rmsel::csv::parse_double(row[c], ok));
            if (!ok) {
              throw rmsel::ValidationError(rmsel::errc::non_numeric_cell,
                                           row[*model_col]);
            }
          }
          by_model[row[*model_col]] = std::move(values);
        }
        std::vector<rmsel::predictor::Row> presence_rows;
        for (const auto& id : matrix.row_ids) {
          const auto it = by_model.find(id);
          if (it == by_model.end()) {
            throw rmsel::ValidationError(rmsel::errc::missing_key,
                                         id + " missing presence features");
          }
          presence_rows.push_back(it->second);
        }
        const auto comparison = rmsel::predictor::augmented_fit(
            X, y, names, presence_rows, presence_names, grid, folds,
            global.seed, global.threads);
        const auto meta = make_meta(global, inputs);
        write_artifact(global, "cv_base.json",
                       rmsel::report::cv_to_json(comparison.base, meta));
        write_artifact(global, "cv_report.json",
                       rmsel::report::cv_to_json(comparison.augmented, meta));
        std::cout << "base MAE " << comparison.base.best().mean_mae
                  << ", augmented MAE "
                  << comparison.augmented.best().mean_mae << " (improvement "
                  << comparison.mae_improvement << ")\n";
        for (std::size_t i = 0; i < X.size(); ++i) {
          X[i].insert(X[i].end(), presence_rows[i].begin(),
                      presence_rows[i].end());
        }
        names.insert(names.end(), presence_names.begin(),
                     presence_names.end());
        cv = comparison.augmented;
      } else {
        cv = rmsel::predictor::cross_validate(X, y, names, grid, folds,
                                              global.seed, global.threads);
        const auto meta = make_meta(global, inputs);
        write_artifact(global, "cv_report.json",
                       rmsel::report::cv_to_json(cv, meta));
      }
      const auto model = rmsel::predictor::fit_final(X, y, names,
                                                     cv.best().point,
                                                     global.seed);
      write_artifact(global, model_out.string(),
                     rmsel::predictor::model_to_json(model));
      std::cout << "best: degree " << cv.best().point.degree << ", alpha "
                << cv.best().point.alpha << ", l1_ratio "
                << cv.best().point.l1_ratio << ", MAE "
                << cv.best().mean_mae << "\n";
    } else if (cmd_predict->parsed()) {
      const auto model = rmsel::predictor::load_model(model_path);
      if (!matrix_path.empty()) {
        const auto matrix = rmsel::ingest::load_score_matrix(matrix_path);
        std::vector<std::size_t> cols;
        for (const auto& name : model.raw_feature_names) {
          const auto idx = matrix.column_index(name);
          if (!idx) {
            throw rmsel::ValidationError(rmsel::errc::unknown_feature,
                                         "matrix has no column '" + name +
                                             "'");
          }
          cols.push_back(*idx);
        }
        std::string out;
        const auto meta = make_meta(global, {model_path, matrix_path});
        for (const auto& line : rmsel::report::meta_lines(meta)) {
          out += "# " + line + "\n";
        }
        out += "model,prediction\n";
        for (std::size_t r = 0; r < matrix.rows(); ++r) {
          std::vector<double> features;
          for (const auto c : cols) features.push_back(matrix.at(r, c));
          out += rmsel::csv::to_line(
                     {matrix.row_ids[r],
                      rmsel::csv::format_double(
                          rmsel::predictor::predict(model, features))}) +
                 "\n";
        }
        write_artifact(global, "predictions.csv", out);
      } else if (!feature_args.empty()) {
        std::map<std::string, double> features;
        for (const auto& arg : feature_args) {
          const auto eq = arg.find('=');
          bool ok = eq != std::string::npos;
          double value = 0.0;
          if (ok) value = rmsel::csv::parse_double(arg.substr(eq + 1), ok);
          if (!ok) {
            throw rmsel::ValidationError(rmsel::errc::out_of_range,
                                         "--feature expects name=value");
          }
          features[arg.substr(0, eq)] = value;
        }
        std::cout << rmsel::csv::format_double(
                         rmsel::predictor::predict(model, features))
                  << "\n";
      } else {
        throw rmsel::ValidationError(rmsel::errc::empty_input,
                                     "predict needs --matrix or --feature");
      }
    } else if (cmd_coefficients->parsed()) {
      const auto model = rmsel::predictor::load_model(model_path);
      const auto meta = make_meta(global, {model_path});
      write_artifact(global, "coefficients.csv",
                     rmsel::report::coefficients_to_csv(model, meta));
      for (const auto& [name, coef] : rmsel::predictor::nonzero_features(model)) {
        std::cout << name << " " << rmsel::csv::format_double(coef) << "\n";
      }
    } else if (cmd_merge->parsed()) {
      auto samples = rmsel::merge_search::load_samples(pairs_path);
      if (subsample_count > 0) {
        samples = rmsel::merge_search::subsample(samples, subsample_count,
                                                 global.seed);
      }
      const auto result =
          rmsel::merge_search::search(samples, global.threads);
      write_artifact(global, "merge_result.json",
                     rmsel::merge_search::result_to_json(result));
      std::cout << "accuracy " << result.accuracy << " at grid index "
                << result.grid_index << "\n";
    } else if (cmd_toy->parsed()) {
      rmsel::toy_rm::OptimizerConfig config;
      config.seed = global.seed;
      config.epochs = toy_epochs;
      config.learning_rate = toy_lr;
      config.batch_size = toy_batch;
      config.warmup_steps = toy_warmup;
      if (toy_mode == "bt") {
        std::vector<rmsel::toy_rm::FeaturePair> data;
        if (!toy_data.empty()) {
          data = rmsel::toy_rm::load_feature_pairs(toy_data);
        } else {
          rmsel::rng::Engine engine(global.seed);
          rmsel::toy_rm::LinearRewardHead latent;
          for (std::size_t i = 0; i < toy_dim; ++i) {
            latent.weights.push_back(engine.normal());
          }
          rmsel::toy_rm::FeatureDistSpec spec;
          spec.dim = toy_dim;
          data = rmsel::toy_rm::synth_preferences(latent, toy_pairs,
                                                  global.seed + 1, spec);
        }
        const auto result = rmsel::toy_rm::train_bt(data, config);
        write_artifact(global, "toy_head.json",
                       rmsel::toy_rm::head_to_json(result.best_head));
        std::string trace = "step,loss\n";
        for (std::size_t i = 0; i < result.loss_trace.size(); ++i) {
          trace += std::to_string(i) + "," +
                   rmsel::csv::format_double(result.loss_trace[i]) + "\n";
        }
        write_artifact(global, "toy_loss_trace.csv", trace);
        std::cout << "steps " << result.steps << ", best validation accuracy "
                  << result.best_validation_accuracy << "\n";
      } else if (toy_mode == "reg") {
        std::vector<std::vector<double>> features;
        std::vector<std::vector<double>> targets;
        if (!toy_data.empty()) {
          std::tie(features, targets) =
              rmsel::toy_rm::load_attribute_dataset(toy_data);
        } else {
          rmsel::rng::Engine engine(global.seed);
          rmsel::toy_rm::AttributeHead truth;
          truth.in_dim = toy_dim;
          truth.out_dim = toy_attributes;
          for (std::size_t i = 0; i < toy_dim * toy_attributes; ++i) {
            truth.weights.push_back(engine.normal());
          }
          for (std::size_t s = 0; s < toy_pairs; ++s) {
            std::vector<double> f(toy_dim);
            for (auto& v : f) v = engine.normal();
            auto t = rmsel::toy_rm::attribute_scores(truth, f);
            for (auto& v : t) v += 0.01 * engine.normal();
            features.push_back(std::move(f));
            targets.push_back(std::move(t));
          }
        }
        const auto result = rmsel::toy_rm::train_reg(
            features, targets, targets.front().size(), config);
        write_artifact(global, "toy_attribute_head.json",
                       rmsel::toy_rm::attribute_head_to_json(result.best_head));
        std::cout << "steps " << result.steps << ", best validation loss "
                  << result.best_validation_loss << "\n";
      } else {
        throw rmsel::ValidationError(rmsel::errc::out_of_range,
                                     "mode must be 'bt' or 'reg'");
      }
    } else if (cmd_probe_score->parsed() || cmd_probe_jsd->parsed()) {
      const auto docs = rmsel::pretrain_probe::load_docs(docs_path);
      std::map<std::string, std::vector<rmsel::pretrain_probe::TokenLogProbDoc>>
          by_model;
      for (const auto& doc : docs) by_model[doc.model_id].push_back(doc);
      std::vector<rmsel::pretrain_probe::PresenceScoreSet> sets;
      for (const auto& [model_id, model_docs] : by_model) {
        sets.push_back(
            rmsel::pretrain_probe::score_set(model_docs, model_id, token_limit));
      }
      if (!alias_path.empty()) {
        sets = rmsel::pretrain_probe::apply_aliases(
            sets, rmsel::pretrain_probe::load_alias_table(alias_path));
        std::sort(sets.begin(), sets.end(), [](const auto& a, const auto& b) {
          return a.model_id < b.model_id;
        });
      }
      const auto meta = make_meta(global, {docs_path});
      if (cmd_probe_score->parsed()) {
        for (const auto& set : sets) {
          write_artifact(global, "presence_scores_" + set.model_id + ".csv",
                         rmsel::pretrain_probe::scores_to_csv(
                             set, rmsel::report::meta_lines(meta)));
          write_artifact(global, "presence_stats_" + set.model_id + ".json",
                         rmsel::pretrain_probe::stats_to_json(set));
          write_artifact(global,
                         "presence_histogram_" + set.model_id + ".json",
                         rmsel::pretrain_probe::histogram_to_json(set, bins));
        }
      } else {
        const auto matrix = rmsel::pretrain_probe::jsd_matrix(sets, bins);
        write_artifact(global, "jsd_matrix.csv",
                       rmsel::pretrain_probe::matrix_to_csv(
                           matrix, rmsel::report::meta_lines(meta)));
      }
    } else if (cmd_pca->parsed()) {
      const auto matrix =
          topics_path.empty()
              ? rmsel::ingest::load_score_matrix(matrix_path)
              : rmsel::ingest::load_score_matrix(matrix_path, topics_path);
      const auto result = rmsel::pca::pca_fit(matrix, !no_standardize);
      const auto meta = make_meta(global, {matrix_path});
      write_artifact(global, "pca_ratios.csv",
                     rmsel::pca::ratios_to_csv(
                         result, rmsel::report::meta_lines(meta)));
      write_artifact(global, "pca_loadings.csv",
                     rmsel::pca::loadings_to_csv(
                         result, rmsel::report::meta_lines(meta)));
      write_artifact(global, "pca_scree.json",
                     rmsel::pca::scree_to_json(result));
      std::cout << "components: " << result.components << ", top-5: "
                << rmsel::pca::explained_topk(
                       result, std::min<std::size_t>(5, result.components))
                << "\n";
    } else if (cmd_report->parsed()) {
      rmsel::report::ReportConfig config;
      config.fixtures_dir = fixtures_dir;
      if (!matrix_path.empty()) config.matrix_path = matrix_path;
      if (!topics_path.empty()) config.topics_path = topics_path;
      if (!docs_path.empty()) config.presence_path = docs_path;
      if (!alias_path.empty()) config.alias_path = alias_path;
      if (!pairs_path.empty()) config.pairs_path = pairs_path;
      config.out_dir = global.out_dir;
      config.seed = global.seed;
      config.threads = global.threads;
      config.alpha = alpha;
      config.k_min = k_min;
      config.k_max = k_max;
      if (!retain_args.empty()) {
        config.retain_thresholds = parse_retain(retain_args);
      }
      config.bins = bins;
      config.token_limit = token_limit;
      const auto outcome = rmsel::report::report_all(config);
      std::cout << "produced " << outcome.produced.size() << " artifacts, "
                << "skipped " << outcome.skipped.size() << "\n"
                << "manifest: " << outcome.manifest_path.string() << "\n";
    }
  } catch (const rmsel::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 1;
  } catch (const rmsel::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 2;
  } catch (const rmsel::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
