#include "rmsel/predictor.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <thread>

#include <json.hpp>

#include "rmsel/errors.hpp"
#include "rmsel/kernels.hpp"
#include "rmsel/rng.hpp"

namespace rmsel::predictor {

namespace {

using nlohmann::json;

double soft_threshold(double z, double threshold) {
  if (z > threshold) return z - threshold;
  if (z < -threshold) return z + threshold;
  return 0.0;
}

struct Columns {
  std::size_t n = 0;
  std::vector<std::vector<double>> cols;
};

Columns to_columns(const std::vector<Row>& rows, std::size_t expected_cols) {
  Columns out;
  out.n = rows.size();
  out.cols.assign(expected_cols, std::vector<double>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != expected_cols) {
      throw ValidationError(errc::ragged_row,
                            "row " + std::to_string(i) + " has " +
                                std::to_string(rows[i].size()) +
                                " features, expected " +
                                std::to_string(expected_cols));
    }
    for (std::size_t j = 0; j < expected_cols; ++j) {
      out.cols[j][i] = rows[i][j];
    }
  }
  return out;
}

void check_finite(const std::vector<std::vector<double>>& cols,
                  std::span<const double> y) {
  for (const auto& col : cols) {
    for (double v : col) {
      if (!std::isfinite(v)) {
        throw ValidationError(errc::non_finite_value, "feature matrix");
      }
    }
  }
  for (double v : y) {
    if (!std::isfinite(v)) {
      throw ValidationError(errc::non_finite_value, "target vector");
    }
  }
}

// Cyclic coordinate descent on zero-mean columns and centered targets.
FitResult fit_columns(const Columns& X, std::span<const double> y,
                      double alpha, double l1_ratio,
                      const FitOptions& options) {
  const std::size_t n = X.n;
  const std::size_t p = X.cols.size();
  if (y.size() != n) {
    throw ValidationError(errc::length_mismatch,
                          "X has " + std::to_string(n) + " rows, y has " +
                              std::to_string(y.size()));
  }
  if (n < 2) {
    throw ValidationError(errc::out_of_range, "need at least 2 samples");
  }
  check_finite(X.cols, y);

  const double mean_y = kernels::sum(y.data(), n) / static_cast<double>(n);
  std::vector<double> residual(n);
  for (std::size_t i = 0; i < n; ++i) residual[i] = y[i] - mean_y;

  std::vector<double> col_scale(p);  // (1/n) x_j . x_j
  for (std::size_t j = 0; j < p; ++j) {
    col_scale[j] = kernels::dot(X.cols[j].data(), X.cols[j].data(), n) /
                   static_cast<double>(n);
  }

  const double threshold = alpha * l1_ratio;
  const double ridge = alpha * (1.0 - l1_ratio);

  FitResult result;
  result.coefficients.assign(p, 0.0);
  result.intercept = mean_y;
  auto& w = result.coefficients;

  auto objective = [&]() {
    double rss = 0.0;
    for (const double r : residual) rss += r * r;
    double l1_norm = 0.0;
    double l2_norm = 0.0;
    for (const double wj : w) {
      l1_norm += std::abs(wj);
      l2_norm += wj * wj;
    }
    return rss / (2.0 * static_cast<double>(n)) +
           alpha * (l1_ratio * l1_norm + (1.0 - l1_ratio) / 2.0 * l2_norm);
  };

  std::size_t sweeps = 0;
  double max_update = 0.0;
  for (; sweeps < options.max_iter; ) {
    ++sweeps;
    max_update = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      const double denom = col_scale[j] + ridge;
      if (denom == 0.0) continue;
      const double z =
          kernels::dot(X.cols[j].data(), residual.data(), n) /
              static_cast<double>(n) +
          col_scale[j] * w[j];
      const double updated = soft_threshold(z, threshold) / denom;
      const double delta = updated - w[j];
      if (delta != 0.0) {
        kernels::axpy(-delta, X.cols[j].data(), residual.data(), n);
        w[j] = updated;
      }
      max_update = std::max(max_update, std::abs(delta));
    }
    if (options.track_objective) {
      result.diagnostics.objective_trace.push_back(objective());
    }
    if (max_update < options.tol) break;
  }

  result.diagnostics.sweeps = sweeps;
  result.diagnostics.last_max_update = max_update;
  result.diagnostics.converged = max_update < options.tol;

  // KKT violation in coordinate-update units: the step the next sweep
  // would take.
  double kkt = 0.0;
  for (std::size_t j = 0; j < p; ++j) {
    const double denom = col_scale[j] + ridge;
    if (denom == 0.0) continue;
    const double z =
        kernels::dot(X.cols[j].data(), residual.data(), n) /
            static_cast<double>(n) +
        col_scale[j] * w[j];
    kkt = std::max(kkt, std::abs(soft_threshold(z, threshold) / denom - w[j]));
  }
  result.diagnostics.kkt_residual = kkt;
  return result;
}

struct StandardizedColumns {
  Columns data;  // kept columns, standardized
  Standardization params;
};

StandardizedColumns standardize_columns(const Columns& X,
                                        const std::vector<std::string>& names) {
  const std::size_t n = X.n;
  if (n < 2) {
    throw ValidationError(errc::out_of_range,
                          "standardization needs at least 2 rows");
  }
  StandardizedColumns out;
  out.data.n = n;
  for (std::size_t j = 0; j < X.cols.size(); ++j) {
    const auto& col = X.cols[j];
    const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
    if (*lo == *hi) {
      out.params.dropped_names.push_back(names[j]);
      continue;
    }
    const double mean = kernels::sum(col.data(), n) / static_cast<double>(n);
    double ss = 0.0;
    for (double v : col) ss += (v - mean) * (v - mean);
    const double stddev = std::sqrt(ss / static_cast<double>(n - 1));
    std::vector<double> scaled(n);
    for (std::size_t i = 0; i < n; ++i) scaled[i] = (col[i] - mean) / stddev;
    out.params.kept.push_back(j);
    out.params.mean.push_back(mean);
    out.params.stddev.push_back(stddev);
    out.data.cols.push_back(std::move(scaled));
  }
  if (out.params.kept.empty()) {
    throw ValidationError(errc::constant_input, "all columns constant");
  }
  return out;
}

struct FoldData {
  Columns train_cols;                 // standardized kept columns
  Standardization params;
  std::vector<double> y_train;
  std::vector<Row> test_rows;         // expanded, unstandardized
  std::vector<double> y_test;
};

double fold_mae(const FoldData& fold, const FitResult& fit) {
  double total = 0.0;
  for (std::size_t i = 0; i < fold.test_rows.size(); ++i) {
    double pred = fit.intercept;
    for (std::size_t k = 0; k < fold.params.kept.size(); ++k) {
      const double standardized =
          (fold.test_rows[i][fold.params.kept[k]] - fold.params.mean[k]) /
          fold.params.stddev[k];
      pred += fit.coefficients[k] * standardized;
    }
    total += std::abs(pred - fold.y_test[i]);
  }
  return total / static_cast<double>(fold.test_rows.size());
}

bool better_point(const CVPoint& a, const CVPoint& b) {
  if (a.mean_mae != b.mean_mae) return a.mean_mae < b.mean_mae;
  if (a.point.degree != b.point.degree) return a.point.degree < b.point.degree;
  if (a.point.alpha != b.point.alpha) return a.point.alpha > b.point.alpha;
  return a.point.l1_ratio > b.point.l1_ratio;
}

}  // namespace

std::vector<double> PolynomialExpansion::apply(
    std::span<const double> features) const {
  if (features.size() != input_names.size()) {
    throw ValidationError(errc::length_mismatch,
                          std::to_string(features.size()) + " features vs " +
                              std::to_string(input_names.size()) + " names");
  }
  std::vector<double> out;
  out.reserve(terms.size());
  for (const auto& term : terms) {
    double value = 1.0;
    for (const auto& [idx, power] : term.powers) {
      for (int k = 0; k < power; ++k) value *= features[idx];
    }
    out.push_back(value);
  }
  return out;
}

PolynomialExpansion make_expansion(std::vector<std::string> input_names,
                                   int degree) {
  if (degree < 1) {
    throw ValidationError(errc::out_of_range,
                          "degree must be >= 1, got " +
                              std::to_string(degree));
  }
  PolynomialExpansion expansion;
  expansion.degree = degree;
  expansion.input_names = std::move(input_names);
  const std::size_t p = expansion.input_names.size();

  // Non-decreasing index tuples of each length, lexicographic.
  std::vector<std::size_t> tuple;
  auto emit = [&]() {
    PolynomialTerm term;
    std::string name;
    std::size_t i = 0;
    while (i < tuple.size()) {
      std::size_t j = i;
      while (j + 1 < tuple.size() && tuple[j + 1] == tuple[i]) ++j;
      const int power = static_cast<int>(j - i + 1);
      term.powers.emplace_back(tuple[i], power);
      if (!name.empty()) name += "*";
      name += expansion.input_names[tuple[i]];
      if (power > 1) name += "^" + std::to_string(power);
      i = j + 1;
    }
    expansion.terms.push_back(std::move(term));
    expansion.names.push_back(std::move(name));
  };
  std::function<void(std::size_t, int)> recurse = [&](std::size_t start,
                                                      int remaining) {
    if (remaining == 0) {
      emit();
      return;
    }
    for (std::size_t idx = start; idx < p; ++idx) {
      tuple.push_back(idx);
      recurse(idx, remaining - 1);
      tuple.pop_back();
    }
  };
  for (int d = 1; d <= degree; ++d) recurse(0, d);
  return expansion;
}

std::pair<std::vector<Row>, Standardization> standardize(
    const std::vector<Row>& rows, const std::vector<std::string>& names) {
  if (rows.empty()) {
    throw ValidationError(errc::empty_input, "no rows to standardize");
  }
  const auto columns = to_columns(rows, names.size());
  auto standardized = standardize_columns(columns, names);
  std::vector<Row> out(rows.size(),
                       Row(standardized.params.kept.size(), 0.0));
  for (std::size_t k = 0; k < standardized.data.cols.size(); ++k) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      out[i][k] = standardized.data.cols[k][i];
    }
  }
  return {std::move(out), std::move(standardized.params)};
}

FitResult elastic_net_fit(const std::vector<Row>& X, std::span<const double> y,
                          double alpha, double l1_ratio,
                          const FitOptions& options) {
  const std::size_t p = X.empty() ? 0 : X.front().size();
  return fit_columns(to_columns(X, p), y, alpha, l1_ratio, options);
}

std::vector<std::vector<std::size_t>> make_folds(std::size_t n,
                                                 std::size_t folds,
                                                 std::uint64_t seed) {
  if (folds < 2 || folds > n) {
    throw ValidationError(errc::out_of_range,
                          "folds = " + std::to_string(folds) +
                              " outside [2, " + std::to_string(n) + "]");
  }
  rng::Engine engine(seed);
  const auto permutation = rng::permutation(n, engine);
  std::vector<std::vector<std::size_t>> out(folds);
  const std::size_t base = n / folds;
  const std::size_t extra = n % folds;
  std::size_t cursor = 0;
  for (std::size_t f = 0; f < folds; ++f) {
    const std::size_t size = base + (f < extra ? 1 : 0);
    out[f].assign(permutation.begin() + cursor,
                  permutation.begin() + cursor + size);
    cursor += size;
  }
  return out;
}

CVResult cross_validate(const std::vector<Row>& X, std::span<const double> y,
                        const std::vector<std::string>& names,
                        const HyperGrid& grid, std::size_t folds,
                        std::uint64_t seed, unsigned threads,
                        const FitOptions& options) {
  const std::size_t n = X.size();
  if (n != y.size()) {
    throw ValidationError(errc::length_mismatch,
                          std::to_string(n) + " rows vs " +
                              std::to_string(y.size()) + " targets");
  }
  if (grid.degrees.empty() || grid.alphas.empty() || grid.l1_ratios.empty()) {
    throw ValidationError(errc::empty_input, "hyperparameter grid is empty");
  }
  const auto fold_indices = make_folds(n, folds, seed);

  // Expansion and per-fold standardization are shared across the grid.
  std::map<int, PolynomialExpansion> expansions;
  std::map<int, std::vector<Row>> expanded_rows;
  for (const int degree : grid.degrees) {
    if (expansions.count(degree)) continue;
    auto expansion = make_expansion(names, degree);
    std::vector<Row> rows;
    rows.reserve(n);
    for (const auto& row : X) rows.push_back(expansion.apply(row));
    expansions.emplace(degree, std::move(expansion));
    expanded_rows.emplace(degree, std::move(rows));
  }

  std::map<int, std::vector<FoldData>> fold_data;
  for (const int degree : grid.degrees) {
    if (fold_data.count(degree)) continue;
    const auto& rows = expanded_rows.at(degree);
    const auto& expansion = expansions.at(degree);
    std::vector<FoldData> per_fold;
    for (std::size_t f = 0; f < folds; ++f) {
      FoldData fold;
      std::vector<Row> train_rows;
      for (std::size_t g = 0; g < folds; ++g) {
        for (const std::size_t idx : fold_indices[g]) {
          if (g == f) {
            fold.test_rows.push_back(rows[idx]);
            fold.y_test.push_back(y[idx]);
          } else {
            train_rows.push_back(rows[idx]);
            fold.y_train.push_back(y[idx]);
          }
        }
      }
      auto standardized = standardize_columns(
          to_columns(train_rows, expansion.names.size()), expansion.names);
      fold.train_cols = std::move(standardized.data);
      fold.params = std::move(standardized.params);
      per_fold.push_back(std::move(fold));
    }
    fold_data.emplace(degree, std::move(per_fold));
  }

  CVResult result;
  result.seed = seed;
  result.folds = folds;
  for (const int degree : grid.degrees) {
    for (const double alpha : grid.alphas) {
      for (const double l1_ratio : grid.l1_ratios) {
        CVPoint point;
        point.point = GridPoint{degree, alpha, l1_ratio};
        result.points.push_back(point);
      }
    }
  }

  auto evaluate = [&](CVPoint& point) {
    const auto& per_fold = fold_data.at(point.point.degree);
    double total = 0.0;
    for (const auto& fold : per_fold) {
      const auto fit = fit_columns(fold.train_cols, fold.y_train,
                                   point.point.alpha, point.point.l1_ratio,
                                   options);
      total += fold_mae(fold, fit);
      point.all_converged = point.all_converged && fit.diagnostics.converged;
      point.max_kkt_residual =
          std::max(point.max_kkt_residual, fit.diagnostics.kkt_residual);
    }
    point.mean_mae = total / static_cast<double>(per_fold.size());
  };

  if (threads <= 1 || result.points.size() <= 1) {
    for (auto& point : result.points) evaluate(point);
  } else {
    std::atomic<std::size_t> next{0};
    const unsigned worker_count =
        std::min<unsigned>(threads, static_cast<unsigned>(result.points.size()));
    std::vector<std::thread> workers;
    for (unsigned t = 0; t < worker_count; ++t) {
      workers.emplace_back([&]() {
        for (;;) {
          const std::size_t gi = next.fetch_add(1);
          if (gi >= result.points.size()) return;
          evaluate(result.points[gi]);
        }
      });
    }
    for (auto& worker : workers) worker.join();
  }

  result.best_index = 0;
  for (std::size_t i = 1; i < result.points.size(); ++i) {
    if (better_point(result.points[i], result.points[result.best_index])) {
      result.best_index = i;
    }
  }
  return result;
}

ElasticNetModel fit_final(const std::vector<Row>& X, std::span<const double> y,
                          const std::vector<std::string>& names,
                          const GridPoint& point, std::uint64_t seed,
                          const FitOptions& options) {
  auto expansion = make_expansion(names, point.degree);
  std::vector<Row> expanded;
  expanded.reserve(X.size());
  for (const auto& row : X) expanded.push_back(expansion.apply(row));
  auto standardized = standardize_columns(
      to_columns(expanded, expansion.names.size()), expansion.names);
  const auto fit = fit_columns(standardized.data, y, point.alpha,
                               point.l1_ratio, options);

  ElasticNetModel model;
  model.degree = point.degree;
  model.alpha = point.alpha;
  model.l1_ratio = point.l1_ratio;
  model.raw_feature_names = names;
  for (const std::size_t idx : standardized.params.kept) {
    model.feature_names.push_back(expansion.names[idx]);
  }
  model.mean = standardized.params.mean;
  model.stddev = standardized.params.stddev;
  model.coefficients = fit.coefficients;
  model.intercept = fit.intercept;
  model.seed = seed;
  model.sweeps = fit.diagnostics.sweeps;
  model.converged = fit.diagnostics.converged;
  return model;
}

double predict(const ElasticNetModel& model,
               std::span<const double> raw_features) {
  const auto expansion = make_expansion(model.raw_feature_names, model.degree);
  const auto expanded = expansion.apply(raw_features);
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < expansion.names.size(); ++i) {
    index[expansion.names[i]] = i;
  }
  double pred = model.intercept;
  for (std::size_t k = 0; k < model.feature_names.size(); ++k) {
    const auto it = index.find(model.feature_names[k]);
    if (it == index.end()) {
      throw ValidationError(errc::unknown_feature, model.feature_names[k]);
    }
    pred += model.coefficients[k] *
            ((expanded[it->second] - model.mean[k]) / model.stddev[k]);
  }
  return pred;
}

double predict(const ElasticNetModel& model,
               const std::map<std::string, double>& features) {
  for (const auto& [name, value] : features) {
    (void)value;
    if (std::find(model.raw_feature_names.begin(),
                  model.raw_feature_names.end(),
                  name) == model.raw_feature_names.end()) {
      throw ValidationError(errc::unknown_feature, name);
    }
  }
  std::vector<double> ordered;
  ordered.reserve(model.raw_feature_names.size());
  for (const auto& name : model.raw_feature_names) {
    const auto it = features.find(name);
    if (it == features.end()) {
      throw ValidationError(errc::missing_key, "feature '" + name + "'");
    }
    ordered.push_back(it->second);
  }
  return predict(model, ordered);
}

std::vector<std::pair<std::string, double>> nonzero_features(
    const ElasticNetModel& model, double threshold) {
  std::vector<std::pair<std::string, double>> out;
  for (std::size_t k = 0; k < model.coefficients.size(); ++k) {
    if (std::abs(model.coefficients[k]) > threshold) {
      out.emplace_back(model.feature_names[k], model.coefficients[k]);
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (std::abs(a.second) != std::abs(b.second)) {
      return std::abs(a.second) > std::abs(b.second);
    }
    return a.first < b.first;
  });
  return out;
}

coverage::CoverageCurve predicted_coverage(const ElasticNetModel& model,
                                           const ingest::ScoreMatrix& matrix,
                                           const ingest::RewardBenchTable& rb,
                                           std::size_t k_min, std::size_t k_max,
                                           ingest::Category target) {
  std::vector<std::size_t> feature_cols;
  for (const auto& name : model.raw_feature_names) {
    const auto idx = matrix.column_index(name);
    if (!idx) {
      throw ValidationError(errc::unknown_feature,
                            "matrix has no column '" + name + "'");
    }
    feature_cols.push_back(*idx);
  }
  std::map<std::string, double> predictions;
  std::map<std::string, double> targets;
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    std::vector<double> features;
    features.reserve(feature_cols.size());
    for (const std::size_t c : feature_cols) features.push_back(matrix.at(r, c));
    predictions[matrix.row_ids[r]] = predict(model, features);
    const auto it = rb.scores.find(matrix.row_ids[r]);
    if (it == rb.scores.end()) {
      throw ValidationError(errc::missing_key,
                            matrix.row_ids[r] + " missing from score table");
    }
    targets[matrix.row_ids[r]] = it->second.category(target);
  }
  return coverage::coverage_curve(predictions, targets, k_min, k_max,
                                  "predicted");
}

AugmentedComparison augmented_fit(const std::vector<Row>& X,
                                  std::span<const double> y,
                                  const std::vector<std::string>& names,
                                  const std::vector<Row>& presence_rows,
                                  const std::vector<std::string>& presence_names,
                                  const HyperGrid& grid, std::size_t folds,
                                  std::uint64_t seed, unsigned threads) {
  if (presence_rows.size() != X.size()) {
    throw ValidationError(errc::missing_key,
                          "presence features cover " +
                              std::to_string(presence_rows.size()) + " of " +
                              std::to_string(X.size()) + " rows");
  }
  std::vector<Row> augmented;
  augmented.reserve(X.size());
  for (std::size_t i = 0; i < X.size(); ++i) {
    if (presence_rows[i].size() != presence_names.size()) {
      throw ValidationError(errc::ragged_row,
                            "presence row " + std::to_string(i));
    }
    Row row = X[i];
    row.insert(row.end(), presence_rows[i].begin(), presence_rows[i].end());
    augmented.push_back(std::move(row));
  }
  std::vector<std::string> augmented_names = names;
  augmented_names.insert(augmented_names.end(), presence_names.begin(),
                         presence_names.end());

  AugmentedComparison out;
  out.base = cross_validate(X, y, names, grid, folds, seed, threads);
  out.augmented = cross_validate(augmented, y, augmented_names, grid, folds,
                                 seed, threads);
  out.mae_improvement =
      out.base.best().mean_mae - out.augmented.best().mean_mae;
  return out;
}

std::string model_to_json(const ElasticNetModel& model) {
  json doc;
  doc["schema"] = "rmsel.elastic_net_model.v1";
  doc["degree"] = model.degree;
  doc["alpha"] = model.alpha;
  doc["l1_ratio"] = model.l1_ratio;
  doc["raw_feature_names"] = model.raw_feature_names;
  doc["feature_names"] = model.feature_names;
  doc["mean"] = model.mean;
  doc["stddev"] = model.stddev;
  doc["coefficients"] = model.coefficients;
  doc["intercept"] = model.intercept;
  doc["seed"] = model.seed;
  doc["sweeps"] = model.sweeps;
  doc["converged"] = model.converged;
  return doc.dump(2);
}

ElasticNetModel model_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(errc::bad_schema, e.what());
  }
  if (!doc.is_object() || doc.value("schema", "") != "rmsel.elastic_net_model.v1") {
    throw ValidationError(errc::bad_schema,
                          "expected rmsel.elastic_net_model.v1");
  }
  ElasticNetModel model;
  model.degree = doc.at("degree").get<int>();
  model.alpha = doc.at("alpha").get<double>();
  model.l1_ratio = doc.at("l1_ratio").get<double>();
  model.raw_feature_names =
      doc.at("raw_feature_names").get<std::vector<std::string>>();
  model.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
  model.mean = doc.at("mean").get<std::vector<double>>();
  model.stddev = doc.at("stddev").get<std::vector<double>>();
  model.coefficients = doc.at("coefficients").get<std::vector<double>>();
  model.intercept = doc.at("intercept").get<double>();
  model.seed = doc.at("seed").get<std::uint64_t>();
  model.sweeps = doc.at("sweeps").get<std::size_t>();
  model.converged = doc.at("converged").get<bool>();
  if (model.coefficients.size() != model.feature_names.size() ||
      model.mean.size() != model.feature_names.size() ||
      model.stddev.size() != model.feature_names.size()) {
    throw ValidationError(errc::bad_schema,
                          "coefficient/parameter count mismatch");
  }
  return model;
}

void save_model(const ElasticNetModel& model,
                const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << model_to_json(model) << "\n";
}

ElasticNetModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError(errc::missing_file, "cannot open " + path.string());
  }
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return model_from_json(text);
}

}  // namespace rmsel::predictor
