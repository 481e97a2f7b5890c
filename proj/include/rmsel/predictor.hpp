#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "rmsel/coverage.hpp"
#include "rmsel/ingest.hpp"

namespace rmsel::predictor {

using Row = std::vector<double>;

struct HyperGrid {
  std::vector<int> degrees{1, 2, 3};
  std::vector<double> alphas{0.1, 0.01, 0.001, 0.0001};
  std::vector<double> l1_ratios{0.0, 0.25, 0.5, 0.75, 1.0};
};

// ---- polynomial feature expansion ----

struct PolynomialTerm {
  // (input index, power), ascending by index.
  std::vector<std::pair<std::size_t, int>> powers;
};

struct PolynomialExpansion {
  int degree = 1;
  std::vector<std::string> input_names;
  std::vector<PolynomialTerm> terms;
  std::vector<std::string> names;  // "a", "a^2", "a*b", ...

  std::vector<double> apply(std::span<const double> features) const;
};

// All monomials of total degree 1..degree (cross terms included, no
// constant), enumerated degree-ascending then lexicographic.
PolynomialExpansion make_expansion(std::vector<std::string> input_names,
                                   int degree);

// ---- standardization ----

struct Standardization {
  std::vector<std::size_t> kept;  // input column indices that survived
  std::vector<double> mean;       // per kept column
  std::vector<double> stddev;     // per kept column (sample, n-1)
  std::vector<std::string> dropped_names;  // constant columns
};

// Zero-mean, unit sample-standard-deviation columns; constant columns are
// dropped and reported. Throws when every column is constant.
std::pair<std::vector<Row>, Standardization> standardize(
    const std::vector<Row>& rows, const std::vector<std::string>& names);

// ---- elastic net ----

struct FitOptions {
  double tol = 1e-7;
  std::size_t max_iter = 10000;
  bool track_objective = false;  // record the objective after every sweep
};

struct FitDiagnostics {
  std::size_t sweeps = 0;
  bool converged = false;
  double last_max_update = 0.0;
  // Max KKT violation over coordinates, in coordinate-update units.
  double kkt_residual = 0.0;
  std::vector<double> objective_trace;  // filled when track_objective
};

struct FitResult {
  std::vector<double> coefficients;
  double intercept = 0.0;
  FitDiagnostics diagnostics;
};

// Minimizes (1/2n)||y - Xw - b||^2 + alpha*(l1*||w||_1 + (1-l1)/2*||w||^2)
// by cyclic coordinate descent with soft thresholding. X is expected
// standardized (zero-mean columns); the unpenalized intercept is fit on
// centered data.
FitResult elastic_net_fit(const std::vector<Row>& X, std::span<const double> y,
                          double alpha, double l1_ratio,
                          const FitOptions& options = {});

// ---- cross-validation ----

struct GridPoint {
  int degree = 1;
  double alpha = 0.0;
  double l1_ratio = 0.0;
};

struct CVPoint {
  GridPoint point;
  double mean_mae = 0.0;
  bool all_converged = true;
  double max_kkt_residual = 0.0;
};

struct CVResult {
  std::vector<CVPoint> points;  // grid order: degree, alpha, l1_ratio
  std::size_t best_index = 0;
  std::uint64_t seed = 0;
  std::size_t folds = 0;

  const CVPoint& best() const { return points[best_index]; }
};

// Seeded shuffle, contiguous split; fold sizes differ by at most one.
std::vector<std::vector<std::size_t>> make_folds(std::size_t n,
                                                 std::size_t folds,
                                                 std::uint64_t seed);

// Per-fold standardization uses training-split statistics only; the score
// is held-out MAE. Ties break toward smaller degree, larger alpha, larger
// l1_ratio.
CVResult cross_validate(const std::vector<Row>& X, std::span<const double> y,
                        const std::vector<std::string>& names,
                        const HyperGrid& grid, std::size_t folds,
                        std::uint64_t seed, unsigned threads = 1,
                        const FitOptions& options = {});

// ---- final model ----

struct ElasticNetModel {
  int degree = 1;
  double alpha = 0.0;
  double l1_ratio = 0.0;
  std::vector<std::string> raw_feature_names;
  std::vector<std::string> feature_names;  // expanded features kept
  std::vector<double> mean;
  std::vector<double> stddev;
  std::vector<double> coefficients;
  double intercept = 0.0;
  std::uint64_t seed = 0;
  std::size_t sweeps = 0;
  bool converged = true;
};

ElasticNetModel fit_final(const std::vector<Row>& X, std::span<const double> y,
                          const std::vector<std::string>& names,
                          const GridPoint& point, std::uint64_t seed,
                          const FitOptions& options = {});

// Raw features in model order.
double predict(const ElasticNetModel& model,
               std::span<const double> raw_features);

// Named features; unknown or missing names are validation errors.
double predict(const ElasticNetModel& model,
               const std::map<std::string, double>& features);

// Features with |coefficient| > threshold, by descending magnitude.
std::vector<std::pair<std::string, double>> nonzero_features(
    const ElasticNetModel& model, double threshold = 1e-8);

// Treats model predictions over the matrix rows as a pseudo-benchmark
// column and delegates to the coverage module.
coverage::CoverageCurve predicted_coverage(
    const ElasticNetModel& model, const ingest::ScoreMatrix& matrix,
    const ingest::RewardBenchTable& rb, std::size_t k_min, std::size_t k_max,
    ingest::Category target = ingest::Category::overall);

struct AugmentedComparison {
  CVResult base;
  CVResult augmented;
  // base best MAE minus augmented best MAE; positive means the presence
  // features helped.
  double mae_improvement = 0.0;
};

// Same folds and seed on both runs; presence_rows supplies extra named
// columns (one row per sample).
AugmentedComparison augmented_fit(
    const std::vector<Row>& X, std::span<const double> y,
    const std::vector<std::string>& names,
    const std::vector<Row>& presence_rows,
    const std::vector<std::string>& presence_names, const HyperGrid& grid,
    std::size_t folds, std::uint64_t seed, unsigned threads = 1);

std::string model_to_json(const ElasticNetModel& model);
ElasticNetModel model_from_json(const std::string& text);
void save_model(const ElasticNetModel& model,
                const std::filesystem::path& path);
ElasticNetModel load_model(const std::filesystem::path& path);

}  // namespace rmsel::predictor
