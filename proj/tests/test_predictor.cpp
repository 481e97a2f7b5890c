#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rmsel/errors.hpp"
#include "rmsel/predictor.hpp"
#include "rmsel/rng.hpp"
#include "test_util.hpp"

using namespace rmsel;
using predictor::Row;

namespace {

// Binomial coefficient for the expansion-count oracle.
std::size_t binomial(std::size_t n, std::size_t k) {
  std::size_t result = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;
  }
  return result;
}

// Closed-form ridge oracle: solve (X^T X + n*alpha*I) w = X^T y by Gaussian
// elimination with partial pivoting. Independent of the descent path.
std::vector<double> ridge_oracle(const std::vector<Row>& X,
                                 const std::vector<double>& y, double alpha) {
  const std::size_t n = X.size();
  const std::size_t p = X.front().size();
  const double mean_y =
      std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  std::vector<std::vector<double>> a(p, std::vector<double>(p + 1, 0.0));
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      double dot = 0.0;
      for (std::size_t r = 0; r < n; ++r) dot += X[r][i] * X[r][j];
      a[i][j] = dot;
    }
    a[i][i] += static_cast<double>(n) * alpha;
    double rhs = 0.0;
    for (std::size_t r = 0; r < n; ++r) rhs += X[r][i] * (y[r] - mean_y);
    a[i][p] = rhs;
  }
  for (std::size_t col = 0; col < p; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < p; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    std::swap(a[col], a[pivot]);
    for (std::size_t r = 0; r < p; ++r) {
      if (r == col) continue;
      const double factor = a[r][col] / a[col][col];
      for (std::size_t c = col; c <= p; ++c) a[r][c] -= factor * a[col][c];
    }
  }
  std::vector<double> w(p);
  for (std::size_t i = 0; i < p; ++i) w[i] = a[i][p] / a[i][i];
  return w;
}

std::vector<Row> random_rows(std::size_t n, std::size_t p,
                             rng::Engine& engine) {
  std::vector<Row> rows(n, Row(p));
  for (auto& row : rows) {
    for (auto& v : row) v = engine.normal();
  }
  return rows;
}

std::vector<std::string> feature_names(std::size_t p) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < p; ++i) names.push_back("f" + std::to_string(i));
  return names;
}

}  // namespace

TEST_SUITE("predictor") {

TEST_CASE("polynomial expansion shape and names") {
  const auto expansion = predictor::make_expansion({"x", "y"}, 2);
  CHECK(expansion.names ==
        std::vector<std::string>{"x", "y", "x^2", "x*y", "y^2"});
  const auto values = expansion.apply(std::vector<double>{2.0, 3.0});
  CHECK(values == std::vector<double>{2.0, 3.0, 4.0, 6.0, 9.0});

  // degree 1 is the identity
  const auto identity = predictor::make_expansion({"a", "b", "c"}, 1);
  CHECK(identity.names == std::vector<std::string>{"a", "b", "c"});
  CHECK(identity.apply(std::vector<double>{1.5, -2.0, 0.5}) ==
        std::vector<double>{1.5, -2.0, 0.5});

  CHECK_THROWS_AS(predictor::make_expansion({"a"}, 0), ValidationError);
}

TEST_CASE("expansion counts match the combinatorial oracle") {
  // C(p+d, d) - 1 monomials of degree 1..d
  for (const std::size_t p : {2u, 5u, 34u}) {
    for (const int d : {1, 2, 3}) {
      const auto expansion = predictor::make_expansion(feature_names(p), d);
      const std::size_t expected =
          binomial(p + static_cast<std::size_t>(d),
                   static_cast<std::size_t>(d)) -
          1;
      CHECK(expansion.names.size() == expected);
      CHECK(expansion.terms.size() == expected);
    }
  }
  // the documented 34-feature degree-2 count
  CHECK(predictor::make_expansion(feature_names(34), 2).names.size() == 629);
}

TEST_CASE("standardize centers and unit-scales, dropping constants") {
  const std::vector<Row> rows{{1.0, 7.0}, {2.0, 7.0}, {3.0, 7.0}};
  const auto [standardized, params] =
      predictor::standardize(rows, {"x", "flat"});
  REQUIRE(params.kept == std::vector<std::size_t>{0});
  CHECK(params.dropped_names == std::vector<std::string>{"flat"});
  // sample stddev of (1,2,3) is exactly 1
  CHECK(standardized[0][0] == -1.0);
  CHECK(standardized[1][0] == 0.0);
  CHECK(standardized[2][0] == 1.0);

  const std::vector<Row> all_flat{{1.0}, {1.0}};
  CHECK_THROWS_AS(predictor::standardize(all_flat, {"x"}), ValidationError);
}

TEST_CASE("standardized columns have near-zero means and unit variance") {
  rng::Engine engine(401);
  const auto rows = random_rows(50, 6, engine);
  const auto [standardized, params] =
      predictor::standardize(rows, feature_names(6));
  REQUIRE(params.kept.size() == 6);
  for (std::size_t c = 0; c < 6; ++c) {
    double mean = 0.0;
    for (const auto& row : standardized) mean += row[c];
    mean /= 50.0;
    CHECK(std::abs(mean) < 1e-12);
    double ss = 0.0;
    for (const auto& row : standardized) ss += (row[c] - mean) * (row[c] - mean);
    CHECK(std::sqrt(ss / 49.0) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("unpenalized fit recovers exact linear data") {
  rng::Engine engine(402);
  const auto raw = random_rows(30, 4, engine);
  const auto [X, params] = predictor::standardize(raw, feature_names(4));
  const std::vector<double> truth{2.0, -1.5, 0.25, 3.0};
  std::vector<double> y(30);
  for (std::size_t i = 0; i < 30; ++i) {
    y[i] = 7.0;
    for (std::size_t j = 0; j < 4; ++j) y[i] += truth[j] * X[i][j];
  }
  const auto fit = predictor::elastic_net_fit(X, y, 0.0, 0.0);
  for (std::size_t j = 0; j < 4; ++j) {
    CHECK(fit.coefficients[j] == doctest::Approx(truth[j]).epsilon(1e-8));
  }
  CHECK(fit.intercept == doctest::Approx(7.0).epsilon(1e-10));
}

TEST_CASE("ridge fits match the closed-form oracle on 20 seeded problems") {
  rng::Engine engine(403);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 20 + engine.below(30);
    const std::size_t p = 2 + engine.below(6);
    const auto raw = random_rows(n, p, engine);
    const auto [X, params] = predictor::standardize(raw, feature_names(p));
    std::vector<double> y(n);
    for (auto& v : y) v = engine.normal(50.0, 10.0);
    const double alpha = std::pow(10.0, engine.uniform(-4.0, -1.0));

    const auto fit = predictor::elastic_net_fit(X, y, alpha, 0.0,
                                                {1e-10, 100000, false});
    const auto expected = ridge_oracle(X, y, alpha);
    for (std::size_t j = 0; j < p; ++j) {
      CHECK(fit.coefficients[j] ==
            doctest::Approx(expected[j]).epsilon(1e-6));
    }
  }
}

TEST_CASE("alpha-kill condition zeroes every coefficient") {
  rng::Engine engine(404);
  const auto raw = random_rows(25, 5, engine);
  const auto [X, params] = predictor::standardize(raw, feature_names(5));
  std::vector<double> y(25);
  for (auto& v : y) v = engine.normal(10.0, 3.0);

  const double mean_y =
      std::accumulate(y.begin(), y.end(), 0.0) / 25.0;
  double max_corr = 0.0;
  for (std::size_t j = 0; j < 5; ++j) {
    double dot = 0.0;
    for (std::size_t i = 0; i < 25; ++i) dot += X[i][j] * y[i];
    max_corr = std::max(max_corr, std::abs(dot));
  }
  const double l1_ratio = 0.75;
  const double alpha = max_corr / (25.0 * l1_ratio) * 1.0001;

  const auto fit = predictor::elastic_net_fit(X, y, alpha, l1_ratio);
  for (const double w : fit.coefficients) CHECK(w == 0.0);
  CHECK(fit.intercept == doctest::Approx(mean_y).epsilon(1e-12));
}

TEST_CASE("objective is non-increasing across sweeps") {
  rng::Engine engine(405);
  const auto raw = random_rows(40, 8, engine);
  const auto [X, params] = predictor::standardize(raw, feature_names(8));
  std::vector<double> y(40);
  for (std::size_t i = 0; i < 40; ++i) {
    y[i] = 3.0 * X[i][0] - 2.0 * X[i][3] + 0.5 * engine.normal();
  }
  predictor::FitOptions options;
  options.track_objective = true;
  const auto fit = predictor::elastic_net_fit(X, y, 0.01, 0.5, options);
  REQUIRE(fit.diagnostics.objective_trace.size() >= 2);
  for (std::size_t i = 1; i < fit.diagnostics.objective_trace.size(); ++i) {
    CHECK(fit.diagnostics.objective_trace[i] <=
          fit.diagnostics.objective_trace[i - 1] + 1e-12);
  }
  CHECK(fit.diagnostics.kkt_residual < 10.0 * options.tol);
}

TEST_CASE("non-finite inputs are rejected") {
  std::vector<Row> X{{1.0, 2.0}, {3.0, std::nan("")}};
  std::vector<double> y{1.0, 2.0};
  CHECK_THROWS_AS(predictor::elastic_net_fit(X, y, 0.1, 0.5),
                  ValidationError);
  std::vector<Row> ok{{1.0, 2.0}, {3.0, 4.0}};
  std::vector<double> bad_y{1.0, std::numeric_limits<double>::infinity()};
  CHECK_THROWS_AS(predictor::elastic_net_fit(ok, bad_y, 0.1, 0.5),
                  ValidationError);
}

TEST_CASE("fold partition: disjoint, complete, balanced") {
  for (const std::size_t n : {40u, 43u, 47u}) {
    const auto folds = predictor::make_folds(n, 10, 9);
    std::vector<bool> seen(n, false);
    std::size_t min_size = n, max_size = 0;
    for (const auto& fold : folds) {
      min_size = std::min(min_size, fold.size());
      max_size = std::max(max_size, fold.size());
      for (const auto idx : fold) {
        CHECK(!seen[idx]);
        seen[idx] = true;
      }
    }
    CHECK(std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }));
    CHECK(max_size - min_size <= 1);
  }
  CHECK_THROWS_AS(predictor::make_folds(5, 10, 0), ValidationError);
  CHECK_THROWS_AS(predictor::make_folds(5, 1, 0), ValidationError);
}

TEST_CASE("cross-validation finds the exact model on noiseless data") {
  rng::Engine engine(406);
  const auto X = random_rows(40, 3, engine);
  std::vector<double> y(40);
  for (std::size_t i = 0; i < 40; ++i) y[i] = 3.0 * X[i][0];

  predictor::HyperGrid grid;
  grid.degrees = {1, 2};
  grid.alphas = {1e-2, 1e-8};
  grid.l1_ratios = {0.0, 1.0};

  const auto cv =
      predictor::cross_validate(X, y, feature_names(3), grid, 10, 1);
  CHECK(cv.best().point.degree == 1);
  CHECK(cv.best().point.alpha == 1e-8);
  CHECK(cv.best().mean_mae < 1e-6);

  // seed only permutes folds; the noiseless winner is stable
  const auto cv2 =
      predictor::cross_validate(X, y, feature_names(3), grid, 10, 2);
  CHECK(cv2.best().point.degree == cv.best().point.degree);
  CHECK(cv2.best().point.alpha == cv.best().point.alpha);
  CHECK(cv2.best().point.l1_ratio == cv.best().point.l1_ratio);
}

TEST_CASE("cv beats the mean-predictor baseline by 10x on sparse truth") {
  rng::Engine engine(407);
  const std::size_t n = 40, p = 10;
  const auto X = random_rows(n, p, engine);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = 2.0 * X[i][1] - 1.0 * X[i][4] + 0.5 * X[i][7] +
           0.01 * engine.normal();
  }

  predictor::HyperGrid grid;  // paper defaults
  const std::uint64_t seed = 5;
  const auto cv = predictor::cross_validate(X, y, feature_names(p), grid, 10,
                                            seed);

  // all-mean predictor over the identical folds
  const auto folds = predictor::make_folds(n, 10, seed);
  double baseline = 0.0;
  for (const auto& fold : folds) {
    double train_sum = 0.0;
    std::size_t train_count = 0;
    std::vector<bool> in_fold(n, false);
    for (const auto idx : fold) in_fold[idx] = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (!in_fold[i]) {
        train_sum += y[i];
        ++train_count;
      }
    }
    const double train_mean = train_sum / static_cast<double>(train_count);
    double mae = 0.0;
    for (const auto idx : fold) mae += std::abs(y[idx] - train_mean);
    baseline += mae / static_cast<double>(fold.size());
  }
  baseline /= 10.0;

  CHECK(cv.best().mean_mae <= baseline / 10.0);
}

TEST_CASE("duplicate grid entries resolve to the first index") {
  rng::Engine engine(408);
  const auto X = random_rows(20, 2, engine);
  std::vector<double> y(20);
  for (std::size_t i = 0; i < 20; ++i) y[i] = X[i][0] + 0.1 * engine.normal();
  predictor::HyperGrid grid;
  grid.degrees = {1};
  grid.alphas = {0.01, 0.01};
  grid.l1_ratios = {0.5};
  const auto cv =
      predictor::cross_validate(X, y, feature_names(2), grid, 5, 3);
  CHECK(cv.points[0].mean_mae == cv.points[1].mean_mae);
  CHECK(cv.best_index == 0);
}

TEST_CASE("parallel grid evaluation matches serial") {
  rng::Engine engine(409);
  const auto X = random_rows(30, 4, engine);
  std::vector<double> y(30);
  for (std::size_t i = 0; i < 30; ++i) {
    y[i] = X[i][0] - X[i][2] + 0.05 * engine.normal();
  }
  predictor::HyperGrid grid;
  grid.degrees = {1, 2};
  const auto serial =
      predictor::cross_validate(X, y, feature_names(4), grid, 5, 7, 1);
  const auto parallel =
      predictor::cross_validate(X, y, feature_names(4), grid, 5, 7, 4);
  REQUIRE(serial.points.size() == parallel.points.size());
  for (std::size_t i = 0; i < serial.points.size(); ++i) {
    CHECK(serial.points[i].mean_mae == parallel.points[i].mean_mae);
  }
  CHECK(serial.best_index == parallel.best_index);
}

TEST_CASE("final fit predicts training rows of noiseless data") {
  rng::Engine engine(410);
  const auto X = random_rows(40, 3, engine);
  std::vector<double> y(40);
  for (std::size_t i = 0; i < 40; ++i) y[i] = 5.0 + 2.0 * X[i][0] - X[i][2];

  const auto model = predictor::fit_final(
      X, y, feature_names(3), {1, 1e-9, 0.0}, 0, {1e-12, 200000, false});
  for (std::size_t i = 0; i < 40; ++i) {
    CHECK(predictor::predict(model, X[i]) ==
          doctest::Approx(y[i]).epsilon(1e-6));
  }
}

TEST_CASE("all-zero model predicts the target mean everywhere") {
  rng::Engine engine(411);
  const auto X = random_rows(25, 4, engine);
  std::vector<double> y(25);
  for (auto& v : y) v = engine.normal(42.0, 5.0);
  const double mean_y = std::accumulate(y.begin(), y.end(), 0.0) / 25.0;

  const auto model =
      predictor::fit_final(X, y, feature_names(4), {1, 1e6, 1.0}, 0);
  CHECK(predictor::nonzero_features(model).empty());
  for (std::size_t i = 0; i < 25; ++i) {
    CHECK(predictor::predict(model, X[i]) ==
          doctest::Approx(mean_y).epsilon(1e-12));
  }
}

TEST_CASE("model JSON round-trip is prediction-exact") {
  rng::Engine engine(412);
  const auto X = random_rows(40, 5, engine);
  std::vector<double> y(40);
  for (std::size_t i = 0; i < 40; ++i) {
    y[i] = X[i][0] * X[i][1] - 2.0 * X[i][3] + 0.1 * engine.normal();
  }
  const auto model =
      predictor::fit_final(X, y, feature_names(5), {2, 0.001, 0.5}, 9);

  const auto restored =
      predictor::model_from_json(predictor::model_to_json(model));
  for (std::size_t i = 0; i < 40; ++i) {
    const double a = predictor::predict(model, X[i]);
    const double b = predictor::predict(restored, X[i]);
    CHECK(a == b);  // bit-identical
  }

  test_util::TempDir dir("model");
  const auto path = dir.path() / "model.json";
  predictor::save_model(model, path);
  const auto loaded = predictor::load_model(path);
  CHECK(predictor::predict(loaded, X[0]) == predictor::predict(model, X[0]));
}

TEST_CASE("predict validates feature names") {
  rng::Engine engine(413);
  const auto X = random_rows(20, 2, engine);
  std::vector<double> y(20);
  for (std::size_t i = 0; i < 20; ++i) y[i] = X[i][0];
  const auto model =
      predictor::fit_final(X, y, {"alpha", "beta"}, {1, 0.01, 0.5}, 0);

  CHECK_THROWS_AS(
      predictor::predict(model, std::map<std::string, double>{
                                    {"alpha", 1.0}, {"gamma", 2.0}}),
      ValidationError);
  CHECK_THROWS_AS(predictor::predict(
                      model, std::map<std::string, double>{{"alpha", 1.0}}),
                  ValidationError);
  const double direct = predictor::predict(model, std::vector<double>{1.0, 2.0});
  const double named = predictor::predict(
      model, std::map<std::string, double>{{"alpha", 1.0}, {"beta", 2.0}});
  CHECK(direct == named);
}

TEST_CASE("lasso recovers the planted support exactly") {
  rng::Engine engine(414);
  const std::size_t n = 200, p = 20;
  const auto X = random_rows(n, p, engine);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = 2.0 * X[i][3] - 1.5 * X[i][7] + 0.5 * X[i][12];
  }
  const auto model =
      predictor::fit_final(X, y, feature_names(p), {1, 0.001, 1.0}, 0);
  const auto features = predictor::nonzero_features(model);
  REQUIRE(features.size() == 3);
  std::vector<std::string> names;
  for (const auto& [name, coef] : features) {
    (void)coef;
    names.push_back(name);
  }
  std::sort(names.begin(), names.end());
  CHECK(names == std::vector<std::string>{"f12", "f3", "f7"});
}

TEST_CASE("predicted coverage: perfect and constant predictors") {
  // 12 models, matrix column = overall score exactly
  ingest::ScoreMatrix matrix;
  ingest::RewardBenchTable rb;
  matrix.column_ids = {"b"};
  matrix.topics = {""};
  rng::Engine engine(415);
  std::vector<Row> X;
  std::vector<double> y;
  for (int i = 0; i < 12; ++i) {
    const std::string id = "m" + std::to_string(i);
    const double overall = 50.0 + engine.normal(0.0, 10.0);
    matrix.row_ids.push_back(id);
    matrix.values.push_back(overall);
    rb.order.push_back(id);
    rb.scores[id] = {overall, overall, overall, overall, overall};
    X.push_back({overall});
    y.push_back(overall);
  }

  // near-exact fit: predictions track the target ranking
  const auto perfect = predictor::fit_final(X, y, {"b"}, {1, 1e-10, 0.0}, 0,
                                            {1e-12, 100000, false});
  const auto curve =
      predictor::predicted_coverage(perfect, matrix, rb, 1, 12);
  for (const auto& [k, value] : curve.points) {
    (void)k;
    CHECK(value == 1.0);
  }

  // constant predictor: ties broken by ascending id
  const auto constant =
      predictor::fit_final(X, y, {"b"}, {1, 1e6, 1.0}, 0);
  const auto flat_curve =
      predictor::predicted_coverage(constant, matrix, rb, 3, 3);
  std::map<std::string, double> target;
  std::map<std::string, double> lexicographic;
  for (int i = 0; i < 12; ++i) {
    const std::string id = "m" + std::to_string(i);
    target[id] = rb.scores[id].overall;
    lexicographic[id] = 0.0;
  }
  CHECK(flat_curve.points.front().second ==
        coverage::coverage_at_k(lexicographic, target, 3));
}

TEST_CASE("predicted coverage equals the coverage-module oracle") {
  rng::Engine engine(416);
  ingest::ScoreMatrix matrix;
  ingest::RewardBenchTable rb;
  matrix.column_ids = {"b1", "b2"};
  matrix.topics = {"", ""};
  std::vector<Row> X;
  std::vector<double> y;
  for (int i = 0; i < 20; ++i) {
    const std::string id = "m" + std::to_string(i);
    const double b1 = engine.normal();
    const double b2 = engine.normal();
    const double overall = 60.0 + 5.0 * b1 - 2.0 * b2 + 0.3 * engine.normal();
    matrix.row_ids.push_back(id);
    matrix.values.push_back(b1);
    matrix.values.push_back(b2);
    rb.order.push_back(id);
    rb.scores[id] = {overall, overall, overall, overall, overall};
    X.push_back({b1, b2});
    y.push_back(overall);
  }
  const auto model =
      predictor::fit_final(X, y, {"b1", "b2"}, {1, 0.001, 0.5}, 0);
  const auto curve = predictor::predicted_coverage(model, matrix, rb, 2, 10);

  std::map<std::string, double> predictions;
  std::map<std::string, double> target;
  for (int i = 0; i < 20; ++i) {
    const std::string id = matrix.row_ids[i];
    predictions[id] = predictor::predict(model, X[i]);
    target[id] = rb.scores[id].overall;
  }
  const auto expected =
      coverage::coverage_curve(predictions, target, 2, 10, "predicted");
  REQUIRE(curve.points.size() == expected.points.size());
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    CHECK(curve.points[i] == expected.points[i]);
  }
}

TEST_CASE("augmented fit with pure-noise features never helps noiseless data") {
  rng::Engine engine(417);
  const std::size_t n = 40;
  const auto X = random_rows(n, 4, engine);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = 2.0 * X[i][1] - X[i][3];

  const auto noise = random_rows(n, 5, engine);
  predictor::HyperGrid grid;
  grid.degrees = {1};
  grid.alphas = {1e-2, 1e-6};
  grid.l1_ratios = {0.5, 1.0};

  const auto comparison = predictor::augmented_fit(
      X, y, feature_names(4), noise,
      {"p0", "p1", "p2", "p3", "p4"}, grid, 10, 11);
  CHECK(comparison.base.best().mean_mae < 1e-4);
  CHECK(comparison.mae_improvement < 1e-4);
  CHECK(comparison.base.seed == comparison.augmented.seed);
  CHECK(comparison.base.folds == comparison.augmented.folds);
}

TEST_CASE("augmenting with the target itself is a leakage sanity check") {
  rng::Engine engine(418);
  const std::size_t n = 40;
  const auto X = random_rows(n, 3, engine);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = engine.normal(10.0, 4.0);  // unpredictable from X
  }
  std::vector<Row> leak(n);
  for (std::size_t i = 0; i < n; ++i) leak[i] = {y[i]};

  predictor::HyperGrid grid;
  grid.degrees = {1};
  grid.alphas = {1e-8};
  grid.l1_ratios = {0.0};
  const auto comparison = predictor::augmented_fit(
      X, y, feature_names(3), leak, {"leak"}, grid, 10, 13);
  CHECK(comparison.augmented.best().mean_mae < 1e-6);
  CHECK(comparison.mae_improvement > 1.0);
}

TEST_CASE("augmented fit validates presence coverage") {
  rng::Engine engine(419);
  const auto X = random_rows(20, 3, engine);
  std::vector<double> y(20, 1.0);
  const auto presence = random_rows(19, 5, engine);
  predictor::HyperGrid grid;
  CHECK_THROWS_AS(
      predictor::augmented_fit(X, y, feature_names(3), presence,
                               {"p0", "p1", "p2", "p3", "p4"}, grid, 10, 0),
      ValidationError);
}

}  // TEST_SUITE
