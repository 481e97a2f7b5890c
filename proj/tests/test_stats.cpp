#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "rmsel/errors.hpp"
#include "rmsel/rng.hpp"
#include "rmsel/stats.hpp"

using namespace rmsel;

namespace {

// Definitional oracle: sample covariance over the product of sample
// standard deviations.
double pearson_oracle(const std::vector<double>& x,
                      const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double cov = 0.0, vx = 0.0, vy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    cov += (x[i] - mx) * (y[i] - my);
    vx += (x[i] - mx) * (x[i] - mx);
    vy += (y[i] - my) * (y[i] - my);
  }
  cov /= static_cast<double>(n - 1);
  const double sx = std::sqrt(vx / static_cast<double>(n - 1));
  const double sy = std::sqrt(vy / static_cast<double>(n - 1));
  return cov / (sx * sy);
}

// Brute-force O(n^2) fractional ranks, as in the classic formulation.
std::vector<double> rank_oracle(const std::vector<double>& v) {
  std::vector<double> result(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::size_t r = 1, s = 1;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (v[j] < v[i]) ++r;
      if (v[j] == v[i] && j != i) ++s;
    }
    result[i] = static_cast<double>(r) + (static_cast<double>(s) - 1.0) * 0.5;
  }
  return result;
}

std::vector<double> random_vec(std::size_t n, rng::Engine& engine) {
  std::vector<double> out(n);
  for (auto& v : out) v = engine.normal();
  return out;
}

}  // namespace

TEST_SUITE("stats") {

TEST_CASE("pearson on exact linear data") {
  const std::vector<double> x{1, 2, 3, 4};
  std::vector<double> y;
  for (const double v : x) y.push_back(2.0 * v + 1.0);
  CHECK(stats::pearson(x, y) == doctest::Approx(1.0).epsilon(1e-12));
  std::vector<double> neg;
  for (const double v : x) neg.push_back(-v);
  CHECK(stats::pearson(x, neg) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("pearson matches definitional oracle within 1e-12 on 1000 draws") {
  rng::Engine engine(101);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 3 + static_cast<std::size_t>(engine.below(38));
    auto x = random_vec(n, engine);
    auto y = random_vec(n, engine);
    // occasional duplicates to stress tie handling downstream
    if (n > 4 && trial % 3 == 0) {
      x[1] = x[0];
      y[3] = y[2];
    }
    const double r = stats::pearson(x, y);
    CHECK(std::abs(r - pearson_oracle(x, y)) < 1e-12);
    CHECK(r >= -1.0);
    CHECK(r <= 1.0);
    // symmetry
    CHECK(stats::pearson(y, x) == doctest::Approx(r).epsilon(1e-14));
  }
}

TEST_CASE("pearson invariance under positive affine transforms") {
  rng::Engine engine(103);
  const auto x = random_vec(25, engine);
  const auto y = random_vec(25, engine);
  const double base = stats::pearson(x, y);
  std::vector<double> scaled;
  for (const double v : x) scaled.push_back(3.25 * v - 17.0);
  CHECK(stats::pearson(scaled, y) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("pearson error paths") {
  const std::vector<double> x{1, 2, 3};
  const std::vector<double> bad{1, 2};
  const std::vector<double> constant{5, 5, 5};
  CHECK_THROWS_AS(stats::pearson(x, bad), ValidationError);
  CHECK_THROWS_AS(stats::pearson(x, constant), ValidationError);
  CHECK_THROWS_AS(stats::pearson(constant, x), ValidationError);
  const std::vector<double> two{1, 2};
  CHECK_THROWS_AS(stats::pearson(two, two), ValidationError);
}

TEST_CASE("average ranks use the tie convention") {
  const std::vector<double> v{1, 2, 2, 3};
  const auto ranks = stats::average_ranks(v);
  CHECK(ranks == std::vector<double>{1.0, 2.5, 2.5, 4.0});
}

TEST_CASE("spearman is 1 under strictly monotone transforms") {
  rng::Engine engine(104);
  const auto x = random_vec(30, engine);
  std::vector<double> y;
  for (const double v : x) y.push_back(std::exp(0.5 * v) + v * v * v);
  CHECK(stats::spearman(x, y) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("spearman matches rank-then-pearson oracle with duplicates") {
  rng::Engine engine(105);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 4 + static_cast<std::size_t>(engine.below(30));
    std::vector<double> x(n), y(n);
    for (auto& v : x) v = static_cast<double>(engine.below(8));  // many ties
    for (auto& v : y) v = static_cast<double>(engine.below(8));
    const auto [lo_x, hi_x] = std::minmax_element(x.begin(), x.end());
    const auto [lo_y, hi_y] = std::minmax_element(y.begin(), y.end());
    if (*lo_x == *hi_x || *lo_y == *hi_y) continue;
    const double expected = pearson_oracle(rank_oracle(x), rank_oracle(y));
    CHECK(std::abs(stats::spearman(x, y) - expected) < 1e-12);
  }
}

TEST_CASE("t statistic values") {
  CHECK(stats::t_statistic(0.0, 40) == 0.0);
  CHECK(stats::t_statistic(0.5, 40) ==
        doctest::Approx(0.5 * std::sqrt(38.0) / std::sqrt(0.75))
            .epsilon(1e-12));
  CHECK(stats::t_statistic(0.5, 40) == doctest::Approx(3.559).epsilon(1e-3));
  CHECK(stats::t_statistic(0.316, 40) ==
        doctest::Approx(2.053).epsilon(1e-3));
  CHECK_THROWS_AS(stats::t_statistic(1.0, 40), ValidationError);
  CHECK_THROWS_AS(stats::t_statistic(-1.0, 40), ValidationError);
  CHECK_THROWS_AS(stats::t_statistic(1.5, 40), ValidationError);
  CHECK_THROWS_AS(stats::t_statistic(0.5, 2), ValidationError);
}

TEST_CASE("t statistic strictly increases in |r|") {
  double last = 0.0;
  for (double r = 0.0; r < 0.99; r += 0.01) {
    const double t = stats::t_statistic(r, 40);
    CHECK(t >= last);
    if (r > 0.0) CHECK(t > last);
    last = t;
  }
}

TEST_CASE("incomplete beta sanity") {
  // I_x(1,1) = x
  for (const double x : {0.1, 0.25, 0.5, 0.9}) {
    CHECK(stats::incomplete_beta(1.0, 1.0, x) ==
          doctest::Approx(x).epsilon(1e-12));
  }
  // complement identity
  rng::Engine engine(106);
  for (int i = 0; i < 50; ++i) {
    const double a = 0.5 + 10.0 * engine.uniform();
    const double b = 0.5 + 10.0 * engine.uniform();
    const double x = engine.uniform();
    CHECK(stats::incomplete_beta(a, b, x) +
              stats::incomplete_beta(b, a, 1.0 - x) ==
          doctest::Approx(1.0).epsilon(1e-10));
  }
  CHECK(stats::incomplete_beta(3.0, 4.0, 0.0) == 0.0);
  CHECK(stats::incomplete_beta(3.0, 4.0, 1.0) == 1.0);
}

TEST_CASE("significance threshold brackets the reported 0.316 for n=40") {
  const double r_crit = stats::significance_threshold(40, 0.05);
  CHECK(r_crit >= 0.304);
  CHECK(r_crit <= 0.320);
  CHECK(r_crit == doctest::Approx(0.312).epsilon(0.004));
  // the p-value right at the threshold is alpha
  CHECK(stats::correlation_p_value(r_crit, 40) ==
        doctest::Approx(0.05).epsilon(1e-6));
}

TEST_CASE("significance threshold limits and monotonicity") {
  CHECK(stats::significance_threshold(40, 0.999) < 0.01);
  CHECK(stats::significance_threshold(40, 0.001) >
        stats::significance_threshold(40, 0.05));
  CHECK(stats::significance_threshold(10, 0.05) >
        stats::significance_threshold(40, 0.05));
  CHECK_THROWS_AS(stats::significance_threshold(3, 0.05), ValidationError);
  CHECK_THROWS_AS(stats::significance_threshold(40, 0.0), ValidationError);
  CHECK_THROWS_AS(stats::significance_threshold(40, 1.0), ValidationError);
}

TEST_CASE("significance flag is monotone in r") {
  const double r_crit = stats::significance_threshold(40, 0.05);
  for (double r = 0.0; r <= 1.0; r += 0.001) {
    const bool significant = r >= r_crit;
    if (significant) {
      CHECK(r + 0.001 >= r_crit);  // stays significant above
    }
  }
}

TEST_CASE("correlation report") {
  // 40 synthetic models; one benchmark equals the overall score, one is
  // constant, one carries a planted 0.8 correlation.
  rng::Engine engine(107);
  ingest::ScoreMatrix matrix;
  ingest::RewardBenchTable rb;
  matrix.column_ids = {"equal_overall", "flat", "planted"};
  matrix.topics = {"", "", ""};
  for (int i = 0; i < 40; ++i) {
    const std::string id = "m" + std::to_string(i);
    const double x = engine.normal();
    const double noise = engine.normal();
    const double y = 0.8 * x + std::sqrt(1.0 - 0.64) * noise;
    ingest::RewardBenchScores scores;
    const double overall = 70.0 + 10.0 * y;
    scores.chat = scores.chat_hard = scores.safety = scores.reasoning =
        overall;
    scores.overall = overall;
    rb.order.push_back(id);
    rb.scores[id] = scores;
    matrix.row_ids.push_back(id);
    matrix.values.push_back(overall);          // equal_overall
    matrix.values.push_back(1.0);              // flat
    matrix.values.push_back(50.0 + 5.0 * x);   // planted
  }

  const auto report = stats::correlation_report(matrix, rb, 0.05);
  CHECK(report.n == 40);
  REQUIRE(report.entries.size() == 3 * 5);

  for (const auto& entry : report.entries) {
    if (entry.benchmark == "equal_overall") {
      REQUIRE(entry.pearson.has_value());
      CHECK(*entry.pearson == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(entry.significant_pearson);
      CHECK(entry.significant_spearman);
    } else if (entry.benchmark == "flat") {
      CHECK(!entry.pearson.has_value());
      CHECK(!entry.spearman.has_value());
      CHECK(!entry.significant_pearson);
    } else if (entry.benchmark == "planted" &&
               entry.category == ingest::Category::overall) {
      REQUIRE(entry.pearson.has_value());
      CHECK(std::abs(*entry.pearson - 0.8) < 0.15);
    }
  }

  // entries ordered by (benchmark, category order)
  CHECK(report.entries.front().benchmark == "equal_overall");
  CHECK(report.entries.back().benchmark == "planted");
}

TEST_CASE("correlation report rejects tiny intersections") {
  ingest::ScoreMatrix matrix;
  matrix.column_ids = {"b"};
  matrix.topics = {""};
  ingest::RewardBenchTable rb;
  for (int i = 0; i < 3; ++i) {
    const std::string id = "m" + std::to_string(i);
    matrix.row_ids.push_back(id);
    matrix.values.push_back(static_cast<double>(i));
    rb.order.push_back(id);
    rb.scores[id] = {50, 50, 50, 50, 50};
  }
  CHECK_THROWS_AS(stats::correlation_report(matrix, rb, 0.05),
                  ValidationError);

  ingest::RewardBenchTable disjoint;
  disjoint.order = {"other"};
  disjoint.scores["other"] = {50, 50, 50, 50, 50};
  CHECK_THROWS_AS(stats::correlation_report(matrix, disjoint, 0.05),
                  ValidationError);
}

}  // TEST_SUITE
