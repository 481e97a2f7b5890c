#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "rmsel/errors.hpp"
#include "rmsel/pretrain_probe.hpp"
#include "rmsel/rng.hpp"
#include "test_util.hpp"

using namespace rmsel;
namespace probe = pretrain_probe;

namespace {

probe::TokenLogProbDoc make_doc(const std::string& id,
                                const std::string& category,
                                const std::string& model,
                                std::vector<double> logprobs) {
  return probe::TokenLogProbDoc{id, category, model, std::move(logprobs)};
}

// Direct JS oracle: rebuild histograms and sum the KL terms explicitly.
double jsd_oracle(const std::vector<double>& a, const std::vector<double>& b,
                  std::size_t bins, double lo, double hi) {
  auto histogram = [&](const std::vector<double>& scores) {
    std::vector<double> probs(bins, 0.0);
    for (const double x : scores) {
      std::size_t bin = 0;
      if (hi > lo) {
        const double t = (x - lo) / (hi - lo) * static_cast<double>(bins);
        bin = t <= 0.0 ? 0 : std::min(bins - 1, static_cast<std::size_t>(t));
      }
      probs[bin] += 1.0;
    }
    const double total = 1.0 + static_cast<double>(bins) * 1e-12;
    for (auto& p : probs) {
      p = (p / static_cast<double>(scores.size()) + 1e-12) / total;
    }
    return probs;
  };
  const auto p = histogram(a);
  const auto q = histogram(b);
  double js = 0.0;
  for (std::size_t i = 0; i < bins; ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    js += 0.5 * p[i] * std::log(p[i] / m) / std::log(2.0);
    js += 0.5 * q[i] * std::log(q[i] / m) / std::log(2.0);
  }
  return std::sqrt(std::max(0.0, js));
}

std::vector<double> gaussian_scores(std::size_t n, double mean, double stddev,
                                    rng::Engine& engine) {
  std::vector<double> out(n);
  for (auto& v : out) v = -std::abs(engine.normal(mean, stddev));
  return out;
}

}  // namespace

TEST_SUITE("pretrain_probe") {

TEST_CASE("presence score basics") {
  const auto constant =
      make_doc("d1", "Book", "m", std::vector<double>(100, -1.0));
  CHECK(probe::presence_score(constant, 2048) == -1.0);
  CHECK(probe::presence_score(constant, 10) == -1.0);

  // truncation: first 2048 tokens at -0.5, the rest at -5.0
  std::vector<double> long_doc(4096, -5.0);
  std::fill(long_doc.begin(), long_doc.begin() + 2048, -0.5);
  CHECK(probe::presence_score(make_doc("d2", "Book", "m", long_doc), 2048) ==
        -0.5);

  // short docs normalize by actual length
  const auto short_doc = make_doc("d3", "Book", "m", {-1.0, -3.0});
  CHECK(probe::presence_score(short_doc, 2048) == -2.0);

  CHECK_THROWS_AS(probe::presence_score(make_doc("d4", "Book", "m", {}), 10),
                  ValidationError);
  CHECK_THROWS_AS(probe::presence_score(short_doc, 0), ValidationError);
}

TEST_CASE("presence score equals prefix-sum oracle and ignores the tail") {
  rng::Engine engine(701);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t length = 1 + engine.below(5000);
    std::vector<double> logprobs(length);
    for (auto& v : logprobs) v = -std::abs(engine.normal(2.0, 1.0));
    const auto doc = make_doc("d", "ArXiv", "m", logprobs);
    const std::size_t limit = 1 + engine.below(3000);

    const std::size_t n = std::min(limit, length);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += logprobs[i];
    CHECK(std::abs(probe::presence_score(doc, limit) -
                   sum / static_cast<double>(n)) < 1e-12);

    // appending tokens beyond the limit changes nothing
    if (length >= limit) {
      auto extended = logprobs;
      extended.push_back(-9.0);
      extended.push_back(-0.25);
      CHECK(probe::presence_score(make_doc("d", "ArXiv", "m", extended),
                                  limit) == probe::presence_score(doc, limit));
    }
  }
}

TEST_CASE("score sets aggregate per-category statistics") {
  std::vector<probe::TokenLogProbDoc> docs;
  for (const auto category : probe::kCanonicalCategories) {
    docs.push_back(make_doc("doc_" + std::string(category),
                            std::string(category), "m",
                            std::vector<double>(16, -1.0)));
  }
  const auto set = probe::score_set(docs, "m");
  CHECK(set.docs.size() == 5);
  for (const auto& [category, stats] : set.category_stats) {
    (void)category;
    CHECK(stats.count == 1);
    CHECK(stats.mean == -1.0);
    CHECK(stats.stddev == 0.0);
  }

  // two docs at -1 and -3: mean -2, sample std sqrt(2)
  std::vector<probe::TokenLogProbDoc> two{
      make_doc("a", "Book", "m", std::vector<double>(4, -1.0)),
      make_doc("b", "Book", "m", std::vector<double>(4, -3.0))};
  const auto pair_set = probe::score_set(two, "m");
  CHECK(pair_set.category_stats.at("Book").mean == -2.0);
  CHECK(pair_set.category_stats.at("Book").stddev ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

  // mixed model ids are rejected
  std::vector<probe::TokenLogProbDoc> mixed{
      make_doc("a", "Book", "m1", {-1.0}),
      make_doc("b", "Book", "m2", {-1.0})};
  CHECK_THROWS_AS(probe::score_set(mixed, "m1"), ValidationError);
  CHECK_THROWS_AS(probe::score_set({}, "m"), ValidationError);
}

TEST_CASE("score-set stats match a streaming oracle on 10k docs") {
  rng::Engine engine(702);
  std::vector<probe::TokenLogProbDoc> docs;
  std::map<std::string, std::vector<double>> expected_scores;
  for (int i = 0; i < 10000; ++i) {
    const auto category = std::string(
        probe::kCanonicalCategories[engine.below(5)]);
    const std::size_t length = 1 + engine.below(64);
    std::vector<double> logprobs(length);
    for (auto& v : logprobs) v = -std::abs(engine.normal(1.5, 0.5));
    docs.push_back(make_doc("d" + std::to_string(i), category, "m", logprobs));
    double sum = 0.0;
    const std::size_t n = std::min<std::size_t>(32, length);
    for (std::size_t t = 0; t < n; ++t) sum += logprobs[t];
    expected_scores[category].push_back(sum / static_cast<double>(n));
  }
  const auto set = probe::score_set(docs, "m", 32);
  for (const auto& [category, scores] : expected_scores) {
    double mean = 0.0;
    for (const double s : scores) mean += s;
    mean /= static_cast<double>(scores.size());
    double ss = 0.0;
    for (const double s : scores) ss += (s - mean) * (s - mean);
    const double stddev =
        std::sqrt(ss / static_cast<double>(scores.size() - 1));
    const auto& stats = set.category_stats.at(category);
    CHECK(stats.count == scores.size());
    CHECK(std::abs(stats.mean - mean) < 1e-9);
    CHECK(std::abs(stats.stddev - stddev) < 1e-9);
  }
}

TEST_CASE("jsd: identity, disjoint supports, bounds") {
  rng::Engine engine(703);
  const auto scores = gaussian_scores(500, 2.0, 0.5, engine);
  CHECK(probe::jsd(scores, scores) == 0.0);

  const std::vector<double> low(200, -9.0);
  const std::vector<double> high(200, -1.0);
  CHECK(probe::jsd(low, high, 10) >= 1.0 - 1e-6);
  CHECK(probe::jsd(low, high, 10) <= 1.0);

  CHECK_THROWS_AS(probe::jsd({}, scores), ValidationError);
  CHECK_THROWS_AS(probe::jsd(scores, {}), ValidationError);
  CHECK_THROWS_AS(probe::jsd(scores, scores, 1), ValidationError);
}

TEST_CASE("jsd matches the direct KL-sum oracle within 1e-9") {
  rng::Engine engine(704);
  for (int trial = 0; trial < 30; ++trial) {
    const auto a = gaussian_scores(400, 2.0, 0.4, engine);
    const auto b = gaussian_scores(300, 2.5, 0.6, engine);
    double lo = a[0], hi = a[0];
    for (const double x : a) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    for (const double x : b) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    const double got = probe::jsd(a, b, 100);
    CHECK(std::abs(got - jsd_oracle(a, b, 100, lo, hi)) < 1e-9);
    CHECK(got >= 0.0);
    CHECK(got <= 1.0);

    // bitwise symmetry
    CHECK(probe::jsd(b, a, 100) == got);
  }
}

TEST_CASE("jsd satisfies the triangle inequality on shared bins") {
  rng::Engine engine(705);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = gaussian_scores(200, 1.5, 0.3, engine);
    const auto b = gaussian_scores(200, 2.0, 0.5, engine);
    const auto c = gaussian_scores(200, 2.5, 0.4, engine);
    double lo = a[0], hi = a[0];
    for (const auto* scores : {&a, &b, &c}) {
      for (const double x : *scores) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
      }
    }
    const double ab = probe::jsd(a, b, 50, lo, hi);
    const double bc = probe::jsd(b, c, 50, lo, hi);
    const double ac = probe::jsd(a, c, 50, lo, hi);
    CHECK(ac <= ab + bc + 1e-12);
  }
}

TEST_CASE("jsd matrix: symmetry, diagonal, oracle per entry") {
  rng::Engine engine(706);
  std::vector<probe::PresenceScoreSet> sets;
  for (int m = 0; m < 3; ++m) {
    std::vector<probe::TokenLogProbDoc> docs;
    for (int i = 0; i < 50; ++i) {
      std::vector<double> logprobs(8);
      for (auto& v : logprobs) {
        v = -std::abs(engine.normal(1.0 + m, 0.5));
      }
      docs.push_back(make_doc("d" + std::to_string(i), "Book",
                              "model" + std::to_string(m), logprobs));
    }
    sets.push_back(probe::score_set(docs, "model" + std::to_string(m)));
  }

  const auto matrix = probe::jsd_matrix(sets, 40);
  REQUIRE(matrix.model_ids.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(matrix.at(i, i) == 0.0);
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(matrix.at(i, j) == matrix.at(j, i));
      CHECK(matrix.at(i, j) >= 0.0);
      CHECK(matrix.at(i, j) <= 1.0);
      if (i != j) {
        // entries recompute from pairwise calls with the global bins
        CHECK(matrix.at(i, j) ==
              probe::jsd(sets[i].all_scores(), sets[j].all_scores(),
                         matrix.bins, matrix.bin_lo, matrix.bin_hi));
      }
    }
  }

  // a duplicated model gives a zero off-diagonal entry
  auto duplicated = sets;
  duplicated.push_back(sets[0]);
  duplicated.back().model_id = "copy";
  const auto with_copy = probe::jsd_matrix(duplicated, 40);
  CHECK(with_copy.at(0, 3) == 0.0);

  CHECK_THROWS_AS(probe::jsd_matrix({sets[0]}, 40), ValidationError);
}

TEST_CASE("presence feature export in canonical order") {
  std::vector<probe::TokenLogProbDoc> docs;
  for (const auto category : probe::kCanonicalCategories) {
    docs.push_back(make_doc("d" + std::string(category),
                            std::string(category), "m",
                            std::vector<double>(4, -1.0)));
  }
  const auto set = probe::score_set(docs, "m");
  const auto features = probe::export_presence_features(set);
  REQUIRE(features.size() == 5);
  CHECK(features[0].first == "presence_github");
  CHECK(features[1].first == "presence_book");
  CHECK(features[2].first == "presence_arxiv");
  CHECK(features[3].first == "presence_wikipedia");
  CHECK(features[4].first == "presence_stackexchange");
  for (const auto& [name, value] : features) {
    (void)name;
    CHECK(value == -1.0);
  }

  // means equal the category stats exactly
  rng::Engine engine(707);
  std::vector<probe::TokenLogProbDoc> random_docs;
  for (const auto category : probe::kCanonicalCategories) {
    for (int i = 0; i < 10; ++i) {
      std::vector<double> logprobs(8);
      for (auto& v : logprobs) v = -std::abs(engine.normal(2.0, 1.0));
      random_docs.push_back(make_doc(std::string(category) +
                                         std::to_string(i),
                                     std::string(category), "m", logprobs));
    }
  }
  const auto random_set = probe::score_set(random_docs, "m");
  const auto random_features = probe::export_presence_features(random_set);
  std::size_t idx = 0;
  for (const auto category : probe::kCanonicalCategories) {
    CHECK(random_features[idx].second ==
          random_set.category_stats.at(std::string(category)).mean);
    ++idx;
  }

  // missing category names the offender
  std::vector<probe::TokenLogProbDoc> partial{
      make_doc("a", "Book", "m", {-1.0})};
  const auto partial_set = probe::score_set(partial, "m");
  try {
    probe::export_presence_features(partial_set);
    FAIL("expected missing-category error");
  } catch (const ValidationError& e) {
    CHECK(e.code() == errc::missing_category);
    CHECK(std::string(e.what()).find("Github") != std::string::npos);
  }
}

TEST_CASE("alias table shares score sets verbatim") {
  rng::Engine engine(708);
  std::vector<probe::TokenLogProbDoc> docs;
  for (int i = 0; i < 20; ++i) {
    std::vector<double> logprobs(8);
    for (auto& v : logprobs) v = -std::abs(engine.normal(1.0, 0.5));
    docs.push_back(make_doc("d" + std::to_string(i), "Wikipedia", "big-9b",
                            logprobs));
  }
  std::vector<probe::PresenceScoreSet> sets{probe::score_set(docs, "big-9b")};

  probe::AliasTable aliases{{"small-2b", "big-9b"}};
  const auto expanded = probe::apply_aliases(sets, aliases);
  REQUIRE(expanded.size() == 2);
  CHECK(expanded[1].model_id == "small-2b");
  REQUIRE(expanded[1].docs.size() == expanded[0].docs.size());
  for (std::size_t i = 0; i < expanded[0].docs.size(); ++i) {
    CHECK(expanded[1].docs[i].score == expanded[0].docs[i].score);
  }

  probe::AliasTable missing{{"x", "not-there"}};
  CHECK_THROWS_AS(probe::apply_aliases(sets, missing), ValidationError);

  test_util::TempDir dir("alias");
  const auto table = probe::load_alias_table(
      dir.write("alias.csv", "alias,source\nsmall-2b,big-9b\n"));
  REQUIRE(table.size() == 1);
  CHECK(table[0].first == "small-2b");
  CHECK(table[0].second == "big-9b");
}

TEST_CASE("JSONL loader validates and converts log bases") {
  test_util::TempDir dir("docs");
  const auto good = dir.write(
      "good.jsonl",
      R"({"doc_id":"a","category":"Book","model_id":"m","log_base":"e","logprobs":[-1.0,-2.0]})"
      "\n"
      R"({"doc_id":"b","category":"ArXiv","model_id":"m","log_base":"2","logprobs":[-1.0]})"
      "\n");
  const auto docs = probe::load_docs(good);
  REQUIRE(docs.size() == 2);
  CHECK(docs[0].logprobs == std::vector<double>{-1.0, -2.0});
  CHECK(docs[1].logprobs[0] == doctest::Approx(-std::log(2.0)).epsilon(1e-15));

  CHECK_THROWS_AS(probe::load_docs(dir.write(
                      "bad_base.jsonl",
                      R"({"doc_id":"a","category":"Book","model_id":"m","log_base":"7","logprobs":[-1.0]})"
                      "\n")),
                  ValidationError);
  CHECK_THROWS_AS(probe::load_docs(dir.write(
                      "positive.jsonl",
                      R"({"doc_id":"a","category":"Book","model_id":"m","log_base":"e","logprobs":[0.5]})"
                      "\n")),
                  ValidationError);
  CHECK_THROWS_AS(probe::load_docs(dir.write("broken.jsonl", "not json\n")),
                  ValidationError);
  CHECK_THROWS_AS(probe::load_docs(dir.path() / "missing.jsonl"),
                  ValidationError);
}

}  // TEST_SUITE
