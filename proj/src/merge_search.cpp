#include "rmsel/merge_search.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include <json.hpp>

#include "rmsel/csv.hpp"
#include "rmsel/errors.hpp"
#include "rmsel/kernels.hpp"
#include "rmsel/rng.hpp"

namespace rmsel::merge_search {

const std::array<std::string_view, kAttributeCount> kAttributeNames{
    "helpfulness", "correctness", "coherence", "complexity", "verbosity"};

namespace {

constexpr std::size_t kAxis = kStepsPerAxis;
constexpr std::size_t kPow1 = kAxis;                  // 21
constexpr std::size_t kPow2 = kPow1 * kAxis;          // 441
constexpr std::size_t kPow3 = kPow2 * kAxis;          // 9261
constexpr std::size_t kPow4 = kPow3 * kAxis;          // 194481
constexpr std::size_t kTotal = kPow4 * kAxis;         // 4084101

double axis_weight(std::size_t axis, std::size_t step) {
  const double magnitude = 0.05 * static_cast<double>(step);
  return axis == 4 ? -magnitude : magnitude;
}

struct Soa {
  std::size_t n = 0;
  // chosen[j] / rejected[j]: attribute j across all pairs
  std::array<std::vector<double>, kAttributeCount> chosen;
  std::array<std::vector<double>, kAttributeCount> rejected;
};

Soa to_soa(const std::vector<AttributeSample>& samples) {
  Soa soa;
  soa.n = samples.size();
  for (std::size_t j = 0; j < kAttributeCount; ++j) {
    soa.chosen[j].resize(soa.n);
    soa.rejected[j].resize(soa.n);
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t j = 0; j < kAttributeCount; ++j) {
      if (!std::isfinite(samples[i].chosen[j]) ||
          !std::isfinite(samples[i].rejected[j])) {
        throw ValidationError(errc::non_finite_value,
                              "pair " + samples[i].pair_id);
      }
      soa.chosen[j][i] = samples[i].chosen[j];
      soa.rejected[j][i] = samples[i].rejected[j];
    }
  }
  return soa;
}

struct ChunkBest {
  std::size_t correct = 0;
  std::size_t index = 0;
};

// One chunk fixes (k1, k2) and scans the remaining three axes with running
// partial scores, so every merged score is accumulated in the same order as
// the sequential 5-term dot product.
ChunkBest scan_chunk(const Soa& soa, std::size_t chunk,
                     std::array<std::vector<double>, 4>& pc,
                     std::array<std::vector<double>, 4>& pr,
                     const std::vector<double>& zeros) {
  const std::size_t n = soa.n;
  const std::size_t k1 = chunk / kAxis;
  const std::size_t k2 = chunk % kAxis;
  const double w1 = axis_weight(0, k1);
  const double w2 = axis_weight(1, k2);

  kernels::add_scaled(pc[0].data(), zeros.data(), w1, soa.chosen[0].data(), n);
  kernels::add_scaled(pr[0].data(), zeros.data(), w1, soa.rejected[0].data(), n);
  kernels::add_scaled(pc[1].data(), pc[0].data(), w2, soa.chosen[1].data(), n);
  kernels::add_scaled(pr[1].data(), pr[0].data(), w2, soa.rejected[1].data(), n);

  ChunkBest best;
  bool have_best = false;
  for (std::size_t k3 = 0; k3 < kAxis; ++k3) {
    const double w3 = axis_weight(2, k3);
    kernels::add_scaled(pc[2].data(), pc[1].data(), w3, soa.chosen[2].data(), n);
    kernels::add_scaled(pr[2].data(), pr[1].data(), w3, soa.rejected[2].data(), n);
    for (std::size_t k4 = 0; k4 < kAxis; ++k4) {
      const double w4 = axis_weight(3, k4);
      kernels::add_scaled(pc[3].data(), pc[2].data(), w4, soa.chosen[3].data(), n);
      kernels::add_scaled(pr[3].data(), pr[2].data(), w4, soa.rejected[3].data(), n);
      const std::size_t base_index =
          ((chunk * kAxis + k3) * kAxis + k4) * kAxis;
      for (std::size_t k5 = 0; k5 < kAxis; ++k5) {
        const double w5 = axis_weight(4, k5);
        const std::size_t correct = kernels::count_pair_wins(
            pc[3].data(), pr[3].data(), soa.chosen[4].data(),
            soa.rejected[4].data(), w5, n);
        if (!have_best || correct > best.correct) {
          best.correct = correct;
          best.index = base_index + k5;
          have_best = true;
        }
      }
    }
  }
  return best;
}

}  // namespace

std::size_t grid_size() { return kTotal; }

std::array<double, kAttributeCount> grid_vector(std::size_t index) {
  if (index >= kTotal) {
    throw ValidationError(errc::out_of_range,
                          "grid index " + std::to_string(index));
  }
  std::array<double, kAttributeCount> weights{};
  std::size_t rest = index;
  const std::array<std::size_t, kAttributeCount> strides{kPow4, kPow3, kPow2,
                                                         kPow1, 1};
  for (std::size_t axis = 0; axis < kAttributeCount; ++axis) {
    const std::size_t step = rest / strides[axis];
    rest %= strides[axis];
    weights[axis] = axis_weight(axis, step);
  }
  return weights;
}

double merged_score(std::span<const double> weights,
                    std::span<const double> attributes) {
  if (weights.size() != kAttributeCount ||
      attributes.size() != kAttributeCount) {
    throw ValidationError(errc::length_mismatch,
                          std::to_string(weights.size()) + " weights vs " +
                              std::to_string(attributes.size()) +
                              " attributes (need 5 and 5)");
  }
  // Sequential accumulation; the grid scan reproduces this order exactly.
  double acc = 0.0;
  for (std::size_t j = 0; j < kAttributeCount; ++j) {
    acc += weights[j] * attributes[j];
  }
  return acc;
}

double pair_accuracy(std::span<const double> weights,
                     const std::vector<AttributeSample>& samples) {
  if (samples.empty()) {
    throw ValidationError(errc::empty_input, "no attribute pairs");
  }
  std::size_t correct = 0;
  for (const auto& sample : samples) {
    if (merged_score(weights, sample.chosen) >
        merged_score(weights, sample.rejected)) {
      ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(samples.size());
}

MergeResult search(const std::vector<AttributeSample>& samples,
                   unsigned threads) {
  if (samples.empty()) {
    throw ValidationError(errc::empty_input, "no attribute pairs");
  }
  const Soa soa = to_soa(samples);
  const std::size_t n = soa.n;
  const std::vector<double> zeros(n, 0.0);

  std::vector<ChunkBest> chunk_best(kPow2);
  std::atomic<std::size_t> next_chunk{0};

  auto worker = [&]() {
    std::array<std::vector<double>, 4> pc;
    std::array<std::vector<double>, 4> pr;
    for (auto& buf : pc) buf.resize(n);
    for (auto& buf : pr) buf.resize(n);
    for (;;) {
      const std::size_t chunk = next_chunk.fetch_add(1);
      if (chunk >= kPow2) return;
      chunk_best[chunk] = scan_chunk(soa, chunk, pc, pr, zeros);
    }
  };

  const unsigned worker_count = std::max(1u, std::min<unsigned>(threads, kPow2));
  if (worker_count == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < worker_count; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  // Reduce in chunk order: max count, then smallest index.
  ChunkBest best = chunk_best[0];
  for (std::size_t c = 1; c < chunk_best.size(); ++c) {
    if (chunk_best[c].correct > best.correct) best = chunk_best[c];
  }

  MergeResult result;
  result.weights = grid_vector(best.index);
  result.grid_index = best.index;
  result.correct = best.correct;
  result.total = n;
  result.accuracy = static_cast<double>(best.correct) / static_cast<double>(n);
  return result;
}

std::vector<AttributeSample> load_samples(const std::filesystem::path& path) {
  const auto table = csv::read_file(path);
  const auto id_col = table.column("pair_id");
  if (!id_col) {
    throw ValidationError(errc::bad_schema,
                          path.string() + ": missing column 'pair_id'");
  }
  std::array<std::size_t, kAttributeCount> chosen_cols{};
  std::array<std::size_t, kAttributeCount> rejected_cols{};
  for (std::size_t j = 0; j < kAttributeCount; ++j) {
    const auto c = table.column("chosen_" + std::string(kAttributeNames[j]));
    const auto r = table.column("rejected_" + std::string(kAttributeNames[j]));
    if (!c || !r) {
      throw ValidationError(errc::bad_schema,
                            path.string() + ": missing attribute columns for " +
                                std::string(kAttributeNames[j]));
    }
    chosen_cols[j] = *c;
    rejected_cols[j] = *r;
  }
  std::vector<AttributeSample> samples;
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) {
      throw ValidationError(errc::malformed_row, path.string());
    }
    AttributeSample sample;
    sample.pair_id = row[*id_col];
    for (std::size_t j = 0; j < kAttributeCount; ++j) {
      bool ok = false;
      sample.chosen[j] = csv::parse_double(row[chosen_cols[j]], ok);
      if (!ok) {
        throw ValidationError(errc::non_numeric_cell,
                              sample.pair_id + " chosen " +
                                  std::string(kAttributeNames[j]));
      }
      sample.rejected[j] = csv::parse_double(row[rejected_cols[j]], ok);
      if (!ok) {
        throw ValidationError(errc::non_numeric_cell,
                              sample.pair_id + " rejected " +
                                  std::string(kAttributeNames[j]));
      }
    }
    samples.push_back(std::move(sample));
  }
  if (samples.empty()) {
    throw ValidationError(errc::no_records, path.string());
  }
  return samples;
}

std::vector<AttributeSample> subsample(
    const std::vector<AttributeSample>& samples, std::size_t count,
    std::uint64_t seed) {
  if (count == 0 || count > samples.size()) {
    throw ValidationError(errc::out_of_range,
                          "subsample count " + std::to_string(count) +
                              " outside [1, " +
                              std::to_string(samples.size()) + "]");
  }
  rng::Engine engine(seed);
  auto indices = rng::permutation(samples.size(), engine);
  indices.resize(count);
  std::sort(indices.begin(), indices.end());
  std::vector<AttributeSample> out;
  out.reserve(count);
  for (const auto idx : indices) out.push_back(samples[idx]);
  return out;
}

std::string result_to_json(const MergeResult& result) {
  nlohmann::json doc;
  doc["schema"] = "rmsel.merge_result.v1";
  nlohmann::json weights = nlohmann::json::object();
  for (std::size_t j = 0; j < kAttributeCount; ++j) {
    weights[std::string(kAttributeNames[j])] = result.weights[j];
  }
  doc["weights"] = weights;
  doc["accuracy"] = result.accuracy;
  doc["grid_index"] = result.grid_index;
  doc["correct"] = result.correct;
  doc["total"] = result.total;
  return doc.dump(2);
}

}  // namespace rmsel::merge_search
