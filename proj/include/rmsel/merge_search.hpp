#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace rmsel::merge_search {

inline constexpr std::size_t kAttributeCount = 5;
inline constexpr std::size_t kStepsPerAxis = 21;  // 0.05 steps, 0..1.00

// Helpfulness, Correctness, Coherence, Complexity carry non-negative
// weights; Verbosity is non-positive.
extern const std::array<std::string_view, kAttributeCount> kAttributeNames;

struct AttributeSample {
  std::string pair_id;
  std::array<double, kAttributeCount> chosen{};
  std::array<double, kAttributeCount> rejected{};
};

// 21^5 = 4,084,101.
std::size_t grid_size();

// Odometer enumeration: the fifth (verbosity) axis spins fastest, each axis
// ascending in |k|. Index 0 is the all-zero vector.
std::array<double, kAttributeCount> grid_vector(std::size_t index);

// Dot product of a weight vector with one attribute vector; both length 5.
double merged_score(std::span<const double> weights,
                    std::span<const double> attributes);

// Fraction of pairs whose chosen merged score strictly exceeds the rejected
// one; ties count as incorrect.
double pair_accuracy(std::span<const double> weights,
                     const std::vector<AttributeSample>& samples);

struct MergeResult {
  std::array<double, kAttributeCount> weights{};
  double accuracy = 0.0;
  std::size_t grid_index = 0;
  std::size_t correct = 0;
  std::size_t total = 0;
};

// Full scan of the grid; ties resolve to the smallest enumeration index.
// The result is identical for every thread count: work splits into fixed
// chunks whose per-chunk winners reduce in chunk order.
MergeResult search(const std::vector<AttributeSample>& samples,
                   unsigned threads = 1);

// CSV with pair_id plus chosen_*/rejected_* columns per attribute.
std::vector<AttributeSample> load_samples(const std::filesystem::path& path);

// Deterministic subset for smoke runs, original order preserved.
std::vector<AttributeSample> subsample(
    const std::vector<AttributeSample>& samples, std::size_t count,
    std::uint64_t seed);

std::string result_to_json(const MergeResult& result);

}  // namespace rmsel::merge_search
