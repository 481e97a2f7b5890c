#pragma once

#include <map>
#include <string>
#include <vector>

#include "rmsel/ingest.hpp"

namespace rmsel::leaderboard {

struct RelativeGain {
  std::string model;
  std::string reference;
  std::string category;  // category name or "overall"
  double gain_pct = 0.0;
};

// 100 * (score - ref) / ref; ref must be > 0.
double relative_gain(double score, double ref);

struct GroupGains {
  ingest::SizeGroup group;
  std::string reference;
  std::vector<RelativeGain> gains;  // includes the reference at exactly 0
};

struct ReferenceRule {
  // Explicit reference ids override detection; first id found in a group
  // wins. Empty means auto-detect the base Llama-3.x instruct line
  // (Llama-3.<minor>-<size>B-Instruct); among several detected candidates
  // in one group the highest overall wins.
  std::vector<std::string> explicit_ids;
};

// True for ids of the form Llama-3.<minor>-<size>B-Instruct.
bool is_default_reference_id(std::string_view id);

std::vector<GroupGains> group_gains(
    const ingest::RewardBenchTable& rb,
    const std::vector<ingest::ModelRecord>& records,
    ingest::Category category = ingest::Category::overall,
    const ReferenceRule& rule = {});

struct StageDeltas {
  std::string model;
  std::string stage;
  // chat, chat_hard, safety, reasoning, overall
  std::array<double, 5> deltas{};
};

std::vector<StageDeltas> post_training_deltas(
    const ingest::PostTrainingTable& table);

// Regression overall minus Bradley-Terry overall, sorted by model id.
// Every model must appear in both tables.
std::vector<std::pair<std::string, double>> method_diff(
    const ingest::RewardBenchTable& bt, const ingest::RewardBenchTable& reg);

}  // namespace rmsel::leaderboard
