#include "rmsel/leaderboard.hpp"

#include <algorithm>
#include <cctype>

#include "rmsel/csv.hpp"
#include "rmsel/errors.hpp"

namespace rmsel::leaderboard {

double relative_gain(double score, double ref) {
  if (!(ref > 0.0)) {
    throw ValidationError(errc::zero_base,
                          "reference must be > 0, got " +
                              csv::format_double(ref));
  }
  return 100.0 * (score - ref) / ref;
}

bool is_default_reference_id(std::string_view id) {
  constexpr std::string_view prefix = "Llama-3.";
  if (id.substr(0, prefix.size()) != prefix) return false;
  std::size_t i = prefix.size();
  const std::size_t minor_start = i;
  while (i < id.size() && std::isdigit(static_cast<unsigned char>(id[i]))) ++i;
  if (i == minor_start || i >= id.size() || id[i] != '-') return false;
  ++i;
  const std::size_t size_start = i;
  while (i < id.size() &&
         (std::isdigit(static_cast<unsigned char>(id[i])) || id[i] == '.')) {
    ++i;
  }
  if (i == size_start) return false;
  return id.substr(i) == "B-Instruct";
}

std::vector<GroupGains> group_gains(
    const ingest::RewardBenchTable& rb,
    const std::vector<ingest::ModelRecord>& records,
    ingest::Category category, const ReferenceRule& rule) {
  std::map<std::string, const ingest::ModelRecord*> by_id;
  for (const auto& record : records) by_id[record.id] = &record;

  // Partition the scored models into size groups, keeping table order.
  std::map<ingest::SizeGroup, std::vector<std::string>> members;
  for (const auto& id : rb.order) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) {
      throw ValidationError(errc::missing_key,
                            id + " has scores but no model record");
    }
    members[ingest::size_group(it->second->params_b)].push_back(id);
  }

  std::vector<GroupGains> out;
  for (const auto group : ingest::kAllSizeGroups) {
    const auto it = members.find(group);
    if (it == members.end()) continue;
    const auto& ids = it->second;

    std::string reference;
    if (!rule.explicit_ids.empty()) {
      for (const auto& wanted : rule.explicit_ids) {
        if (std::find(ids.begin(), ids.end(), wanted) != ids.end()) {
          reference = wanted;
          break;
        }
      }
    }
    if (reference.empty()) {
      double best = 0.0;
      for (const auto& id : ids) {
        if (!is_default_reference_id(id)) continue;
        const double overall = rb.scores.at(id).overall;
        if (reference.empty() || overall > best) {
          reference = id;
          best = overall;
        }
      }
    }
    if (reference.empty()) {
      throw ValidationError(
          errc::missing_reference,
          std::string(ingest::size_group_name(group)) +
              " group has no reference (Llama-3.x) member");
    }

    GroupGains gg;
    gg.group = group;
    gg.reference = reference;
    const double ref_score = rb.scores.at(reference).category(category);
    for (const auto& id : ids) {
      RelativeGain gain;
      gain.model = id;
      gain.reference = reference;
      gain.category = ingest::category_name(category);
      gain.gain_pct =
          id == reference
              ? 0.0
              : relative_gain(rb.scores.at(id).category(category), ref_score);
      gg.gains.push_back(std::move(gain));
    }
    out.push_back(std::move(gg));
  }
  return out;
}

std::vector<StageDeltas> post_training_deltas(
    const ingest::PostTrainingTable& table) {
  for (const auto c : ingest::kAllCategories) {
    if (!(table.base.scores.category(c) > 0.0)) {
      throw ValidationError(errc::zero_base,
                            "base " + std::string(ingest::category_name(c)) +
                                " must be > 0");
    }
  }
  std::vector<StageDeltas> out;
  for (const auto& stage : table.stages) {
    StageDeltas deltas;
    deltas.model = stage.model;
    deltas.stage = stage.stage;
    for (std::size_t k = 0; k < ingest::kAllCategories.size(); ++k) {
      const auto c = ingest::kAllCategories[k];
      deltas.deltas[k] = relative_gain(stage.scores.category(c),
                                       table.base.scores.category(c));
    }
    out.push_back(std::move(deltas));
  }
  return out;
}

std::vector<std::pair<std::string, double>> method_diff(
    const ingest::RewardBenchTable& bt, const ingest::RewardBenchTable& reg) {
  for (const auto& [id, scores] : bt.scores) {
    (void)scores;
    if (!reg.scores.count(id)) {
      throw ValidationError(errc::missing_key,
                            id + " present only in the Bradley-Terry table");
    }
  }
  std::vector<std::pair<std::string, double>> out;
  for (const auto& [id, reg_scores] : reg.scores) {
    const auto it = bt.scores.find(id);
    if (it == bt.scores.end()) {
      throw ValidationError(errc::missing_key,
                            id + " present only in the regression table");
    }
    out.emplace_back(id, reg_scores.overall - it->second.overall);
  }
  return out;
}

}  // namespace rmsel::leaderboard
