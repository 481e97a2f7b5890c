#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace rmsel::toy_rm {

// Winner/loser feature vectors standing in for the (prompt, response)
// representations a backbone would produce; only the heads train here.
struct FeaturePair {
  std::vector<double> winner;
  std::vector<double> loser;
};

struct LinearRewardHead {
  std::vector<double> weights;
  double bias = 0.0;

  double reward(std::span<const double> features) const;
};

// d x n projection, row-major (input dim x attribute count).
struct AttributeHead {
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  std::vector<double> weights;

  double at(std::size_t i, std::size_t j) const { return weights[i * out_dim + j]; }
};

// Win probability of the first candidate: sigmoid of the reward difference.
double bt_probability(const LinearRewardHead& head,
                      std::span<const double> first,
                      std::span<const double> second);

struct FeatureDistSpec {
  std::size_t dim = 0;
  std::vector<double> mean;    // empty -> zeros
  std::vector<double> stddev;  // empty -> ones
};

// Pairs of feature vectors sampled from the spec; the winner is drawn from
// a Bernoulli with the latent head's Bradley-Terry probability.
std::vector<FeaturePair> synth_preferences(const LinearRewardHead& latent,
                                           std::size_t n_pairs,
                                           std::uint64_t seed,
                                           const FeatureDistSpec& spec);

// Mean of -log sigmoid(reward(winner) - reward(loser)).
double bt_loss(const LinearRewardHead& head,
               const std::vector<FeaturePair>& batch);

struct HeadGradient {
  std::vector<double> weights;
  double bias = 0.0;
};

HeadGradient bt_gradient(const LinearRewardHead& head,
                         const std::vector<FeaturePair>& batch);

// Fraction of pairs ranked correctly (strict inequality).
double pairwise_accuracy(const LinearRewardHead& head,
                         const std::vector<FeaturePair>& pairs);

struct OptimizerConfig {
  double learning_rate = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.0;  // decoupled
  std::size_t warmup_steps = 20;
  std::size_t batch_size = 64;
  std::size_t epochs = 10;
  std::uint64_t seed = 0;
  double validation_fraction = 0.2;
  std::size_t checkpoint_every = 20;  // validation cadence, in steps
};

struct BtTrainResult {
  LinearRewardHead final_head;
  LinearRewardHead best_head;  // best validation accuracy over the trace
  double best_validation_accuracy = 0.0;
  std::vector<double> loss_trace;  // per-step batch loss before the update
  std::size_t steps = 0;
};

BtTrainResult train_bt(const std::vector<FeaturePair>& data,
                       const OptimizerConfig& config);

// Mean squared error across samples and attributes.
double reg_loss(const AttributeHead& head,
                const std::vector<std::vector<double>>& features,
                const std::vector<std::vector<double>>& targets);

std::vector<double> reg_gradient(const AttributeHead& head,
                                 const std::vector<std::vector<double>>& features,
                                 const std::vector<std::vector<double>>& targets);

struct RegTrainResult {
  AttributeHead final_head;
  AttributeHead best_head;  // lowest validation loss over the trace
  double best_validation_loss = 0.0;
  std::vector<double> loss_trace;
  std::size_t steps = 0;
};

RegTrainResult train_reg(const std::vector<std::vector<double>>& features,
                         const std::vector<std::vector<double>>& targets,
                         std::size_t out_dim, const OptimizerConfig& config);

// The attribute vector handed to the merge-weight search.
std::vector<double> attribute_scores(const AttributeHead& head,
                                     std::span<const double> features);

// Dataset files: winner_0..winner_{d-1}, loser_0..loser_{d-1} columns.
std::vector<FeaturePair> load_feature_pairs(const std::filesystem::path& path);

// feature_0.. plus target_0.. columns.
std::pair<std::vector<std::vector<double>>, std::vector<std::vector<double>>>
load_attribute_dataset(const std::filesystem::path& path);

std::string head_to_json(const LinearRewardHead& head);
LinearRewardHead head_from_json(const std::string& text);
std::string attribute_head_to_json(const AttributeHead& head);
AttributeHead attribute_head_from_json(const std::string& text);

}  // namespace rmsel::toy_rm
