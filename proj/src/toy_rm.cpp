#include "rmsel/toy_rm.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "rmsel/csv.hpp"
#include "rmsel/errors.hpp"
#include "rmsel/kernels.hpp"
#include "rmsel/rng.hpp"

namespace rmsel::toy_rm {

namespace {

using nlohmann::json;

double stable_sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// -log sigmoid(z) = max(-z, 0) + log1p(exp(-|z|))
double neg_log_sigmoid(double z) {
  return std::max(-z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

void check_dim(std::span<const double> features, std::size_t dim,
               const char* what) {
  if (features.size() != dim) {
    throw ValidationError(errc::length_mismatch,
                          std::string(what) + ": " +
                              std::to_string(features.size()) + " vs " +
                              std::to_string(dim));
  }
}

void check_batch(const std::vector<FeaturePair>& batch, std::size_t dim) {
  if (batch.empty()) {
    throw ValidationError(errc::empty_input, "empty batch");
  }
  for (const auto& pair : batch) {
    check_dim(pair.winner, dim, "winner");
    check_dim(pair.loser, dim, "loser");
  }
}

// Adam with optional decoupled weight decay and linear warm-up.
struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::size_t t = 0;

  explicit AdamState(std::size_t size) : m(size, 0.0), v(size, 0.0) {}

  void step(std::vector<double>& params, const std::vector<double>& grad,
            const OptimizerConfig& config) {
    ++t;
    double lr = config.learning_rate;
    if (config.warmup_steps > 0 && t < config.warmup_steps) {
      lr *= static_cast<double>(t) / static_cast<double>(config.warmup_steps);
    }
    const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(t));
    for (std::size_t i = 0; i < params.size(); ++i) {
      m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * grad[i];
      v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * grad[i] * grad[i];
      const double m_hat = m[i] / bc1;
      const double v_hat = v[i] / bc2;
      params[i] -= lr * (m_hat / (std::sqrt(v_hat) + config.epsilon) +
                         config.weight_decay * params[i]);
    }
  }
};

template <typename T>
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_validation(
    const std::vector<T>& data, double fraction, rng::Engine& engine) {
  auto indices = rng::permutation(data.size(), engine);
  const std::size_t val_count =
      static_cast<std::size_t>(fraction * static_cast<double>(data.size()));
  std::vector<std::size_t> val(indices.begin(), indices.begin() + val_count);
  std::vector<std::size_t> train(indices.begin() + val_count, indices.end());
  if (train.empty()) std::swap(train, val);
  return {std::move(train), std::move(val)};
}

}  // namespace

double LinearRewardHead::reward(std::span<const double> features) const {
  check_dim(features, weights.size(), "features");
  return kernels::dot(weights.data(), features.data(), weights.size()) + bias;
}

double bt_probability(const LinearRewardHead& head,
                      std::span<const double> first,
                      std::span<const double> second) {
  const double z = head.reward(first) - head.reward(second);
  // The z >= 0 branch lands in [0.5, 1], where 1 - p is exact, so the
  // swapped call returns the exact complement.
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  return 1.0 - 1.0 / (1.0 + std::exp(z));
}

std::vector<FeaturePair> synth_preferences(const LinearRewardHead& latent,
                                           std::size_t n_pairs,
                                           std::uint64_t seed,
                                           const FeatureDistSpec& spec) {
  if (n_pairs < 1) {
    throw ValidationError(errc::out_of_range, "n_pairs must be >= 1");
  }
  if (spec.dim == 0) {
    throw ValidationError(errc::degenerate_input, "zero-dimensional features");
  }
  std::vector<double> mean = spec.mean.empty()
                                 ? std::vector<double>(spec.dim, 0.0)
                                 : spec.mean;
  std::vector<double> stddev = spec.stddev.empty()
                                   ? std::vector<double>(spec.dim, 1.0)
                                   : spec.stddev;
  if (mean.size() != spec.dim || stddev.size() != spec.dim) {
    throw ValidationError(errc::length_mismatch, "distribution spec");
  }
  if (std::all_of(stddev.begin(), stddev.end(),
                  [](double s) { return s == 0.0; })) {
    throw ValidationError(errc::degenerate_input,
                          "zero variance in every dimension");
  }

  rng::Engine engine(seed);
  auto sample_features = [&]() {
    std::vector<double> f(spec.dim);
    for (std::size_t i = 0; i < spec.dim; ++i) {
      f[i] = engine.normal(mean[i], stddev[i]);
    }
    return f;
  };

  std::vector<FeaturePair> pairs;
  pairs.reserve(n_pairs);
  for (std::size_t i = 0; i < n_pairs; ++i) {
    auto first = sample_features();
    auto second = sample_features();
    const double p_first = bt_probability(latent, first, second);
    FeaturePair pair;
    if (engine.bernoulli(p_first)) {
      pair.winner = std::move(first);
      pair.loser = std::move(second);
    } else {
      pair.winner = std::move(second);
      pair.loser = std::move(first);
    }
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

double bt_loss(const LinearRewardHead& head,
               const std::vector<FeaturePair>& batch) {
  check_batch(batch, head.weights.size());
  double total = 0.0;
  for (const auto& pair : batch) {
    total += neg_log_sigmoid(head.reward(pair.winner) -
                             head.reward(pair.loser));
  }
  return total / static_cast<double>(batch.size());
}

HeadGradient bt_gradient(const LinearRewardHead& head,
                         const std::vector<FeaturePair>& batch) {
  check_batch(batch, head.weights.size());
  const std::size_t d = head.weights.size();
  HeadGradient grad;
  grad.weights.assign(d, 0.0);
  const double scale = 1.0 / static_cast<double>(batch.size());
  for (const auto& pair : batch) {
    const double z = head.reward(pair.winner) - head.reward(pair.loser);
    // d/dz of -log sigmoid(z) is -sigmoid(-z)
    const double factor = -stable_sigmoid(-z) * scale;
    for (std::size_t i = 0; i < d; ++i) {
      grad.weights[i] += factor * (pair.winner[i] - pair.loser[i]);
    }
  }
  grad.bias = 0.0;  // cancels in the reward difference
  return grad;
}

double pairwise_accuracy(const LinearRewardHead& head,
                         const std::vector<FeaturePair>& pairs) {
  if (pairs.empty()) {
    throw ValidationError(errc::empty_input, "no pairs");
  }
  std::size_t correct = 0;
  for (const auto& pair : pairs) {
    if (head.reward(pair.winner) > head.reward(pair.loser)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(pairs.size());
}

BtTrainResult train_bt(const std::vector<FeaturePair>& data,
                       const OptimizerConfig& config) {
  if (data.empty()) {
    throw ValidationError(errc::empty_input, "no training pairs");
  }
  const std::size_t d = data.front().winner.size();
  check_batch(data, d);

  rng::Engine engine(config.seed);
  auto [train_idx, val_idx] =
      split_validation(data, config.validation_fraction, engine);
  std::vector<FeaturePair> validation;
  for (const auto idx : val_idx) validation.push_back(data[idx]);
  if (validation.empty()) {
    for (const auto idx : train_idx) validation.push_back(data[idx]);
  }

  BtTrainResult result;
  result.final_head.weights.assign(d, 0.0);
  result.final_head.bias = 0.0;
  auto& head = result.final_head;

  AdamState weight_state(d);
  result.best_head = head;
  result.best_validation_accuracy = pairwise_accuracy(head, validation);

  const std::size_t batch_size = std::max<std::size_t>(1, config.batch_size);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    engine.shuffle(train_idx);
    for (std::size_t start = 0; start < train_idx.size();
         start += batch_size) {
      const std::size_t end = std::min(start + batch_size, train_idx.size());
      std::vector<FeaturePair> batch;
      batch.reserve(end - start);
      for (std::size_t i = start; i < end; ++i) {
        batch.push_back(data[train_idx[i]]);
      }
      result.loss_trace.push_back(bt_loss(head, batch));
      const auto grad = bt_gradient(head, batch);
      for (const double g : grad.weights) {
        if (!std::isfinite(g)) {
          throw NumericalError("non-finite gradient at step " +
                               std::to_string(result.steps));
        }
      }
      weight_state.step(head.weights, grad.weights, config);
      ++result.steps;
      if (config.checkpoint_every > 0 &&
          result.steps % config.checkpoint_every == 0) {
        const double acc = pairwise_accuracy(head, validation);
        if (acc > result.best_validation_accuracy) {
          result.best_validation_accuracy = acc;
          result.best_head = head;
        }
      }
    }
  }
  const double final_acc = pairwise_accuracy(head, validation);
  if (final_acc > result.best_validation_accuracy) {
    result.best_validation_accuracy = final_acc;
    result.best_head = head;
  }
  return result;
}

double reg_loss(const AttributeHead& head,
                const std::vector<std::vector<double>>& features,
                const std::vector<std::vector<double>>& targets) {
  if (features.empty() || features.size() != targets.size()) {
    throw ValidationError(errc::length_mismatch,
                          std::to_string(features.size()) + " samples vs " +
                              std::to_string(targets.size()) + " targets");
  }
  double total = 0.0;
  for (std::size_t s = 0; s < features.size(); ++s) {
    check_dim(features[s], head.in_dim, "features");
    check_dim(targets[s], head.out_dim, "targets");
    const auto scores = attribute_scores(head, features[s]);
    for (std::size_t j = 0; j < head.out_dim; ++j) {
      const double err = scores[j] - targets[s][j];
      total += err * err;
    }
  }
  return total /
         static_cast<double>(features.size() * head.out_dim);
}

std::vector<double> reg_gradient(
    const AttributeHead& head, const std::vector<std::vector<double>>& features,
    const std::vector<std::vector<double>>& targets) {
  if (features.empty() || features.size() != targets.size()) {
    throw ValidationError(errc::length_mismatch, "features vs targets");
  }
  std::vector<double> grad(head.weights.size(), 0.0);
  const double scale =
      2.0 / static_cast<double>(features.size() * head.out_dim);
  for (std::size_t s = 0; s < features.size(); ++s) {
    check_dim(features[s], head.in_dim, "features");
    check_dim(targets[s], head.out_dim, "targets");
    const auto scores = attribute_scores(head, features[s]);
    for (std::size_t j = 0; j < head.out_dim; ++j) {
      const double err = scale * (scores[j] - targets[s][j]);
      for (std::size_t i = 0; i < head.in_dim; ++i) {
        grad[i * head.out_dim + j] += err * features[s][i];
      }
    }
  }
  return grad;
}

RegTrainResult train_reg(const std::vector<std::vector<double>>& features,
                         const std::vector<std::vector<double>>& targets,
                         std::size_t out_dim, const OptimizerConfig& config) {
  if (features.empty() || features.size() != targets.size()) {
    throw ValidationError(errc::length_mismatch, "features vs targets");
  }
  const std::size_t d = features.front().size();

  rng::Engine engine(config.seed);
  auto [train_idx, val_idx] =
      split_validation(features, config.validation_fraction, engine);
  if (val_idx.empty()) val_idx = train_idx;

  RegTrainResult result;
  result.final_head.in_dim = d;
  result.final_head.out_dim = out_dim;
  result.final_head.weights.assign(d * out_dim, 0.0);
  auto& head = result.final_head;

  auto gather = [&](const std::vector<std::size_t>& idx, bool target) {
    std::vector<std::vector<double>> out;
    out.reserve(idx.size());
    for (const auto i : idx) out.push_back(target ? targets[i] : features[i]);
    return out;
  };
  const auto val_features = gather(val_idx, false);
  const auto val_targets = gather(val_idx, true);

  AdamState state(head.weights.size());
  result.best_head = head;
  result.best_validation_loss = reg_loss(head, val_features, val_targets);

  const std::size_t batch_size = std::max<std::size_t>(1, config.batch_size);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    engine.shuffle(train_idx);
    for (std::size_t start = 0; start < train_idx.size();
         start += batch_size) {
      const std::size_t end = std::min(start + batch_size, train_idx.size());
      std::vector<std::size_t> batch_idx(train_idx.begin() + start,
                                         train_idx.begin() + end);
      const auto batch_features = gather(batch_idx, false);
      const auto batch_targets = gather(batch_idx, true);
      result.loss_trace.push_back(
          reg_loss(head, batch_features, batch_targets));
      const auto grad = reg_gradient(head, batch_features, batch_targets);
      for (const double g : grad) {
        if (!std::isfinite(g)) {
          throw NumericalError("non-finite gradient at step " +
                               std::to_string(result.steps));
        }
      }
      state.step(head.weights, grad, config);
      ++result.steps;
      if (config.checkpoint_every > 0 &&
          result.steps % config.checkpoint_every == 0) {
        const double loss = reg_loss(head, val_features, val_targets);
        if (loss < result.best_validation_loss) {
          result.best_validation_loss = loss;
          result.best_head = head;
        }
      }
    }
  }
  const double final_loss = reg_loss(head, val_features, val_targets);
  if (final_loss < result.best_validation_loss) {
    result.best_validation_loss = final_loss;
    result.best_head = head;
  }
  return result;
}

std::vector<double> attribute_scores(const AttributeHead& head,
                                     std::span<const double> features) {
  check_dim(features, head.in_dim, "features");
  std::vector<double> scores(head.out_dim, 0.0);
  for (std::size_t i = 0; i < head.in_dim; ++i) {
    const double f = features[i];
    for (std::size_t j = 0; j < head.out_dim; ++j) {
      scores[j] += f * head.at(i, j);
    }
  }
  return scores;
}

std::vector<FeaturePair> load_feature_pairs(
    const std::filesystem::path& path) {
  const auto table = csv::read_file(path);
  std::vector<std::size_t> winner_cols;
  std::vector<std::size_t> loser_cols;
  for (std::size_t d = 0;; ++d) {
    const auto w = table.column("winner_" + std::to_string(d));
    const auto l = table.column("loser_" + std::to_string(d));
    if (!w || !l) break;
    winner_cols.push_back(*w);
    loser_cols.push_back(*l);
  }
  if (winner_cols.empty()) {
    throw ValidationError(errc::bad_schema,
                          path.string() + ": no winner_*/loser_* columns");
  }
  std::vector<FeaturePair> pairs;
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) {
      throw ValidationError(errc::malformed_row, path.string());
    }
    FeaturePair pair;
    for (std::size_t d = 0; d < winner_cols.size(); ++d) {
      bool ok = false;
      pair.winner.push_back(csv::parse_double(row[winner_cols[d]], ok));
      if (!ok) throw ValidationError(errc::non_numeric_cell, path.string());
      pair.loser.push_back(csv::parse_double(row[loser_cols[d]], ok));
      if (!ok) throw ValidationError(errc::non_numeric_cell, path.string());
    }
    pairs.push_back(std::move(pair));
  }
  if (pairs.empty()) throw ValidationError(errc::no_records, path.string());
  return pairs;
}

std::pair<std::vector<std::vector<double>>, std::vector<std::vector<double>>>
load_attribute_dataset(const std::filesystem::path& path) {
  const auto table = csv::read_file(path);
  std::vector<std::size_t> feature_cols;
  std::vector<std::size_t> target_cols;
  for (std::size_t d = 0;; ++d) {
    const auto c = table.column("feature_" + std::to_string(d));
    if (!c) break;
    feature_cols.push_back(*c);
  }
  for (std::size_t d = 0;; ++d) {
    const auto c = table.column("target_" + std::to_string(d));
    if (!c) break;
    target_cols.push_back(*c);
  }
  if (feature_cols.empty() || target_cols.empty()) {
    throw ValidationError(errc::bad_schema,
                          path.string() + ": need feature_* and target_* columns");
  }
  std::vector<std::vector<double>> features;
  std::vector<std::vector<double>> targets;
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) {
      throw ValidationError(errc::malformed_row, path.string());
    }
    std::vector<double> f, t;
    bool ok = false;
    for (const auto c : feature_cols) {
      f.push_back(csv::parse_double(row[c], ok));
      if (!ok) throw ValidationError(errc::non_numeric_cell, path.string());
    }
    for (const auto c : target_cols) {
      t.push_back(csv::parse_double(row[c], ok));
      if (!ok) throw ValidationError(errc::non_numeric_cell, path.string());
    }
    features.push_back(std::move(f));
    targets.push_back(std::move(t));
  }
  if (features.empty()) throw ValidationError(errc::no_records, path.string());
  return {std::move(features), std::move(targets)};
}

std::string head_to_json(const LinearRewardHead& head) {
  json doc;
  doc["schema"] = "rmsel.reward_head.v1";
  doc["weights"] = head.weights;
  doc["bias"] = head.bias;
  return doc.dump(2);
}

LinearRewardHead head_from_json(const std::string& text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || doc.value("schema", "") != "rmsel.reward_head.v1") {
    throw ValidationError(errc::bad_schema, "expected rmsel.reward_head.v1");
  }
  LinearRewardHead head;
  head.weights = doc.at("weights").get<std::vector<double>>();
  head.bias = doc.at("bias").get<double>();
  return head;
}

std::string attribute_head_to_json(const AttributeHead& head) {
  json doc;
  doc["schema"] = "rmsel.attribute_head.v1";
  doc["in_dim"] = head.in_dim;
  doc["out_dim"] = head.out_dim;
  doc["weights"] = head.weights;
  return doc.dump(2);
}

AttributeHead attribute_head_from_json(const std::string& text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() ||
      doc.value("schema", "") != "rmsel.attribute_head.v1") {
    throw ValidationError(errc::bad_schema, "expected rmsel.attribute_head.v1");
  }
  AttributeHead head;
  head.in_dim = doc.at("in_dim").get<std::size_t>();
  head.out_dim = doc.at("out_dim").get<std::size_t>();
  head.weights = doc.at("weights").get<std::vector<double>>();
  if (head.weights.size() != head.in_dim * head.out_dim) {
    throw ValidationError(errc::bad_schema, "weight count mismatch");
  }
  return head;
}

}  // namespace rmsel::toy_rm
