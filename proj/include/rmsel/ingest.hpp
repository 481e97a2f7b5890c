#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rmsel::ingest {

struct ModelRecord {
  std::string id;
  std::string publisher;
  double params_b = 0.0;          // billions of parameters
  double pretrain_tokens_t = 0.0; // trillions of tokens
  std::string release_date;       // YYYY-MM
};

enum class SizeGroup { small, medium, large };

constexpr std::array<SizeGroup, 3> kAllSizeGroups{
    SizeGroup::small, SizeGroup::medium, SizeGroup::large};

std::string_view size_group_name(SizeGroup group);

// Half-open buckets: [0,3) small, [3,6) medium, [6,inf) large.
SizeGroup size_group(double params_b);

enum class Category { chat, chat_hard, safety, reasoning, overall };

constexpr std::array<Category, 5> kAllCategories{
    Category::chat, Category::chat_hard, Category::safety,
    Category::reasoning, Category::overall};

std::string_view category_name(Category category);

struct RewardBenchScores {
  double chat = 0.0;
  double chat_hard = 0.0;
  double safety = 0.0;
  double reasoning = 0.0;
  double overall = 0.0;

  double category(Category c) const;
};

struct RewardBenchTable {
  std::vector<std::string> order;  // file order
  std::map<std::string, RewardBenchScores> scores;
};

// Dense models x metrics table, row-major. Topics resolved from the sidecar
// mapping; metrics without an entry keep an empty tag.
struct ScoreMatrix {
  std::vector<std::string> row_ids;
  std::vector<std::string> column_ids;
  std::vector<std::string> topics;  // parallel to column_ids
  std::vector<double> values;

  std::size_t rows() const { return row_ids.size(); }
  std::size_t cols() const { return column_ids.size(); }
  double at(std::size_t r, std::size_t c) const { return values[r * cols() + c]; }
  double& at(std::size_t r, std::size_t c) { return values[r * cols() + c]; }
  std::optional<std::size_t> row_index(std::string_view id) const;
  std::optional<std::size_t> column_index(std::string_view id) const;
  std::vector<double> column(std::size_t c) const;
};

struct PostTrainingRow {
  std::string model;
  std::string stage;
  RewardBenchScores scores;
  // Printed relative changes, absent on the base row.
  std::array<std::optional<double>, 5> printed_deltas;
};

struct PostTrainingTable {
  PostTrainingRow base;
  std::vector<PostTrainingRow> stages;
};

struct FixtureSet {
  std::vector<ModelRecord> models;
  RewardBenchTable bradley_terry;
  RewardBenchTable regression;
  PostTrainingTable post_training;
};

// Loaders accept CSV (header row) or a `.json` mirror of the same table.
std::vector<ModelRecord> load_model_records(const std::filesystem::path& path);

std::map<std::string, std::string> load_topics(const std::filesystem::path& path);

ScoreMatrix load_score_matrix(const std::filesystem::path& path);
ScoreMatrix load_score_matrix(const std::filesystem::path& path,
                              const std::filesystem::path& topics_path);

RewardBenchTable load_rewardbench(const std::filesystem::path& path);

PostTrainingTable load_post_training(const std::filesystem::path& path);

FixtureSet load_fixture_set(const std::filesystem::path& dir);

// Writers; `meta_lines` are emitted as leading '#' comments (CSV) or under
// a "meta" object (JSON).
void write_score_matrix(const ScoreMatrix& matrix,
                        const std::filesystem::path& path,
                        const std::vector<std::string>& meta_lines = {});

std::string score_matrix_to_json(const ScoreMatrix& matrix);
std::string rewardbench_to_json(const RewardBenchTable& table);
std::string model_records_to_json(const std::vector<ModelRecord>& records);

// |overall - mean(categories)| <= 0.05, evaluated in exact decimal units
// when every value is a short decimal literal.
bool overall_consistent(std::string_view chat, std::string_view chat_hard,
                        std::string_view safety, std::string_view reasoning,
                        std::string_view overall);
bool overall_consistent(const RewardBenchScores& scores);

}  // namespace rmsel::ingest
