#include "rmsel/ingest.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "rmsel/csv.hpp"
#include "rmsel/errors.hpp"

namespace rmsel::ingest {

namespace {

using nlohmann::json;

bool is_json_path(const std::filesystem::path& path) {
  return path.extension() == ".json";
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError(errc::missing_file, "cannot open " + path.string());
  }
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ValidationError(errc::bad_schema,
                          path.string() + ": " + std::string(e.what()));
  }
  return doc;
}

void expect_schema(const json& doc, std::string_view schema,
                   const std::filesystem::path& path) {
  if (!doc.is_object() || !doc.contains("schema") ||
      doc["schema"] != schema) {
    throw ValidationError(errc::bad_schema,
                          path.string() + ": expected schema '" +
                              std::string(schema) + "'");
  }
}

double require_number(const json& obj, const char* key,
                      const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_number()) {
    throw ValidationError(errc::non_numeric_cell,
                          where + ": field '" + key + "'");
  }
  return obj[key].get<double>();
}

std::string require_string(const json& obj, const char* key,
                           const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_string()) {
    throw ValidationError(errc::bad_schema, where + ": field '" + key + "'");
  }
  return obj[key].get<std::string>();
}

double parse_cell(const std::string& text, const std::string& where) {
  bool ok = false;
  const double value = csv::parse_double(text, ok);
  if (!ok) {
    throw ValidationError(errc::non_numeric_cell,
                          where + ": '" + text + "'");
  }
  return value;
}

std::size_t require_column(const csv::Table& table, std::string_view name,
                           const std::filesystem::path& path) {
  const auto idx = table.column(name);
  if (!idx) {
    throw ValidationError(errc::bad_schema, path.string() +
                                                ": missing column '" +
                                                std::string(name) + "'");
  }
  return *idx;
}

void validate_record(ModelRecord& record, std::set<std::string>& seen) {
  if (record.id.empty()) {
    throw ValidationError(errc::malformed_row, "empty model id");
  }
  if (!seen.insert(record.id).second) {
    throw ValidationError(errc::duplicate_id, record.id);
  }
  if (!(record.params_b > 0.0)) {
    throw ValidationError(errc::nonpositive_value,
                          record.id + ": params_b must be > 0");
  }
  if (!(record.pretrain_tokens_t > 0.0)) {
    throw ValidationError(errc::nonpositive_value,
                          record.id + ": pretrain_tokens_t must be > 0");
  }
}

RewardBenchScores row_scores(const std::array<double, 5>& v) {
  return RewardBenchScores{v[0], v[1], v[2], v[3], v[4]};
}

void insert_rewardbench_row(RewardBenchTable& table, const std::string& id,
                            const RewardBenchScores& scores, bool consistent) {
  if (!consistent) {
    throw ValidationError(errc::overall_mismatch,
                          id + ": overall deviates from category mean by more "
                               "than 0.05");
  }
  if (!table.scores.emplace(id, scores).second) {
    throw ValidationError(errc::duplicate_id, id);
  }
  table.order.push_back(id);
}

}  // namespace

std::string_view size_group_name(SizeGroup group) {
  switch (group) {
    case SizeGroup::small:
      return "SMALL";
    case SizeGroup::medium:
      return "MEDIUM";
    case SizeGroup::large:
      return "LARGE";
  }
  return "?";
}

SizeGroup size_group(double params_b) {
  if (!(params_b > 0.0)) {
    throw ValidationError(errc::nonpositive_value,
                          "params_b must be > 0, got " +
                              csv::format_double(params_b));
  }
  if (params_b < 3.0) return SizeGroup::small;
  if (params_b < 6.0) return SizeGroup::medium;
  return SizeGroup::large;
}

std::string_view category_name(Category category) {
  switch (category) {
    case Category::chat:
      return "chat";
    case Category::chat_hard:
      return "chat_hard";
    case Category::safety:
      return "safety";
    case Category::reasoning:
      return "reasoning";
    case Category::overall:
      return "overall";
  }
  return "?";
}

double RewardBenchScores::category(Category c) const {
  switch (c) {
    case Category::chat:
      return chat;
    case Category::chat_hard:
      return chat_hard;
    case Category::safety:
      return safety;
    case Category::reasoning:
      return reasoning;
    case Category::overall:
      return overall;
  }
  return 0.0;
}

std::optional<std::size_t> ScoreMatrix::row_index(std::string_view id) const {
  for (std::size_t i = 0; i < row_ids.size(); ++i) {
    if (row_ids[i] == id) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> ScoreMatrix::column_index(
    std::string_view id) const {
  for (std::size_t i = 0; i < column_ids.size(); ++i) {
    if (column_ids[i] == id) return i;
  }
  return std::nullopt;
}

std::vector<double> ScoreMatrix::column(std::size_t c) const {
  std::vector<double> out(rows());
  for (std::size_t r = 0; r < rows(); ++r) out[r] = at(r, c);
  return out;
}

bool overall_consistent(std::string_view chat, std::string_view chat_hard,
                        std::string_view safety, std::string_view reasoning,
                        std::string_view overall) {
  const auto c = csv::parse_decimal_micro(chat);
  const auto ch = csv::parse_decimal_micro(chat_hard);
  const auto s = csv::parse_decimal_micro(safety);
  const auto r = csv::parse_decimal_micro(reasoning);
  const auto o = csv::parse_decimal_micro(overall);
  if (c && ch && s && r && o) {
    // |sum - 4*overall| <= 4 * 0.05 in exact millionths.
    const std::int64_t sum = *c + *ch + *s + *r;
    const std::int64_t diff = sum - 4 * *o;
    return diff >= -200000 && diff <= 200000;
  }
  bool ok = false;
  RewardBenchScores scores;
  scores.chat = csv::parse_double(chat, ok);
  if (!ok) return false;
  scores.chat_hard = csv::parse_double(chat_hard, ok);
  if (!ok) return false;
  scores.safety = csv::parse_double(safety, ok);
  if (!ok) return false;
  scores.reasoning = csv::parse_double(reasoning, ok);
  if (!ok) return false;
  scores.overall = csv::parse_double(overall, ok);
  if (!ok) return false;
  return overall_consistent(scores);
}

bool overall_consistent(const RewardBenchScores& scores) {
  const double mean =
      (scores.chat + scores.chat_hard + scores.safety + scores.reasoning) /
      4.0;
  // Tiny slack keeps binary rounding from flipping the inclusive boundary.
  return std::abs(scores.overall - mean) <= 0.05 + 1e-9;
}

std::vector<ModelRecord> load_model_records(
    const std::filesystem::path& path) {
  std::vector<ModelRecord> records;
  std::set<std::string> seen;

  if (is_json_path(path)) {
    const json doc = read_json_file(path);
    expect_schema(doc, "rmsel.models.v1", path);
    for (const auto& row : doc.at("rows")) {
      ModelRecord record;
      record.id = require_string(row, "id", path.string());
      record.publisher = require_string(row, "publisher", path.string());
      record.params_b = require_number(row, "params_b", record.id);
      record.pretrain_tokens_t =
          require_number(row, "pretrain_tokens_t", record.id);
      record.release_date = require_string(row, "release_date", record.id);
      validate_record(record, seen);
      records.push_back(std::move(record));
    }
  } else {
    const auto table = csv::read_file(path);
    const auto id_col = require_column(table, "id", path);
    const auto pub_col = require_column(table, "publisher", path);
    const auto params_col = require_column(table, "params_b", path);
    const auto tokens_col = require_column(table, "pretrain_tokens_t", path);
    const auto date_col = require_column(table, "release_date", path);
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      const auto& row = table.rows[i];
      if (row.size() != table.header.size()) {
        throw ValidationError(errc::malformed_row,
                              path.string() + ": row " + std::to_string(i + 1));
      }
      ModelRecord record;
      record.id = row[id_col];
      record.publisher = row[pub_col];
      record.params_b = parse_cell(row[params_col], record.id + ".params_b");
      record.pretrain_tokens_t =
          parse_cell(row[tokens_col], record.id + ".pretrain_tokens_t");
      record.release_date = row[date_col];
      validate_record(record, seen);
      records.push_back(std::move(record));
    }
  }

  if (records.empty()) {
    throw ValidationError(errc::no_records, path.string());
  }
  return records;
}

std::map<std::string, std::string> load_topics(
    const std::filesystem::path& path) {
  const auto table = csv::read_file(path);
  const auto metric_col = require_column(table, "metric", path);
  const auto topic_col = require_column(table, "topic", path);
  std::map<std::string, std::string> topics;
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) {
      throw ValidationError(errc::malformed_row, path.string());
    }
    topics[row[metric_col]] = row[topic_col];
  }
  return topics;
}

ScoreMatrix load_score_matrix(const std::filesystem::path& path) {
  ScoreMatrix matrix;
  std::set<std::string> seen;

  if (is_json_path(path)) {
    const json doc = read_json_file(path);
    expect_schema(doc, "rmsel.score_matrix.v1", path);
    for (const auto& col : doc.at("columns")) {
      matrix.column_ids.push_back(col.get<std::string>());
    }
    matrix.topics.assign(matrix.cols(), "");
    if (doc.contains("topics")) {
      for (std::size_t c = 0; c < matrix.cols(); ++c) {
        const auto it = doc["topics"].find(matrix.column_ids[c]);
        if (it != doc["topics"].end()) matrix.topics[c] = it->get<std::string>();
      }
    }
    for (const auto& row : doc.at("rows")) {
      const std::string id = require_string(row, "model", path.string());
      if (!seen.insert(id).second) {
        throw ValidationError(errc::duplicate_id, id);
      }
      const auto& vals = row.at("values");
      if (!vals.is_array() || vals.size() != matrix.cols()) {
        throw ValidationError(errc::ragged_row, id);
      }
      matrix.row_ids.push_back(id);
      for (const auto& v : vals) {
        if (!v.is_number()) {
          throw ValidationError(errc::non_numeric_cell, id);
        }
        matrix.values.push_back(v.get<double>());
      }
    }
  } else {
    const auto table = csv::read_file(path);
    if (table.header.size() < 2) {
      throw ValidationError(errc::bad_schema,
                            path.string() + ": need id column plus metrics");
    }
    matrix.column_ids.assign(table.header.begin() + 1, table.header.end());
    std::set<std::string> col_seen;
    for (const auto& c : matrix.column_ids) {
      if (!col_seen.insert(c).second) {
        throw ValidationError(errc::duplicate_id, "column " + c);
      }
    }
    matrix.topics.assign(matrix.cols(), "");
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      const auto& row = table.rows[i];
      if (row.size() != table.header.size()) {
        throw ValidationError(
            errc::ragged_row,
            path.string() + ": row " + std::to_string(i + 1) + " has " +
                std::to_string(row.size()) + " fields, expected " +
                std::to_string(table.header.size()));
      }
      if (!seen.insert(row[0]).second) {
        throw ValidationError(errc::duplicate_id, row[0]);
      }
      matrix.row_ids.push_back(row[0]);
      for (std::size_t c = 1; c < row.size(); ++c) {
        if (row[c].empty()) {
          throw ValidationError(errc::missing_cell,
                                "(" + row[0] + ", " +
                                    matrix.column_ids[c - 1] + ")");
        }
        bool ok = false;
        const double value = csv::parse_double(row[c], ok);
        if (!ok) {
          throw ValidationError(errc::non_numeric_cell,
                                "(" + row[0] + ", " + matrix.column_ids[c - 1] +
                                    ") = '" + row[c] + "'");
        }
        matrix.values.push_back(value);
      }
    }
  }

  if (matrix.rows() == 0) {
    throw ValidationError(errc::no_records, path.string());
  }
  return matrix;
}

ScoreMatrix load_score_matrix(const std::filesystem::path& path,
                              const std::filesystem::path& topics_path) {
  ScoreMatrix matrix = load_score_matrix(path);
  const auto topics = load_topics(topics_path);
  for (std::size_t c = 0; c < matrix.cols(); ++c) {
    const auto it = topics.find(matrix.column_ids[c]);
    if (it != topics.end()) matrix.topics[c] = it->second;
  }
  return matrix;
}

RewardBenchTable load_rewardbench(const std::filesystem::path& path) {
  RewardBenchTable table;

  if (is_json_path(path)) {
    const json doc = read_json_file(path);
    expect_schema(doc, "rmsel.rewardbench.v1", path);
    for (const auto& row : doc.at("rows")) {
      const std::string id = require_string(row, "model", path.string());
      RewardBenchScores scores;
      scores.chat = require_number(row, "chat", id);
      scores.chat_hard = require_number(row, "chat_hard", id);
      scores.safety = require_number(row, "safety", id);
      scores.reasoning = require_number(row, "reasoning", id);
      scores.overall = require_number(row, "overall", id);
      insert_rewardbench_row(table, id, scores, overall_consistent(scores));
    }
  } else {
    const auto csv_table = csv::read_file(path);
    const auto model_col = require_column(csv_table, "model", path);
    const std::array<std::size_t, 5> cols{
        require_column(csv_table, "chat", path),
        require_column(csv_table, "chat_hard", path),
        require_column(csv_table, "safety", path),
        require_column(csv_table, "reasoning", path),
        require_column(csv_table, "overall", path)};
    for (const auto& row : csv_table.rows) {
      if (row.size() != csv_table.header.size()) {
        throw ValidationError(errc::malformed_row, path.string());
      }
      const std::string& id = row[model_col];
      std::array<double, 5> values{};
      for (std::size_t k = 0; k < 5; ++k) {
        values[k] = parse_cell(row[cols[k]], id);
      }
      const bool consistent =
          overall_consistent(row[cols[0]], row[cols[1]], row[cols[2]],
                             row[cols[3]], row[cols[4]]);
      insert_rewardbench_row(table, id, row_scores(values), consistent);
    }
  }

  if (table.order.empty()) {
    throw ValidationError(errc::no_records, path.string());
  }
  return table;
}

PostTrainingTable load_post_training(const std::filesystem::path& path) {
  const auto table = csv::read_file(path);
  const auto model_col = require_column(table, "model", path);
  const auto stage_col = require_column(table, "stage", path);
  const std::array<std::size_t, 5> score_cols{
      require_column(table, "chat", path),
      require_column(table, "chat_hard", path),
      require_column(table, "safety", path),
      require_column(table, "reasoning", path),
      require_column(table, "overall", path)};
  const std::array<std::size_t, 5> delta_cols{
      require_column(table, "delta_chat", path),
      require_column(table, "delta_chat_hard", path),
      require_column(table, "delta_safety", path),
      require_column(table, "delta_reasoning", path),
      require_column(table, "delta_overall", path)};

  PostTrainingTable out;
  bool have_base = false;
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) {
      throw ValidationError(errc::malformed_row, path.string());
    }
    PostTrainingRow entry;
    entry.model = row[model_col];
    entry.stage = row[stage_col];
    std::array<double, 5> values{};
    for (std::size_t k = 0; k < 5; ++k) {
      values[k] = parse_cell(row[score_cols[k]], entry.model);
    }
    entry.scores = row_scores(values);
    for (std::size_t k = 0; k < 5; ++k) {
      const std::string& cell = row[delta_cols[k]];
      if (!cell.empty()) {
        entry.printed_deltas[k] = parse_cell(cell, entry.model + ".delta");
      }
    }
    if (entry.stage == "base") {
      if (have_base) {
        throw ValidationError(errc::duplicate_id, "second base row");
      }
      out.base = std::move(entry);
      have_base = true;
    } else {
      out.stages.push_back(std::move(entry));
    }
  }
  if (!have_base) {
    throw ValidationError(errc::missing_reference,
                          path.string() + ": no base stage row");
  }
  if (out.stages.empty()) {
    throw ValidationError(errc::no_records,
                          path.string() + ": no post-training stages");
  }
  return out;
}

FixtureSet load_fixture_set(const std::filesystem::path& dir) {
  FixtureSet set;
  set.models = load_model_records(dir / "models.csv");
  set.bradley_terry = load_rewardbench(dir / "rewardbench_bt.csv");
  set.regression = load_rewardbench(dir / "rewardbench_regression.csv");
  set.post_training = load_post_training(dir / "post_training.csv");
  return set;
}

void write_score_matrix(const ScoreMatrix& matrix,
                        const std::filesystem::path& path,
                        const std::vector<std::string>& meta_lines) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& line : meta_lines) out << "# " << line << "\n";
  std::vector<std::string> header;
  header.push_back("model");
  header.insert(header.end(), matrix.column_ids.begin(),
                matrix.column_ids.end());
  out << csv::to_line(header) << "\n";
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    std::vector<std::string> fields;
    fields.push_back(matrix.row_ids[r]);
    for (std::size_t c = 0; c < matrix.cols(); ++c) {
      fields.push_back(csv::format_double(matrix.at(r, c)));
    }
    out << csv::to_line(fields) << "\n";
  }
}

std::string score_matrix_to_json(const ScoreMatrix& matrix) {
  json doc;
  doc["schema"] = "rmsel.score_matrix.v1";
  doc["columns"] = matrix.column_ids;
  json topics = json::object();
  for (std::size_t c = 0; c < matrix.cols(); ++c) {
    if (!matrix.topics[c].empty()) topics[matrix.column_ids[c]] = matrix.topics[c];
  }
  doc["topics"] = topics;
  doc["rows"] = json::array();
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    json row;
    row["model"] = matrix.row_ids[r];
    row["values"] = json::array();
    for (std::size_t c = 0; c < matrix.cols(); ++c) {
      row["values"].push_back(matrix.at(r, c));
    }
    doc["rows"].push_back(std::move(row));
  }
  return doc.dump(2);
}

std::string rewardbench_to_json(const RewardBenchTable& table) {
  json doc;
  doc["schema"] = "rmsel.rewardbench.v1";
  doc["rows"] = json::array();
  for (const auto& id : table.order) {
    const auto& s = table.scores.at(id);
    doc["rows"].push_back({{"model", id},
                           {"chat", s.chat},
                           {"chat_hard", s.chat_hard},
                           {"safety", s.safety},
                           {"reasoning", s.reasoning},
                           {"overall", s.overall}});
  }
  return doc.dump(2);
}

std::string model_records_to_json(const std::vector<ModelRecord>& records) {
  json doc;
  doc["schema"] = "rmsel.models.v1";
  doc["rows"] = json::array();
  for (const auto& r : records) {
    doc["rows"].push_back({{"id", r.id},
                           {"publisher", r.publisher},
                           {"params_b", r.params_b},
                           {"pretrain_tokens_t", r.pretrain_tokens_t},
                           {"release_date", r.release_date}});
  }
  return doc.dump(2);
}

}  // namespace rmsel::ingest
