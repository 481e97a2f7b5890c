#pragma once

#include <stdexcept>
#include <string>

namespace rmsel {

// Error taxonomy mapped to CLI exit codes: validation -> 1, I/O -> 2,
// numerical -> 3.

enum class errc {
  // ingest
  missing_file,
  malformed_row,
  duplicate_id,
  nonpositive_value,
  no_records,
  ragged_row,
  non_numeric_cell,
  missing_cell,
  overall_mismatch,
  missing_topic,
  bad_schema,
  // generic argument / data validation
  length_mismatch,
  constant_input,
  out_of_range,
  empty_input,
  key_mismatch,
  missing_key,
  missing_reference,
  zero_base,
  infinite_statistic,
  non_finite_value,
  degenerate_input,
  unknown_feature,
  missing_category,
};

std::string_view errc_name(errc code);

class ValidationError : public std::runtime_error {
 public:
  ValidationError(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace rmsel
