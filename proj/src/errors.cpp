#include "rmsel/errors.hpp"

namespace rmsel {

std::string_view errc_name(errc code) {
  switch (code) {
    case errc::missing_file: return "missing-file";
    case errc::malformed_row: return "malformed-row";
    case errc::duplicate_id: return "duplicate-id";
    case errc::nonpositive_value: return "nonpositive-value";
    case errc::no_records: return "no-records";
    case errc::ragged_row: return "ragged-row";
    case errc::non_numeric_cell: return "non-numeric-cell";
    case errc::missing_cell: return "missing-cell";
    case errc::overall_mismatch: return "overall-mismatch";
    case errc::missing_topic: return "missing-topic";
    case errc::bad_schema: return "bad-schema";
    case errc::length_mismatch: return "length-mismatch";
    case errc::constant_input: return "constant-input";
    case errc::out_of_range: return "out-of-range";
    case errc::empty_input: return "empty-input";
    case errc::key_mismatch: return "key-mismatch";
    case errc::missing_key: return "missing-key";
    case errc::missing_reference: return "missing-reference";
    case errc::zero_base: return "zero-base";
    case errc::infinite_statistic: return "infinite-statistic";
    case errc::non_finite_value: return "non-finite-value";
    case errc::degenerate_input: return "degenerate-input";
    case errc::unknown_feature: return "unknown-feature";
    case errc::missing_category: return "missing-category";
  }
  return "unknown";
}

}  // namespace rmsel
