#ifndef POLAR_ERRORS_HPP
#define POLAR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace polar {

enum class errc {
  // dataset loading / validation
  missing_column,
  unknown_column,
  malformed_label,
  duplicate_id,
  unknown_language,
  excluded_language,
  lang_id_mismatch,
  inconsistent_gold,
  no_gold_labels,
  empty_text,
  io_failure,
  // alignment / shape
  shape_mismatch,
  id_mismatch,
  subtask_mismatch,
  empty_intersection,
  unknown_id,
  // training
  empty_training_set,
  non_aligned_mtl_bundle,
  // configuration
  bad_config,
  // CLI pipeline
  stage_failure,
};

const char* to_string(errc code);

/// Library-wide exception. `code()` identifies the failure class so callers
/// (and the CLI exit-code mapping) can react without parsing the message.
class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

}  // namespace polar

#endif  // POLAR_ERRORS_HPP
