#include "polar/errors.hpp"

namespace polar {

const char* to_string(errc code) {
  switch (code) {
    case errc::missing_column: return "missing column";
    case errc::unknown_column: return "unknown column";
    case errc::malformed_label: return "malformed label";
    case errc::duplicate_id: return "duplicate id";
    case errc::unknown_language: return "unknown language";
    case errc::excluded_language: return "excluded language";
    case errc::lang_id_mismatch: return "lang/id mismatch";
    case errc::inconsistent_gold: return "inconsistent gold labels";
    case errc::no_gold_labels: return "no gold labels";
    case errc::empty_text: return "empty text";
    case errc::io_failure: return "io failure";
    case errc::shape_mismatch: return "shape mismatch";
    case errc::id_mismatch: return "id mismatch";
    case errc::subtask_mismatch: return "subtask mismatch";
    case errc::empty_intersection: return "empty id intersection";
    case errc::unknown_id: return "unknown id";
    case errc::empty_training_set: return "empty training set";
    case errc::non_aligned_mtl_bundle: return "non-aligned mtl bundle";
    case errc::bad_config: return "bad config";
    case errc::stage_failure: return "stage failure";
  }
  return "error";
}

}  // namespace polar
