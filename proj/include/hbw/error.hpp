#pragma once

#include <stdexcept>
#include <string>

namespace hbw {

enum class ErrorCode {
  file_not_found,
  unsupported_format,
  corrupt_header,
  write_failure,
  dimension_not_divisible,
  dimension_mismatch,
  invalid_dimensions,
  saturated_block,
  q_mismatch,
  segment_count_not_divisor,
  no_atoms_selected,
  target_unreachable,
  invalid_config,
};

const char* to_string(ErrorCode code) noexcept;

// All library failures are reported through this type; code() lets callers
// map them onto exit statuses without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::file_not_found: return "file-not-found";
    case ErrorCode::unsupported_format: return "unsupported-format";
    case ErrorCode::corrupt_header: return "corrupt-header";
    case ErrorCode::write_failure: return "write-failure";
    case ErrorCode::dimension_not_divisible: return "dimension-not-divisible";
    case ErrorCode::dimension_mismatch: return "dimension-mismatch";
    case ErrorCode::invalid_dimensions: return "invalid-dimensions";
    case ErrorCode::saturated_block: return "saturated-block";
    case ErrorCode::q_mismatch: return "q-mismatch";
    case ErrorCode::segment_count_not_divisor: return "segment-count-not-divisor";
    case ErrorCode::no_atoms_selected: return "no-atoms-selected";
    case ErrorCode::target_unreachable: return "target-unreachable";
    case ErrorCode::invalid_config: return "invalid-config";
  }
  return "unknown";
}

}  // namespace hbw
