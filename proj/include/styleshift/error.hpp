#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace styleshift {

enum class ErrorCode {
  io,                       // file missing, unreadable or unwritable
  decode,                   // malformed image stream
  unsupported_bit_depth,    // image is not 8 bits per sample
  unsupported_color_model,  // alpha, CMYK and friends
  bad_magic,
  version_mismatch,
  unsupported_dtype,
  truncated,
  dimension_overflow,
  invalid_argument,
  shape_mismatch,
  out_of_range,             // sample outside [0,1] on an unclamped save
  non_finite,
  imaginary_residue,
  missing_directory,
  empty_corpus,
  label_out_of_range,
  all_ignored,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::io: return "io";
    case ErrorCode::decode: return "decode";
    case ErrorCode::unsupported_bit_depth: return "unsupported_bit_depth";
    case ErrorCode::unsupported_color_model: return "unsupported_color_model";
    case ErrorCode::bad_magic: return "bad_magic";
    case ErrorCode::version_mismatch: return "version_mismatch";
    case ErrorCode::unsupported_dtype: return "unsupported_dtype";
    case ErrorCode::truncated: return "truncated";
    case ErrorCode::dimension_overflow: return "dimension_overflow";
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::shape_mismatch: return "shape_mismatch";
    case ErrorCode::out_of_range: return "out_of_range";
    case ErrorCode::non_finite: return "non_finite";
    case ErrorCode::imaginary_residue: return "imaginary_residue";
    case ErrorCode::missing_directory: return "missing_directory";
    case ErrorCode::empty_corpus: return "empty_corpus";
    case ErrorCode::label_out_of_range: return "label_out_of_range";
    case ErrorCode::all_ignored: return "all_ignored";
  }
  return "unknown";
}

/// Exception type thrown by every styleshift operation. The code is stable
/// and meant for programmatic dispatch; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace styleshift
