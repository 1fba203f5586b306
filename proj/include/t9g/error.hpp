#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace t9g {

enum class ErrorCode {
  invalid_word,
  undefined_fraction,
  malformed_trace,
  normalization,
  empty_code,
  invalid_selection,
  invalid_duration,
  undefined_kspc,
  invalid_target,
  unnormalized_sequence,
  undefined_rate,
  insufficient_phrases,
  replay_mismatch,
  malformed_log,
  invalid_config,
  io,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace t9g
