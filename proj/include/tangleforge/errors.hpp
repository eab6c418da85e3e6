#pragma once

#include <stdexcept>
#include <string>

namespace tangleforge {

enum class errc {
  zero_vector,
  bad_length,
  not_normalized,
  bad_parameter,
  mixed_dimensions,
  bad_subset,
  wrong_size,
  zero_result,
  not_isometry,
  rank_mismatch,
  too_few_points,
  not_a_state,
  outside_subspace,
  bad_file,
};

/// All library errors carry one of the codes above; tests and the CLI
/// dispatch on the code, not the message text.
class Error : public std::runtime_error {
public:
  Error(errc code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  errc code() const noexcept { return code_; }

private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& msg) { throw Error(code, msg); }

inline void require(bool cond, errc code, const std::string& msg) {
  if (!cond) fail(code, msg);
}

}  // namespace tangleforge
