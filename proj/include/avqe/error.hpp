#pragma once

#include <stdexcept>
#include <string>

namespace avqe {

// Stable error identifiers. The CLI maps RetryExceeded to exit code 2,
// StallDetected to 3, ConfigInvalid to 64, everything else to 1.
enum class errc {
  dense_cap_exceeded,
  lambda_out_of_range,
  length_mismatch,
  dimension_mismatch,
  numerical_failure,
  degenerate_path,
  cap_exceeded,
  nonpositive_input,
  epsilon_too_large,
  nonfinite_energy,
  singular_metric,
  tracking_lost,
  max_slices_exceeded,
  certificate_required,
  nonpositive_gap_bound,
  retry_exceeded,
  stall_detected,
  h2_term_blowup,
  invalid_params,
  config_invalid,
  minimizer_not_converged,
};

const char* errc_name(errc c);

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code) {}

  errc code() const { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace avqe
