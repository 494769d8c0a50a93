#include "avqe/error.hpp"

namespace avqe {

const char* errc_name(errc c) {
  switch (c) {
    case errc::dense_cap_exceeded: return "DenseCapExceeded";
    case errc::lambda_out_of_range: return "LambdaOutOfRange";
    case errc::length_mismatch: return "LengthMismatch";
    case errc::dimension_mismatch: return "DimensionMismatch";
    case errc::numerical_failure: return "NumericalFailure";
    case errc::degenerate_path: return "DegeneratePath";
    case errc::cap_exceeded: return "CapExceeded";
    case errc::nonpositive_input: return "NonpositiveInput";
    case errc::epsilon_too_large: return "EpsilonTooLarge";
    case errc::nonfinite_energy: return "NonfiniteEnergy";
    case errc::singular_metric: return "SingularMetric";
    case errc::tracking_lost: return "TrackingLost";
    case errc::max_slices_exceeded: return "MaxSlicesExceeded";
    case errc::certificate_required: return "CertificateRequired";
    case errc::nonpositive_gap_bound: return "NonpositiveGapBound";
    case errc::retry_exceeded: return "RetryExceeded";
    case errc::stall_detected: return "StallDetected";
    case errc::h2_term_blowup: return "H2TermBlowup";
    case errc::invalid_params: return "InvalidParams";
    case errc::config_invalid: return "ConfigInvalid";
    case errc::minimizer_not_converged: return "MinimizerNotConverged";
  }
  return "UnknownError";
}

}  // namespace avqe
