#pragma once

#include <optional>
#include <vector>

#include "avqe/tracker.hpp"

namespace avqe {

// ============================================================
// Runtime certification from measurable deviations, plus the
// adaptive self-verifying sweep that consumes it.
// ============================================================

struct Certificate {
  double lambda = 0.0;
  double energy = 0.0;
  double sigma_h = 0.0;   // energy deviation in the current state
  double sigma_d = 0.0;   // deviation of H_final - H_initial
  double delta_c = 0.0;   // certified gap lower bound supplied by the caller
  bool pass = false;      // sigma_h < delta_c / 2
  double fidelity_lower_bound = 0.0;
  bool strong = false;    // sigma_h <= delta_c / 4, forces a bound >= 8/9
  // Largest certified advance (delta_c/2 - sigma_h) / sigma_d; infinite
  // when sigma_d vanishes, NaN when the certificate fails.
  double dlambda_v = 0.0;
  // Companion expression (delta_c - sigma_h) / (2 sigma_d); reported for
  // comparison, never used for stepping.
  double dlambda_v_alt = 0.0;
  std::optional<int> oracle_branch;
  std::optional<bool> oracle_branch_unique;
  std::optional<double> oracle_fidelity;
};

Certificate certify(const Vector& psi, const AdiabaticPath& path,
                    double lambda, double delta_c, bool oracle = false);

// min over the certified advance, the analytic cap, and the remaining
// interval; requires a passing certificate.
double adaptive_step(const Certificate& cert, double dlam_cap,
                     double remaining);

double propagation_bound(double sigma_h, double sigma_d, double dlam);

struct VerifiedSlice {
  SliceRecord slice;
  Certificate cert;
  long long retries = 0;
  double dlambda_next = 0.0;  // 0 on the final slice
};

struct AvqeRunSummary {
  std::vector<VerifiedSlice> slices;
  bool completed = false;
  long long n_updates = 0;  // descent steps actually taken, retries included
  double final_energy = 0.0;
  double final_sigma = 0.0;
  double final_bound = 0.0;
  std::optional<double> final_oracle_fidelity;
};

// Algorithm: optimize at the current lambda, certify, retry on a failed
// certificate up to retry_cap, then advance by the certified step.
AvqeRunSummary run_self_verifying(const AdiabaticPath& path,
                                  const Ansatz& ansatz,
                                  const Eigen::VectorXd& theta0,
                                  double delta_c, const TrackerConfig& config,
                                  long long retry_cap = 100,
                                  bool oracle = false);

}  // namespace avqe
