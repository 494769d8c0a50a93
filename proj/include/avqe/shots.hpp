#pragma once

#include <cstdint>

#include "avqe/ansatz.hpp"

namespace avqe {

// ============================================================
// Finite-shot estimators. All randomness is counter-based: the
// stream for a draw is derived from (seed, term index, shift
// index), so results do not depend on evaluation order and the
// same seed reproduces the same numbers bit for bit.
// ============================================================

enum class ShotModel { bernoulli, gaussian_proxy };

struct ShotConfig {
  long long shots = 0;
  std::uint64_t seed = 0;
  ShotModel model = ShotModel::bernoulli;
};

// Deterministic substream seed for experiment-level parallel draws.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                          std::uint64_t b = 0);

// Mean of `shots` single-shot +-1 outcomes for measuring one Pauli
// string in the given state.
double sample_pauli_expectation(const Vector& psi, const std::string& letters,
                                const ShotConfig& config,
                                std::uint64_t term_index = 0,
                                std::uint64_t shift_index = 0);

struct EnergyEstimate {
  double energy = 0.0;
  double sigma = 0.0;  // sqrt(max(0, est<H^2> - est<H>^2))
};

// Term-by-term sampled energy and deviation; the squared operator is
// expanded in the Pauli basis, guarded by h2_term_cap.
EnergyEstimate estimate_energy_sigma(const Vector& psi, const PauliSum& h,
                                     const ShotConfig& config,
                                     std::uint64_t shift_index = 0,
                                     std::size_t h2_term_cap = 4096);

// Finite-shot gradient. bernoulli: full-angle parameter-shift with
// evaluations at theta_k +- pi/4, each energy sampled independently.
// gaussian_proxy: analytic gradient plus isotropic normal noise with
// total variance 2 M coeff_norm^2 / shots; a nonnegative
// coeff_sq_override replaces coeff_norm^2 (for path-uniform budgets),
// and zero noise returns the analytic gradient bit for bit.
Eigen::VectorXd noisy_gradient(const Ansatz& ansatz,
                               const Eigen::VectorXd& theta, const PauliSum& h,
                               const ShotConfig& config,
                               double coeff_sq_override = -1.0);

}  // namespace avqe
