#pragma once

#include <optional>
#include <vector>

#include "avqe/ansatz.hpp"
#include "avqe/bounds.hpp"
#include "avqe/spectral.hpp"

namespace avqe {

enum class Optimizer { vanilla, natural_gradient };

// Nonpositive eta / k_steps / delta_lambda select the analytic values
// (1/L, K_min, and the closed-form slice width for the configured
// gamma). option2 runs a single descent step per slice regardless of
// k_steps. In guarantee mode the resolved hyperparameters are checked
// against the analytic requirements and the run asserts the tracking
// radius on every slice, which needs the oracle.
struct TrackerConfig {
  double eta = 0.0;
  long long k_steps = 0;
  double delta_lambda = 0.0;
  Optimizer optimizer = Optimizer::vanilla;
  TrackingMode mode = TrackingMode::option1;
  double ng_regularizer = 1e-8;
  long long max_slices = 200000;
  bool guarantee = false;
  double gamma = 1.0;
};

struct OracleDiag {
  double gap = 0.0;
  double ground_energy = 0.0;
  double fidelity = 0.0;
  bool has_theta_star = false;
  double theta_dist = 0.0;  // ||theta - theta*(lambda)||, valid when converged
  double rho_hat = std::numeric_limits<double>::quiet_NaN();
};

struct SliceRecord {
  long long t = 0;
  double lambda = 0.0;
  double step_taken = 0.0;  // lambda advance that led to this slice
  Eigen::VectorXd theta;
  double energy = 0.0;
  double grad_norm = 0.0;
  double sigma_h = 0.0;
  double sigma_d = 0.0;  // deviation of H_final - H_initial in the slice state
  std::vector<double> energy_trace;  // k_steps + 1 values, initial first
  std::optional<OracleDiag> oracle;
};

// One warm-started descent block at fixed lambda. eta and k_steps must
// be resolved to positive values by the caller.
SliceRecord optimize_slice(const AdiabaticPath& path, const Ansatz& ansatz,
                           const Eigen::VectorXd& theta_in, double lambda,
                           const TrackerConfig& config);

// Fixed-grid tracking pass over lambda in [0, 1].
std::vector<SliceRecord> track_path(const AdiabaticPath& path,
                                    const Ansatz& ansatz,
                                    const Eigen::VectorXd& theta0,
                                    const TrackerConfig& config,
                                    bool oracle = false);

// Per-slice exact diagnostics against the diagonalization reference.
// prev_dist < 0 means no previous distance is available for rho_hat.
OracleDiag oracle_diagnostics(const AdiabaticPath& path, const Ansatz& ansatz,
                              const Eigen::VectorXd& theta, double lambda,
                              double prev_dist = -1.0);

struct ResolvedHyperparams {
  double eta = 0.0;
  long long k_steps = 0;
  double delta_lambda = 0.0;
  std::optional<TrackingConstants> constants;
  std::optional<PathNorms> norms;
  std::optional<GapProfile> gaps;
};

// Fills the automatic hyperparameters and, in guarantee mode, checks
// the resolved values against the analytic requirements.
ResolvedHyperparams resolve_hyperparams(const AdiabaticPath& path,
                                        const Ansatz& ansatz,
                                        const TrackerConfig& config,
                                        bool want_delta_lambda);

struct PolishResult {
  Eigen::VectorXd theta;
  bool converged = false;
  long long steps = 0;
  double energy = 0.0;
  double grad_norm = 0.0;
};

// Plain gradient descent to a gradient tolerance; the diagnostic
// minimizer used for theta*(lambda) distances.
PolishResult reference_minimizer(const PauliSum& h, const Ansatz& ansatz,
                                 Eigen::VectorXd theta, double eta,
                                 double grad_tol = 1e-12,
                                 long long max_steps = 100000);

// Curvature-clipped Newton with backtracking, for minima the plain GD
// cap cannot reach (Hessian modes near zero). Diagnostics only.
PolishResult newton_polish(const PauliSum& h, const Ansatz& ansatz,
                           Eigen::VectorXd theta, double grad_tol = 1e-8,
                           long long max_steps = 200);

}  // namespace avqe
