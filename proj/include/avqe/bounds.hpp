#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "avqe/error.hpp"

namespace avqe {

// ============================================================
// Closed-form constants for the warm-started tracking protocol.
// Every quantity is reported raw; integer versions additionally
// pass through ceil_int (round-half-up at 1e-12, then ceiling)
// so float fuzz cannot flip a count.
// ============================================================

enum class TrackingMode { option1, option2 };

long long ceil_int(double raw);

struct TrackingConstants {
  // inputs
  double gamma = 0.0;
  double delta_min = 0.0;
  int m_params = 0;
  double h_op = 0.0;
  double dh_op = 0.0;
  TrackingMode mode = TrackingMode::option1;

  // mode-independent
  double smoothness_l = 0.0;      // 4 ||H|| M
  double hessian_lip = 0.0;       // 24 ||H|| M^(3/2)
  double r_pl = 0.0;              // gamma Delta_min / hessian_lip
  double drift_d = 0.0;           // sqrt(M) ||dH|| / (gamma Delta_min)
  double eta_pl = 0.0;            // 1 / smoothness_l
  double contraction_rho = 0.0;   // sqrt(1 - eta_pl gamma Delta_min)
  double c_nl = 0.0;              // 12||H||M^1.5/gamma + 32||H||M^2.5/gamma^2
  double eta_tdvp = 0.0;          // 1 / (2 ||H||)

  // slice/step budget for the selected mode
  double delta_lambda_a = 0.0;
  double k_min_raw = 0.0;
  long long k_min = 0;
  double n_updates_bound = 0.0;    // closed form, real-valued
  long long n_updates_ceiled = 0;  // k_min * (ceil(1/delta_lambda_a) + 1)

  // imaginary-time target accuracy block (NaN when eps_target unset)
  double eps_target = 0.0;
  double t_tdvp_min = 0.0;
  double n_tdvp_raw = 0.0;
  long long n_tdvp = 0;
};

TrackingConstants tracking_constants(
    double gamma, double delta_min, int m_params, double h_op, double dh_op,
    TrackingMode mode = TrackingMode::option1,
    double eps_target = std::numeric_limits<double>::quiet_NaN());

struct BpBounds {
  double dtheta_q = 0.0;    // perturbation scale for quality eps_q
  double var_lower = 0.0;   // guaranteed energy-variance floor
  double deficit_sum = 0.0;
};

BpBounds bp_bounds(double eps_q, double gamma, double delta_min, int m_params,
                   double h_op, const std::vector<double>& deficits);

struct ShotBounds {
  double sigma_grad = 0.0;   // total gradient noise scale at S shots
  double s_min_raw = 0.0;
  long long s_min = 0;
};

ShotBounds shot_bounds(long long shots, int m_params, double coeff_sup_sq,
                       double hessian_lip, double gamma, double delta_min,
                       long long k_steps, double delta_fail);

struct EpsilonAdjust {
  double epsilon = 0.0;
  double delta_c = 0.0;
  double mu_eff = 0.0;       // gamma (Delta_min - epsilon)
  bool admissible = false;   // epsilon <= delta_c / 4
  TrackingConstants effective;
};

EpsilonAdjust epsilon_adjust(const TrackingConstants& exact, double epsilon,
                             double delta_c);

}  // namespace avqe
