#include "avqe/bounds.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace avqe {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0))
    fail(errc::nonpositive_input, std::string(name) + " must be positive");
}

}  // namespace

long long ceil_int(double raw) {
  if (!std::isfinite(raw))
    fail(errc::numerical_failure, "integer ceiling of a non-finite value");
  // Guard against float fuzz just above an integer (e.g. 4 + 3e-16
  // must stay 4); genuine fractional excess is far above the guard.
  const double guard = 5e-13 + 1e-14 * std::abs(raw);
  return static_cast<long long>(std::ceil(raw - guard));
}

TrackingConstants tracking_constants(double gamma, double delta_min,
                                     int m_params, double h_op, double dh_op,
                                     TrackingMode mode, double eps_target) {
  require_positive(gamma, "gamma");
  require_positive(delta_min, "delta_min");
  require_positive(h_op, "h_op");
  if (m_params < 1)
    fail(errc::nonpositive_input, "m_params must be at least 1");
  if (dh_op < 0.0)
    fail(errc::nonpositive_input, "dh_op must be nonnegative");

  TrackingConstants c;
  c.gamma = gamma;
  c.delta_min = delta_min;
  c.m_params = m_params;
  c.h_op = h_op;
  c.dh_op = dh_op;
  c.mode = mode;

  const double m = static_cast<double>(m_params);
  const double m15 = m * std::sqrt(m);
  c.smoothness_l = 4.0 * h_op * m;
  c.hessian_lip = 24.0 * h_op * m15;
  c.r_pl = gamma * delta_min / c.hessian_lip;
  c.drift_d = std::sqrt(m) * dh_op / (gamma * delta_min);
  c.eta_pl = 1.0 / c.smoothness_l;
  c.contraction_rho =
      std::sqrt(std::max(0.0, 1.0 - c.eta_pl * gamma * delta_min));
  c.c_nl = 12.0 * h_op * m15 / gamma + 32.0 * h_op * m15 * m / (gamma * gamma);
  c.eta_tdvp = 1.0 / (2.0 * h_op);

  const double gd = gamma * delta_min;
  const double gd3 = gd * gd * gd;
  if (mode == TrackingMode::option1) {
    c.delta_lambda_a =
        gd * gd / (2.0 * c.hessian_lip * std::sqrt(m) * dh_op);
    c.k_min_raw = (2.0 * c.smoothness_l / gd) * std::numbers::ln2;
    c.k_min = ceil_int(c.k_min_raw);
    c.n_updates_bound =
        384.0 * std::numbers::ln2 * m * m * m * h_op * h_op * dh_op / gd3;
  } else {
    c.delta_lambda_a =
        gd * gd / (4.0 * c.smoothness_l * c.hessian_lip * c.drift_d);
    c.k_min_raw = 1.0;
    c.k_min = 1;
    c.n_updates_bound = 384.0 * m * m * m * h_op * h_op * dh_op / gd3;
  }
  const double inv_dlam =
      std::isinf(c.delta_lambda_a) ? 0.0 : 1.0 / c.delta_lambda_a;
  c.n_updates_ceiled = c.k_min * (ceil_int(inv_dlam) + 1);

  c.eps_target = eps_target;
  if (std::isnan(eps_target)) {
    c.t_tdvp_min = std::numeric_limits<double>::quiet_NaN();
    c.n_tdvp_raw = std::numeric_limits<double>::quiet_NaN();
    c.n_tdvp = 0;
  } else {
    require_positive(eps_target, "eps_target");
    c.t_tdvp_min =
        std::max(4.0 * c.c_nl * c.drift_d / (delta_min * delta_min),
                 2.0 * c.drift_d / (eps_target * delta_min));
    c.n_tdvp_raw = c.t_tdvp_min / c.eta_tdvp;
    c.n_tdvp = ceil_int(c.n_tdvp_raw);
  }
  return c;
}

BpBounds bp_bounds(double eps_q, double gamma, double delta_min, int m_params,
                   double h_op, const std::vector<double>& deficits) {
  require_positive(eps_q, "eps_q");
  if (eps_q > 1.0)
    fail(errc::invalid_params, "eps_q must lie in (0, 1]");
  require_positive(gamma, "gamma");
  require_positive(delta_min, "delta_min");
  require_positive(h_op, "h_op");
  if (m_params < 1)
    fail(errc::nonpositive_input, "m_params must be at least 1");
  if (static_cast<int>(deficits.size()) != m_params)
    fail(errc::length_mismatch, "one tangent deficit per generator required");
  double sum = 0.0;
  for (double d : deficits) {
    if (!(d >= -1e-12 && d <= 1.0 + 1e-12))
      fail(errc::invalid_params, "tangent deficits must lie in [0, 1]");
    sum += d;
  }

  const double m = static_cast<double>(m_params);
  const double m15 = m * std::sqrt(m);
  BpBounds out;
  out.deficit_sum = sum;
  out.dtheta_q = eps_q * gamma * delta_min / (12.0 * m15 * h_op);
  const double d6 = std::pow(delta_min, 6);
  const double e4 = std::pow(eps_q, 4);
  const double denom = std::pow(12.0, 4) * std::pow(h_op, 4) * std::pow(m, 7);
  out.var_lower = d6 * e4 / denom * sum * sum;
  return out;
}

ShotBounds shot_bounds(long long shots, int m_params, double coeff_sup_sq,
                       double hessian_lip, double gamma, double delta_min,
                       long long k_steps, double delta_fail) {
  if (shots < 1) fail(errc::nonpositive_input, "shots must be at least 1");
  if (m_params < 1)
    fail(errc::nonpositive_input, "m_params must be at least 1");
  if (coeff_sup_sq < 0.0)
    fail(errc::nonpositive_input, "coeff_sup_sq must be nonnegative");
  require_positive(hessian_lip, "hessian_lip");
  require_positive(gamma, "gamma");
  require_positive(delta_min, "delta_min");
  if (k_steps < 1) fail(errc::nonpositive_input, "k_steps must be at least 1");
  if (!(delta_fail > 0.0 && delta_fail < 1.0))
    fail(errc::invalid_params, "delta_fail must lie in (0, 1)");

  const double m = static_cast<double>(m_params);
  ShotBounds out;
  out.sigma_grad =
      std::sqrt(2.0 * m * coeff_sup_sq / static_cast<double>(shots));
  const double gd = gamma * delta_min;
  const double gd4 = gd * gd * gd * gd;
  const double tail =
      1.0 + std::sqrt(2.0 * std::log(static_cast<double>(k_steps) /
                                     delta_fail) /
                      m);
  out.s_min_raw =
      8.0 * m * coeff_sup_sq * hessian_lip * hessian_lip / gd4 * tail * tail;
  out.s_min = ceil_int(out.s_min_raw);
  return out;
}

EpsilonAdjust epsilon_adjust(const TrackingConstants& exact, double epsilon,
                             double delta_c) {
  if (epsilon < 0.0)
    fail(errc::nonpositive_input, "epsilon must be nonnegative");
  if (!(delta_c > 0.0))
    fail(errc::nonpositive_gap_bound, "delta_c must be positive");
  if (epsilon >= exact.delta_min)
    fail(errc::epsilon_too_large,
         "epsilon = " + std::to_string(epsilon) +
             " reaches the true minimum gap " +
             std::to_string(exact.delta_min));

  EpsilonAdjust out;
  out.epsilon = epsilon;
  out.delta_c = delta_c;
  out.mu_eff = exact.gamma * (exact.delta_min - epsilon);
  out.admissible = epsilon <= delta_c / 4.0;
  out.effective =
      tracking_constants(exact.gamma, exact.delta_min - epsilon,
                         exact.m_params, exact.h_op, exact.dh_op, exact.mode,
                         exact.eps_target);
  return out;
}

}  // namespace avqe
