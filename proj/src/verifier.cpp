#include "avqe/verifier.hpp"

#include <cmath>

namespace avqe {

namespace {

constexpr double kSigmaDFloor = 1e-12;
constexpr double kStallTol = 1e-12;

}  // namespace

Certificate certify(const Vector& psi, const AdiabaticPath& path,
                    double lambda, double delta_c, bool oracle) {
  if (!(delta_c > 0.0))
    fail(errc::nonpositive_gap_bound, "delta_c must be positive");

  const PauliSum h = interpolate(path, lambda);
  const EnergySigma es = energy_and_sigma(psi, h);
  const double sigma_d = energy_and_sigma(psi, path_difference(path)).sigma;

  Certificate cert;
  cert.lambda = lambda;
  cert.energy = es.energy;
  cert.sigma_h = es.sigma;
  cert.sigma_d = sigma_d;
  cert.delta_c = delta_c;
  cert.pass = es.sigma < delta_c / 2.0;
  cert.strong = es.sigma <= delta_c / 4.0;
  if (cert.pass) {
    const double ratio = es.sigma / (delta_c - es.sigma);
    cert.fidelity_lower_bound = std::max(0.0, 1.0 - ratio * ratio);
    cert.dlambda_v = sigma_d <= kSigmaDFloor
                         ? std::numeric_limits<double>::infinity()
                         : (delta_c / 2.0 - es.sigma) / sigma_d;
    cert.dlambda_v_alt = sigma_d <= kSigmaDFloor
                             ? std::numeric_limits<double>::infinity()
                             : (delta_c - es.sigma) / (2.0 * sigma_d);
  } else {
    cert.fidelity_lower_bound = 0.0;
    cert.dlambda_v = std::numeric_limits<double>::quiet_NaN();
    cert.dlambda_v_alt = std::numeric_limits<double>::quiet_NaN();
  }

  if (oracle) {
    const SpectralData spectrum = eigensystem(h);
    const BranchResult branch = branch_index(spectrum, psi);
    cert.oracle_branch = branch.index;
    cert.oracle_branch_unique = branch.unique;
    cert.oracle_fidelity = fidelity(psi, spectrum.eigenvectors.col(0));
  }
  return cert;
}

double adaptive_step(const Certificate& cert, double dlam_cap,
                     double remaining) {
  if (!cert.pass)
    fail(errc::certificate_required,
         "cannot advance from an uncertified state at lambda = " +
             std::to_string(cert.lambda));
  if (!(dlam_cap > 0.0))
    fail(errc::invalid_params, "dlam_cap must be positive");
  if (!(remaining > 0.0))
    fail(errc::invalid_params, "remaining interval must be positive");
  return std::min({dlam_cap, cert.dlambda_v, remaining});
}

double propagation_bound(double sigma_h, double sigma_d, double dlam) {
  if (sigma_h < 0.0 || sigma_d < 0.0)
    fail(errc::nonpositive_input, "deviations must be nonnegative");
  return sigma_h + std::abs(dlam) * sigma_d;
}

AvqeRunSummary run_self_verifying(const AdiabaticPath& path,
                                  const Ansatz& ansatz,
                                  const Eigen::VectorXd& theta0,
                                  double delta_c, const TrackerConfig& config,
                                  long long retry_cap, bool oracle) {
  if (!(delta_c > 0.0))
    fail(errc::nonpositive_gap_bound, "delta_c must be positive");
  if (retry_cap < 0) fail(errc::invalid_params, "retry_cap must be >= 0");

  const ResolvedHyperparams run =
      resolve_hyperparams(path, ansatz, config, /*want_delta_lambda=*/true);
  const double dlam_cap = run.delta_lambda;

  if (config.guarantee && oracle) {
    const SpectralData s0 = eigensystem(interpolate(path, 0.0));
    if (fidelity(prepare(ansatz, theta0), s0.eigenvectors.col(0)) <
        1.0 - 1e-9)
      fail(errc::invalid_params,
           "theta0 does not prepare the initial ground state");
  }

  TrackerConfig resolved = config;
  resolved.eta = run.eta;
  resolved.k_steps = run.k_steps;

  AvqeRunSummary summary;
  Eigen::VectorXd theta = theta0;
  double lambda = 0.0;
  double arrived_by = 0.0;
  double prev_dist = -1.0;
  for (;;) {
    if (static_cast<long long>(summary.slices.size()) >= config.max_slices)
      fail(errc::max_slices_exceeded,
           "slice budget of " + std::to_string(config.max_slices) +
               " exhausted");

    SliceRecord rec = optimize_slice(path, ansatz, theta, lambda, resolved);
    summary.n_updates += run.k_steps;
    Certificate cert =
        certify(prepare(ansatz, rec.theta), path, lambda, delta_c, oracle);
    long long retries = 0;
    while (!cert.pass) {
      if (retries >= retry_cap)
        fail(errc::retry_exceeded,
             "certificate still failing after " + std::to_string(retries) +
                 " retries at lambda = " + std::to_string(lambda));
      rec = optimize_slice(path, ansatz, rec.theta, lambda, resolved);
      summary.n_updates += run.k_steps;
      ++retries;
      cert = certify(prepare(ansatz, rec.theta), path, lambda, delta_c, oracle);
    }
    theta = rec.theta;
    rec.t = static_cast<long long>(summary.slices.size());
    rec.step_taken = arrived_by;

    if (oracle) {
      rec.oracle =
          oracle_diagnostics(path, ansatz, rec.theta, lambda, prev_dist);
      if (config.guarantee) {
        if (!rec.oracle->has_theta_star)
          fail(errc::minimizer_not_converged,
               "reference minimizer failed at lambda = " +
                   std::to_string(lambda));
        if (rec.oracle->theta_dist > run.constants->r_pl / 2.0 + 1e-12)
          fail(errc::tracking_lost,
               "tracked parameters left the basin at lambda = " +
                   std::to_string(lambda));
      }
      if (rec.oracle->has_theta_star) prev_dist = rec.oracle->theta_dist;
    }

    summary.slices.push_back({std::move(rec), cert, retries, 0.0});
    if (lambda >= 1.0) {
      summary.completed = true;
      break;
    }

    const double remaining = 1.0 - lambda;
    const double dlam = adaptive_step(cert, dlam_cap, remaining);
    if (dlam < kStallTol)
      fail(errc::stall_detected,
           "certified advance collapsed to " + std::to_string(dlam) +
               " at lambda = " + std::to_string(lambda));
    summary.slices.back().dlambda_next = dlam;
    const double prev_lambda = lambda;
    lambda = remaining - dlam <= 1e-15 ? 1.0 : lambda + dlam;
    arrived_by = lambda - prev_lambda;
  }

  const VerifiedSlice& last = summary.slices.back();
  summary.final_energy = last.cert.energy;
  summary.final_sigma = last.cert.sigma_h;
  summary.final_bound = last.cert.fidelity_lower_bound;
  summary.final_oracle_fidelity = last.cert.oracle_fidelity;
  return summary;
}

}  // namespace avqe
