#include "avqe/tracker.hpp"

#include <cmath>
#include <cstdio>

namespace avqe {

namespace {

void check_finite_energy(double e, double lambda) {
  if (!std::isfinite(e))
    fail(errc::nonfinite_energy,
         "energy diverged at lambda = " + std::to_string(lambda));
}

Eigen::VectorXd descent_direction(const Ansatz& ansatz,
                                  const Eigen::VectorXd& theta,
                                  const Eigen::VectorXd& grad,
                                  const TrackerConfig& config) {
  if (config.optimizer == Optimizer::vanilla) return grad;
  if (config.ng_regularizer < 0.0)
    fail(errc::invalid_params, "ng_regularizer must be nonnegative");
  const GeometricTensor gt = geometric_tensor(ansatz, theta);
  // The LDLT solve below applies a pseudo-inverse to zero pivots, so a
  // rank-deficient system has to be caught from the spectrum instead.
  const double scale = std::max(1.0, gt.g.diagonal().maxCoeff());
  const bool solvable =
      gt.lambda_min + config.ng_regularizer > 1e-10 * scale;
  if (solvable) {
    Eigen::MatrixXd reg = gt.g;
    reg.diagonal().array() += config.ng_regularizer;
    const Eigen::LDLT<Eigen::MatrixXd> solver(reg);
    if (solver.info() == Eigen::Success) {
      const Eigen::VectorXd d = solver.solve(grad);
      if (d.allFinite()) return d;
    }
  }
  if (config.ng_regularizer == 0.0)
    fail(errc::singular_metric,
         "metric solve failed with no regularization");
  std::fprintf(stderr,
               "avqe: natural-gradient solve failed, falling back to the "
               "vanilla direction for this step\n");
  return grad;
}

}  // namespace

// Fill eta / k / delta_lambda, computing the analytic constants only
// when something actually needs them.
ResolvedHyperparams resolve_hyperparams(const AdiabaticPath& path,
                                        const Ansatz& ansatz,
                                        const TrackerConfig& config,
                                        bool want_delta_lambda) {
  ResolvedHyperparams r;
  const bool need_constants = config.guarantee || config.eta <= 0.0 ||
                              config.k_steps <= 0 ||
                              (want_delta_lambda && config.delta_lambda <= 0.0);
  if (need_constants) {
    r.norms = path_norm_sup(path);
    r.gaps = gap_profile(path);
    r.constants = tracking_constants(config.gamma, r.gaps->delta_min,
                                     ansatz.n_params(), r.norms->h_op,
                                     r.norms->dh_op, config.mode);
  }
  r.eta = config.eta > 0.0 ? config.eta : r.constants->eta_pl;
  r.k_steps = config.k_steps > 0 ? config.k_steps : r.constants->k_min;
  if (config.mode == TrackingMode::option2) r.k_steps = 1;
  if (want_delta_lambda)
    r.delta_lambda = config.delta_lambda > 0.0 ? config.delta_lambda
                                               : r.constants->delta_lambda_a;

  if (config.guarantee) {
    const TrackingConstants& c = *r.constants;
    if (r.eta > c.eta_pl * (1.0 + 1e-12))
      fail(errc::invalid_params,
           "guarantee mode needs eta <= " + std::to_string(c.eta_pl));
    if (r.k_steps < c.k_min)
      fail(errc::invalid_params,
           "guarantee mode needs at least " + std::to_string(c.k_min) +
               " steps per slice");
    if (want_delta_lambda &&
        r.delta_lambda > c.delta_lambda_a * (1.0 + 1e-12))
      fail(errc::invalid_params,
           "guarantee mode needs delta_lambda <= " +
               std::to_string(c.delta_lambda_a));
  }
  return r;
}

namespace {

SliceRecord run_slice(const Ansatz& ansatz, const Eigen::VectorXd& theta_in,
                      double lambda, double eta, long long k_steps,
                      const TrackerConfig& config, const PauliSum& h,
                      const PauliSum& d_sum) {
  if (!(eta > 0.0)) fail(errc::invalid_params, "eta must be positive");
  if (k_steps < 1) fail(errc::invalid_params, "k_steps must be at least 1");

  SliceRecord rec;
  rec.lambda = lambda;
  rec.theta = theta_in;
  rec.energy_trace.reserve(k_steps + 1);

  Vector psi = prepare(ansatz, rec.theta);
  EnergySigma es = energy_and_sigma(psi, h);
  check_finite_energy(es.energy, lambda);
  rec.energy_trace.push_back(es.energy);

  for (long long s = 0; s < k_steps; ++s) {
    const Eigen::VectorXd grad = gradient(ansatz, rec.theta, h);
    if (!grad.allFinite())
      fail(errc::nonfinite_energy,
           "gradient diverged at lambda = " + std::to_string(lambda));
    rec.theta -= eta * descent_direction(ansatz, rec.theta, grad, config);
    psi = prepare(ansatz, rec.theta);
    es = energy_and_sigma(psi, h);
    check_finite_energy(es.energy, lambda);
    rec.energy_trace.push_back(es.energy);
  }

  rec.energy = es.energy;
  rec.sigma_h = es.sigma;
  rec.sigma_d = energy_and_sigma(psi, d_sum).sigma;
  rec.grad_norm = gradient(ansatz, rec.theta, h).norm();
  return rec;
}

}  // namespace

SliceRecord optimize_slice(const AdiabaticPath& path, const Ansatz& ansatz,
                           const Eigen::VectorXd& theta_in, double lambda,
                           const TrackerConfig& config) {
  long long k = config.k_steps;
  if (config.mode == TrackingMode::option2) k = 1;
  return run_slice(ansatz, theta_in, lambda, config.eta, k, config,
                   interpolate(path, lambda), path_difference(path));
}

PolishResult reference_minimizer(const PauliSum& h, const Ansatz& ansatz,
                                 Eigen::VectorXd theta, double eta,
                                 double grad_tol, long long max_steps) {
  PolishResult out;
  out.theta = std::move(theta);
  for (long long s = 0; s <= max_steps; ++s) {
    const Eigen::VectorXd grad = gradient(ansatz, out.theta, h);
    out.grad_norm = grad.norm();
    out.steps = s;
    if (!std::isfinite(out.grad_norm))
      fail(errc::nonfinite_energy, "gradient diverged in the reference pass");
    if (out.grad_norm <= grad_tol) {
      out.converged = true;
      break;
    }
    if (s == max_steps) break;
    out.theta -= eta * grad;
  }
  out.energy = energy_and_sigma(prepare(ansatz, out.theta), h).energy;
  return out;
}

PolishResult newton_polish(const PauliSum& h, const Ansatz& ansatz,
                           Eigen::VectorXd theta, double grad_tol,
                           long long max_steps) {
  PolishResult out;
  out.theta = std::move(theta);
  out.energy = energy_and_sigma(prepare(ansatz, out.theta), h).energy;
  for (long long s = 0; s <= max_steps; ++s) {
    const Eigen::VectorXd grad = gradient(ansatz, out.theta, h);
    out.grad_norm = grad.norm();
    out.steps = s;
    if (!std::isfinite(out.grad_norm))
      fail(errc::nonfinite_energy, "gradient diverged in the polish pass");
    if (out.grad_norm <= grad_tol) {
      out.converged = true;
      break;
    }
    if (s == max_steps) break;

    const Eigen::MatrixXd hess = hessian(ansatz, out.theta, h);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hess);
    if (es.info() != Eigen::Success)
      fail(errc::numerical_failure, "Hessian eigensolve failed in polish");
    const double top = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1e-12);
    const double floor = std::max(1e-10, 1e-12 * top);
    Eigen::VectorXd step = Eigen::VectorXd::Zero(out.theta.size());
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      const double curvature = std::max(std::abs(es.eigenvalues()(i)), floor);
      const Eigen::VectorXd v = es.eigenvectors().col(i);
      step += v * (v.dot(grad) / curvature);
    }

    bool accepted = false;
    double scale = 1.0;
    for (int half = 0; half < 40; ++half) {
      const Eigen::VectorXd cand = out.theta - scale * step;
      const double e =
          energy_and_sigma(prepare(ansatz, cand), h).energy;
      if (e < out.energy) {
        out.theta = cand;
        out.energy = e;
        accepted = true;
        break;
      }
      scale /= 2.0;
    }
    if (!accepted) {
      // Clipped-Newton made no progress; fall back to one safe GD step.
      const Eigen::VectorXd cand = out.theta - grad / (4.0 * top);
      const double e = energy_and_sigma(prepare(ansatz, cand), h).energy;
      if (e >= out.energy) break;
      out.theta = cand;
      out.energy = e;
    }
  }
  return out;
}

OracleDiag oracle_diagnostics(const AdiabaticPath& path, const Ansatz& ansatz,
                              const Eigen::VectorXd& theta, double lambda,
                              double prev_dist) {
  const PauliSum h = interpolate(path, lambda);
  const SpectralData spectrum = eigensystem(h);
  OracleDiag diag;
  diag.gap = spectrum.eigenvalues(1) - spectrum.eigenvalues(0);
  diag.ground_energy = spectrum.eigenvalues(0);
  diag.fidelity = fidelity(prepare(ansatz, theta), spectrum.eigenvectors.col(0));

  const double h_norm =
      std::max(std::abs(spectrum.eigenvalues(0)),
               std::abs(spectrum.eigenvalues(spectrum.eigenvalues.size() - 1)));
  const double eta_ref =
      1.0 / (4.0 * std::max(h_norm, 1e-12) * ansatz.n_params());
  const PolishResult ref = reference_minimizer(h, ansatz, theta, eta_ref);
  if (ref.converged &&
      std::abs(ref.energy - spectrum.eigenvalues(0)) <= 1e-9) {
    diag.has_theta_star = true;
    diag.theta_dist = (theta - ref.theta).norm();
    if (prev_dist > 0.0) diag.rho_hat = diag.theta_dist / prev_dist;
  }
  return diag;
}

namespace {

// Guarantee-mode per-slice enforcement on top of the diagnostics.
void enforce_guarantee(const OracleDiag& diag, double r_pl, double lambda) {
  if (!diag.has_theta_star)
    fail(errc::minimizer_not_converged,
         "reference minimizer failed at lambda = " + std::to_string(lambda));
  if (diag.theta_dist > r_pl / 2.0 + 1e-12)
    fail(errc::tracking_lost,
         "tracked parameters left the basin at lambda = " +
             std::to_string(lambda));
}

}  // namespace

std::vector<SliceRecord> track_path(const AdiabaticPath& path,
                                    const Ansatz& ansatz,
                                    const Eigen::VectorXd& theta0,
                                    const TrackerConfig& config,
                                    bool oracle) {
  const ResolvedHyperparams run =
      resolve_hyperparams(path, ansatz, config, /*want_delta_lambda=*/true);

  if (config.guarantee && oracle) {
    const SpectralData s0 = eigensystem(interpolate(path, 0.0));
    if (fidelity(prepare(ansatz, theta0), s0.eigenvectors.col(0)) <
        1.0 - 1e-9)
      fail(errc::invalid_params,
           "theta0 does not prepare the initial ground state");
  }

  const PauliSum d_sum = path_difference(path);
  std::vector<SliceRecord> records;
  Eigen::VectorXd theta = theta0;
  double prev_lambda = 0.0;
  double prev_dist = 0.0;
  bool had_prev = false;
  for (long long t = 0;; ++t) {
    if (t >= config.max_slices)
      fail(errc::max_slices_exceeded,
           "slice budget of " + std::to_string(config.max_slices) +
               " exhausted");
    double lambda = t == 0 ? 0.0 : static_cast<double>(t) * run.delta_lambda;
    const bool last = lambda >= 1.0 - 1e-12;
    if (last) lambda = 1.0;

    SliceRecord rec = run_slice(ansatz, theta, lambda, run.eta, run.k_steps,
                                config, interpolate(path, lambda), d_sum);
    rec.t = t;
    rec.step_taken = t == 0 ? 0.0 : lambda - prev_lambda;
    theta = rec.theta;
    if (oracle) {
      rec.oracle = oracle_diagnostics(path, ansatz, rec.theta, lambda,
                                      had_prev ? prev_dist : -1.0);
      if (config.guarantee)
        enforce_guarantee(*rec.oracle, run.constants->r_pl, lambda);
      if (rec.oracle->has_theta_star) {
        prev_dist = rec.oracle->theta_dist;
        had_prev = true;
      }
    }
    prev_lambda = lambda;
    records.push_back(std::move(rec));
    if (last) break;
  }
  return records;
}

}  // namespace avqe
