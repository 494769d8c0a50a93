#include "avqe/ansatz.hpp"

#include <cmath>

namespace avqe {

namespace {

void check_theta(const Ansatz& ansatz, const Eigen::VectorXd& theta) {
  if (theta.size() != ansatz.n_params())
    fail(errc::length_mismatch,
         "parameter vector has " + std::to_string(theta.size()) +
             " entries for " + std::to_string(ansatz.n_params()) +
             " generators");
  for (Eigen::Index i = 0; i < theta.size(); ++i)
    if (!std::isfinite(theta(i)))
      fail(errc::invalid_params,
           "parameter " + std::to_string(i) + " is not finite");
}

void check_dense(int n_qubits) {
  if (n_qubits > dense_cap())
    fail(errc::dense_cap_exceeded,
         std::to_string(n_qubits) + " qubits exceeds the dense cap of " +
             std::to_string(dense_cap()));
}

}  // namespace

Ansatz::Ansatz(int n, std::vector<std::string> gens)
    : n_qubits(n), generators(std::move(gens)) {
  if (n < 1) fail(errc::invalid_params, "register needs at least one qubit");
  for (const auto& g : generators) {
    if (static_cast<int>(g.size()) != n)
      fail(errc::length_mismatch,
           "generator '" + g + "' does not cover " + std::to_string(n) +
               " qubits");
    for (char c : g)
      if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z')
        fail(errc::invalid_params,
             "letter '" + std::string(1, c) + "' in generator '" + g + "'");
  }
}

void apply_rotation(const std::string& letters, double theta, Vector& v,
                    bool adjoint) {
  static thread_local Vector scratch;
  apply_pauli_string(letters, v, scratch);
  const std::complex<double> is{0.0, adjoint ? std::sin(theta)
                                             : -std::sin(theta)};
  v = std::cos(theta) * v + is * scratch;
}

std::vector<Vector> forward_states(const Ansatz& ansatz,
                                   const Eigen::VectorXd& theta) {
  check_theta(ansatz, theta);
  check_dense(ansatz.n_qubits);
  const std::int64_t dim = std::int64_t{1} << ansatz.n_qubits;
  std::vector<Vector> states;
  states.reserve(ansatz.n_params() + 1);
  Vector v = Vector::Zero(dim);
  v(0) = 1.0;
  states.push_back(v);
  for (int k = 0; k < ansatz.n_params(); ++k) {
    apply_rotation(ansatz.generators[k], theta(k), v);
    v.normalize();
    states.push_back(v);
  }
  return states;
}

Vector prepare(const Ansatz& ansatz, const Eigen::VectorXd& theta) {
  check_theta(ansatz, theta);
  check_dense(ansatz.n_qubits);
  const std::int64_t dim = std::int64_t{1} << ansatz.n_qubits;
  Vector v = Vector::Zero(dim);
  v(0) = 1.0;
  for (int k = 0; k < ansatz.n_params(); ++k) {
    apply_rotation(ansatz.generators[k], theta(k), v);
    v.normalize();
  }
  return v;
}

EnergySigma energy_and_sigma(const Vector& psi, const PauliSum& a) {
  const Vector omega = apply_sum(a, psi);
  const double energy = psi.dot(omega).real();
  const double second_moment = omega.squaredNorm();
  return {energy,
          std::sqrt(std::max(0.0, second_moment - energy * energy))};
}

Eigen::VectorXd gradient(const Ansatz& ansatz, const Eigen::VectorXd& theta,
                         const PauliSum& h) {
  if (h.n_qubits() != ansatz.n_qubits)
    fail(errc::dimension_mismatch, "operator register differs from ansatz");
  const int m = ansatz.n_params();
  Vector x = prepare(ansatz, theta);
  Vector y = apply_sum(h, x);
  Eigen::VectorXd grad(m);
  Vector scratch;
  for (int k = m - 1; k >= 0; --k) {
    apply_pauli_string(ansatz.generators[k], x, scratch);
    grad(k) = 2.0 * y.dot(scratch).imag();
    apply_rotation(ansatz.generators[k], theta(k), x, /*adjoint=*/true);
    apply_rotation(ansatz.generators[k], theta(k), y, /*adjoint=*/true);
  }
  return grad;
}

Vector apply_conjugated_generator(const Ansatz& ansatz,
                                  const Eigen::VectorXd& theta, int k,
                                  const Vector& v) {
  const int m = ansatz.n_params();
  Vector w = v;
  for (int j = m - 1; j > k; --j)
    apply_rotation(ansatz.generators[j], theta(j), w, /*adjoint=*/true);
  Vector scratch;
  apply_pauli_string(ansatz.generators[k], w, scratch);
  w = scratch;
  for (int j = k + 1; j < m; ++j)
    apply_rotation(ansatz.generators[j], theta(j), w);
  return w;
}

namespace {

// chi_k = U_{M-1}..U_{k+1} P_k U_k .. U_0 |0>, built from the stored
// forward states so each costs M - k rotations.
std::vector<Vector> tangent_vectors(const Ansatz& ansatz,
                                    const Eigen::VectorXd& theta,
                                    const std::vector<Vector>& states) {
  const int m = ansatz.n_params();
  std::vector<Vector> chi(m);
  Vector scratch;
  for (int k = 0; k < m; ++k) {
    apply_pauli_string(ansatz.generators[k], states[k + 1], scratch);
    Vector t = scratch;
    for (int j = k + 1; j < m; ++j)
      apply_rotation(ansatz.generators[j], theta(j), t);
    chi[k] = std::move(t);
  }
  return chi;
}

}  // namespace

Eigen::MatrixXd hessian(const Ansatz& ansatz, const Eigen::VectorXd& theta,
                        const PauliSum& h, int param_cap) {
  if (h.n_qubits() != ansatz.n_qubits)
    fail(errc::dimension_mismatch, "operator register differs from ansatz");
  const int m = ansatz.n_params();
  if (m > param_cap)
    fail(errc::cap_exceeded,
         std::to_string(m) + " parameters exceeds the second-derivative cap " +
             std::to_string(param_cap));
  const std::vector<Vector> states = forward_states(ansatz, theta);
  const Vector& psi = states.back();
  const std::vector<Vector> chi = tangent_vectors(ansatz, theta, states);
  const Vector omega = apply_sum(h, psi);

  // zeta_l = conjugated P_l applied to omega; the backward sweep keeps
  // a = U_{>l}^+ omega as l descends.
  std::vector<Vector> zeta(m);
  Vector a = omega;
  Vector scratch;
  for (int l = m - 1; l >= 0; --l) {
    apply_pauli_string(ansatz.generators[l], a, scratch);
    Vector t = scratch;
    for (int j = l + 1; j < m; ++j)
      apply_rotation(ansatz.generators[j], theta(j), t);
    zeta[l] = std::move(t);
    apply_rotation(ansatz.generators[l], theta(l), a, /*adjoint=*/true);
  }

  std::vector<Vector> h_chi(m);
  for (int l = 0; l < m; ++l) h_chi[l] = apply_sum(h, chi[l]);

  Eigen::MatrixXd out(m, m);
  for (int k = 0; k < m; ++k)
    for (int l = k; l < m; ++l) {
      const double v = 2.0 * chi[k].dot(h_chi[l]).real() -
                       2.0 * chi[k].dot(zeta[l]).real();
      out(k, l) = v;
      out(l, k) = v;
    }
  return out;
}

std::vector<Eigen::MatrixXd> third_tensor(const Ansatz& ansatz,
                                          const Eigen::VectorXd& theta,
                                          const PauliSum& h, int param_cap) {
  if (h.n_qubits() != ansatz.n_qubits)
    fail(errc::dimension_mismatch, "operator register differs from ansatz");
  const int m = ansatz.n_params();
  if (m > param_cap)
    fail(errc::cap_exceeded,
         std::to_string(m) + " parameters exceeds the third-derivative cap " +
             std::to_string(param_cap));
  const std::vector<Vector> states = forward_states(ansatz, theta);
  const Vector& psi = states.back();
  const std::vector<Vector> chi = tangent_vectors(ansatz, theta, states);
  const Vector omega = apply_sum(h, psi);

  std::vector<Vector> zeta(m), h_chi(m);
  for (int l = 0; l < m; ++l) {
    zeta[l] = apply_conjugated_generator(ansatz, theta, l, omega);
    h_chi[l] = apply_sum(h, chi[l]);
  }

  // chi2[a][b] = conjugated P_a applied to chi_b (literal order, a outermost).
  std::vector<std::vector<Vector>> chi2(m, std::vector<Vector>(m));
  for (int b = 0; b < m; ++b)
    for (int a = 0; a < m; ++a)
      chi2[a][b] = apply_conjugated_generator(ansatz, theta, a, chi[b]);

  const auto chi_ordered = [&](int a, int b) -> const Vector& {
    return a >= b ? chi2[a][b] : chi2[b][a];
  };

  std::vector<Eigen::MatrixXd> t(m, Eigen::MatrixXd(m, m));
  for (int mm = 0; mm < m; ++mm)
    for (int k = 0; k < m; ++k)
      for (int l = k; l < m; ++l) {
        const Vector& cmk = chi_ordered(mm, k);
        const Vector& cml = chi_ordered(mm, l);
        const double term_a = 2.0 * h_chi[k].dot(cml).imag() -
                              2.0 * cmk.dot(h_chi[l]).imag();
        std::complex<double> s = cmk.dot(zeta[l]);
        if (mm > l) {
          s -= chi2[mm][k].dot(zeta[l]);
          s += chi2[l][k].dot(zeta[mm]);
        }
        s -= chi2[l][k].dot(h_chi[mm]);
        const double term_b = 2.0 * s.imag();
        t[mm](k, l) = term_a + term_b;
        t[mm](l, k) = term_a + term_b;
      }
  return t;
}

GeometricTensor geometric_tensor(const Ansatz& ansatz,
                                 const Eigen::VectorXd& theta) {
  const int m = ansatz.n_params();
  if (m > 32)
    fail(errc::cap_exceeded,
         std::to_string(m) + " parameters exceeds the metric cap 32");
  const std::vector<Vector> states = forward_states(ansatz, theta);
  const Vector& psi = states.back();
  const std::vector<Vector> chi = tangent_vectors(ansatz, theta, states);

  GeometricTensor out;
  out.g.resize(m, m);
  std::vector<std::complex<double>> overlap(m);
  for (int k = 0; k < m; ++k) overlap[k] = chi[k].dot(psi);
  for (int k = 0; k < m; ++k)
    for (int l = k; l < m; ++l) {
      const double v =
          (chi[k].dot(chi[l]) - overlap[k] * std::conj(overlap[l])).real();
      out.g(k, l) = v;
      out.g(l, k) = v;
    }
  if (m > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
        out.g, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
      fail(errc::numerical_failure, "metric eigenvalue solve failed");
    out.lambda_min = solver.eigenvalues()(0);
  }
  return out;
}

}  // namespace avqe
