#pragma once

#include <string>
#include <vector>

#include "avqe/pauli.hpp"

namespace avqe {

// ============================================================
// Hardware-style ansatz: |psi(theta)> = U_{M-1} ... U_1 U_0 |0...0>
// with U_k = exp(-i theta_k P_k) for Pauli-string generators P_k.
// ============================================================

struct Ansatz {
  int n_qubits = 0;
  std::vector<std::string> generators;  // applied in index order, 0 first

  Ansatz(int n, std::vector<std::string> gens);

  int n_params() const { return static_cast<int>(generators.size()); }
};

Vector prepare(const Ansatz& ansatz, const Eigen::VectorXd& theta);

struct EnergySigma {
  double energy = 0.0;
  double sigma = 0.0;  // sqrt(<A^2> - <A>^2), clamped at zero
};

EnergySigma energy_and_sigma(const Vector& psi, const PauliSum& a);

// Analytic first derivative of <psi(theta)|H|psi(theta)>, computed
// with one forward and one backward sweep (2M string applications).
Eigen::VectorXd gradient(const Ansatz& ansatz, const Eigen::VectorXd& theta,
                         const PauliSum& h);

Eigen::MatrixXd hessian(const Ansatz& ansatz, const Eigen::VectorXd& theta,
                        const PauliSum& h, int param_cap = 32);

// Entries T[m](k,l) = d^3 E / (d theta_m d theta_k d theta_l),
// symmetric under any index permutation.
std::vector<Eigen::MatrixXd> third_tensor(const Ansatz& ansatz,
                                          const Eigen::VectorXd& theta,
                                          const PauliSum& h,
                                          int param_cap = 12);

struct GeometricTensor {
  Eigen::MatrixXd g;       // Fubini-Study metric, symmetric PSD
  double lambda_min = 0.0; // smallest eigenvalue of g
};

GeometricTensor geometric_tensor(const Ansatz& ansatz,
                                 const Eigen::VectorXd& theta);

// ============================================================
// Internals shared with the tracker and the sampling layer
// ============================================================

// States s_k = U_{k-1} ... U_0 |0>, k = 0..M; s_M is the prepared state.
std::vector<Vector> forward_states(const Ansatz& ansatz,
                                   const Eigen::VectorXd& theta);

// v <- exp(-i theta P) v (or the adjoint).
void apply_rotation(const std::string& letters, double theta, Vector& v,
                    bool adjoint = false);

// Heisenberg conjugate: returns U_{M-1}..U_{k+1} P_k U_{k+1}^+ .. U_{M-1}^+ v.
Vector apply_conjugated_generator(const Ansatz& ansatz,
                                  const Eigen::VectorXd& theta, int k,
                                  const Vector& v);

}  // namespace avqe
