#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "avqe/error.hpp"

namespace avqe {

using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

// ============================================================
// Pauli sums and the interpolated operator family
// ============================================================

struct PauliTerm {
  double coefficient = 0.0;
  std::string letters;  // one of I,X,Y,Z per qubit, leftmost = qubit 0
};

// Real linear combination of Pauli strings on a fixed register.
// Terms are validated, merged by letter sequence, sorted
// lexicographically, and immutable after construction.
class PauliSum {
 public:
  PauliSum(int n_qubits, std::vector<PauliTerm> terms);

  static PauliSum zero(int n_qubits) { return PauliSum(n_qubits, {}); }

  int n_qubits() const { return n_qubits_; }
  const std::vector<PauliTerm>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

  // Euclidean norm of the coefficient vector.
  double coeff_norm() const;

 private:
  int n_qubits_;
  std::vector<PauliTerm> terms_;
};

struct AdiabaticPath {
  PauliSum h_initial;
  PauliSum h_final;

  AdiabaticPath(PauliSum hi, PauliSum hf);

  int n_qubits() const { return h_initial.n_qubits(); }
};

// Supremum norms over the interpolation interval.
struct PathNorms {
  double h_op = 0.0;        // sup over lambda of the operator norm of H(lambda)
  double dh_op = 0.0;       // operator norm of H_final - H_initial
  double coeff_sup = 0.0;   // sup over lambda of the coefficient 2-norm
};

// Qubit count above which dense 2^n x 2^n materialization is refused.
// Overridable through the AVQE_DENSE_CAP environment variable.
int dense_cap();

Matrix build_matrix(const PauliSum& h);

// Largest singular value; for the Hermitian matrices built here this is
// the largest absolute eigenvalue.
double operator_norm(const PauliSum& h);

// H(lambda) = (1 - lambda) H_initial + lambda H_final, with each merged
// coefficient formed in exactly that expression.
PauliSum interpolate(const AdiabaticPath& path, double lambda);

PauliSum path_difference(const AdiabaticPath& path);

PathNorms path_norm_sup(const AdiabaticPath& path, int grid = 1001);

// ============================================================
// Matrix-free statevector kernels (shared by the higher layers)
// ============================================================

// out = P |in| for a single Pauli string; out is resized as needed.
void apply_pauli_string(const std::string& letters, const Vector& in,
                        Vector& out);

Vector apply_sum(const PauliSum& h, const Vector& psi);

// Pauli-algebra product with term-count guard (used for variance
// estimation from samples). Coefficients of the product may be complex
// in general; Hermitian inputs squared stay real, which is checked.
PauliSum multiply(const PauliSum& a, const PauliSum& b,
                  std::size_t term_cap = 4096);

}  // namespace avqe
