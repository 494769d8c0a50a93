#pragma once

#include <vector>

#include "avqe/pauli.hpp"

namespace avqe {

// ============================================================
// Exact-diagonalization reference (validation side, not the
// algorithm under test). No caching; all calls are pure.
// ============================================================

struct SpectralData {
  Eigen::VectorXd eigenvalues;  // ascending
  Matrix eigenvectors;          // columns, orthonormal, phase-fixed
};

SpectralData eigensystem(const PauliSum& h);

struct GapProfile {
  std::vector<double> lambdas;
  std::vector<double> gaps;   // E1 - E0 at each grid point
  double delta_min = 0.0;     // refined minimum over the interval
  double argmin_lambda = 0.0;
};

// Scans the spectral gap of the interpolated family; a gap below
// 1e-12 anywhere on the refined profile raises DegeneratePath.
GapProfile gap_profile(const AdiabaticPath& path, int grid = 1001);

// |<b|a>|^2 for normalized inputs.
double fidelity(const Vector& a, const Vector& b);

struct BranchResult {
  int index = 0;            // nearest eigenvalue to <psi|H|psi>
  bool unique = false;      // energy deviation resolves the branch
  double energy_distance = 0.0;
};

BranchResult branch_index(const SpectralData& spectrum, const Vector& psi);

}  // namespace avqe
