#include "avqe/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace avqe {

namespace {

constexpr double kDegenerateTol = 1e-10;

Eigen::VectorXd eigenvalues_of(const PauliSum& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(build_matrix(h),
                                               Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    fail(errc::numerical_failure, "eigenvalue solve failed");
  return solver.eigenvalues();
}

double gap_of(const AdiabaticPath& path, double lambda) {
  const Eigen::VectorXd ev = eigenvalues_of(interpolate(path, lambda));
  return ev(1) - ev(0);
}

// Column order inside a degenerate cluster is solver-dependent noise;
// fix it by descending lexicographic comparison of the phase-fixed
// amplitudes so repeated runs agree.
bool column_less(const Matrix& m, int a, int b) {
  for (int r = 0; r < m.rows(); ++r) {
    const std::complex<double> u = m(r, a), v = m(r, b);
    if (std::abs(u.real() - v.real()) > 1e-12) return u.real() > v.real();
    if (std::abs(u.imag() - v.imag()) > 1e-12) return u.imag() > v.imag();
  }
  return false;
}

double golden_min(const std::function<double(double)>& f, double lo,
                  double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 > f2) {
      a = x1;
      x1 = x2; f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1; f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    }
  }
  return (a + b) / 2.0;
}

}  // namespace

SpectralData eigensystem(const PauliSum& h) {
  const Matrix m = build_matrix(h);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  if (solver.info() != Eigen::Success)
    fail(errc::numerical_failure, "eigenvalue solve failed");
  SpectralData out{solver.eigenvalues(), solver.eigenvectors()};

  const int dim = static_cast<int>(out.eigenvalues.size());
  const double h_norm = std::max(std::abs(out.eigenvalues(0)),
                                 std::abs(out.eigenvalues(dim - 1)));
  const Matrix residual =
      m * out.eigenvectors -
      out.eigenvectors * out.eigenvalues.asDiagonal();
  for (int j = 0; j < dim; ++j)
    if (residual.col(j).norm() > 1e-10 * std::max(h_norm, 1e-300))
      fail(errc::numerical_failure,
           "eigenpair " + std::to_string(j) + " fails the residual check");

  for (int j = 0; j < dim; ++j) {
    for (int r = 0; r < dim; ++r) {
      const std::complex<double> v = out.eigenvectors(r, j);
      if (std::abs(v) > 1e-12) {
        out.eigenvectors.col(j) *= std::conj(v) / std::abs(v);
        break;
      }
    }
  }

  int j = 0;
  while (j < dim) {
    int k = j;
    while (k + 1 < dim &&
           out.eigenvalues(k + 1) - out.eigenvalues(k) <= kDegenerateTol)
      ++k;
    if (k > j) {
      std::vector<int> order(k - j + 1);
      std::iota(order.begin(), order.end(), j);
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return column_less(out.eigenvectors, a, b);
      });
      Matrix cols(dim, k - j + 1);
      Eigen::VectorXd vals(k - j + 1);
      for (int i = 0; i <= k - j; ++i) {
        cols.col(i) = out.eigenvectors.col(order[i]);
        vals(i) = out.eigenvalues(order[i]);
      }
      out.eigenvectors.block(0, j, dim, k - j + 1) = cols;
      out.eigenvalues.segment(j, k - j + 1) = vals;
    }
    j = k + 1;
  }
  return out;
}

GapProfile gap_profile(const AdiabaticPath& path, int grid) {
  if (grid < 2) fail(errc::invalid_params, "grid needs at least 2 points");
  GapProfile profile;
  profile.lambdas.reserve(grid);
  profile.gaps.reserve(grid);
  int best_i = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid; ++i) {
    const double lam = static_cast<double>(i) / (grid - 1);
    const double g = gap_of(path, lam);
    profile.lambdas.push_back(lam);
    profile.gaps.push_back(g);
    if (g < best) {
      best = g;
      best_i = i;
    }
  }
  const double lo = std::max(0.0, (best_i - 1.0) / (grid - 1));
  const double hi = std::min(1.0, (best_i + 1.0) / (grid - 1));
  const auto f = [&](double lam) { return gap_of(path, lam); };
  const double arg = golden_min(f, lo, hi, 1e-9);
  const double refined = f(arg);
  if (refined < best) {
    profile.delta_min = refined;
    profile.argmin_lambda = arg;
  } else {
    profile.delta_min = best;
    profile.argmin_lambda = profile.lambdas[best_i];
  }
  if (profile.delta_min <= 1e-12)
    fail(errc::degenerate_path,
         "gap closes near lambda = " + std::to_string(profile.argmin_lambda));
  return profile;
}

double fidelity(const Vector& a, const Vector& b) {
  if (a.size() != b.size())
    fail(errc::dimension_mismatch, "states have different dimensions");
  return std::norm(b.dot(a));
}

BranchResult branch_index(const SpectralData& spectrum, const Vector& psi) {
  const int dim = static_cast<int>(spectrum.eigenvalues.size());
  if (psi.size() != dim)
    fail(errc::dimension_mismatch, "state dimension does not match spectrum");
  double e_psi = 0.0, e2_psi = 0.0;
  for (int j = 0; j < dim; ++j) {
    const double p = std::norm(spectrum.eigenvectors.col(j).dot(psi));
    e_psi += spectrum.eigenvalues(j) * p;
    e2_psi += spectrum.eigenvalues(j) * spectrum.eigenvalues(j) * p;
  }
  const double sigma = std::sqrt(std::max(0.0, e2_psi - e_psi * e_psi));

  BranchResult out;
  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j < dim; ++j) {
    const double d = std::abs(spectrum.eigenvalues(j) - e_psi);
    if (d < best) {
      best = d;
      out.index = j;
    }
  }
  out.energy_distance = best;

  double nearest_distinct = std::numeric_limits<double>::infinity();
  for (int j = 0; j < dim; ++j) {
    const double d =
        std::abs(spectrum.eigenvalues(j) - spectrum.eigenvalues(out.index));
    if (d > kDegenerateTol) nearest_distinct = std::min(nearest_distinct, d);
  }
  out.unique = sigma < nearest_distinct / 2.0;
  return out;
}

}  // namespace avqe
