#include "avqe/pauli.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <functional>
#include <map>

namespace avqe {

namespace {

constexpr double kMergeDropTol = 1e-14;

void check_letters(const std::string& letters, int n_qubits) {
  if (static_cast<int>(letters.size()) != n_qubits)
    fail(errc::length_mismatch,
         "term '" + letters + "' does not cover " +
             std::to_string(n_qubits) + " qubits");
  for (char c : letters)
    if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z')
      fail(errc::invalid_params,
           "letter '" + std::string(1, c) + "' in term '" + letters + "'");
}

struct StringMasks {
  std::uint64_t xmask = 0;  // bits flipped (X and Y positions)
  std::uint64_t zymask = 0; // bits contributing a sign (Z and Y positions)
  std::complex<double> phase{1.0, 0.0};  // i^(#Y)
};

StringMasks masks_of(const std::string& letters) {
  StringMasks m;
  const int n = static_cast<int>(letters.size());
  int n_y = 0;
  for (int q = 0; q < n; ++q) {
    const std::uint64_t bit = 1ull << (n - 1 - q);
    switch (letters[q]) {
      case 'X': m.xmask |= bit; break;
      case 'Y': m.xmask |= bit; m.zymask |= bit; ++n_y; break;
      case 'Z': m.zymask |= bit; break;
      default: break;
    }
  }
  static const std::complex<double> i_pow[4] = {
      {1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  m.phase = i_pow[n_y % 4];
  return m;
}

double golden_max(const std::function<double(double)>& f, double lo,
                  double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
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
  return std::max(f1, f2);
}

// Single-letter products: pauli_prod[a][b] = (phase, letter) with
// a,b,letter indices into "IXYZ".
struct ProdEntry {
  std::complex<double> phase;
  int letter;
};

ProdEntry prod_table(int a, int b) {
  if (a == 0) return {{1, 0}, b};
  if (b == 0) return {{1, 0}, a};
  if (a == b) return {{1, 0}, 0};
  // X=1, Y=2, Z=3: XY=iZ, YZ=iX, ZX=iY, reversed order flips the sign.
  static const int third[4][4] = {{0, 0, 0, 0},
                                  {0, 0, 3, 2},
                                  {0, 3, 0, 1},
                                  {0, 2, 1, 0}};
  const bool forward = (a == 1 && b == 2) || (a == 2 && b == 3) ||
                       (a == 3 && b == 1);
  return {forward ? std::complex<double>{0, 1}
                  : std::complex<double>{0, -1},
          third[a][b]};
}

int letter_index(char c) {
  switch (c) {
    case 'X': return 1;
    case 'Y': return 2;
    case 'Z': return 3;
    default: return 0;
  }
}

}  // namespace

PauliSum::PauliSum(int n_qubits, std::vector<PauliTerm> terms)
    : n_qubits_(n_qubits) {
  if (n_qubits < 1)
    fail(errc::invalid_params, "register needs at least one qubit");
  std::map<std::string, double> merged;
  for (const auto& t : terms) {
    check_letters(t.letters, n_qubits);
    if (!std::isfinite(t.coefficient))
      fail(errc::invalid_params, "non-finite coefficient on '" + t.letters + "'");
    merged[t.letters] += t.coefficient;
  }
  terms_.reserve(merged.size());
  for (const auto& [letters, c] : merged)
    if (std::abs(c) > kMergeDropTol) terms_.push_back({c, letters});
}

double PauliSum::coeff_norm() const {
  double s = 0.0;
  for (const auto& t : terms_) s += t.coefficient * t.coefficient;
  return std::sqrt(s);
}

AdiabaticPath::AdiabaticPath(PauliSum hi, PauliSum hf)
    : h_initial(std::move(hi)), h_final(std::move(hf)) {
  if (h_initial.n_qubits() != h_final.n_qubits())
    fail(errc::dimension_mismatch, "path endpoints act on different registers");
}

int dense_cap() {
  const char* env = std::getenv("AVQE_DENSE_CAP");
  if (env != nullptr) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1 && v <= 30)
      return static_cast<int>(v);
  }
  return 12;
}

Matrix build_matrix(const PauliSum& h) {
  const int n = h.n_qubits();
  if (n > dense_cap())
    fail(errc::dense_cap_exceeded,
         std::to_string(n) + " qubits exceeds the dense cap of " +
             std::to_string(dense_cap()));
  const std::int64_t dim = std::int64_t{1} << n;
  Matrix m = Matrix::Zero(dim, dim);
  for (const auto& t : h.terms()) {
    const StringMasks sm = masks_of(t.letters);
    for (std::int64_t j = 0; j < dim; ++j) {
      const std::int64_t b = j ^ static_cast<std::int64_t>(sm.xmask);
      const double sign =
          (std::popcount(static_cast<std::uint64_t>(b) & sm.zymask) & 1)
              ? -1.0
              : 1.0;
      m(j, b) += t.coefficient * sign * sm.phase;
    }
  }
  return m;
}

double operator_norm(const PauliSum& h) {
  if (h.terms().empty()) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(build_matrix(h),
                                               Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    fail(errc::numerical_failure, "eigenvalue solve failed in operator_norm");
  const auto& ev = solver.eigenvalues();
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

PauliSum interpolate(const AdiabaticPath& path, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0))
    fail(errc::lambda_out_of_range,
         "lambda = " + std::to_string(lambda));
  std::map<std::string, std::pair<double, double>> endpoints;
  for (const auto& t : path.h_initial.terms())
    endpoints[t.letters].first = t.coefficient;
  for (const auto& t : path.h_final.terms())
    endpoints[t.letters].second = t.coefficient;
  std::vector<PauliTerm> out;
  out.reserve(endpoints.size());
  for (const auto& [letters, ab] : endpoints)
    out.push_back({(1.0 - lambda) * ab.first + lambda * ab.second, letters});
  return PauliSum(path.n_qubits(), std::move(out));
}

PauliSum path_difference(const AdiabaticPath& path) {
  std::map<std::string, double> diff;
  for (const auto& t : path.h_final.terms()) diff[t.letters] += t.coefficient;
  for (const auto& t : path.h_initial.terms()) diff[t.letters] -= t.coefficient;
  std::vector<PauliTerm> out;
  out.reserve(diff.size());
  for (const auto& [letters, c] : diff) out.push_back({c, letters});
  return PauliSum(path.n_qubits(), std::move(out));
}

PathNorms path_norm_sup(const AdiabaticPath& path, int grid) {
  if (grid < 2) fail(errc::invalid_params, "grid needs at least 2 points");
  PathNorms norms;
  norms.dh_op = operator_norm(path_difference(path));

  const auto op_at = [&](double lam) {
    return operator_norm(interpolate(path, lam));
  };
  const auto coeff_at = [&](double lam) {
    return interpolate(path, lam).coeff_norm();
  };

  const auto sup_of = [&](const std::function<double(double)>& f) {
    double best = -1.0;
    int best_i = 0;
    for (int i = 0; i < grid; ++i) {
      const double lam = static_cast<double>(i) / (grid - 1);
      const double v = f(lam);
      if (v > best) {
        best = v;
        best_i = i;
      }
    }
    const double lo = std::max(0.0, (best_i - 1.0) / (grid - 1));
    const double hi = std::min(1.0, (best_i + 1.0) / (grid - 1));
    return std::max(best, golden_max(f, lo, hi, 1e-9));
  };

  norms.h_op = sup_of(op_at);
  norms.coeff_sup = sup_of(coeff_at);
  return norms;
}

void apply_pauli_string(const std::string& letters, const Vector& in,
                        Vector& out) {
  const StringMasks sm = masks_of(letters);
  const std::int64_t dim = in.size();
  out.resize(dim);
  for (std::int64_t j = 0; j < dim; ++j) {
    const std::int64_t b = j ^ static_cast<std::int64_t>(sm.xmask);
    const double sign =
        (std::popcount(static_cast<std::uint64_t>(b) & sm.zymask) & 1) ? -1.0
                                                                       : 1.0;
    out(j) = sm.phase * sign * in(b);
  }
}

Vector apply_sum(const PauliSum& h, const Vector& psi) {
  const std::int64_t dim = std::int64_t{1} << h.n_qubits();
  if (psi.size() != dim)
    fail(errc::dimension_mismatch, "state dimension does not match register");
  Vector acc = Vector::Zero(dim);
  Vector scratch(dim);
  for (const auto& t : h.terms()) {
    apply_pauli_string(t.letters, psi, scratch);
    acc += t.coefficient * scratch;
  }
  return acc;
}

PauliSum multiply(const PauliSum& a, const PauliSum& b,
                  std::size_t term_cap) {
  if (a.n_qubits() != b.n_qubits())
    fail(errc::dimension_mismatch, "product factors act on different registers");
  const int n = a.n_qubits();
  std::map<std::string, std::complex<double>> acc;
  std::string letters(n, 'I');
  for (const auto& ta : a.terms()) {
    for (const auto& tb : b.terms()) {
      std::complex<double> phase{1.0, 0.0};
      for (int q = 0; q < n; ++q) {
        const ProdEntry e =
            prod_table(letter_index(ta.letters[q]), letter_index(tb.letters[q]));
        phase *= e.phase;
        letters[q] = "IXYZ"[e.letter];
      }
      acc[letters] += ta.coefficient * tb.coefficient * phase;
      if (acc.size() > term_cap)
        fail(errc::h2_term_blowup,
             "product exceeds " + std::to_string(term_cap) + " terms");
    }
  }
  const double scale = std::max(1.0, a.coeff_norm() * b.coeff_norm());
  std::vector<PauliTerm> out;
  out.reserve(acc.size());
  for (const auto& [ls, c] : acc) {
    if (std::abs(c.imag()) > 1e-12 * scale)
      fail(errc::numerical_failure,
           "product coefficient on '" + ls + "' has imaginary part");
    out.push_back({c.real(), ls});
  }
  return PauliSum(n, std::move(out));
}

}  // namespace avqe
