#include "avqe/shots.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace avqe {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::mt19937_64 stream_for(std::uint64_t seed, std::uint64_t term_index,
                           std::uint64_t shift_index) {
  std::uint64_t s = seed;
  std::uint64_t key = splitmix64(s);
  s ^= term_index;
  key ^= splitmix64(s);
  s ^= shift_index << 1;
  key ^= splitmix64(s);
  return std::mt19937_64(key);
}

void check_config(const ShotConfig& config) {
  if (config.shots < 1)
    fail(errc::nonpositive_input, "shots must be at least 1");
}

double sampled_mean(double expectation, const ShotConfig& config,
                    std::uint64_t term_index, std::uint64_t shift_index) {
  const double p = std::clamp((1.0 + expectation) / 2.0, 0.0, 1.0);
  if (p == 0.0) return -1.0;
  if (p == 1.0) return 1.0;
  std::mt19937_64 eng = stream_for(config.seed, term_index, shift_index);
  std::binomial_distribution<long long> dist(config.shots, p);
  const long long up = dist(eng);
  return (2.0 * up - config.shots) / static_cast<double>(config.shots);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                          std::uint64_t b) {
  std::uint64_t s = base;
  std::uint64_t key = splitmix64(s);
  s ^= a;
  key ^= splitmix64(s);
  s ^= b << 1;
  key ^= splitmix64(s);
  return key;
}

double sample_pauli_expectation(const Vector& psi, const std::string& letters,
                                const ShotConfig& config,
                                std::uint64_t term_index,
                                std::uint64_t shift_index) {
  check_config(config);
  Vector scratch;
  apply_pauli_string(letters, psi, scratch);
  const double expectation = psi.dot(scratch).real();
  return sampled_mean(expectation, config, term_index, shift_index);
}

namespace {

double sampled_energy(const Vector& psi, const PauliSum& h,
                      const ShotConfig& config, std::uint64_t shift_index) {
  double energy = 0.0;
  std::uint64_t term = 0;
  for (const auto& t : h.terms())
    energy += t.coefficient *
              sample_pauli_expectation(psi, t.letters, config, term++,
                                       shift_index);
  return energy;
}

}  // namespace

EnergyEstimate estimate_energy_sigma(const Vector& psi, const PauliSum& h,
                                     const ShotConfig& config,
                                     std::uint64_t shift_index,
                                     std::size_t h2_term_cap) {
  check_config(config);
  const std::int64_t dim = std::int64_t{1} << h.n_qubits();
  if (psi.size() != dim)
    fail(errc::dimension_mismatch, "state dimension does not match register");

  const double energy = sampled_energy(psi, h, config, shift_index);

  const PauliSum h2 = multiply(h, h, h2_term_cap);
  // Second-moment terms draw from their own index block so the two
  // estimates stay independent.
  double second = 0.0;
  std::uint64_t term2 = h.size();
  const std::string identity(h.n_qubits(), 'I');
  for (const auto& t : h2.terms()) {
    if (t.letters == identity) {
      second += t.coefficient;
      ++term2;
      continue;
    }
    second += t.coefficient *
              sample_pauli_expectation(psi, t.letters, config, term2++,
                                       shift_index);
  }
  return {energy, std::sqrt(std::max(0.0, second - energy * energy))};
}

Eigen::VectorXd noisy_gradient(const Ansatz& ansatz,
                               const Eigen::VectorXd& theta, const PauliSum& h,
                               const ShotConfig& config,
                               double coeff_sq_override) {
  check_config(config);
  const int m = ansatz.n_params();

  if (config.model == ShotModel::gaussian_proxy) {
    Eigen::VectorXd grad = gradient(ansatz, theta, h);
    const double coeff_sq = coeff_sq_override >= 0.0
                                ? coeff_sq_override
                                : h.coeff_norm() * h.coeff_norm();
    const double per_component_var =
        2.0 * coeff_sq / static_cast<double>(config.shots);
    if (per_component_var == 0.0) return grad;
    const double sd = std::sqrt(per_component_var);
    for (int k = 0; k < m; ++k) {
      std::mt19937_64 eng = stream_for(config.seed, k, 0);
      std::normal_distribution<double> normal(0.0, sd);
      grad(k) += normal(eng);
    }
    return grad;
  }

  // Full-angle parameter shift; shift indices 2k+2 / 2k+3 keep the plus
  // and minus evaluations on disjoint streams.
  if (h.n_qubits() != ansatz.n_qubits)
    fail(errc::dimension_mismatch, "operator register differs from ansatz");
  Eigen::VectorXd grad(m);
  Eigen::VectorXd shifted = theta;
  for (int k = 0; k < m; ++k) {
    shifted(k) = theta(k) + std::numbers::pi / 4.0;
    const double e_plus = sampled_energy(
        prepare(ansatz, shifted), h, config, 2 * static_cast<std::uint64_t>(k) + 2);
    shifted(k) = theta(k) - std::numbers::pi / 4.0;
    const double e_minus = sampled_energy(
        prepare(ansatz, shifted), h, config, 2 * static_cast<std::uint64_t>(k) + 3);
    shifted(k) = theta(k);
    grad(k) = e_plus - e_minus;
  }
  return grad;
}

}  // namespace avqe
