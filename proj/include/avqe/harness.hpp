#pragma once

#include <optional>
#include <string>
#include <vector>

#include "avqe/shots.hpp"
#include "avqe/verifier.hpp"

namespace avqe {

// ============================================================
// Experiment configuration, model builders, and the CLI driver.
// Config files are JSON; every CLI flag overrides its config key.
// ============================================================

struct ModelConfig {
  std::string family = "single_qubit";  // single_qubit | tfim | random_2local
  int n = 1;
  double g = 1.0;          // transverse-field strength (tfim)
  int depth = 0;           // layered-ansatz depth, 0 = ceil(3n/2)
  int terms = 8;           // random_2local term count
  double scale = 1.0;      // random_2local coefficient scale
  std::uint64_t model_seed = 7;
  double hf_scale = 1.0;   // multiplies the final Hamiltonian (single_qubit)
};

struct VerifierConfig {
  double delta_c = 0.0;  // <= 0: use the oracle minimum gap
  long long retry_cap = 100;
};

struct ShotsSection {
  long long shots = 0;  // <= 0: use the analytic shot floor
  ShotModel model = ShotModel::gaussian_proxy;
  long long trials = 200;
};

struct BpSection {
  double eps_q = 0.5;
  double lambda = 0.5;
  long long samples = 20000;
};

struct SweepSection {
  std::vector<double> hf_scales = {1.0,  0.85, 0.7,  0.55, 0.45, 0.35,
                                   0.28, 0.22, 0.17, 0.13, 0.10, 0.08};
};

struct ExperimentConfig {
  ModelConfig model;
  std::optional<std::vector<std::string>> ansatz_override;
  std::optional<std::vector<double>> theta0_override;
  TrackerConfig tracker;
  VerifierConfig verifier;
  ShotsSection shots;
  BpSection bp;
  SweepSection sweep;
  double eps_target = std::numeric_limits<double>::quiet_NaN();
  double epsilon = std::numeric_limits<double>::quiet_NaN();
  bool oracle = true;
  std::uint64_t seed = 1;
  std::string out = ".";
};

// Throws ConfigInvalid on unreadable files, malformed JSON, unknown
// keys, or out-of-domain values.
ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

struct BuildResult {
  AdiabaticPath path;
  Ansatz ansatz;
  Eigen::VectorXd theta0;
};

BuildResult build_model(const ExperimentConfig& config);

// Alternating single-qubit Y layers and two-qubit YZ/ZY bond layers.
std::vector<std::string> layered_generators(int n_qubits, int depth);

// ============================================================
// Experiments
// ============================================================

struct BpVarianceResult {
  double lambda = 0.0;
  double eps_q = 0.0;
  double dtheta_q = 0.0;
  double var_lower = 0.0;
  double empirical_var = 0.0;
  double deficit_sum = 0.0;
  double polish_grad_norm = 0.0;
  bool pass = false;
};

BpVarianceResult bp_variance_experiment(const BuildResult& model,
                                        double lambda, double eps_q,
                                        long long samples, std::uint64_t seed,
                                        double gamma);

struct PlInvarianceResult {
  long long shots = 0;
  long long s_min = 0;
  double sigma_grad = 0.0;
  double r_pl = 0.0;
  long long trials = 0;
  long long successes = 0;
  double success_rate = 0.0;
  double worst_ratio = 0.0;  // max over trials of dist / r_pl
  bool pass = false;
};

// Noisy warm-started descent on the single-qubit reference path; a
// trial succeeds when every step stays inside the analytic radius.
// Nonpositive shots selects the analytic floor.
PlInvarianceResult pl_invariance_experiment(
    long long shots, long long trials, std::uint64_t seed,
    ShotModel model = ShotModel::gaussian_proxy);

struct SweepRow {
  double scale = 0.0;
  double delta_min = 0.0;
  long long realized_updates = 0;
  double bound_raw = 0.0;
  long long bound_ceiled = 0;
  double c_hat = 0.0;  // realized prefactor in the gap-cubed law
};

// Guarantee-mode runs over a family of final Hamiltonians with
// shrinking gaps; rows come back in scale order.
std::vector<SweepRow> sweep_experiment(const std::vector<double>& hf_scales);

// ============================================================
// Report rendering (CSV bodies are deterministic for a fixed
// config and seed; timestamps only ever go to the JSON sidecar)
// ============================================================

std::string track_csv(const std::vector<SliceRecord>& records, bool oracle);
std::string verify_csv(const AvqeRunSummary& summary);
std::string oracle_csv(const GapProfile& profile);
std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string bounds_table(const TrackingConstants& c);

int run_cli(int argc, char** argv);

}  // namespace avqe
