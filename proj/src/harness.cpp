#include "avqe/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace avqe {

namespace {

std::string num17(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ------------------------------------------------------------
// Config parsing
// ------------------------------------------------------------

void expect_keys(const json& j, const std::string& where,
                 std::initializer_list<const char*> allowed) {
  if (!j.is_object())
    fail(errc::config_invalid, where + " must be a JSON object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : allowed)
      if (item.key() == k) {
        known = true;
        break;
      }
    if (!known)
      fail(errc::config_invalid,
           "unknown key '" + item.key() + "' in " + where);
  }
}

void read_double(const json& j, const std::string& where, const char* key,
                 double& out) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (!v.is_number())
    fail(errc::config_invalid, where + "." + key + " must be a number");
  out = v.get<double>();
}

void read_ll(const json& j, const std::string& where, const char* key,
             long long& out) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (!v.is_number_integer() && !v.is_number_unsigned())
    fail(errc::config_invalid, where + "." + key + " must be an integer");
  out = v.get<long long>();
}

void read_int(const json& j, const std::string& where, const char* key,
              int& out) {
  long long wide = out;
  read_ll(j, where, key, wide);
  if (wide < std::numeric_limits<int>::min() ||
      wide > std::numeric_limits<int>::max())
    fail(errc::config_invalid, where + "." + key + " is out of range");
  out = static_cast<int>(wide);
}

void read_u64(const json& j, const std::string& where, const char* key,
              std::uint64_t& out) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (!v.is_number_integer() && !v.is_number_unsigned())
    fail(errc::config_invalid, where + "." + key + " must be an integer");
  if (v.is_number_integer() && v.get<long long>() < 0)
    fail(errc::config_invalid, where + "." + key + " must be nonnegative");
  out = v.get<std::uint64_t>();
}

void read_bool(const json& j, const std::string& where, const char* key,
               bool& out) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (!v.is_boolean())
    fail(errc::config_invalid, where + "." + key + " must be a boolean");
  out = v.get<bool>();
}

void read_string(const json& j, const std::string& where, const char* key,
                 std::string& out) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (!v.is_string())
    fail(errc::config_invalid, where + "." + key + " must be a string");
  out = v.get<std::string>();
}

void parse_model(const json& j, ModelConfig& m) {
  expect_keys(j, "model",
              {"family", "n", "g", "depth", "terms", "scale", "model_seed",
               "hf_scale"});
  read_string(j, "model", "family", m.family);
  read_int(j, "model", "n", m.n);
  read_double(j, "model", "g", m.g);
  read_int(j, "model", "depth", m.depth);
  read_int(j, "model", "terms", m.terms);
  read_double(j, "model", "scale", m.scale);
  read_u64(j, "model", "model_seed", m.model_seed);
  read_double(j, "model", "hf_scale", m.hf_scale);
}

void parse_tracker(const json& j, TrackerConfig& t) {
  expect_keys(j, "tracker",
              {"eta", "k_steps", "delta_lambda", "optimizer", "mode",
               "ng_regularizer", "max_slices"});
  read_double(j, "tracker", "eta", t.eta);
  read_ll(j, "tracker", "k_steps", t.k_steps);
  read_double(j, "tracker", "delta_lambda", t.delta_lambda);
  read_double(j, "tracker", "ng_regularizer", t.ng_regularizer);
  read_ll(j, "tracker", "max_slices", t.max_slices);
  std::string opt, mode;
  read_string(j, "tracker", "optimizer", opt);
  read_string(j, "tracker", "mode", mode);
  if (!opt.empty()) {
    if (opt == "vanilla")
      t.optimizer = Optimizer::vanilla;
    else if (opt == "natural_gradient")
      t.optimizer = Optimizer::natural_gradient;
    else
      fail(errc::config_invalid, "tracker.optimizer must be 'vanilla' or "
                                 "'natural_gradient'");
  }
  if (!mode.empty()) {
    if (mode == "option1")
      t.mode = TrackingMode::option1;
    else if (mode == "option2")
      t.mode = TrackingMode::option2;
    else
      fail(errc::config_invalid,
           "tracker.mode must be 'option1' or 'option2'");
  }
}

void parse_verifier(const json& j, VerifierConfig& v) {
  expect_keys(j, "verifier", {"delta_c", "retry_cap"});
  read_double(j, "verifier", "delta_c", v.delta_c);
  read_ll(j, "verifier", "retry_cap", v.retry_cap);
}

void parse_shots(const json& j, ShotsSection& s) {
  expect_keys(j, "shots", {"shots", "model", "trials"});
  read_ll(j, "shots", "shots", s.shots);
  read_ll(j, "shots", "trials", s.trials);
  std::string model;
  read_string(j, "shots", "model", model);
  if (!model.empty()) {
    if (model == "bernoulli")
      s.model = ShotModel::bernoulli;
    else if (model == "gaussian_proxy")
      s.model = ShotModel::gaussian_proxy;
    else
      fail(errc::config_invalid,
           "shots.model must be 'bernoulli' or 'gaussian_proxy'");
  }
}

void parse_bp(const json& j, BpSection& b) {
  expect_keys(j, "bp", {"eps_q", "lambda", "samples"});
  read_double(j, "bp", "eps_q", b.eps_q);
  read_double(j, "bp", "lambda", b.lambda);
  read_ll(j, "bp", "samples", b.samples);
}

void parse_sweep(const json& j, SweepSection& s) {
  expect_keys(j, "sweep", {"hf_scales"});
  if (!j.contains("hf_scales")) return;
  const json& v = j.at("hf_scales");
  if (!v.is_array() || v.empty())
    fail(errc::config_invalid, "sweep.hf_scales must be a nonempty array");
  s.hf_scales.clear();
  for (const json& e : v) {
    if (!e.is_number())
      fail(errc::config_invalid, "sweep.hf_scales entries must be numbers");
    s.hf_scales.push_back(e.get<double>());
  }
}

void validate_config(const ExperimentConfig& cfg) {
  const ModelConfig& m = cfg.model;
  if (m.family != "single_qubit" && m.family != "tfim" &&
      m.family != "random_2local")
    fail(errc::config_invalid, "unknown model family '" + m.family + "'");
  if (m.n < 1) fail(errc::config_invalid, "model.n must be at least 1");
  if (!std::isfinite(m.g)) fail(errc::config_invalid, "model.g must be finite");
  if (m.depth < 0) fail(errc::config_invalid, "model.depth must be >= 0");
  if (m.terms < 1) fail(errc::config_invalid, "model.terms must be >= 1");
  if (!(m.scale > 0.0) || !std::isfinite(m.scale))
    fail(errc::config_invalid, "model.scale must be positive");
  if (!(m.hf_scale > 0.0) || !std::isfinite(m.hf_scale))
    fail(errc::config_invalid, "model.hf_scale must be positive");

  const TrackerConfig& t = cfg.tracker;
  if (!std::isfinite(t.eta) || t.eta < 0.0)
    fail(errc::config_invalid, "tracker.eta must be finite and >= 0");
  if (t.k_steps < 0)
    fail(errc::config_invalid, "tracker.k_steps must be >= 0");
  if (!std::isfinite(t.delta_lambda) || t.delta_lambda < 0.0 ||
      t.delta_lambda > 1.0)
    fail(errc::config_invalid, "tracker.delta_lambda must lie in [0, 1]");
  if (!std::isfinite(t.ng_regularizer) || t.ng_regularizer < 0.0)
    fail(errc::config_invalid, "tracker.ng_regularizer must be >= 0");
  if (t.max_slices < 1)
    fail(errc::config_invalid, "tracker.max_slices must be >= 1");
  if (!(t.gamma > 0.0) || t.gamma > 1.0)
    fail(errc::config_invalid, "gamma must lie in (0, 1]");

  if (!std::isfinite(cfg.verifier.delta_c) || cfg.verifier.delta_c < 0.0)
    fail(errc::config_invalid, "verifier.delta_c must be >= 0");
  if (cfg.verifier.retry_cap < 1)
    fail(errc::config_invalid, "verifier.retry_cap must be >= 1");

  if (cfg.shots.shots < 0)
    fail(errc::config_invalid, "shots.shots must be >= 0");
  if (cfg.shots.trials < 1)
    fail(errc::config_invalid, "shots.trials must be >= 1");

  if (!(cfg.bp.eps_q > 0.0) || cfg.bp.eps_q > 1.0)
    fail(errc::config_invalid, "bp.eps_q must lie in (0, 1]");
  if (!(cfg.bp.lambda >= 0.0) || cfg.bp.lambda > 1.0)
    fail(errc::config_invalid, "bp.lambda must lie in [0, 1]");
  if (cfg.bp.samples < 1000)
    fail(errc::config_invalid, "bp.samples must be >= 1000");

  for (double s : cfg.sweep.hf_scales)
    if (!(s > 0.0) || !std::isfinite(s))
      fail(errc::config_invalid, "sweep.hf_scales entries must be positive");

  if (!std::isnan(cfg.eps_target) && !(cfg.eps_target > 0.0))
    fail(errc::config_invalid, "eps_target must be positive when given");
  if (!std::isnan(cfg.epsilon) &&
      (!std::isfinite(cfg.epsilon) || cfg.epsilon < 0.0))
    fail(errc::config_invalid, "epsilon must be >= 0 when given");

  if (cfg.ansatz_override) {
    if (cfg.ansatz_override->empty())
      fail(errc::config_invalid, "ansatz.generators must be nonempty");
    for (const std::string& g : *cfg.ansatz_override) {
      if (g.empty())
        fail(errc::config_invalid, "ansatz generators must be nonempty");
      for (char c : g)
        if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z')
          fail(errc::config_invalid,
               "ansatz generators may only contain I, X, Y, Z");
    }
  }
  if (cfg.theta0_override)
    for (double v : *cfg.theta0_override)
      if (!std::isfinite(v))
        fail(errc::config_invalid, "theta0 entries must be finite");
  if (cfg.out.empty())
    fail(errc::config_invalid, "out must be a nonempty path");
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded())
    fail(errc::config_invalid, "config is not valid JSON");
  expect_keys(j, "config",
              {"model", "ansatz", "theta0", "tracker", "verifier", "shots",
               "bp", "sweep", "eps_target", "epsilon", "oracle", "guarantee",
               "gamma", "seed", "out"});

  ExperimentConfig cfg;
  if (j.contains("model")) parse_model(j.at("model"), cfg.model);
  if (j.contains("tracker")) parse_tracker(j.at("tracker"), cfg.tracker);
  if (j.contains("verifier")) parse_verifier(j.at("verifier"), cfg.verifier);
  if (j.contains("shots")) parse_shots(j.at("shots"), cfg.shots);
  if (j.contains("bp")) parse_bp(j.at("bp"), cfg.bp);
  if (j.contains("sweep")) parse_sweep(j.at("sweep"), cfg.sweep);

  if (j.contains("ansatz")) {
    const json& a = j.at("ansatz");
    expect_keys(a, "ansatz", {"generators"});
    if (!a.contains("generators") || !a.at("generators").is_array())
      fail(errc::config_invalid, "ansatz.generators must be an array");
    std::vector<std::string> gens;
    for (const json& e : a.at("generators")) {
      if (!e.is_string())
        fail(errc::config_invalid, "ansatz.generators must hold strings");
      gens.push_back(e.get<std::string>());
    }
    cfg.ansatz_override = std::move(gens);
  }
  if (j.contains("theta0")) {
    const json& v = j.at("theta0");
    if (!v.is_array())
      fail(errc::config_invalid, "theta0 must be an array of numbers");
    std::vector<double> theta;
    for (const json& e : v) {
      if (!e.is_number())
        fail(errc::config_invalid, "theta0 must be an array of numbers");
      theta.push_back(e.get<double>());
    }
    cfg.theta0_override = std::move(theta);
  }

  read_double(j, "config", "eps_target", cfg.eps_target);
  read_double(j, "config", "epsilon", cfg.epsilon);
  read_bool(j, "config", "oracle", cfg.oracle);
  read_bool(j, "config", "guarantee", cfg.tracker.guarantee);
  read_double(j, "config", "gamma", cfg.tracker.gamma);
  read_u64(j, "config", "seed", cfg.seed);
  read_string(j, "config", "out", cfg.out);

  validate_config(cfg);
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    fail(errc::config_invalid, "cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

// ------------------------------------------------------------
// Model construction
// ------------------------------------------------------------

std::vector<std::string> layered_generators(int n_qubits, int depth) {
  if (n_qubits < 1)
    fail(errc::config_invalid, "register size must be positive");
  if (depth < 1) fail(errc::config_invalid, "ansatz depth must be positive");
  std::vector<std::string> gens;
  int entangler = 0;
  for (int d = 0; d < depth; ++d) {
    if (d % 2 == 0) {
      for (int q = 0; q < n_qubits; ++q) {
        std::string s(n_qubits, 'I');
        s[q] = 'Y';
        gens.push_back(std::move(s));
      }
    } else {
      const bool flip = entangler % 2 == 1;
      for (int q = 0; q + 1 < n_qubits; ++q) {
        std::string s(n_qubits, 'I');
        s[q] = flip ? 'Z' : 'Y';
        s[q + 1] = flip ? 'Y' : 'Z';
        gens.push_back(std::move(s));
      }
      ++entangler;
    }
  }
  return gens;
}

BuildResult build_model(const ExperimentConfig& config) {
  const ModelConfig& m = config.model;
  int n = m.n;
  std::vector<PauliTerm> hi, hf;
  std::vector<std::string> gens;

  auto site = [&n](int q, char c) {
    std::string s(n, 'I');
    s[q] = c;
    return s;
  };

  if (m.family == "single_qubit") {
    n = 1;
    hi.push_back({1.0, "Z"});
    hf.push_back({m.hf_scale, "X"});
    gens = {"Y"};
  } else if (m.family == "tfim") {
    if (n < 2)
      fail(errc::config_invalid, "tfim needs at least two qubits");
    for (int q = 0; q < n; ++q) hi.push_back({-1.0, site(q, 'X')});
    for (int q = 0; q + 1 < n; ++q) {
      std::string s(n, 'I');
      s[q] = 'Z';
      s[q + 1] = 'Z';
      hf.push_back({-1.0, std::move(s)});
    }
    for (int q = 0; q < n; ++q) hf.push_back({-m.g, site(q, 'X')});
    gens = layered_generators(n, m.depth > 0 ? m.depth : (3 * n + 1) / 2);
  } else if (m.family == "random_2local") {
    if (n < 2)
      fail(errc::config_invalid, "random_2local needs at least two qubits");
    for (int q = 0; q < n; ++q) hi.push_back({-1.0, site(q, 'X')});
    std::mt19937_64 eng(m.model_seed);
    std::uniform_int_distribution<int> qubit(0, n - 1);
    std::uniform_int_distribution<int> axis(0, 2);
    std::uniform_int_distribution<int> weight(1, 2);
    std::normal_distribution<double> coeff(0.0, m.scale);
    const char axes[3] = {'X', 'Y', 'Z'};
    for (int t = 0; t < m.terms; ++t) {
      std::string s(n, 'I');
      const int q1 = qubit(eng);
      s[q1] = axes[axis(eng)];
      if (weight(eng) == 2) {
        int q2 = qubit(eng);
        while (q2 == q1) q2 = qubit(eng);
        s[q2] = axes[axis(eng)];
      }
      hf.push_back({coeff(eng), std::move(s)});
    }
    gens = layered_generators(n, m.depth > 0 ? m.depth : (3 * n + 1) / 2);
  } else {
    fail(errc::config_invalid, "unknown model family '" + m.family + "'");
  }

  bool default_gens = true;
  if (config.ansatz_override) {
    gens = *config.ansatz_override;
    default_gens = false;
    for (const std::string& g : gens)
      if (static_cast<int>(g.size()) != n)
        fail(errc::config_invalid,
             "ansatz generators must have one letter per qubit (" +
                 std::to_string(n) + ")");
  }

  AdiabaticPath path{PauliSum(n, std::move(hi)), PauliSum(n, std::move(hf))};
  Ansatz ansatz{n, std::move(gens)};

  Eigen::VectorXd theta0 = Eigen::VectorXd::Zero(ansatz.n_params());
  if (config.theta0_override) {
    if (static_cast<int>(config.theta0_override->size()) != ansatz.n_params())
      fail(errc::config_invalid,
           "theta0 length does not match the ansatz parameter count");
    for (int i = 0; i < ansatz.n_params(); ++i)
      theta0(i) = (*config.theta0_override)[i];
  } else if (default_gens) {
    if (m.family == "single_qubit") {
      theta0(0) = std::numbers::pi / 2.0;  // exact ground state of Z
    } else {
      // quarter turns on the first Y layer produce |+>^n, the ground
      // state of the initial transverse-field term
      for (int q = 0; q < n && q < ansatz.n_params(); ++q)
        theta0(q) = std::numbers::pi / 4.0;
    }
  }
  return {std::move(path), std::move(ansatz), std::move(theta0)};
}

// ------------------------------------------------------------
// Experiments
// ------------------------------------------------------------

BpVarianceResult bp_variance_experiment(const BuildResult& model,
                                        double lambda, double eps_q,
                                        long long samples, std::uint64_t seed,
                                        double gamma) {
  if (samples < 1000)
    fail(errc::invalid_params, "variance estimate needs at least 1000 samples");
  const Ansatz& ansatz = model.ansatz;
  const int m = ansatz.n_params();
  const PathNorms norms = path_norm_sup(model.path);
  const GapProfile profile = gap_profile(model.path);

  // warm-started sweep to the working point, then curvature polish;
  // plain descent alone stalls on the near-flat modes of the deeper
  // circuits
  TrackerConfig slice_cfg;
  slice_cfg.eta = 1.0 / (4.0 * std::max(norms.h_op, 1e-12) * m);
  slice_cfg.k_steps = 60;
  Eigen::VectorXd theta = model.theta0;
  const int grid = std::max(1, static_cast<int>(std::ceil(lambda / 0.05)));
  for (int j = 1; j <= grid; ++j) {
    const double l = lambda * j / grid;
    theta = optimize_slice(model.path, ansatz, theta, l, slice_cfg).theta;
  }
  const PauliSum h = interpolate(model.path, lambda);
  PolishResult polish = newton_polish(h, ansatz, theta);
  const SpectralData spectrum = eigensystem(h);
  if (!polish.converged ||
      std::abs(polish.energy - spectrum.eigenvalues(0)) > 1e-9)
    fail(errc::minimizer_not_converged,
         "could not pin the instantaneous minimum for the variance floor");
  theta = polish.theta;

  const Vector gs = spectrum.eigenvectors.col(0);
  std::vector<double> deficits(m);
  for (int k = 0; k < m; ++k) {
    const Vector chi = apply_conjugated_generator(ansatz, theta, k, gs);
    const double overlap = gs.dot(chi).real();
    deficits[k] = 1.0 - overlap * overlap;
  }

  const BpBounds bounds =
      bp_bounds(eps_q, gamma, profile.delta_min, m, norms.h_op, deficits);

  std::mt19937_64 eng(seed);
  std::normal_distribution<double> perturb(0.0, bounds.dtheta_q);
  double mean = 0.0;
  double m2 = 0.0;
  for (long long s = 0; s < samples; ++s) {
    Eigen::VectorXd probe = theta;
    for (int k = 0; k < m; ++k) probe(k) += perturb(eng);
    const Vector psi = prepare(ansatz, probe);
    const double e = psi.dot(apply_sum(h, psi)).real();
    const double d1 = e - mean;
    mean += d1 / static_cast<double>(s + 1);
    m2 += d1 * (e - mean);
  }
  const double empirical = m2 / static_cast<double>(samples - 1);

  BpVarianceResult out;
  out.lambda = lambda;
  out.eps_q = eps_q;
  out.dtheta_q = bounds.dtheta_q;
  out.var_lower = bounds.var_lower;
  out.empirical_var = empirical;
  out.deficit_sum = bounds.deficit_sum;
  out.polish_grad_norm = polish.grad_norm;
  out.pass = empirical >=
             bounds.var_lower *
                 (1.0 - 3.0 / std::sqrt(static_cast<double>(samples)));
  return out;
}

PlInvarianceResult pl_invariance_experiment(long long shots, long long trials,
                                            std::uint64_t seed,
                                            ShotModel model) {
  if (trials < 1)
    fail(errc::invalid_params, "invariance study needs at least one trial");
  ExperimentConfig reference;
  const BuildResult built = build_model(reference);
  const int m = built.ansatz.n_params();
  const PathNorms norms = path_norm_sup(built.path);
  const GapProfile profile = gap_profile(built.path);
  const TrackingConstants tc = tracking_constants(
      1.0, profile.delta_min, m, norms.h_op, norms.dh_op);

  const double coeff_sq = norms.coeff_sup * norms.coeff_sup;
  ShotBounds sb = shot_bounds(1, m, coeff_sq, tc.hessian_lip, 1.0,
                              profile.delta_min, tc.k_min, 0.05);
  const long long s = shots > 0 ? shots : sb.s_min;
  sb = shot_bounds(s, m, coeff_sq, tc.hessian_lip, 1.0, profile.delta_min,
                   tc.k_min, 0.05);

  // slice grid at the analytic width, with exact minimizers to measure
  // distances against
  std::vector<double> lambdas{0.0};
  for (long long t = 1;; ++t) {
    const double l = static_cast<double>(t) * tc.delta_lambda_a;
    if (l >= 1.0 - 1e-12) {
      lambdas.push_back(1.0);
      break;
    }
    lambdas.push_back(l);
  }
  std::vector<PauliSum> hams;
  std::vector<Eigen::VectorXd> stars;
  hams.reserve(lambdas.size());
  stars.reserve(lambdas.size());
  Eigen::VectorXd star = built.theta0;
  const double eta_ref = 1.0 / (4.0 * norms.h_op * m);
  for (double l : lambdas) {
    PauliSum h = interpolate(built.path, l);
    const PolishResult r = reference_minimizer(h, built.ansatz, star, eta_ref);
    if (!r.converged)
      fail(errc::minimizer_not_converged,
           "reference minimizer did not converge along the grid");
    star = r.theta;
    stars.push_back(star);
    hams.push_back(std::move(h));
  }

  long long successes = 0;
  double worst = 0.0;
  for (long long trial = 0; trial < trials; ++trial) {
    Eigen::VectorXd theta = built.theta0;
    bool inside = true;
    for (std::size_t t = 0; t < lambdas.size(); ++t) {
      const double entry = (theta - stars[t]).norm() / tc.r_pl;
      worst = std::max(worst, entry);
      inside = inside && entry <= 1.0;
      for (long long k = 0; k < tc.k_min; ++k) {
        ShotConfig sc{s,
                      derive_seed(seed, static_cast<std::uint64_t>(trial),
                                  t * static_cast<std::uint64_t>(tc.k_min) +
                                      static_cast<std::uint64_t>(k)),
                      model};
        const Eigen::VectorXd g =
            noisy_gradient(built.ansatz, theta, hams[t], sc, coeff_sq);
        theta -= tc.eta_pl * g;
        const double ratio = (theta - stars[t]).norm() / tc.r_pl;
        worst = std::max(worst, ratio);
        inside = inside && ratio <= 1.0;
      }
    }
    if (inside) ++successes;
  }

  PlInvarianceResult out;
  out.shots = s;
  out.s_min = sb.s_min;
  out.sigma_grad = sb.sigma_grad;
  out.r_pl = tc.r_pl;
  out.trials = trials;
  out.successes = successes;
  out.success_rate = static_cast<double>(successes) / trials;
  out.worst_ratio = worst;
  out.pass = out.success_rate >= 0.95;
  return out;
}

std::vector<SweepRow> sweep_experiment(const std::vector<double>& hf_scales) {
  if (hf_scales.empty())
    fail(errc::invalid_params, "sweep needs at least one scale");
  auto run_one = [](double scale) -> SweepRow {
    ExperimentConfig cfg;
    cfg.model.hf_scale = scale;
    const BuildResult model = build_model(cfg);
    const int m = model.ansatz.n_params();
    const PathNorms norms = path_norm_sup(model.path);
    const GapProfile profile = gap_profile(model.path);
    const TrackingConstants tc =
        tracking_constants(1.0, profile.delta_min, m, norms.h_op, norms.dh_op);
    TrackerConfig tcfg;
    tcfg.guarantee = true;
    const std::vector<SliceRecord> recs =
        track_path(model.path, model.ansatz, model.theta0, tcfg, true);

    SweepRow row;
    row.scale = scale;
    row.delta_min = profile.delta_min;
    row.realized_updates = static_cast<long long>(recs.size()) * tc.k_min;
    row.bound_raw = tc.n_updates_bound;
    row.bound_ceiled = tc.n_updates_ceiled;
    const double gd = profile.delta_min;  // gamma = 1 throughout the family
    row.c_hat = static_cast<double>(row.realized_updates) * gd * gd * gd /
                (static_cast<double>(m) * m * m * norms.h_op * norms.h_op *
                 norms.dh_op);
    return row;
  };

  std::vector<std::future<SweepRow>> futures;
  futures.reserve(hf_scales.size());
  for (double s : hf_scales)
    futures.push_back(std::async(std::launch::async, run_one, s));
  std::vector<SweepRow> rows;
  rows.reserve(hf_scales.size());
  for (auto& f : futures) rows.push_back(f.get());
  return rows;
}

// ------------------------------------------------------------
// Report rendering
// ------------------------------------------------------------

std::string track_csv(const std::vector<SliceRecord>& records, bool oracle) {
  (void)oracle;  // columns are fixed; cells stay empty without diagnostics
  std::string out =
      "t,lambda,energy,grad_norm,sigma_H,sigma_D,delta_lambda,fidelity,gap,"
      "theta_dist\n";
  for (const SliceRecord& r : records) {
    out += std::to_string(r.t);
    out += ',';
    out += num17(r.lambda);
    out += ',';
    out += num17(r.energy);
    out += ',';
    out += num17(r.grad_norm);
    out += ',';
    out += num17(r.sigma_h);
    out += ',';
    out += num17(r.sigma_d);
    out += ',';
    out += num17(r.step_taken);
    out += ',';
    if (r.oracle) {
      out += num17(r.oracle->fidelity);
      out += ',';
      out += num17(r.oracle->gap);
      out += ',';
      if (r.oracle->has_theta_star) out += num17(r.oracle->theta_dist);
    } else {
      out += ",,";
    }
    out += '\n';
  }
  return out;
}

std::string verify_csv(const AvqeRunSummary& summary) {
  std::string out =
      "t,lambda,sigma_H,sigma_D,delta_c,pass,strong,fid_lower,dlambda_V,"
      "dlambda_used,retries\n";
  for (const VerifiedSlice& vs : summary.slices) {
    out += std::to_string(vs.slice.t);
    out += ',';
    out += num17(vs.cert.lambda);
    out += ',';
    out += num17(vs.cert.sigma_h);
    out += ',';
    out += num17(vs.cert.sigma_d);
    out += ',';
    out += num17(vs.cert.delta_c);
    out += ',';
    out += vs.cert.pass ? '1' : '0';
    out += ',';
    out += vs.cert.strong ? '1' : '0';
    out += ',';
    out += num17(vs.cert.fidelity_lower_bound);
    out += ',';
    out += num17(vs.cert.dlambda_v);
    out += ',';
    out += num17(vs.dlambda_next);
    out += ',';
    out += std::to_string(vs.retries);
    out += '\n';
  }
  return out;
}

std::string oracle_csv(const GapProfile& profile) {
  std::string out = "lambda,gap\n";
  for (std::size_t i = 0; i < profile.lambdas.size(); ++i) {
    out += num17(profile.lambdas[i]);
    out += ',';
    out += num17(profile.gaps[i]);
    out += '\n';
  }
  return out;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out =
      "scale,delta_min,realized_updates,bound_raw,bound_ceiled,c_hat\n";
  for (const SweepRow& r : rows) {
    out += num17(r.scale);
    out += ',';
    out += num17(r.delta_min);
    out += ',';
    out += std::to_string(r.realized_updates);
    out += ',';
    out += num17(r.bound_raw);
    out += ',';
    out += std::to_string(r.bound_ceiled);
    out += ',';
    out += num17(r.c_hat);
    out += '\n';
  }
  return out;
}

std::string bounds_table(const TrackingConstants& c) {
  std::string out;
  auto row = [&out](const char* name, const char* expression, double value) {
    char line[176];
    std::snprintf(line, sizeof line, "%-18s %-58s %.10g\n", name, expression,
                  value);
    out += line;
  };
  row("gamma", "input", c.gamma);
  row("delta_min", "input (refined minimum spectral gap)", c.delta_min);
  row("m_params", "input", static_cast<double>(c.m_params));
  row("h_op", "input (sup operator norm along the path)", c.h_op);
  row("dh_op", "input (operator norm of the endpoint difference)", c.dh_op);
  row("smoothness_l", "4 * h_op * m", c.smoothness_l);
  row("hessian_lip", "24 * h_op * m^1.5", c.hessian_lip);
  row("r_pl", "gamma * delta_min / hessian_lip", c.r_pl);
  row("drift_d", "sqrt(m) * dh_op / (gamma * delta_min)", c.drift_d);
  row("eta_pl", "1 / smoothness_l", c.eta_pl);
  row("contraction_rho", "sqrt(1 - eta_pl * gamma * delta_min)",
      c.contraction_rho);
  row("c_nl", "12 h_op m^1.5 / gamma + 32 h_op m^2.5 / gamma^2", c.c_nl);
  row("eta_tdvp", "1 / (2 * h_op)", c.eta_tdvp);
  if (c.mode == TrackingMode::option1) {
    row("delta_lambda_a",
        "(gamma delta_min)^2 / (2 hessian_lip sqrt(m) dh_op)",
        c.delta_lambda_a);
    row("k_min", "ceil(2 ln(2) smoothness_l / (gamma delta_min))",
        static_cast<double>(c.k_min));
    row("n_updates_bound",
        "384 ln(2) m^3 h_op^2 dh_op / (gamma delta_min)^3",
        c.n_updates_bound);
  } else {
    row("delta_lambda_a",
        "(gamma delta_min)^2 / (4 smoothness_l hessian_lip drift_d)",
        c.delta_lambda_a);
    row("k_min", "single step per slice", static_cast<double>(c.k_min));
    row("n_updates_bound", "384 m^3 h_op^2 dh_op / (gamma delta_min)^3",
        c.n_updates_bound);
  }
  row("n_updates_ceiled", "k_min * (ceil(1 / delta_lambda_a) + 1)",
      static_cast<double>(c.n_updates_ceiled));
  if (!std::isnan(c.eps_target)) {
    row("eps_target", "input", c.eps_target);
    row("t_tdvp_min",
        "max(4 c_nl drift_d / delta_min^2, 2 drift_d / (eps delta_min))",
        c.t_tdvp_min);
    row("n_tdvp", "ceil(t_tdvp_min / eta_tdvp)",
        static_cast<double>(c.n_tdvp));
  }
  return out;
}

// ------------------------------------------------------------
// Command-line driver
// ------------------------------------------------------------

namespace {

struct Stopwatch {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  std::string started = Stopwatch::now_iso();

  static std::string now_iso() {
    const std::time_t tt =
        std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
  }

  double ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - t0)
        .count();
  }
};

fs::path ensure_out(const std::string& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec)
    fail(errc::config_invalid,
         "cannot create output directory '" + out + "': " + ec.message());
  return fs::path(out);
}

void write_file(const fs::path& p, const std::string& body) {
  std::ofstream f(p, std::ios::binary);
  f << body;
  f.flush();
  if (!f)
    fail(errc::config_invalid, "cannot write '" + p.string() + "'");
}

json base_summary(const char* command, const ExperimentConfig& cfg,
                  const Stopwatch& watch) {
  json j;
  j["command"] = command;
  j["seed"] = cfg.seed;
  j["model"] = {{"family", cfg.model.family}, {"n", cfg.model.n}};
  j["started_at"] = watch.started;
  j["finished_at"] = Stopwatch::now_iso();
  j["wall_ms"] = watch.ms();
  return j;
}

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

int cmd_track(const ExperimentConfig& cfg) {
  Stopwatch watch;
  const BuildResult model = build_model(cfg);
  const std::vector<SliceRecord> recs =
      track_path(model.path, model.ansatz, model.theta0, cfg.tracker,
                 cfg.oracle);
  long long updates = 0;
  for (const SliceRecord& r : recs)
    updates += static_cast<long long>(r.energy_trace.size()) - 1;

  const fs::path dir = ensure_out(cfg.out);
  write_file(dir / "track.csv", track_csv(recs, cfg.oracle));
  json j = base_summary("track", cfg, watch);
  j["slices"] = recs.size();
  j["updates"] = updates;
  j["final_lambda"] = recs.back().lambda;
  j["final_energy"] = recs.back().energy;
  j["final_sigma_h"] = recs.back().sigma_h;
  j["final_theta"] = to_std(recs.back().theta);
  if (recs.back().oracle) {
    j["final_fidelity"] = recs.back().oracle->fidelity;
    j["final_gap"] = recs.back().oracle->gap;
  }
  write_file(dir / "summary.json", j.dump(2) + "\n");

  std::printf("tracked %zu slices to lambda = %.10g (%lld updates)\n",
              recs.size(), recs.back().lambda, updates);
  std::printf("final energy %.10g, sigma_H %.4g\n", recs.back().energy,
              recs.back().sigma_h);
  if (recs.back().oracle)
    std::printf("oracle: fidelity %.10g, gap %.10g\n",
                recs.back().oracle->fidelity, recs.back().oracle->gap);
  return 0;
}

int cmd_verify(const ExperimentConfig& cfg) {
  Stopwatch watch;
  const BuildResult model = build_model(cfg);
  double delta_c = cfg.verifier.delta_c;
  if (delta_c <= 0.0) delta_c = gap_profile(model.path).delta_min;
  const AvqeRunSummary run =
      run_self_verifying(model.path, model.ansatz, model.theta0, delta_c,
                         cfg.tracker, cfg.verifier.retry_cap, cfg.oracle);

  long long retries = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  for (const VerifiedSlice& vs : run.slices) {
    retries += vs.retries;
    worst_margin =
        std::min(worst_margin, delta_c / 2.0 - vs.cert.sigma_h);
  }

  const fs::path dir = ensure_out(cfg.out);
  write_file(dir / "verify.csv", verify_csv(run));
  json j = base_summary("verify", cfg, watch);
  j["delta_c"] = delta_c;
  j["completed"] = run.completed;
  j["slices"] = run.slices.size();
  j["updates"] = run.n_updates;
  j["retries"] = retries;
  j["worst_margin"] = worst_margin;
  j["final_energy"] = run.final_energy;
  j["final_sigma_h"] = run.final_sigma;
  j["final_bound"] = run.final_bound;
  if (!run.slices.empty())
    j["final_theta"] = to_std(run.slices.back().slice.theta);
  if (run.final_oracle_fidelity)
    j["final_oracle_fidelity"] = *run.final_oracle_fidelity;
  write_file(dir / "summary.json", j.dump(2) + "\n");

  std::printf("self-verifying sweep %s: %zu slices, %lld updates, %lld "
              "retries\n",
              run.completed ? "completed" : "stopped", run.slices.size(),
              run.n_updates, retries);
  std::printf("final energy %.10g, sigma_H %.4g, fidelity bound %.10g\n",
              run.final_energy, run.final_sigma, run.final_bound);
  if (run.final_oracle_fidelity)
    std::printf("oracle fidelity %.10g\n", *run.final_oracle_fidelity);
  return 0;
}

int cmd_bounds(const ExperimentConfig& cfg) {
  Stopwatch watch;
  const BuildResult model = build_model(cfg);
  const PathNorms norms = path_norm_sup(model.path);
  const GapProfile profile = gap_profile(model.path);
  const TrackingConstants tc = tracking_constants(
      cfg.tracker.gamma, profile.delta_min, model.ansatz.n_params(),
      norms.h_op, norms.dh_op, cfg.tracker.mode, cfg.eps_target);

  std::string table = bounds_table(tc);
  json j = base_summary("bounds", cfg, watch);
  j["inputs"] = {{"gamma", tc.gamma},
                 {"delta_min", tc.delta_min},
                 {"argmin_lambda", profile.argmin_lambda},
                 {"m_params", tc.m_params},
                 {"h_op", tc.h_op},
                 {"dh_op", tc.dh_op},
                 {"coeff_sup", norms.coeff_sup},
                 {"mode", tc.mode == TrackingMode::option1 ? "option1"
                                                           : "option2"}};
  j["smoothness_l"] = tc.smoothness_l;
  j["hessian_lip"] = tc.hessian_lip;
  j["r_pl"] = tc.r_pl;
  j["drift_d"] = tc.drift_d;
  j["eta_pl"] = tc.eta_pl;
  j["contraction_rho"] = tc.contraction_rho;
  j["c_nl"] = tc.c_nl;
  j["eta_tdvp"] = tc.eta_tdvp;
  j["delta_lambda_a"] = tc.delta_lambda_a;
  j["k_min"] = tc.k_min;
  j["n_updates_bound"] = tc.n_updates_bound;
  j["n_updates_ceiled"] = tc.n_updates_ceiled;
  if (!std::isnan(cfg.eps_target)) {
    j["eps_target"] = tc.eps_target;
    j["t_tdvp_min"] = tc.t_tdvp_min;
    j["n_tdvp"] = tc.n_tdvp;
  }
  if (!std::isnan(cfg.epsilon)) {
    double delta_c = cfg.verifier.delta_c;
    if (delta_c <= 0.0) delta_c = profile.delta_min;
    const EpsilonAdjust ea = epsilon_adjust(tc, cfg.epsilon, delta_c);
    j["epsilon_adjust"] = {{"epsilon", ea.epsilon},
                           {"delta_c", ea.delta_c},
                           {"mu_eff", ea.mu_eff},
                           {"admissible", ea.admissible},
                           {"r_pl_effective", ea.effective.r_pl},
                           {"delta_lambda_a_effective",
                            ea.effective.delta_lambda_a},
                           {"k_min_effective", ea.effective.k_min}};
    char line[176];
    std::snprintf(line, sizeof line,
                  "%-18s %-58s %.10g\n", "mu_eff",
                  "gamma * (delta_min - epsilon)", ea.mu_eff);
    table += line;
    std::snprintf(line, sizeof line, "%-18s %-58s %s\n", "admissible",
                  "epsilon <= delta_c / 4", ea.admissible ? "yes" : "no");
    table += line;
  }

  const fs::path dir = ensure_out(cfg.out);
  write_file(dir / "bounds.json", j.dump(2) + "\n");
  std::fputs(table.c_str(), stdout);
  return 0;
}

int cmd_shots(const ExperimentConfig& cfg) {
  Stopwatch watch;
  const PlInvarianceResult r = pl_invariance_experiment(
      cfg.shots.shots, cfg.shots.trials, cfg.seed, cfg.shots.model);

  json j = base_summary("shots", cfg, watch);
  j["shots"] = r.shots;
  j["s_min"] = r.s_min;
  j["sigma_grad"] = r.sigma_grad;
  j["r_pl"] = r.r_pl;
  j["trials"] = r.trials;
  j["successes"] = r.successes;
  j["success_rate"] = r.success_rate;
  j["worst_ratio"] = r.worst_ratio;
  j["pass"] = r.pass;
  const fs::path dir = ensure_out(cfg.out);
  write_file(dir / "shots.json", j.dump(2) + "\n");

  std::printf("shot budget %lld (analytic floor %lld), per-step sigma "
              "%.6g\n",
              r.shots, r.s_min, r.sigma_grad);
  std::printf("trials %lld, inside the radius %lld (rate %.4g), worst "
              "distance ratio %.4g\n",
              r.trials, r.successes, r.success_rate, r.worst_ratio);
  std::printf("containment %s\n", r.pass ? "holds" : "violated");
  return 0;
}

int cmd_oracle(const ExperimentConfig& cfg) {
  Stopwatch watch;
  const BuildResult model = build_model(cfg);
  const GapProfile profile = gap_profile(model.path);
  const SpectralData end = eigensystem(interpolate(model.path, 1.0));

  const fs::path dir = ensure_out(cfg.out);
  write_file(dir / "oracle.csv", oracle_csv(profile));
  json j = base_summary("oracle", cfg, watch);
  j["delta_min"] = profile.delta_min;
  j["argmin_lambda"] = profile.argmin_lambda;
  j["final_ground_energy"] = end.eigenvalues(0);
  j["final_gap"] = end.eigenvalues(1) - end.eigenvalues(0);
  write_file(dir / "oracle.json", j.dump(2) + "\n");

  std::printf("minimum gap %.10g at lambda = %.10g\n", profile.delta_min,
              profile.argmin_lambda);
  std::printf("final ground energy %.10g, final gap %.10g\n",
              end.eigenvalues(0), end.eigenvalues(1) - end.eigenvalues(0));
  return 0;
}

int cmd_bp(const ExperimentConfig& cfg) {
  Stopwatch watch;
  const BuildResult model = build_model(cfg);
  const BpVarianceResult r =
      bp_variance_experiment(model, cfg.bp.lambda, cfg.bp.eps_q,
                             cfg.bp.samples, cfg.seed, cfg.tracker.gamma);

  json j = base_summary("bp-variance", cfg, watch);
  j["lambda"] = r.lambda;
  j["eps_q"] = r.eps_q;
  j["dtheta_q"] = r.dtheta_q;
  j["var_lower"] = r.var_lower;
  j["empirical_var"] = r.empirical_var;
  j["deficit_sum"] = r.deficit_sum;
  j["polish_grad_norm"] = r.polish_grad_norm;
  j["samples"] = cfg.bp.samples;
  j["pass"] = r.pass;
  const fs::path dir = ensure_out(cfg.out);
  write_file(dir / "bp.json", j.dump(2) + "\n");

  std::printf("perturbation scale %.6g at lambda = %.10g (deficit sum "
              "%.6g)\n",
              r.dtheta_q, r.lambda, r.deficit_sum);
  std::printf("variance floor %.6g, empirical %.6g -> floor %s\n",
              r.var_lower, r.empirical_var, r.pass ? "holds" : "violated");
  return 0;
}

int cmd_sweep(const ExperimentConfig& cfg) {
  Stopwatch watch;
  const std::vector<SweepRow> rows = sweep_experiment(cfg.sweep.hf_scales);

  // least-squares slope of log(realized updates) against log(gap)
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const SweepRow& r : rows) {
    const double x = std::log(r.delta_min);
    const double y = std::log(static_cast<double>(r.realized_updates));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(rows.size());
  const double denom = n * sxx - sx * sx;
  const double slope =
      std::abs(denom) > 1e-30 ? (n * sxy - sx * sy) / denom
                              : std::numeric_limits<double>::quiet_NaN();
  double worst_c = 0.0;
  for (const SweepRow& r : rows) worst_c = std::max(worst_c, r.c_hat);

  const fs::path dir = ensure_out(cfg.out);
  write_file(dir / "sweep.csv", sweep_csv(rows));
  json j = base_summary("sweep", cfg, watch);
  j["scales"] = cfg.sweep.hf_scales;
  j["slope"] = slope;
  j["worst_c_hat"] = worst_c;
  json jr = json::array();
  for (const SweepRow& r : rows)
    jr.push_back({{"scale", r.scale},
                  {"delta_min", r.delta_min},
                  {"realized_updates", r.realized_updates},
                  {"bound_raw", r.bound_raw},
                  {"bound_ceiled", r.bound_ceiled},
                  {"c_hat", r.c_hat}});
  j["rows"] = jr;
  write_file(dir / "sweep.json", j.dump(2) + "\n");

  for (const SweepRow& r : rows)
    std::printf("scale %-8.4g gap %-10.6g realized %-8lld bound %-10.6g "
                "c_hat %.6g\n",
                r.scale, r.delta_min, r.realized_updates,
                static_cast<double>(r.bound_ceiled), r.c_hat);
  std::printf("log-log slope %.6g, worst prefactor %.6g\n", slope, worst_c);
  return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"adiabatic variational tracking with runtime certification"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  std::string oracle_flag;
  std::string guarantee_flag;
  std::uint64_t seed_override = 0;
  app.add_option("--config", config_path, "JSON experiment description");
  CLI::Option* seed_opt =
      app.add_option("--seed", seed_override, "override the experiment seed");
  CLI::Option* out_opt =
      app.add_option("--out", out_override, "output directory");
  app.add_option("--oracle", oracle_flag,
                 "exact-diagonalization diagnostics (on|off)")
      ->check(CLI::IsMember({"on", "off"}));
  app.add_option("--guarantee", guarantee_flag,
                 "enforce the analytic hyperparameters and radius (on|off)")
      ->check(CLI::IsMember({"on", "off"}));

  const char* names[] = {"track", "verify", "bounds", "shots",
                         "oracle", "bp-variance", "sweep"};
  const char* descs[] = {
      "fixed-grid tracking sweep",
      "self-verifying sweep with certified steps",
      "print the analytic constants for the configured model",
      "finite-shot containment study on the reference path",
      "spectral-gap profile of the interpolated family",
      "variance floor at the configured interpolation point",
      "realized update counts across a shrinking-gap family"};
  for (int i = 0; i < 7; ++i) app.add_subcommand(names[i], descs[i])->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 64;
  }

  try {
    ExperimentConfig cfg =
        config_path.empty() ? ExperimentConfig{} : parse_config_file(config_path);
    if (seed_opt->count() > 0) cfg.seed = seed_override;
    if (out_opt->count() > 0) cfg.out = out_override;
    if (!oracle_flag.empty()) cfg.oracle = oracle_flag == "on";
    if (!guarantee_flag.empty()) cfg.tracker.guarantee = guarantee_flag == "on";

    if (app.got_subcommand("track")) return cmd_track(cfg);
    if (app.got_subcommand("verify")) return cmd_verify(cfg);
    if (app.got_subcommand("bounds")) return cmd_bounds(cfg);
    if (app.got_subcommand("shots")) return cmd_shots(cfg);
    if (app.got_subcommand("oracle")) return cmd_oracle(cfg);
    if (app.got_subcommand("bp-variance")) return cmd_bp(cfg);
    if (app.got_subcommand("sweep")) return cmd_sweep(cfg);
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.code()) {
      case errc::retry_exceeded:
        return 2;
      case errc::stall_detected:
        return 3;
      case errc::config_invalid:
        return 64;
      default:
        return 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace avqe
