#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "avqe/bounds.hpp"
#include "avqe/harness.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace avqe;
using testutil::thrown_code;

namespace {

const double kSqrt2 = std::sqrt(2.0);

std::string dump_terms(const PauliSum& h) {
  std::string out;
  for (const PauliTerm& t : h.terms()) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g*%s;", t.coefficient,
                  t.letters.c_str());
    out += buf;
  }
  return out;
}

TEST_SUITE("harness") {

TEST_CASE("empty config yields the documented defaults") {
  const ExperimentConfig cfg = parse_config_text("{}");
  CHECK(cfg.model.family == "single_qubit");
  CHECK(cfg.model.n == 1);
  CHECK(cfg.model.g == 1.0);
  CHECK(cfg.model.depth == 0);
  CHECK(cfg.model.terms == 8);
  CHECK(cfg.model.scale == 1.0);
  CHECK(cfg.model.model_seed == 7ull);
  CHECK(cfg.model.hf_scale == 1.0);
  CHECK(!cfg.ansatz_override);
  CHECK(!cfg.theta0_override);
  CHECK(cfg.tracker.eta == 0.0);
  CHECK(cfg.tracker.k_steps == 0);
  CHECK(cfg.tracker.delta_lambda == 0.0);
  CHECK(cfg.tracker.optimizer == Optimizer::vanilla);
  CHECK(cfg.tracker.mode == TrackingMode::option1);
  CHECK(cfg.tracker.ng_regularizer == 1e-8);
  CHECK(cfg.tracker.max_slices == 200000);
  CHECK(!cfg.tracker.guarantee);
  CHECK(cfg.tracker.gamma == 1.0);
  CHECK(cfg.verifier.delta_c == 0.0);
  CHECK(cfg.verifier.retry_cap == 100);
  CHECK(cfg.shots.shots == 0);
  CHECK(cfg.shots.model == ShotModel::gaussian_proxy);
  CHECK(cfg.shots.trials == 200);
  CHECK(cfg.bp.eps_q == 0.5);
  CHECK(cfg.bp.lambda == 0.5);
  CHECK(cfg.bp.samples == 20000);
  CHECK(cfg.sweep.hf_scales.size() == 12);
  CHECK(cfg.sweep.hf_scales.front() == 1.0);
  CHECK(cfg.sweep.hf_scales.back() == 0.08);
  CHECK(std::isnan(cfg.eps_target));
  CHECK(std::isnan(cfg.epsilon));
  CHECK(cfg.oracle);
  CHECK(cfg.seed == 1ull);
  CHECK(cfg.out == ".");
}

TEST_CASE("every config key lands in its field") {
  const ExperimentConfig cfg = parse_config_text(R"({
    "model": {"family": "tfim", "n": 3, "g": 1.5, "depth": 2, "terms": 5,
              "scale": 0.7, "model_seed": 11, "hf_scale": 0.9},
    "ansatz": {"generators": ["YII", "IYI"]},
    "theta0": [0.1, -0.2],
    "tracker": {"eta": 0.1, "k_steps": 7, "delta_lambda": 0.02,
                "optimizer": "natural_gradient", "mode": "option2",
                "ng_regularizer": 1e-6, "max_slices": 50},
    "verifier": {"delta_c": 0.5, "retry_cap": 9},
    "shots": {"shots": 500, "model": "bernoulli", "trials": 10},
    "bp": {"eps_q": 0.25, "lambda": 0.75, "samples": 5000},
    "sweep": {"hf_scales": [1.0, 0.5]},
    "eps_target": 0.01,
    "epsilon": 0.02,
    "oracle": false,
    "guarantee": true,
    "gamma": 0.9,
    "seed": 42,
    "out": "runs/demo"
  })");
  CHECK(cfg.model.family == "tfim");
  CHECK(cfg.model.n == 3);
  CHECK(cfg.model.g == 1.5);
  CHECK(cfg.model.depth == 2);
  CHECK(cfg.model.terms == 5);
  CHECK(cfg.model.scale == 0.7);
  CHECK(cfg.model.model_seed == 11ull);
  CHECK(cfg.model.hf_scale == 0.9);
  const std::vector<std::string> want_gens = {"YII", "IYI"};
  const std::vector<double> want_theta = {0.1, -0.2};
  const std::vector<double> want_scales = {1.0, 0.5};
  REQUIRE(cfg.ansatz_override);
  CHECK(*cfg.ansatz_override == want_gens);
  REQUIRE(cfg.theta0_override);
  CHECK(*cfg.theta0_override == want_theta);
  CHECK(cfg.tracker.eta == 0.1);
  CHECK(cfg.tracker.k_steps == 7);
  CHECK(cfg.tracker.delta_lambda == 0.02);
  CHECK(cfg.tracker.optimizer == Optimizer::natural_gradient);
  CHECK(cfg.tracker.mode == TrackingMode::option2);
  CHECK(cfg.tracker.ng_regularizer == 1e-6);
  CHECK(cfg.tracker.max_slices == 50);
  CHECK(cfg.tracker.guarantee);
  CHECK(cfg.tracker.gamma == 0.9);
  CHECK(cfg.verifier.delta_c == 0.5);
  CHECK(cfg.verifier.retry_cap == 9);
  CHECK(cfg.shots.shots == 500);
  CHECK(cfg.shots.model == ShotModel::bernoulli);
  CHECK(cfg.shots.trials == 10);
  CHECK(cfg.bp.eps_q == 0.25);
  CHECK(cfg.bp.lambda == 0.75);
  CHECK(cfg.bp.samples == 5000);
  CHECK(cfg.sweep.hf_scales == want_scales);
  CHECK(cfg.eps_target == 0.01);
  CHECK(cfg.epsilon == 0.02);
  CHECK(!cfg.oracle);
  CHECK(cfg.seed == 42ull);
  CHECK(cfg.out == "runs/demo");
}

TEST_CASE("malformed or out-of-domain configs are rejected") {
  const char* bad[] = {
      "not json at all",
      "[1, 2, 3]",
      R"({"modle": {}})",
      R"({"model": {"famly": "tfim"}})",
      R"({"model": {"family": "ising"}})",
      R"({"model": {"n": "two"}})",
      R"({"model": {"n": 0}})",
      R"({"model": {"g": "strong"}})",
      R"({"model": {"depth": -1}})",
      R"({"model": {"terms": 0}})",
      R"({"model": {"scale": 0.0}})",
      R"({"model": {"hf_scale": 0.0}})",
      R"({"tracker": {"optimizer": "sgd"}})",
      R"({"tracker": {"mode": "option3"}})",
      R"({"tracker": {"eta": -0.1}})",
      R"({"tracker": {"delta_lambda": 1.5}})",
      R"({"tracker": {"ng_regularizer": -1.0}})",
      R"({"tracker": {"max_slices": 0}})",
      R"({"gamma": 0.0})",
      R"({"gamma": 1.2})",
      R"({"verifier": {"delta_c": -0.5}})",
      R"({"verifier": {"retry_cap": 0}})",
      R"({"shots": {"model": "poisson"}})",
      R"({"shots": {"shots": -5}})",
      R"({"shots": {"trials": 0}})",
      R"({"bp": {"eps_q": 0.0}})",
      R"({"bp": {"eps_q": 1.5}})",
      R"({"bp": {"lambda": 1.5}})",
      R"({"bp": {"samples": 500}})",
      R"({"sweep": {"hf_scales": []}})",
      R"({"sweep": {"hf_scales": [0.5, -1.0]}})",
      R"({"sweep": {"hf_scales": "all"}})",
      R"({"eps_target": 0.0})",
      R"({"epsilon": -0.1})",
      R"({"ansatz": ["Y"]})",
      R"({"ansatz": {"gens": ["Y"]}})",
      R"({"ansatz": {"generators": []}})",
      R"({"ansatz": {"generators": ["YQ"]}})",
      R"({"ansatz": {"generators": [42]}})",
      R"({"theta0": ["x"]})",
      R"({"theta0": 3.0})",
      R"({"out": ""})",
  };
  for (const char* text : bad) {
    CAPTURE(text);
    CHECK(thrown_code([&] { parse_config_text(text); }) ==
          errc::config_invalid);
  }
  CHECK(thrown_code([] { parse_config_file("/nonexistent/avqe.json"); }) ==
        errc::config_invalid);
}

TEST_CASE("layered generator schedule") {
  const std::vector<std::string> want1 = {"Y", "Y"};
  CHECK(layered_generators(1, 3) == want1);
  const std::vector<std::string> want2 = {"YI", "IY", "YZ", "YI", "IY"};
  CHECK(layered_generators(2, 3) == want2);

  // bond layers alternate YZ and ZY orientation
  const std::vector<std::string> g3 = layered_generators(3, 5);
  REQUIRE(g3.size() == 13);
  CHECK(g3[0] == "YII");
  CHECK(g3[1] == "IYI");
  CHECK(g3[2] == "IIY");
  CHECK(g3[3] == "YZI");
  CHECK(g3[4] == "IYZ");
  CHECK(g3[8] == "ZYI");
  CHECK(g3[9] == "IZY");
  CHECK(g3[12] == "IIY");

  const std::vector<std::string> g4 = layered_generators(4, 6);
  REQUIRE(g4.size() == 21);
  CHECK(g4[4] == "YZII");
  CHECK(g4[5] == "IYZI");
  CHECK(g4[6] == "IIYZ");
  CHECK(g4[11] == "ZYII");

  CHECK(thrown_code([] { layered_generators(0, 2); }) == errc::config_invalid);
  CHECK(thrown_code([] { layered_generators(3, 0); }) == errc::config_invalid);
}

TEST_CASE("single-qubit model assembly") {
  ExperimentConfig cfg;
  const BuildResult b = build_model(cfg);
  REQUIRE(b.path.h_initial.size() == 1);
  CHECK(b.path.h_initial.terms()[0].letters == "Z");
  CHECK(b.path.h_initial.terms()[0].coefficient == 1.0);
  REQUIRE(b.path.h_final.size() == 1);
  CHECK(b.path.h_final.terms()[0].letters == "X");
  CHECK(b.path.h_final.terms()[0].coefficient == 1.0);
  CHECK(b.ansatz.n_qubits == 1);
  const std::vector<std::string> want_y = {"Y"};
  CHECK(b.ansatz.generators == want_y);
  REQUIRE(b.theta0.size() == 1);
  CHECK(b.theta0(0) == std::numbers::pi / 2.0);

  // the family pins the register to one qubit and scales only H_final
  cfg.model.n = 5;
  cfg.model.hf_scale = 0.25;
  const BuildResult s = build_model(cfg);
  CHECK(s.path.n_qubits() == 1);
  CHECK(s.path.h_final.terms()[0].coefficient == 0.25);
}

TEST_CASE("transverse-field chain assembly") {
  ExperimentConfig cfg;
  cfg.model.family = "tfim";
  cfg.model.n = 2;
  cfg.model.g = 2.0;
  const BuildResult b = build_model(cfg);
  REQUIRE(b.path.h_initial.size() == 2);
  CHECK(b.path.h_initial.terms()[0].letters == "IX");
  CHECK(b.path.h_initial.terms()[0].coefficient == -1.0);
  CHECK(b.path.h_initial.terms()[1].letters == "XI");
  CHECK(b.path.h_initial.terms()[1].coefficient == -1.0);
  REQUIRE(b.path.h_final.size() == 3);
  CHECK(b.path.h_final.terms()[0].letters == "IX");
  CHECK(b.path.h_final.terms()[0].coefficient == -2.0);
  CHECK(b.path.h_final.terms()[1].letters == "XI");
  CHECK(b.path.h_final.terms()[1].coefficient == -2.0);
  CHECK(b.path.h_final.terms()[2].letters == "ZZ");
  CHECK(b.path.h_final.terms()[2].coefficient == -1.0);

  // default depth is ceil(3n/2); quarter turns on the first Y layer
  const std::vector<std::string> want_default = {"YI", "IY", "YZ", "YI",
                                                 "IY"};
  CHECK(b.ansatz.generators == want_default);
  REQUIRE(b.theta0.size() == 5);
  CHECK(b.theta0(0) == std::numbers::pi / 4.0);
  CHECK(b.theta0(1) == std::numbers::pi / 4.0);
  CHECK(b.theta0(2) == 0.0);
  CHECK(b.theta0(3) == 0.0);
  CHECK(b.theta0(4) == 0.0);

  cfg.model.depth = 1;
  const BuildResult shallow = build_model(cfg);
  const std::vector<std::string> want_shallow = {"YI", "IY"};
  CHECK(shallow.ansatz.generators == want_shallow);
  CHECK(shallow.theta0.size() == 2);

  cfg.model.depth = 0;
  cfg.model.n = 3;
  CHECK(build_model(cfg).ansatz.n_params() == 13);

  cfg.model.n = 1;
  CHECK(thrown_code([&] { build_model(cfg); }) == errc::config_invalid);
}

TEST_CASE("random two-local model is seed-deterministic") {
  ExperimentConfig cfg;
  cfg.model.family = "random_2local";
  cfg.model.n = 3;
  cfg.model.terms = 6;
  cfg.model.scale = 0.5;
  cfg.model.model_seed = 99;
  const BuildResult a = build_model(cfg);
  const BuildResult b = build_model(cfg);
  CHECK(dump_terms(a.path.h_final) == dump_terms(b.path.h_final));
  CHECK(a.path.h_initial.size() == 3);
  for (const PauliTerm& t : a.path.h_initial.terms())
    CHECK(t.coefficient == -1.0);
  for (const PauliTerm& t : a.path.h_final.terms()) {
    REQUIRE(t.letters.size() == 3);
    int weight = 0;
    for (char c : t.letters)
      if (c != 'I') ++weight;
    CHECK(weight >= 1);
    CHECK(weight <= 2);
  }
  CHECK(a.ansatz.n_params() == 13);
  CHECK(a.theta0(0) == std::numbers::pi / 4.0);

  cfg.model.model_seed = 100;
  const BuildResult c = build_model(cfg);
  CHECK(dump_terms(a.path.h_final) != dump_terms(c.path.h_final));

  cfg.model.n = 1;
  CHECK(thrown_code([&] { build_model(cfg); }) == errc::config_invalid);
}

TEST_CASE("ansatz and theta0 overrides") {
  ExperimentConfig cfg;
  cfg.ansatz_override = std::vector<std::string>{"X"};
  cfg.theta0_override = std::vector<double>{0.7};
  const BuildResult b = build_model(cfg);
  const std::vector<std::string> want_x = {"X"};
  CHECK(b.ansatz.generators == want_x);
  CHECK(b.theta0(0) == 0.7);

  // a custom ansatz suppresses the default initial angles
  cfg.theta0_override.reset();
  cfg.ansatz_override = std::vector<std::string>{"X", "Z"};
  const BuildResult zeros = build_model(cfg);
  REQUIRE(zeros.theta0.size() == 2);
  CHECK(zeros.theta0(0) == 0.0);
  CHECK(zeros.theta0(1) == 0.0);

  cfg.ansatz_override = std::vector<std::string>{"YY"};
  CHECK(thrown_code([&] { build_model(cfg); }) == errc::config_invalid);

  cfg.ansatz_override.reset();
  cfg.theta0_override = std::vector<double>{0.1, 0.2};
  CHECK(thrown_code([&] { build_model(cfg); }) == errc::config_invalid);

  cfg.theta0_override.reset();
  cfg.model.family = "heisenberg";
  CHECK(thrown_code([&] { build_model(cfg); }) == errc::config_invalid);
}

TEST_CASE("variance floor experiment on the reference qubit") {
  const BuildResult model = build_model(ExperimentConfig{});
  const BpVarianceResult r = bp_variance_experiment(model, 0.5, 0.5, 2000, 3,
                                                    1.0);
  CHECK(r.lambda == 0.5);
  CHECK(r.eps_q == 0.5);
  CHECK(r.dtheta_q == doctest::Approx(kSqrt2 / 24.0).epsilon(1e-9));
  CHECK(r.var_lower == doctest::Approx(0.5 / 20736.0).epsilon(1e-6));
  CHECK(r.deficit_sum == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.polish_grad_norm <= 1e-8);
  // quadratic response to the N(0, dtheta_q) perturbation: the energy
  // rise is -sqrt(.5) cos(2 delta), so the variance sits near 4 s^4
  CHECK(r.empirical_var > 2.5e-5);
  CHECK(r.empirical_var < 8e-5);
  CHECK(r.empirical_var >= r.var_lower);
  CHECK(r.pass);

  CHECK(thrown_code([&] {
          bp_variance_experiment(model, 0.5, 0.5, 500, 3, 1.0);
        }) == errc::invalid_params);
}

TEST_CASE("variance floor experiment survives a mid-path chain") {
  ExperimentConfig cfg;
  cfg.model.family = "tfim";
  cfg.model.n = 2;
  const BuildResult model = build_model(cfg);
  const BpVarianceResult r = bp_variance_experiment(model, 0.25, 0.5, 2000,
                                                    11, 1.0);
  CHECK(r.polish_grad_norm <= 1e-8);
  CHECK(r.var_lower > 0.0);
  CHECK(r.deficit_sum > 0.0);
  CHECK(r.empirical_var >= r.var_lower);
  CHECK(r.pass);
}

TEST_CASE("finite-shot containment on the reference path") {
  const PlInvarianceResult r = pl_invariance_experiment(0, 20, 2026);
  CHECK(r.s_min == 18069);
  CHECK(r.shots == 18069);
  CHECK(r.sigma_grad == doctest::Approx(std::sqrt(2.0 / 18069.0))
                            .epsilon(1e-12));
  CHECK(r.r_pl == doctest::Approx(kSqrt2 / 24.0).epsilon(1e-9));
  CHECK(r.trials == 20);
  CHECK(r.successes == 20);
  CHECK(r.success_rate == 1.0);
  CHECK(r.worst_ratio > 0.0);
  CHECK(r.worst_ratio < 1.0);
  CHECK(r.pass);

  const PlInvarianceResult bern =
      pl_invariance_experiment(40000, 5, 7, ShotModel::bernoulli);
  CHECK(bern.shots == 40000);
  CHECK(bern.s_min == 18069);
  CHECK(bern.trials == 5);
  CHECK(bern.pass);

  CHECK(thrown_code([] { pl_invariance_experiment(0, 0, 1); }) ==
        errc::invalid_params);
}

TEST_CASE("update-count sweep stays within the cubic-law budget") {
  const std::vector<SweepRow> rows = sweep_experiment({1.0, 0.5});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].scale == 1.0);
  CHECK(rows[1].scale == 0.5);

  CHECK(rows[0].delta_min == doctest::Approx(kSqrt2).epsilon(1e-9));
  CHECK(rows[0].realized_updates == 140);
  CHECK(rows[0].bound_ceiled == 140);
  CHECK(rows[0].bound_raw == doctest::Approx(192.0 * std::log(2.0))
                                 .epsilon(1e-9));
  CHECK(rows[0].c_hat == doctest::Approx(280.0).epsilon(1e-6));

  // gap minimum moves to lambda = 0.8 and shrinks to 2 sqrt(0.2)
  CHECK(rows[1].delta_min == doctest::Approx(2.0 * std::sqrt(0.2))
                                 .epsilon(1e-6));
  CHECK(rows[1].realized_updates == 483);
  CHECK(rows[1].bound_ceiled == 483);
  CHECK(rows[1].c_hat == doctest::Approx(309.12).epsilon(1e-6));

  for (const SweepRow& r : rows) CHECK(r.c_hat <= 384.0);

  CHECK(thrown_code([] { sweep_experiment({}); }) == errc::invalid_params);
}

TEST_CASE("tracking report renders fixed columns") {
  SliceRecord plain;
  plain.t = 2;
  plain.lambda = 0.1;
  plain.energy = -0.5;
  plain.grad_norm = 0.25;
  plain.sigma_h = 0.5;
  plain.sigma_d = 1.0;
  plain.step_taken = 0.05;
  CHECK(track_csv({plain}, false) ==
        "t,lambda,energy,grad_norm,sigma_H,sigma_D,delta_lambda,fidelity,gap,"
        "theta_dist\n"
        "2,0.10000000000000001,-0.5,0.25,0.5,1,0.050000000000000003,,,\n");

  SliceRecord diag;
  diag.t = 3;
  diag.lambda = 0.25;
  diag.energy = -1.0;
  diag.grad_norm = 0.0;
  diag.sigma_h = 0.5;
  diag.sigma_d = 2.0;
  diag.step_taken = 0.02;
  diag.oracle = OracleDiag{};
  diag.oracle->fidelity = 1.0;
  diag.oracle->gap = 1.5;
  diag.oracle->has_theta_star = true;
  diag.oracle->theta_dist = 0.01;

  SliceRecord nostar = diag;
  nostar.t = 4;
  nostar.oracle->fidelity = 0.875;
  nostar.oracle->gap = 2.0;
  nostar.oracle->has_theta_star = false;

  CHECK(track_csv({diag, nostar}, true) ==
        "t,lambda,energy,grad_norm,sigma_H,sigma_D,delta_lambda,fidelity,gap,"
        "theta_dist\n"
        "3,0.25,-1,0,0.5,2,0.02,1,1.5,0.01\n"
        "4,0.25,-1,0,0.5,2,0.02,0.875,2,\n");
}

TEST_CASE("certification report renders pass flags and special values") {
  AvqeRunSummary run;

  VerifiedSlice ok;
  ok.slice.t = 0;
  ok.cert.lambda = 0.0;
  ok.cert.sigma_h = 0.25;
  ok.cert.sigma_d = 1.0;
  ok.cert.delta_c = 1.5;
  ok.cert.pass = true;
  ok.cert.strong = true;
  ok.cert.fidelity_lower_bound = 0.875;
  ok.cert.dlambda_v = 0.5;
  ok.dlambda_next = 0.25;
  ok.retries = 1;

  VerifiedSlice failed;
  failed.slice.t = 1;
  failed.cert.lambda = 0.5;
  failed.cert.sigma_h = 1.0;
  failed.cert.sigma_d = 0.0;
  failed.cert.delta_c = 1.5;
  failed.cert.pass = false;
  failed.cert.strong = false;
  failed.cert.fidelity_lower_bound = 0.0;
  failed.cert.dlambda_v = std::numeric_limits<double>::quiet_NaN();
  failed.dlambda_next = 0.0;
  failed.retries = 3;

  VerifiedSlice frozen;
  frozen.slice.t = 2;
  frozen.cert.lambda = 1.0;
  frozen.cert.sigma_h = 0.5;
  frozen.cert.sigma_d = 0.0;
  frozen.cert.delta_c = 1.5;
  frozen.cert.pass = true;
  frozen.cert.strong = false;
  frozen.cert.fidelity_lower_bound = 0.75;
  frozen.cert.dlambda_v = std::numeric_limits<double>::infinity();
  frozen.dlambda_next = 0.0;
  frozen.retries = 0;

  run.slices = {ok, failed, frozen};
  CHECK(verify_csv(run) ==
        "t,lambda,sigma_H,sigma_D,delta_c,pass,strong,fid_lower,dlambda_V,"
        "dlambda_used,retries\n"
        "0,0,0.25,1,1.5,1,1,0.875,0.5,0.25,1\n"
        "1,0.5,1,0,1.5,0,0,0,nan,0,3\n"
        "2,1,0.5,0,1.5,1,0,0.75,inf,0,0\n");
}

TEST_CASE("gap and sweep reports render verbatim") {
  GapProfile profile;
  profile.lambdas = {0.0, 0.5};
  profile.gaps = {2.0, 1.5};
  CHECK(oracle_csv(profile) == "lambda,gap\n0,2\n0.5,1.5\n");

  SweepRow row;
  row.scale = 0.5;
  row.delta_min = 0.875;
  row.realized_updates = 12;
  row.bound_raw = 10.5;
  row.bound_ceiled = 14;
  row.c_hat = 3.25;
  CHECK(sweep_csv({row}) ==
        "scale,delta_min,realized_updates,bound_raw,bound_ceiled,c_hat\n"
        "0.5,0.875,12,10.5,14,3.25\n");
}

TEST_CASE("constants table lists every derived quantity") {
  const TrackingConstants c =
      tracking_constants(1.0, kSqrt2, 1, 1.0, kSqrt2, TrackingMode::option1);
  const std::string table = bounds_table(c);
  CHECK(std::count(table.begin(), table.end(), '\n') == 17);
  CHECK(table.find("smoothness_l") != std::string::npos);
  CHECK(table.find("4 * h_op * m") != std::string::npos);
  CHECK(table.find("gamma * delta_min / hessian_lip") != std::string::npos);
  CHECK(table.find("0.0589255651") != std::string::npos);   // r_pl
  CHECK(table.find("0.02946278255") != std::string::npos);  // delta_lambda_a
  CHECK(table.find("0.8040190355") != std::string::npos);   // contraction_rho
  CHECK(table.find("ceil(2 ln(2) smoothness_l / (gamma delta_min))") !=
        std::string::npos);
  CHECK(table.find("k_min * (ceil(1 / delta_lambda_a) + 1)") !=
        std::string::npos);
  CHECK(table.find("140") != std::string::npos);  // n_updates_ceiled

  const TrackingConstants c2 =
      tracking_constants(1.0, kSqrt2, 1, 1.0, kSqrt2, TrackingMode::option2);
  const std::string table2 = bounds_table(c2);
  CHECK(table2.find("single step per slice") != std::string::npos);
  CHECK(table2.find("(gamma delta_min)^2 / (4 smoothness_l hessian_lip "
                    "drift_d)") != std::string::npos);
  CHECK(table2.find("0.005208333333") != std::string::npos);  // 1/192

  const TrackingConstants ct = tracking_constants(
      1.0, kSqrt2, 1, 1.0, kSqrt2, TrackingMode::option1, 0.01);
  const std::string tdvp = bounds_table(ct);
  CHECK(std::count(tdvp.begin(), tdvp.end(), '\n') == 20);
  CHECK(tdvp.find("eps_target") != std::string::npos);
  CHECK(tdvp.find("t_tdvp_min") != std::string::npos);
  CHECK(tdvp.find("141.4213562") != std::string::npos);
  CHECK(tdvp.find("n_tdvp") != std::string::npos);
  CHECK(tdvp.find("283") != std::string::npos);
}

}  // TEST_SUITE

}  // namespace
