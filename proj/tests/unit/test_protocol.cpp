#include "metaradar/protocol.hpp"

#include <cmath>
#include <fstream>

#include "doctest.h"
#include "metaradar/rng.hpp"

using namespace metaradar;

namespace {

// Small, fast configuration used throughout; noise kept moderate so
// detection is nontrivial but cheap.
ExperimentConfig small_config() {
  ExperimentConfig config = ExperimentConfig::desk();
  config.ris_elements = 8;
  config.antennas = 2;
  config.waveform_len = 4;
  config.received_len = 6;
  config.grid_count = 4;
  config.max_targets = 2;
  config.cycles = 2;
  config.runs = 2;
  config.misdetect_runs = 1;
  config.estimate_misdetect = false;
  config.randomization_count = 30;
  config.scene = {{0, 10.0}, {1, 11.0}};
  return config;
}

}  // namespace

TEST_CASE("config profiles and validation") {
  CHECK_NOTHROW(ExperimentConfig::desk().validate());
  CHECK_NOTHROW(ExperimentConfig::full_scale().validate());
  CHECK(ExperimentConfig::full_scale().ris_elements == 64);
  CHECK(ExperimentConfig::full_scale().noise_variance == doctest::Approx(1e-5));
  // sigma/60 applies whenever no explicit threshold is pinned
  CHECK(ExperimentConfig::full_scale().resolved_threshold() ==
        doctest::Approx(std::sqrt(1e-5) / 60.0));
  CHECK(ExperimentConfig::desk().resolved_threshold() == doctest::Approx(2.5e-3));

  ExperimentConfig broken = ExperimentConfig::desk();
  broken.scene = {{9, 10.0}};
  CHECK_THROWS_AS(broken.validate(), std::invalid_argument);
  broken = ExperimentConfig::desk();
  broken.scene = {{0, 50.0}};  // outside the delay window
  CHECK_THROWS_AS(broken.validate(), std::invalid_argument);
}

TEST_CASE("config entries parse and reject unknown keys") {
  ExperimentConfig config = ExperimentConfig::desk();
  apply_config_entry(config, "ris_elements", "32");
  CHECK(config.ris_elements == 32);
  apply_config_entry(config, "noise_variance", "1e-4");
  CHECK(config.noise_variance == doctest::Approx(1e-4));
  apply_config_entry(config, "schemes", "proposed,mimo");
  CHECK(config.schemes.size() == 2);
  apply_config_entry(config, "scene", "0:10,2:12");
  REQUIRE(config.scene.size() == 2);
  CHECK(config.scene[1].first == 2);
  apply_config_entry(config, "sweep_values", "4,8,16");
  CHECK(config.sweep_values.size() == 3);

  CHECK_THROWS_AS(apply_config_entry(config, "nope", "1"), std::invalid_argument);
  CHECK_THROWS_AS(apply_config_entry(config, "runs", "many"), std::invalid_argument);
  CHECK_THROWS_AS(apply_config_entry(config, "scene", "0-10"), std::invalid_argument);
}

TEST_CASE("config files round-trip through the loader") {
  const std::string path = "test_config_roundtrip.cfg";
  {
    std::ofstream out(path);
    out << "# comment line\n"
        << "ris_elements = 4\n"
        << "cycles = 3   # trailing comment\n"
        << "scene = 1:11\n";
  }
  const ExperimentConfig config = load_config(path, ExperimentConfig::desk());
  CHECK(config.ris_elements == 4);
  CHECK(config.cycles == 3);
  REQUIRE(config.scene.size() == 1);
  CHECK(config.scene[0].first == 1);
  std::remove(path.c_str());

  CHECK_THROWS_AS(load_config("does_not_exist.cfg", ExperimentConfig::desk()),
                  std::invalid_argument);
}

TEST_CASE("setup resolves the truth hypothesis and alternative scenes") {
  const ExperimentConfig config = small_config();
  const ProtocolSetup setup = make_setup(config);
  CHECK(setup.hypotheses.size() == 15);
  CHECK(setup.truth.targets.size() == 2);
  CHECK(setup.hypotheses[setup.truth_index].grid_indices == std::vector<int>{0, 1});
  CHECK(setup.prior.sum() == doctest::Approx(1.0));

  // alternative scene for a same-direction pair keeps delays distinct
  const Hypothesis doubled{{2, 2}};
  const SceneTruth alt = scene_for_hypothesis(config, doubled);
  REQUIRE(alt.targets.size() == 2);
  CHECK(alt.targets[0].delay != alt.targets[1].delay);

  CHECK(model_for_scheme(setup, Scheme::mimo).channels.element_count() == 0);
  CHECK(model_for_scheme(setup, Scheme::proposed).channels.element_count() == 8);
}

TEST_CASE("single-cycle protocol runs and exposes the posterior trace") {
  ExperimentConfig config = small_config();
  config.cycles = 1;
  const ProtocolSetup setup = make_setup(config);
  const auto result = run_protocol(setup, config, Scheme::random_phase, setup.truth, 7);
  REQUIRE(result.cycles.size() == 1);
  CHECK(result.cycles[0].posterior.sum() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(result.cycles[0].decision_index >= 0);
}

TEST_CASE("noise-free scenes are identified by cycle two") {
  ExperimentConfig config = small_config();
  config.noise_variance = 1e-8;
  config.cycles = 2;
  const ProtocolSetup setup = make_setup(config);
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const auto result = run_protocol(setup, config, Scheme::proposed, setup.truth, seed);
    CHECK(result.cycles.back().decision_index == setup.truth_index);
    CHECK(result.cycles.back().posterior[setup.truth_index] > 0.99);
  }
}

TEST_CASE("mimo and proposed coincide when the RIS is absent") {
  ExperimentConfig config = small_config();
  config.ris_elements = 0;
  config.cycles = 2;
  const ProtocolSetup setup = make_setup(config);
  const auto a = run_protocol(setup, config, Scheme::proposed, setup.truth, 11);
  const auto b = run_protocol(setup, config, Scheme::mimo, setup.truth, 11);
  REQUIRE(a.cycles.size() == b.cycles.size());
  for (std::size_t c = 0; c < a.cycles.size(); ++c) {
    CHECK(a.cycles[c].decision_index == b.cycles[c].decision_index);
    CHECK((a.cycles[c].posterior - b.cycles[c].posterior).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("random scheme waveform has a fixed envelope and full power") {
  const ExperimentConfig config = small_config();
  const ProtocolSetup setup = make_setup(config);
  std::mt19937_64 rng(5);
  PosteriorState state;
  state.probabilities = setup.prior;
  state.estimates.resize(setup.hypotheses.size());
  const auto design = scheme_design(setup, config, Scheme::random_phase, state, rng);
  const double envelope = std::sqrt(config.max_power / design.waveform.size());
  for (Eigen::Index i = 0; i < design.waveform.size(); ++i)
    CHECK(std::abs(design.waveform[i]) == doctest::Approx(envelope).epsilon(1e-12));
  CHECK(design.waveform.squaredNorm() == doctest::Approx(config.max_power).epsilon(1e-12));
  // grid feasibility of the random phases
  for (Eigen::Index m = 0; m < design.transmit_phases.size(); ++m)
    CHECK_NOTHROW(require_on_grid(design.transmit_phases.shifts[m], config.phase_levels));
}

TEST_CASE("proposed design dominates the random design on sampled states") {
  ExperimentConfig config = small_config();
  config.ris_elements = 4;
  config.randomization_count = 30;
  config.iteration_cap = 6;
  const ProtocolSetup setup = make_setup(config);

  int wins = 0;
  const int states = 30;
  for (int i = 0; i < states; ++i) {
    // sample a posterior state from one random-design cycle
    const auto seed = derive_seed(1234, 77, i);
    ExperimentConfig one = config;
    one.cycles = 1;
    const auto first = run_protocol(setup, one, Scheme::random_phase, setup.truth, seed);

    // rebuild the state via another single-cycle run and compare designs
    std::mt19937_64 rng_a(seed + 1), rng_b(seed + 1);
    PosteriorState state;
    state.probabilities = first.cycles[0].posterior;
    // estimates must exist for design work; reuse a protocol-made state
    // by running the update here
    std::mt19937_64 rng(seed);
    std::vector<CycleRecord> history;
    {
      DesignVariables design;
      design.waveform = random_waveform(
          static_cast<Eigen::Index>(setup.model.antenna_count()) * config.waveform_len,
          config.max_power, rng);
      design.transmit_phases = random_grid_phases(4, config.phase_levels, rng);
      design.receive_phases = random_grid_phases(4, config.phase_levels, rng);
      const DesignGains gains = design_gains(setup.model, design);
      std::vector<TargetPath> paths;
      CVec responses(2);
      for (std::size_t k = 0; k < setup.truth.targets.size(); ++k) {
        const auto& t = setup.truth.targets[k];
        paths.push_back(TargetPath{gains.transmit[t.grid_index], gains.receive[t.grid_index],
                                   ShiftMatrix(t.delay, setup.model.window)});
        responses[static_cast<Eigen::Index>(k)] = t.response;
      }
      CycleRecord record;
      record.design = design;
      record.received = synthesize_received(paths, responses, gains.waveform_matrix,
                                            setup.model.window, config.noise_variance, rng);
      history.push_back(std::move(record));
    }
    const PosteriorState sampled =
        update_posterior(setup.model, setup.hypotheses, setup.prior, history);

    const auto proposed = scheme_design(setup, config, Scheme::proposed, sampled, rng_a);
    const auto random = scheme_design(setup, config, Scheme::random_phase, sampled, rng_b);
    const double value_p = total_objective(setup.model, setup.hypotheses, sampled, proposed);
    const double value_r = total_objective(setup.model, setup.hypotheses, sampled, random);
    if (value_p >= value_r) ++wins;
  }
  CHECK(wins >= static_cast<int>(0.95 * states));
}

TEST_CASE("monte carlo determinism and degenerate run counts") {
  ExperimentConfig config = small_config();
  config.runs = 1;
  config.noise_variance = 1e-9;
  const ProtocolSetup setup = make_setup(config);

  const auto metrics = monte_carlo(setup, config, Scheme::random_phase);
  for (double p : metrics.detect) CHECK((p == 0.0 || p == 1.0));

  const auto repeat = monte_carlo(setup, config, Scheme::random_phase);
  REQUIRE(metrics.detect.size() == repeat.detect.size());
  for (std::size_t c = 0; c < metrics.detect.size(); ++c) {
    CHECK(metrics.detect[c] == repeat.detect[c]);
    CHECK(metrics.detect_se[c] == repeat.detect_se[c]);
  }
}

TEST_CASE("misdetection aggregates alternative truths with prior weights") {
  ExperimentConfig config = small_config();
  config.estimate_misdetect = true;
  config.runs = 2;
  config.misdetect_runs = 1;
  config.cycles = 1;
  const ProtocolSetup setup = make_setup(config);
  const auto metrics = monte_carlo(setup, config, Scheme::random_phase);
  REQUIRE(metrics.misdetect.size() == static_cast<std::size_t>(config.cycles));
  for (double p : metrics.misdetect) {
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
  }
}

TEST_CASE("sweep produces one row per value and scheme") {
  ExperimentConfig config = small_config();
  config.cycles = 1;
  config.runs = 1;
  config.schemes = {Scheme::random_phase, Scheme::mimo};
  config.sweep_axis = "M";
  config.sweep_values = {0, 4};
  const auto rows = run_sweep(config);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].axis == "M");
  CHECK(rows[0].value == 0.0);
  CHECK(rows[2].value == 4.0);

  const std::string csv = sweep_csv(rows);
  CHECK(csv.find("axis,value,scheme,cycle") == 0);
  CHECK(csv.find("mimo") != std::string::npos);
}

TEST_CASE("csv outputs are stable and well-formed") {
  SchemeMetrics metrics;
  metrics.scheme = Scheme::proposed;
  metrics.detect = {0.5, 0.75};
  metrics.detect_se = {0.05, 0.04};
  metrics.misdetect = {0.2, 0.1};
  metrics.misdetect_se = {0.02, 0.01};
  metrics.mean_optimizer_ms = 12.5;
  const std::string csv = results_csv({metrics});
  CHECK(csv == "scheme,cycle,p_detect,p_detect_se,p_misdetect,p_misdetect_se\n"
               "proposed,1,0.5,0.05,0.2,0.02\n"
               "proposed,2,0.75,0.04,0.1,0.01\n");
  const std::string timing = timings_csv({metrics});
  CHECK(timing.find("proposed,12.5") != std::string::npos);
}
