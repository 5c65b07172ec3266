#include "metaradar/analysis.hpp"

#include <cmath>

#include "doctest.h"
#include "metaradar/hypotheses.hpp"
#include "metaradar/objective.hpp"
#include "metaradar/rng.hpp"
#include "metaradar/wpso.hpp"
#include "oracles.hpp"

using namespace metaradar;

TEST_CASE("closed-form MIMO distance with the full-scale parameters") {
  CHECK(mimo_pair_distance(4, 1.0, 1.0, 0.01, 12.0, 1e-5) == doctest::Approx(1920.0));
}

TEST_CASE("metaradar distance reduces to the MIMO value without an RIS") {
  // M = 0: one-way gains are ||xi||^2 = N G^A G^A_P on both sides
  const double gain = 4.0;  // N = 4, isotropic
  CHECK(metaradar_pair_distance(gain, gain, 0.01, 12.0, 1e-5) ==
        doctest::Approx(mimo_pair_distance(4, 1.0, 1.0, 0.01, 12.0, 1e-5)));
}

TEST_CASE("metaradar closed form equals the objective module distance under the optimal waveform") {
  // K = 1, I = 1: distance(U_1, U_0) with the rank-one optimal waveform is
  // |gamma|^2 P_M / sigma^2 times both one-way power gains.
  RadarGeometry geom = RadarGeometry::planar(4, 2, 1.0, 3.0, 0.5);
  const Direction target{kPi / 6.0, kPi / 4.0};
  const std::vector<Direction> dirs = {target};

  DetectionModel model;
  model.channels = make_channel_set(geom, dirs);
  model.window = DelayWindow{4, 6, 10};
  model.noise_variance = 1e-5;
  model.amplitude_gain = 1.0;
  model.phase_level_count = 8;
  model.waveform_len = 4;

  std::mt19937_64 rng(3);
  const auto hyps = enumerate_hypotheses(1, 1);
  PosteriorState state;
  state.probabilities = RVec::Constant(2, 0.5);
  state.estimates.resize(2);
  state.estimates[1].feasible = true;
  state.estimates[1].delays = {11};
  state.estimates[1].responses = CVec::Constant(1, cdouble(0.01, 0.0));

  DesignVariables design;
  design.transmit_phases = random_grid_phases(4, 8, rng);
  design.receive_phases = random_grid_phases(4, 8, rng);
  const std::vector<WeightedPair> pairs = {{0, 1, 1.0}};
  const CMat z = waveform_quadratic_form(model, hyps, state.estimates, pairs,
                                         design.transmit_phases, design.receive_phases);
  design.waveform = optimize_waveform(z, 12.0).waveform;

  const double direct = predicted_distance(model, design, hyps[1], state.estimates[1], hyps[0],
                                           state.estimates[0]);
  const CVec r_t = reflection_coefficients(design.transmit_phases, 1.0, 8);
  const CVec r_r = reflection_coefficients(design.receive_phases, 1.0, 8);
  const double closed = metaradar_pair_distance(
      model.channels.effective_gain(0, r_r).squaredNorm(),
      model.channels.effective_gain(0, r_t).squaredNorm(), 0.01, 12.0, 1e-5);
  CHECK(direct == doctest::Approx(closed).epsilon(1e-10));
}

TEST_CASE("optimal continuous phases attain the aligned power gain") {
  const Direction target{kPi / 6.0, kPi / 4.0};

  SUBCASE("no elements gives the bare antenna gain") {
    RadarGeometry geom = RadarGeometry::planar(0, 1, 1.0, 3.0, 0.5);
    const auto opt = optimal_phases_and_max_gain(geom, target);
    CHECK(opt.power_gain == doctest::Approx(1.0));
  }

  SUBCASE("requires a single antenna") {
    RadarGeometry geom = RadarGeometry::planar(2, 2, 1.0, 3.0, 0.5);
    CHECK_THROWS_AS(optimal_phases_and_max_gain(geom, target), std::invalid_argument);
  }

  SUBCASE("the gain at the optimal phases matches the closed form") {
    for (int elements : {1, 2}) {
      RadarGeometry geom = RadarGeometry::planar(elements, 1, 1.0, 3.0, 0.5);
      const auto opt = optimal_phases_and_max_gain(geom, target);
      const double achieved = channel_power_gain(geom, target, opt.shifts);
      CHECK(achieved * achieved == doctest::Approx(opt.power_gain).epsilon(1e-10));
    }
  }

  SUBCASE("a coarse continuous sweep never exceeds the bound and reaches it at s*") {
    for (int elements : {1, 2}) {
      RadarGeometry geom = RadarGeometry::planar(elements, 1, 1.0, 3.0, 0.5);
      const auto opt = optimal_phases_and_max_gain(geom, target);
      const double one_way_at_opt = channel_power_gain(geom, target, opt.shifts);
      const double swept = oracles::swept_one_way_gain(geom, target, 72);  // 5 degree steps
      CHECK(swept <= one_way_at_opt * (1.0 + 1e-9));
      CHECK(swept >= one_way_at_opt * 0.995);  // within sweep resolution
    }
  }

  SUBCASE("appending an edge element never lowers the maximum gain") {
    RadarGeometry geom = RadarGeometry::planar(1, 1, 1.0, 3.0, 0.5);
    geom.ris_element_positions = {Vec3::Zero()};
    double previous = optimal_phases_and_max_gain(geom, target).power_gain;
    for (int m = 1; m <= 6; ++m) {
      geom.ris_element_positions.push_back(Vec3(0.5 * m, 0.0, 0.0));
      const double current = optimal_phases_and_max_gain(geom, target).power_gain;
      CHECK(current >= previous);
      previous = current;
    }
  }
}

TEST_CASE("placement profile basics") {
  SUBCASE("a dead RIS leaves unit gain everywhere") {
    PlacementScenario scenario{4, 0.5, 0.0};
    CHECK(power_gain_profile(scenario, 0.3, 2.0) == doctest::Approx(1.0));
    CHECK(power_gain_profile(scenario, -1.0, 0.7) == doctest::Approx(1.0));
  }
  SUBCASE("nonpositive height is rejected") {
    PlacementScenario scenario{4, 0.5, 0.1};
    CHECK_THROWS_AS(power_gain_profile(scenario, 0.0, 0.0), std::domain_error);
  }
}

TEST_CASE("near-axis placement dominates integer-spacing displacements") {
  // Prop-5 style inequality, exact, over a grid of configurations.
  for (int elements = 1; elements <= 8; ++elements) {
    PlacementScenario scenario{elements, 0.5, 0.2};
    for (int n : {-3, -2, -1, 1, 2, 3}) {
      for (int i = 0; i <= 10; ++i) {
        const double l_prime = -0.25 + 0.05 * i;  // [-l^e/2, l^e/2]
        const double near = power_gain_profile(scenario, l_prime, 1.5);
        const double far = power_gain_profile(scenario, n * 0.5 + l_prime, 1.5);
        CHECK(near >= far);
      }
    }
  }
}

TEST_CASE("height profile has an interior maximum, recorded") {
  PlacementScenario scenario{4, 0.5, 0.2};
  double best_height = 0.0, best_gain = 0.0;
  double first = 0.0, last = 0.0;
  for (int i = 1; i <= 60; ++i) {
    const double height = 0.1 * i;
    const double gain = power_gain_profile(scenario, 0.0, height);
    if (i == 1) first = gain;
    last = gain;
    if (gain > best_gain) {
      best_gain = gain;
      best_height = height;
    }
  }
  CHECK(best_gain > first);
  CHECK(best_gain > last);
  MESSAGE("placement profile peaks at l_z = ", best_height, " with gain ", best_gain);
}

TEST_CASE("discrete quantization of the optimal phases improves with the level count") {
  const Direction target{kPi / 6.0, kPi / 4.0};
  RadarGeometry geom = RadarGeometry::planar(2, 1, 1.0, 3.0, 0.5);
  const auto opt = optimal_phases_and_max_gain(geom, target);
  double previous = 0.0;
  for (int levels : {2, 4, 8, 16}) {
    RVec quantized(opt.shifts.size());
    for (Eigen::Index m = 0; m < opt.shifts.size(); ++m)
      quantized[m] = quantize_shift(opt.shifts[m], levels);
    const double gain = channel_power_gain(geom, target, quantized);
    CHECK(gain >= previous - 1e-12);
    previous = gain;
  }
  CHECK(previous * previous <= opt.power_gain * (1.0 + 1e-9));
}
