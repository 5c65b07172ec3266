#pragma once

// Closed-form performance analysis: pairwise predicted distances of the
// RIS-aided radar versus a plain MIMO radar under the optimal waveform,
// the continuous-phase optimum and maximum two-way power gain for a
// single-antenna radar, and the 2D antenna-placement power-gain profile.

#include "metaradar/geometry.hpp"
#include "metaradar/types.hpp"

namespace metaradar {

/// Optimal-waveform distance between "one target" and "no target" for a
/// plain MIMO radar: (N |gamma| G^A G^A_P)^2 P_M / sigma^2.
double mimo_pair_distance(int antenna_count, double antenna_gain, double target_pattern,
                          double response_amplitude, double max_power, double noise_variance);

/// Same distance for the RIS-aided radar given the two one-way power
/// gains ||b(s^r)+xi||^2 and ||b(s^t)+xi||^2.
double metaradar_pair_distance(double receive_power_gain, double transmit_power_gain,
                               double response_amplitude, double max_power,
                               double noise_variance);

/// rho = eta sqrt(G^R S^e G^R_P(target)) / sqrt(4 pi).
double rho_factor(double amplitude_gain, double ris_element_gain, double element_area,
                  double target_pattern);

struct OptimalPhases {
  RVec shifts;             // continuous optimal phase shifts, per element
  double power_gain = 0.0; // two-way maximum B
};

/// Continuous-phase optimum for a single-antenna radar: every reflected
/// path is phase-aligned with the direct path, giving the modulus-sum
/// power gain. Requires N = 1.
OptimalPhases optimal_phases_and_max_gain(const RadarGeometry& geom, const Direction& target);

/// One-way channel power ||b(s)+xi||^2 toward the target for arbitrary
/// phase shifts; the sweep target of the optimality checks.
double channel_power_gain(const RadarGeometry& geom, const Direction& target, const RVec& shifts);

struct PlacementScenario {
  int element_count = 4;        // M, elements on a line along x
  double element_spacing = 0.5; // l^e
  double rho = 0.1;             // composite RIS amplitude factor
};

/// 2D top-view power gain B(l^x_a, l^z_a) with an isotropic antenna; the
/// element line is centered at the origin. Throws std::domain_error for
/// nonpositive antenna height.
double power_gain_profile(const PlacementScenario& scenario, double antenna_x, double antenna_z);

}  // namespace metaradar
