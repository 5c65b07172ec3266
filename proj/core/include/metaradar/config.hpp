#pragma once

// Experiment configuration: a desk profile (small dimensions, cheap to
// Monte Carlo on one core) and a full-scale profile, overridable from a
// flat key=value config file.

#include <cstdint>
#include <string>
#include <vector>

#include "metaradar/types.hpp"

namespace metaradar {

enum class Scheme { proposed, random_phase, mimo };

std::string to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);

struct ExperimentConfig {
  // geometry
  int ris_elements = 16;
  int antennas = 2;
  int phase_levels = 8;          // N_s
  double wavelength = 1.0;
  double amplitude_gain = 1.0;   // eta
  double antenna_gain = 1.0;     // G^A
  double ris_element_gain = 0.0; // G^R; 0 derives 4*pi*S^e/lambda^2
  double array_offset = 3.0;     // array center along boresight, meters
  double antenna_spacing = 0.5;  // d^s
  double array_lateral_x = 0.0;  // l^x_a
  double array_lateral_y = 0.0;  // l^y_a

  // snapshots and angular grid
  int waveform_len = 6;    // L
  int received_len = 9;    // L_R
  int min_delay = 10;      // L^m
  int grid_count = 4;      // I
  int max_targets = 2;     // K_M
  double grid_theta = kPi / 6.0;

  // power, noise, detection
  double max_power = 12.0;          // P_M
  double noise_variance = 4e-4;     // sigma^2
  double response_amplitude = 0.01; // |gamma|, linear
  double threshold = 0.0;           // omega; 0 derives sigma/60
  double wave_speed = 2.0;          // v^l, range cells per snapshot

  // optimizer
  double epsilon = 0.0;             // 0 derives 1e-3 * P_M / sigma^2
  int iteration_cap = 50;
  int randomization_count = 100;    // R
  double sdp_accuracy = 1e-7;       // alpha

  // experiment controls
  int cycles = 6;           // C
  int runs = 200;
  int misdetect_runs = 100; // per alternative truth
  bool estimate_misdetect = true;
  std::uint64_t seed = 1;
  std::vector<Scheme> schemes = {Scheme::proposed, Scheme::random_phase, Scheme::mimo};
  std::vector<std::pair<int, double>> scene = {{0, 10.0}, {1, 13.0}};  // (grid, range)

  // optional sweep
  std::string sweep_axis;             // P_M | N | M | N_s | l_z | l_x
  std::vector<double> sweep_values;

  static ExperimentConfig desk();
  static ExperimentConfig full_scale();

  double resolved_threshold() const;
  double resolved_epsilon() const;
  double resolved_ris_element_gain() const;
  double element_spacing() const { return wavelength / 2.0; }
  double element_area() const { return element_spacing() * element_spacing(); }

  void validate() const;  // throws std::invalid_argument with the offending key
};

/// Applies `key = value` lines from a config file on top of `base`.
/// Unknown keys and malformed values are reported by name.
ExperimentConfig load_config(const std::string& path, ExperimentConfig base);

/// One `key = value` override; shared by the file loader and tests.
void apply_config_entry(ExperimentConfig& config, const std::string& key,
                        const std::string& value);

/// Sweep-axis override used by the sweep runner.
void apply_sweep_value(ExperimentConfig& config, const std::string& axis, double value);

/// Resolved-configuration echo written next to result files.
std::string config_manifest(const ExperimentConfig& config);

}  // namespace metaradar
