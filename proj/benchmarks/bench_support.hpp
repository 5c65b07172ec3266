#pragma once

// Shared fixtures for the benchmark targets: a detection-ready state built
// from one random-design protocol cycle at the requested dimensions.

#include <random>

#include "metaradar/protocol.hpp"

namespace metaradar::bench {

struct Fixture {
  ExperimentConfig config;
  ProtocolSetup setup;
  PosteriorState state;
  std::vector<CycleRecord> history;
};

inline Fixture make_fixture(int ris_elements, int antennas) {
  Fixture fixture;
  fixture.config = ExperimentConfig::desk();
  fixture.config.ris_elements = ris_elements;
  fixture.config.antennas = antennas;
  fixture.setup = make_setup(fixture.config);

  std::mt19937_64 rng(2024);
  const DetectionModel& model = fixture.setup.model;
  DesignVariables design;
  design.waveform = random_waveform(
      static_cast<Eigen::Index>(model.antenna_count()) * fixture.config.waveform_len,
      fixture.config.max_power, rng);
  design.transmit_phases = random_grid_phases(ris_elements, fixture.config.phase_levels, rng);
  design.receive_phases = random_grid_phases(ris_elements, fixture.config.phase_levels, rng);

  const DesignGains gains = design_gains(model, design);
  std::vector<TargetPath> paths;
  CVec responses(static_cast<Eigen::Index>(fixture.setup.truth.targets.size()));
  for (std::size_t k = 0; k < fixture.setup.truth.targets.size(); ++k) {
    const auto& t = fixture.setup.truth.targets[k];
    paths.push_back(TargetPath{gains.transmit[t.grid_index], gains.receive[t.grid_index],
                               ShiftMatrix(t.delay, model.window)});
    responses[static_cast<Eigen::Index>(k)] = t.response;
  }
  fixture.history.push_back(CycleRecord{
      design, synthesize_received(paths, responses, gains.waveform_matrix, model.window,
                                  fixture.config.noise_variance, rng)});
  fixture.state =
      update_posterior(model, fixture.setup.hypotheses, fixture.setup.prior, fixture.history);
  return fixture;
}

}  // namespace metaradar::bench
