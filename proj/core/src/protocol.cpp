#include "metaradar/protocol.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace metaradar {

namespace {

std::vector<Direction> grid_directions(const ExperimentConfig& config) {
  // Centers of I uniform azimuth sectors at fixed polar angle.
  std::vector<Direction> grid;
  grid.reserve(config.grid_count);
  for (int i = 0; i < config.grid_count; ++i)
    grid.push_back({config.grid_theta, (2.0 * i + 1.0) * kPi / config.grid_count});
  return grid;
}

DetectionModel build_model(const ExperimentConfig& config, int ris_elements,
                           std::span<const Direction> grid) {
  RadarGeometry geom = RadarGeometry::planar(ris_elements, config.antennas, config.wavelength,
                                             config.array_offset, config.antenna_spacing,
                                             config.array_lateral_x, config.array_lateral_y);
  geom.antenna_gain = config.antenna_gain;
  geom.ris_element_gain = config.resolved_ris_element_gain();
  geom.amplitude_gain = config.amplitude_gain;
  geom.phase_level_count = config.phase_levels;
  geom.validate();

  DetectionModel model;
  model.channels = make_channel_set(geom, grid);
  model.window = DelayWindow{config.waveform_len, config.received_len, config.min_delay};
  model.noise_variance = config.noise_variance;
  model.amplitude_gain = config.amplitude_gain;
  model.phase_level_count = config.phase_levels;
  model.waveform_len = config.waveform_len;
  return model;
}

int delay_of_range(const ExperimentConfig& config, double range) {
  return static_cast<int>(std::lround(2.0 * range / config.wave_speed));
}

int find_hypothesis(const std::vector<Hypothesis>& hypotheses, std::vector<int> grids) {
  std::sort(grids.begin(), grids.end());
  for (std::size_t j = 0; j < hypotheses.size(); ++j)
    if (hypotheses[j].grid_indices == grids) return static_cast<int>(j);
  throw std::invalid_argument("protocol: scene does not match any hypothesis");
}

}  // namespace

ProtocolSetup make_setup(const ExperimentConfig& config) {
  config.validate();
  ProtocolSetup setup;
  setup.grid = grid_directions(config);
  setup.geometry = RadarGeometry::planar(config.ris_elements, config.antennas, config.wavelength,
                                         config.array_offset, config.antenna_spacing,
                                         config.array_lateral_x, config.array_lateral_y);
  setup.model = build_model(config, config.ris_elements, setup.grid);
  setup.mimo_model = build_model(config, 0, setup.grid);
  setup.hypotheses = enumerate_hypotheses(config.grid_count, config.max_targets);
  setup.prior = initial_prior(setup.hypotheses, config.max_targets);

  std::vector<int> truth_grids;
  for (const auto& [grid, range] : config.scene) {
    setup.truth.targets.push_back({grid, delay_of_range(config, range), config.response_amplitude});
    truth_grids.push_back(grid);
  }
  setup.truth_index = find_hypothesis(setup.hypotheses, truth_grids);
  return setup;
}

SceneTruth scene_for_hypothesis(const ExperimentConfig& config, const Hypothesis& hypothesis) {
  // Default delay profile: ends of the window first, then interior slots,
  // so same-direction targets stay separable.
  const int max_offset = config.received_len - config.waveform_len;
  std::vector<int> offsets;
  int low = 0, high = max_offset;
  while (low <= high) {
    offsets.push_back(low++);
    if (low > high) break;
    offsets.push_back(high--);
  }
  SceneTruth truth;
  for (std::size_t k = 0; k < hypothesis.grid_indices.size(); ++k) {
    if (k >= offsets.size())
      throw std::invalid_argument("protocol: more targets than delay slots in alternative scene");
    truth.targets.push_back({hypothesis.grid_indices[k], config.min_delay + offsets[k],
                             config.response_amplitude});
  }
  return truth;
}

const DetectionModel& model_for_scheme(const ProtocolSetup& setup, Scheme scheme) {
  return scheme == Scheme::mimo ? setup.mimo_model : setup.model;
}

DesignVariables scheme_design(const ProtocolSetup& setup, const ExperimentConfig& config,
                              Scheme scheme, const PosteriorState& state, std::mt19937_64& rng) {
  const DetectionModel& model = model_for_scheme(setup, scheme);
  const int elements = model.channels.element_count();
  const Eigen::Index w_size =
      static_cast<Eigen::Index>(model.antenna_count()) * config.waveform_len;

  if (scheme == Scheme::random_phase) {
    // Fixed envelope, random phases.
    DesignVariables design;
    design.waveform.resize(w_size);
    const double envelope = std::sqrt(config.max_power / static_cast<double>(w_size));
    for (Eigen::Index i = 0; i < w_size; ++i)
      design.waveform[i] = envelope * std::exp(kImag * uniform_angle(rng));
    design.transmit_phases = random_grid_phases(elements, config.phase_levels, rng);
    design.receive_phases = random_grid_phases(elements, config.phase_levels, rng);
    return design;
  }

  // proposed, and mimo as its RIS-free special case (the phase steps
  // vanish at M = 0, leaving waveform-only optimization).
  DesignVariables initial;
  initial.waveform = random_waveform(w_size, config.max_power, rng);
  initial.transmit_phases = random_grid_phases(elements, config.phase_levels, rng);
  initial.receive_phases = random_grid_phases(elements, config.phase_levels, rng);

  WpsoOptions options;
  options.max_power = config.max_power;
  options.epsilon = config.resolved_epsilon();
  options.iteration_cap = config.iteration_cap;
  options.randomization_count = config.randomization_count;
  options.sdp_accuracy = config.sdp_accuracy;
  return run_wpso(model, setup.hypotheses, state, initial, options, rng).design;
}

ProtocolResult run_protocol(const ProtocolSetup& setup, const ExperimentConfig& config,
                            Scheme scheme, const SceneTruth& truth, std::uint64_t seed) {
  const DetectionModel& model = model_for_scheme(setup, scheme);
  // Scene randomness (response phases, noise) and design randomness run on
  // separate streams, so schemes compared under one seed face identical
  // scenes regardless of how many draws their design steps consume.
  std::mt19937_64 scene_rng(derive_seed(seed, 0x5ce1u));
  std::mt19937_64 rng(derive_seed(seed, 0xde51u));

  // Response phases are drawn once per Monte Carlo run.
  CVec responses(static_cast<Eigen::Index>(truth.targets.size()));
  for (std::size_t k = 0; k < truth.targets.size(); ++k)
    responses[static_cast<Eigen::Index>(k)] =
        std::abs(truth.targets[k].response) * std::exp(kImag * uniform_angle(scene_rng));

  const int elements = model.channels.element_count();
  const Eigen::Index w_size =
      static_cast<Eigen::Index>(model.antenna_count()) * config.waveform_len;

  ProtocolResult result;
  std::vector<CycleRecord> history;
  PosteriorState state;
  state.probabilities = setup.prior;

  for (int cycle = 1; cycle <= config.cycles; ++cycle) {
    CycleResult record;
    const auto start = std::chrono::steady_clock::now();
    DesignVariables design;
    if (cycle == 1) {
      design.waveform = random_waveform(w_size, config.max_power, rng);
      design.transmit_phases = random_grid_phases(elements, config.phase_levels, rng);
      design.receive_phases = random_grid_phases(elements, config.phase_levels, rng);
    } else {
      design = scheme_design(setup, config, scheme, state, rng);
      record.objective = total_objective(model, setup.hypotheses, state, design);
    }
    record.optimizer_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();

    const DesignGains gains = design_gains(model, design);
    std::vector<TargetPath> paths;
    paths.reserve(truth.targets.size());
    for (const auto& target : truth.targets)
      paths.push_back(TargetPath{gains.transmit[target.grid_index],
                                 gains.receive[target.grid_index],
                                 ShiftMatrix(target.delay, model.window)});
    ReceivedSignal received = synthesize_received(paths, responses, gains.waveform_matrix,
                                                  model.window, config.noise_variance, scene_rng);
    received.cycle = cycle;
    history.push_back(CycleRecord{std::move(design), std::move(received)});

    state = update_posterior(model, setup.hypotheses, setup.prior, history);
    const DetectionDecision decision = threshold_and_decide(
        setup.hypotheses, state, config.resolved_threshold(), config.wave_speed);

    record.decision_index = decision.hypothesis_index;
    record.posterior = state.probabilities;
    result.cycles.push_back(std::move(record));
    if (cycle == config.cycles) result.final_decision = decision;
  }
  return result;
}

namespace {

struct CycleTally {
  std::vector<double> hits;  // per cycle
  double optimizer_ms_total = 0.0;
  int optimizer_cycles = 0;
};

CycleTally tally_runs(const ProtocolSetup& setup, const ExperimentConfig& config, Scheme scheme,
                      const SceneTruth& truth, int target_index, int runs,
                      std::uint64_t condition) {
  CycleTally tally;
  tally.hits.assign(config.cycles, 0.0);
  for (int run = 0; run < runs; ++run) {
    const auto result = run_protocol(setup, config, scheme, truth,
                                     derive_seed(config.seed, condition, run));
    for (int c = 0; c < config.cycles; ++c) {
      if (result.cycles[c].decision_index == target_index) tally.hits[c] += 1.0;
      if (c >= 1) {
        tally.optimizer_ms_total += result.cycles[c].optimizer_ms;
        ++tally.optimizer_cycles;
      }
    }
  }
  return tally;
}

}  // namespace

SchemeMetrics monte_carlo(const ProtocolSetup& setup, const ExperimentConfig& config,
                          Scheme scheme) {
  SchemeMetrics metrics;
  metrics.scheme = scheme;

  // Run seeds carry only the truth condition, never the scheme, so scheme
  // comparisons are paired on identical scene draws.
  const CycleTally detect =
      tally_runs(setup, config, scheme, setup.truth, setup.truth_index, config.runs, 0);
  metrics.detect.resize(config.cycles);
  metrics.detect_se.resize(config.cycles);
  for (int c = 0; c < config.cycles; ++c) {
    const double p = detect.hits[c] / config.runs;
    metrics.detect[c] = p;
    metrics.detect_se[c] = std::sqrt(p * (1.0 - p) / config.runs);
  }
  metrics.mean_optimizer_ms =
      detect.optimizer_cycles > 0 ? detect.optimizer_ms_total / detect.optimizer_cycles : 0.0;

  if (config.estimate_misdetect) {
    metrics.misdetect.assign(config.cycles, 0.0);
    std::vector<double> variance(config.cycles, 0.0);
    for (std::size_t j = 0; j < setup.hypotheses.size(); ++j) {
      if (static_cast<int>(j) == setup.truth_index) continue;
      const double weight = setup.prior[static_cast<Eigen::Index>(j)];
      const SceneTruth alt = scene_for_hypothesis(config, setup.hypotheses[j]);
      const CycleTally tally = tally_runs(setup, config, scheme, alt, setup.truth_index,
                                          config.misdetect_runs, 1 + j);
      for (int c = 0; c < config.cycles; ++c) {
        const double p = tally.hits[c] / config.misdetect_runs;
        metrics.misdetect[c] += weight * p;
        variance[c] += weight * weight * p * (1.0 - p) / config.misdetect_runs;
      }
    }
    metrics.misdetect_se.resize(config.cycles);
    for (int c = 0; c < config.cycles; ++c) metrics.misdetect_se[c] = std::sqrt(variance[c]);
  }
  return metrics;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& config) {
  if (config.sweep_axis.empty())
    throw std::invalid_argument("sweep: no sweep_axis configured");
  std::vector<SweepRow> rows;
  for (double value : config.sweep_values) {
    ExperimentConfig point = config;
    apply_sweep_value(point, config.sweep_axis, value);
    point.validate();
    const ProtocolSetup setup = make_setup(point);
    for (Scheme scheme : point.schemes) {
      SweepRow row;
      row.axis = config.sweep_axis;
      row.value = value;
      row.metrics = monte_carlo(setup, point, scheme);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

namespace {

std::string format_number(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.10g", v);
  return buffer;
}

}  // namespace

std::string results_csv(const std::vector<SchemeMetrics>& metrics) {
  std::string out = "scheme,cycle,p_detect,p_detect_se,p_misdetect,p_misdetect_se\n";
  for (const auto& m : metrics) {
    for (std::size_t c = 0; c < m.detect.size(); ++c) {
      out += to_string(m.scheme) + "," + std::to_string(c + 1) + "," +
             format_number(m.detect[c]) + "," + format_number(m.detect_se[c]) + ",";
      if (c < m.misdetect.size())
        out += format_number(m.misdetect[c]) + "," + format_number(m.misdetect_se[c]);
      else
        out += ",";
      out += "\n";
    }
  }
  return out;
}

std::string timings_csv(const std::vector<SchemeMetrics>& metrics) {
  std::string out = "scheme,mean_optimizer_ms\n";
  for (const auto& m : metrics)
    out += to_string(m.scheme) + "," + format_number(m.mean_optimizer_ms) + "\n";
  return out;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out =
      "axis,value,scheme,cycle,p_detect,p_detect_se,p_misdetect,p_misdetect_se,wallclock_ms\n";
  for (const auto& row : rows) {
    const auto& m = row.metrics;
    for (std::size_t c = 0; c < m.detect.size(); ++c) {
      out += row.axis + "," + format_number(row.value) + "," + to_string(m.scheme) + "," +
             std::to_string(c + 1) + "," + format_number(m.detect[c]) + "," +
             format_number(m.detect_se[c]) + ",";
      if (c < m.misdetect.size())
        out += format_number(m.misdetect[c]) + "," + format_number(m.misdetect_se[c]);
      else
        out += ",";
      out += "," + format_number(m.mean_optimizer_ms) + "\n";
    }
  }
  return out;
}

}  // namespace metaradar
