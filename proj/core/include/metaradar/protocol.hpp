#pragma once

// The cycle-based detection protocol and its Monte Carlo harness: per
// cycle the selected scheme designs waveform and phase shifts, the truth
// scene produces a noisy measurement, the posterior is refreshed from the
// full history, and a threshold decision is recorded. Runs aggregate into
// detection / mis-detection probabilities per cycle.

#include <cstdint>
#include <string>
#include <vector>

#include "metaradar/config.hpp"
#include "metaradar/hypotheses.hpp"
#include "metaradar/objective.hpp"
#include "metaradar/wpso.hpp"

namespace metaradar {

/// Immutable per-experiment state shared across Monte Carlo runs.
struct ProtocolSetup {
  RadarGeometry geometry;
  std::vector<Direction> grid;       // I directions
  DetectionModel model;              // full RIS-aided channel
  DetectionModel mimo_model;         // same radar with the RIS removed
  std::vector<Hypothesis> hypotheses;
  RVec prior;
  SceneTruth truth;                  // config scene
  int truth_index = 0;               // hypothesis index of the truth multiset
};

ProtocolSetup make_setup(const ExperimentConfig& config);

/// Truth scene used when conditioning on an alternative hypothesis: its
/// targets sit at the hypothesis grid centers with the default delay and
/// response profile.
SceneTruth scene_for_hypothesis(const ExperimentConfig& config, const Hypothesis& hypothesis);

const DetectionModel& model_for_scheme(const ProtocolSetup& setup, Scheme scheme);

struct CycleResult {
  int decision_index = 0;
  RVec posterior;
  double optimizer_ms = 0.0;  // wall-clock of the design step
  double objective = 0.0;     // achieved design objective (cycles >= 2)
};

struct ProtocolResult {
  std::vector<CycleResult> cycles;
  DetectionDecision final_decision;
};

/// One full C-cycle run under a scheme; cycle 1 always uses a random
/// design, later cycles design per the scheme.
ProtocolResult run_protocol(const ProtocolSetup& setup, const ExperimentConfig& config,
                            Scheme scheme, const SceneTruth& truth, std::uint64_t seed);

/// Design step of one cycle (cycles >= 2).
DesignVariables scheme_design(const ProtocolSetup& setup, const ExperimentConfig& config,
                              Scheme scheme, const PosteriorState& state, std::mt19937_64& rng);

struct SchemeMetrics {
  Scheme scheme = Scheme::proposed;
  std::vector<double> detect;        // per cycle
  std::vector<double> detect_se;
  std::vector<double> misdetect;     // per cycle; empty when not estimated
  std::vector<double> misdetect_se;
  double mean_optimizer_ms = 0.0;    // cycles >= 2, detection runs
};

/// Seeded Monte Carlo estimate: detection probability from runs under the
/// truth scene, mis-detection from misdetect_runs under each alternative
/// truth, weighted by the alternative's prior.
SchemeMetrics monte_carlo(const ProtocolSetup& setup, const ExperimentConfig& config,
                          Scheme scheme);

struct SweepRow {
  std::string axis;
  double value = 0.0;
  SchemeMetrics metrics;
};

std::vector<SweepRow> run_sweep(const ExperimentConfig& config);

// ---- CSV output ---------------------------------------------------------

/// results.csv: scheme,cycle,p_detect,p_detect_se,p_misdetect,p_misdetect_se.
/// Deterministic for a fixed config and seed; timings are reported apart so
/// repeated runs stay byte-identical.
std::string results_csv(const std::vector<SchemeMetrics>& metrics);

/// timings.csv: scheme,mean_optimizer_ms.
std::string timings_csv(const std::vector<SchemeMetrics>& metrics);

/// sweep.csv: axis,value,scheme,cycle,p_detect,p_detect_se,p_misdetect,
/// p_misdetect_se,wallclock_ms.
std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace metaradar
