#pragma once

// Waveform and phase-shift optimization: alternates the exact rank-one
// waveform relaxation with SDR-based discrete phase optimization (Gaussian
// randomization plus nearest-grid quantization) for the transmit and
// receive RIS settings, accepting each sub-result only when the exact
// objective does not decrease.

#include <random>
#include <span>
#include <utility>
#include <vector>

#include "metaradar/objective.hpp"
#include "metaradar/rng.hpp"
#include "metaradar/sdp.hpp"

namespace metaradar {

struct WaveformOptimum {
  CVec waveform;            // ||w||^2 = max_power
  double relaxation_value;  // max_power * lambda_max
};

/// Exact optimum of the power-constrained waveform subproblem; the trace
/// relaxation is tight, so no randomization is needed.
WaveformOptimum optimize_waveform(const CMat& quadratic_form, double max_power);

struct PhaseOptimum {
  PhaseShiftVector phases;
  double objective = 0.0;    // form value at the returned phases
  bool sdr_fallback = false; // SDP did not converge; coordinate descent used
};

/// SDR of the homogenized phase subproblem with `randomization_count`
/// Gaussian draws, each projected to the eta-modulus circle, quantized to
/// the nearest grid phase, and scored through the exact form.
PhaseOptimum optimize_phase(const PhaseQuadraticForm& form, double amplitude_gain,
                            int level_count, int randomization_count, std::mt19937_64& rng,
                            double sdp_accuracy = 1e-7);

/// Cyclic exact single-element descent over the grid; terminates when a
/// full sweep makes no change. Fallback path and test comparator.
PhaseShiftVector coordinate_descent_phase(const PhaseQuadraticForm& form, double amplitude_gain,
                                          int level_count, const PhaseShiftVector& start);

/// Global optimum by enumeration; refuses when level_count^M > 1e6.
std::pair<PhaseShiftVector, double> exhaustive_phase_oracle(const PhaseQuadraticForm& form,
                                                            double amplitude_gain,
                                                            int level_count);

struct WpsoOptions {
  double max_power = 12.0;
  double epsilon = 1.0;      // termination threshold on objective gain
  int iteration_cap = 50;
  int randomization_count = 100;
  double sdp_accuracy = 1e-7;
};

struct SubproblemTimings {
  double waveform_ms = 0.0;
  double transmit_ms = 0.0;
  double receive_ms = 0.0;
};

struct WpsoTrace {
  enum class Termination { converged, iteration_cap };

  std::vector<double> objectives;  // d_0, d_1, ..., non-decreasing
  std::vector<SubproblemTimings> timings;  // one entry per iteration
  int iterations = 0;
  Termination reason = Termination::converged;
  bool any_sdr_fallback = false;
};

struct WpsoResult {
  DesignVariables design;
  WpsoTrace trace;
};

WpsoResult run_wpso(const DetectionModel& model, std::span<const Hypothesis> hypotheses,
                    const PosteriorState& state, const DesignVariables& initial,
                    const WpsoOptions& options, std::mt19937_64& rng);

/// Uniform-random grid phases; the first-cycle (and WPSO initial) setting.
PhaseShiftVector random_grid_phases(int count, int level_count, std::mt19937_64& rng);

/// Complex-Gaussian waveform scaled to the power budget.
CVec random_waveform(Eigen::Index size, double max_power, std::mt19937_64& rng);

/// Nearest grid value for a continuous shift; levels are {i * 2pi/N_s,
/// i = 1..N_s} with the full turn representing zero.
double quantize_shift(double shift, int level_count);

/// Grid shift whose reflection coefficient is nearest to e^{j argument}.
double shift_for_argument(double argument, int level_count);

}  // namespace metaradar
