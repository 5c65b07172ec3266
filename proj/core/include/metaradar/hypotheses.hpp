#pragma once

// Multiple-hypothesis bookkeeping for the cycle-based detection protocol:
// hypothesis enumeration over angular-grid multisets, prior construction,
// joint ML estimation of per-target delays and responses from the full
// cycle history, Bayesian posterior updates, and the final threshold
// detection decision.

#include <span>
#include <vector>

#include "metaradar/geometry.hpp"
#include "metaradar/signal_model.hpp"
#include "metaradar/types.hpp"

namespace metaradar {

struct Hypothesis {
  std::vector<int> grid_indices;  // sorted non-decreasing; 0-based grid ids

  int target_count() const { return static_cast<int>(grid_indices.size()); }
  bool empty() const { return grid_indices.empty(); }
};

/// All multisets of sizes 0..max_targets over grid_count grids, ordered by
/// size then lexicographically; the empty hypothesis comes first.
std::vector<Hypothesis> enumerate_hypotheses(int grid_count, int max_targets);

/// p^1(U) = 1/(K_M+1) * 1/J(N(U)), uniform over target counts and uniform
/// within each count class.
RVec initial_prior(std::span<const Hypothesis> hypotheses, int max_targets);

/// Everything the detector needs about the radar: channel quantities per
/// grid direction, the delay window, and noise level.
struct DetectionModel {
  ChannelSet channels;
  DelayWindow window;
  double noise_variance = 1e-5;
  double amplitude_gain = 1.0;   // eta
  int phase_level_count = 8;     // N_s
  int waveform_len = 10;         // L

  int antenna_count() const { return channels.antenna_count(); }
  int grid_count() const { return channels.direction_count(); }
};

struct CycleRecord {
  DesignVariables design;
  ReceivedSignal received;
};

struct HypothesisEstimate {
  std::vector<int> delays;  // absolute delays, one per target
  CVec responses;           // gamma-hat
  double residual = 0.0;    // sum over cycles of ||y - F gamma||^2
  bool feasible = true;     // false when no delay tuple exists
};

struct PosteriorState {
  RVec probabilities;                        // simplex over hypotheses
  std::vector<HypothesisEstimate> estimates; // refreshed each cycle
  int cycle = 0;
};

/// Least-squares gamma = (F^H F)^-1 F^H y with a ridge fallback when the
/// normal matrix is ill-conditioned (cond > 1e10).
CVec estimate_responses(const CMat& stacked_response, const CVec& stacked_measurement);

/// Effective per-grid gains and the waveform matrix for one design.
struct DesignGains {
  std::vector<CRowVec> transmit;  // b_k(s^t) + xi_k per grid
  std::vector<CRowVec> receive;   // b_k(s^r) + xi_k per grid
  CMat waveform_matrix;           // W: N x L
};

DesignGains design_gains(const DetectionModel& model, const DesignVariables& design);

/// Target paths for a hypothesis given per-target absolute delays.
std::vector<TargetPath> hypothesis_paths(const DetectionModel& model, const DesignGains& gains,
                                         std::span<const int> grids, std::span<const int> delays);

/// Exhaustive ML search over feasible delay tuples (same-direction targets
/// must take distinct delays); returns the maximizing delays and the LS
/// responses under them. Marks the estimate infeasible when no tuple
/// exists.
HypothesisEstimate estimate_delays(const DetectionModel& model, const Hypothesis& hypothesis,
                                   std::span<const CycleRecord> history);

/// Recomputes estimates for every hypothesis from the full history and
/// returns the Bayes posterior p^{c+1}(U_j) with log-domain accumulation.
PosteriorState update_posterior(const DetectionModel& model,
                                std::span<const Hypothesis> hypotheses, const RVec& prior,
                                std::span<const CycleRecord> history);

struct DetectionDecision {
  int hypothesis_index = 0;
  Hypothesis hypothesis;
  std::vector<double> ranges;        // d-hat per target
  std::vector<bool> rejected;        // threshold rejection per hypothesis
  bool all_rejected_fallback = false;
};

/// Threshold detection: hypotheses containing a target with |gamma| <=
/// threshold are rejected, the posterior is renormalized over survivors,
/// and the argmax survivor wins (ties toward fewer targets, then lowest
/// canonical order). Falls back to the empty hypothesis when everything
/// is rejected.
DetectionDecision threshold_and_decide(std::span<const Hypothesis> hypotheses,
                                       const PosteriorState& state, double threshold,
                                       double wave_speed);

}  // namespace metaradar
