#pragma once

// Transmitted/received signal synthesis: delay shift matrices, per-target
// Q matrices, the response matrix F whose columns are Q_k w, and noisy
// measurements Y = sum_k gamma_k (b_k(s^r)+xi_k)^T (b_k(s^t)+xi_k) W J_k + V.

#include <random>
#include <span>
#include <vector>

#include "metaradar/geometry.hpp"
#include "metaradar/rng.hpp"
#include "metaradar/types.hpp"

namespace metaradar {

struct DelayWindow {
  int waveform_len = 10;   // L
  int received_len = 15;   // L_R
  int min_delay = 10;      // L^m

  int max_offset() const { return received_len - waveform_len; }
  int offset_count() const { return max_offset() + 1; }
};

/// Shift matrix J_k stored as its delay offset; J_k has a single 1 per row
/// at column l + (l_k - L^m), so right-multiplication only displaces the
/// waveform block inside the longer receive window.
class ShiftMatrix {
 public:
  ShiftMatrix(int delay, const DelayWindow& window);

  int offset() const { return offset_; }
  int delay() const { return offset_ + window_.min_delay; }
  const DelayWindow& window() const { return window_; }

  /// X J_k for X with waveform_len columns.
  CMat apply_right(const CMat& x) const;
  /// Dense L x L_R form (tests and oracles only).
  RMat dense() const;

 private:
  int offset_;
  DelayWindow window_;
};

struct DesignVariables {
  CVec waveform;  // w = vec(W), length N*L
  PhaseShiftVector transmit_phases;
  PhaseShiftVector receive_phases;
};

struct TargetTruth {
  int grid_index = 0;
  int delay = 0;            // snapshots, within the delay window
  cdouble response{0.0, 0.0};
};

struct SceneTruth {
  std::vector<TargetTruth> targets;
};

struct ReceivedSignal {
  CMat samples;   // Y: N x L_R
  int cycle = 0;

  CVec vectorized() const { return vec_of(samples); }
};

/// Spatial and delay signature of one target under a fixed design.
struct TargetPath {
  CRowVec transmit_gain;  // b_k(s^t) + xi_k, 1 x N
  CRowVec receive_gain;   // b_k(s^r) + xi_k, 1 x N
  ShiftMatrix shift;
};

/// Dense Q_k = J_k^T (x) ((b_k^r+xi_k)^T (b_k^t+xi_k)), NL_R x NL.
CMat q_matrix(const TargetPath& path);

/// Q_k w computed without materializing Q_k: reshape w to W, apply the
/// rank-one spatial product, delay the block.
CVec apply_q(const TargetPath& path, const CMat& waveform_matrix);

/// F: NL_R x K with column k = Q_k w.
CMat response_matrix(std::span<const TargetPath> paths, const CMat& waveform_matrix);

/// Noise-free mean received matrix sum_k gamma_k (..) W J_k; zero for an
/// empty scene.
CMat mean_received(std::span<const TargetPath> paths, const CVec& responses,
                   const CMat& waveform_matrix, const DelayWindow& window);

/// Noisy measurement; rows of V are i.i.d. circularly symmetric complex
/// Gaussian with per-entry variance noise_variance.
ReceivedSignal synthesize_received(std::span<const TargetPath> paths, const CVec& responses,
                                   const CMat& waveform_matrix, const DelayWindow& window,
                                   double noise_variance, std::mt19937_64& rng);

}  // namespace metaradar
