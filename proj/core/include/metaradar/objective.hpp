#pragma once

// The design objective: predicted relative-entropy distances between
// hypothesis pairs, the weighted sum over all pairs, and the two
// variable-separated quadratic forms used by the optimizer (quadratic in
// the vectorized waveform, and quadratic-plus-linear in the reflection
// coefficient vector of either RIS phase-shift step).

#include <span>
#include <vector>

#include "metaradar/hypotheses.hpp"
#include "metaradar/types.hpp"

namespace metaradar {

struct WeightedPair {
  int first = 0;
  int second = 0;
  double weight = 0.0;  // beta_{j,j'} = p(U_j) p(U_j')
};

/// All pairs j < j' with beta above the cutoff; tiny weights cannot move
/// the objective beyond tolerance and are skipped.
std::vector<WeightedPair> pair_weights(const RVec& probabilities, double cutoff = 1e-12);

/// Mean received signal vector under a hypothesis with its estimates.
CVec predicted_mean(const DetectionModel& model, const DesignGains& gains,
                    const Hypothesis& hypothesis, const HypothesisEstimate& estimate);

/// d(U_j, U_j') = ||y-bar_j - y-bar_j'||^2 / sigma^2.
double predicted_distance(const DetectionModel& model, const DesignVariables& design,
                          const Hypothesis& first, const HypothesisEstimate& first_estimate,
                          const Hypothesis& second, const HypothesisEstimate& second_estimate);

/// sum_{j<j'} beta_{j,j'} d_{j,j'} with beta from the posterior.
double total_objective(const DetectionModel& model, std::span<const Hypothesis> hypotheses,
                       const PosteriorState& state, const DesignVariables& design);

/// Aggregated waveform form Z(s^t, s^r): Re(w^H Z w) reproduces the
/// weighted distance sum for any waveform w.
CMat waveform_quadratic_form(const DetectionModel& model, std::span<const Hypothesis> hypotheses,
                             std::span<const HypothesisEstimate> estimates,
                             std::span<const WeightedPair> pairs, const PhaseShiftVector& transmit,
                             const PhaseShiftVector& receive);

enum class PhaseSide { transmit, receive };

/// Aggregated phase form: Re(r^H Z r + r^H z1 + z2 r + z3) reproduces the
/// weighted distance sum for any reflection vector r on the side being
/// optimized, the other side and the waveform held fixed.
struct PhaseQuadraticForm {
  CMat quadratic;      // Z: M x M
  CVec linear_left;    // z1: M
  CRowVec linear_right;  // z2: 1 x M
  cdouble constant{0.0, 0.0};  // z3

  Eigen::Index size() const { return quadratic.rows(); }
};

PhaseQuadraticForm phase_quadratic_form(const DetectionModel& model,
                                        std::span<const Hypothesis> hypotheses,
                                        std::span<const HypothesisEstimate> estimates,
                                        std::span<const WeightedPair> pairs, const CVec& waveform,
                                        const PhaseShiftVector& fixed_phases, PhaseSide side);

double evaluate_phase_form(const PhaseQuadraticForm& form, const CVec& reflection);

/// Objective bound used by the convergence argument. The bound circulates
/// in two readings, with and without the 1/sigma^2 factor every summand
/// carries; both are exposed, and the loop logic uses the noise-scaled
/// one (it is the one the derivation supports).
struct ObjectiveBound {
  double noise_scaled = 0.0;  // J(J-1) P_M / sigma^2
  double noise_free = 0.0;    // J(J-1) P_M / 2
};

ObjectiveBound objective_upper_bound(int hypothesis_count, double max_power,
                                     double noise_variance);

}  // namespace metaradar
