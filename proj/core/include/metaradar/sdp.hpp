#pragma once

// Dense complex-Hermitian semidefinite programming for the phase-shift
// relaxations: maximize Re(tr(C X)) subject to fixed diagonal entries (or
// a single trace constraint) and X positive semidefinite. The solver is a
// Mehrotra-style predictor-corrector primal-dual interior-point method
// with Nesterov-Todd scaling, run natively in complex arithmetic.

#include <stdexcept>
#include <string>
#include <utility>

#include "metaradar/types.hpp"

namespace metaradar {

struct DiagSdpProblem {
  CMat cost;      // C, Hermitian within 1e-12 (symmetrized on entry)
  RVec diagonal;  // targets t_m > 0 for X[m,m]
};

struct TraceSdpProblem {
  CMat cost;
  double trace = 1.0;  // tr(X) target
};

struct SdpSolution {
  CMat primal;                  // X, Hermitian PSD
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double gap = 0.0;             // dual - primal
  int iterations = 0;
  bool converged = false;
};

class SdpConvergenceError : public std::runtime_error {
 public:
  SdpConvergenceError(const std::string& what, SdpSolution best)
      : std::runtime_error(what), best_(std::move(best)) {}

  const SdpSolution& best() const { return best_; }

 private:
  SdpSolution best_;
};

/// Solves the diagonal-constraint SDP to relative duality gap `accuracy`.
/// Throws std::invalid_argument for a non-Hermitian cost or nonpositive
/// targets, SdpConvergenceError (best iterate attached) past the cap.
SdpSolution solve_diag_sdp(const DiagSdpProblem& problem, double accuracy = 1e-7,
                           int iteration_cap = 200);

/// Same solver run with the single trace equality; used as a cross-check
/// of the closed-form waveform relaxation.
SdpSolution solve_trace_sdp(const TraceSdpProblem& problem, double accuracy = 1e-7,
                            int iteration_cap = 200);

/// Exact optimum of the trace-constrained relaxation: rank one at the top
/// eigenvector of the Hermitian part, value trace * lambda_max. Returns
/// (w*, value) with the global phase fixed so the first nonzero component
/// of w* is real positive.
std::pair<CVec, double> solve_trace_sdp_rank1(const CMat& cost, double trace);

}  // namespace metaradar
