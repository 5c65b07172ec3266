#pragma once

// Reference implementations that deliberately avoid the library's own
// computational paths: explicit summations, brute-force enumeration,
// Monte Carlo estimates, and first-order ascent. They exist to verify the
// production code, never to back it.

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "metaradar/geometry.hpp"
#include "metaradar/types.hpp"

namespace metaradar::oracles {

/// B[k,n] = sum_m A[k,m] r[m] H[m,n] as an explicit triple loop.
CMat reflection_gain_triple_sum(const CMat& ris_steering, const CVec& reflection,
                                const CMat& channel);

/// All multisets over {0..grid_count-1} of sizes 0..max_targets, built by
/// filtering raw index tuples instead of ordered recursion.
std::vector<std::vector<int>> multisets_by_filtering(int grid_count, int max_targets);

double binomial(int n, int k);

/// Normal-equation solve by explicit adjugate inverse; sizes 1 and 2 only.
CVec small_normal_solve(const CMat& response, const CVec& measurement);

/// Monte Carlo estimate (mean, standard error) of the symmetric KL
/// divergence between CN(mean_a, s2 I) and CN(mean_b, s2 I).
std::pair<double, double> sampled_symmetric_kl(const CVec& mean_a, const CVec& mean_b,
                                               double noise_variance, int samples,
                                               std::mt19937_64& rng);

/// Best Re(tr(C X)) over the PSD-with-fixed-diagonal set via projected
/// gradient ascent on a full-rank factorization, multi-start.
double projected_ascent_diag_sdp(const CMat& cost, const RVec& diagonal, int starts,
                                 std::mt19937_64& rng, int max_iterations = 2000);

/// Random feasible point of the diagonal-constraint SDP.
CMat random_feasible_diag_point(const RVec& diagonal, std::mt19937_64& rng);

/// max Re(w^H Z w) over `count` random waveforms with ||w||^2 = power.
double random_waveform_envelope(const CMat& quadratic, double power, int count,
                                std::mt19937_64& rng);

/// Dense sweep of the one-way gain ||b(s) + xi||^2 over continuous phases
/// (steps points per phase, M <= 2); returns the sweep maximum.
double swept_one_way_gain(const RadarGeometry& geom, const Direction& target, int steps);

}  // namespace metaradar::oracles
