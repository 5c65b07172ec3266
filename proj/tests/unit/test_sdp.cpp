#include "metaradar/sdp.hpp"

#include <cmath>

#include "doctest.h"
#include "metaradar/rng.hpp"
#include "oracles.hpp"

using namespace metaradar;

namespace {

CMat random_hermitian(Eigen::Index dim, std::mt19937_64& rng) {
  CMat g(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) g(i, j) = complex_normal(rng);
  return 0.5 * (g + g.adjoint());
}

void check_feasibility(const SdpSolution& sol, const RVec& diagonal) {
  Eigen::SelfAdjointEigenSolver<CMat> eig(sol.primal, Eigen::EigenvaluesOnly);
  CHECK(eig.eigenvalues().minCoeff() >= -1e-8 * sol.primal.norm());
  for (Eigen::Index m = 0; m < diagonal.size(); ++m)
    CHECK(std::abs(sol.primal(m, m).real() - diagonal[m]) <= 1e-8 * (1.0 + diagonal[m]));
}

}  // namespace

TEST_CASE("one-dimensional problem is solved at its only feasible point") {
  DiagSdpProblem problem;
  problem.cost = CMat::Constant(1, 1, cdouble(2.5, 0.0));
  problem.diagonal = RVec::Constant(1, 1.0);
  const auto sol = solve_diag_sdp(problem);
  CHECK(sol.converged);
  CHECK(std::abs(sol.primal(0, 0) - cdouble(1.0, 0.0)) <= 1e-7);
  CHECK(sol.primal_objective == doctest::Approx(2.5).epsilon(1e-7));
}

TEST_CASE("diagonal cost pins the optimum at the identity-like point") {
  DiagSdpProblem problem;
  problem.cost = CMat::Zero(2, 2);
  problem.cost(0, 0) = 3.0;
  problem.cost(1, 1) = 1.0;
  problem.diagonal = RVec::Ones(2);
  const auto sol = solve_diag_sdp(problem);
  CHECK(sol.converged);
  CHECK(sol.primal_objective == doctest::Approx(4.0).epsilon(1e-7));
  CHECK(std::abs(sol.primal(0, 1)) <= 1e-6);
}

TEST_CASE("random instances match the projected-ascent oracle") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 8; ++trial) {
    const Eigen::Index dim = 6;
    DiagSdpProblem problem;
    problem.cost = random_hermitian(dim, rng);
    problem.diagonal = RVec::Ones(dim);
    const auto sol = solve_diag_sdp(problem);
    CHECK(sol.converged);
    check_feasibility(sol, problem.diagonal);
    CHECK(std::abs(sol.gap) <= 1e-7 * (1.0 + std::abs(sol.primal_objective)));

    const double ascent = oracles::projected_ascent_diag_sdp(problem.cost, problem.diagonal,
                                                             50, rng);
    // interior-point optimum of the relaxation dominates any feasible
    // point and the rank-constrained ascent cannot exceed it
    CHECK(sol.primal_objective >= ascent - 1e-5 * (1.0 + std::abs(ascent)));
    CHECK(std::abs(sol.primal_objective - ascent) <=
          1e-5 * (1.0 + std::abs(sol.primal_objective)));
  }
}

TEST_CASE("solver dominates random feasible points") {
  std::mt19937_64 rng(11);
  DiagSdpProblem problem;
  problem.cost = random_hermitian(8, rng);
  problem.diagonal = RVec::Constant(8, 0.81);
  const auto sol = solve_diag_sdp(problem);
  CHECK(sol.converged);
  for (int i = 0; i < 100; ++i) {
    const CMat x = oracles::random_feasible_diag_point(problem.diagonal, rng);
    const double value = (problem.cost * x).trace().real();
    CHECK(sol.primal_objective >= value - 1e-7 * (1.0 + std::abs(value)));
  }
}

TEST_CASE("trace-mode solve agrees with the closed-form rank-one optimum") {
  std::mt19937_64 rng(13);
  const CMat cost = random_hermitian(8, rng);
  const double trace = 12.0;
  const auto [w, value] = solve_trace_sdp_rank1(cost, trace);
  CHECK(w.squaredNorm() == doctest::Approx(trace).epsilon(1e-10));
  CHECK((w.dot(cost * w)).real() == doctest::Approx(value).epsilon(1e-10));

  TraceSdpProblem problem{cost, trace};
  const auto sol = solve_trace_sdp(problem, 1e-8);
  CHECK(sol.converged);
  CHECK(sol.primal_objective == doctest::Approx(value).epsilon(1e-6));
  CHECK(std::abs(sol.primal.trace().real() - trace) <= 1e-8 * trace);
}

TEST_CASE("rank-one closed form on axis-aligned costs") {
  SUBCASE("isotropic cost") {
    const auto [w, value] = solve_trace_sdp_rank1(CMat::Identity(3, 3), 2.0);
    CHECK(value == doctest::Approx(2.0));
    CHECK(w.squaredNorm() == doctest::Approx(2.0));
  }
  SUBCASE("dominant axis") {
    CMat cost = CMat::Zero(2, 2);
    cost(0, 0) = 5.0;
    cost(1, 1) = 1.0;
    const auto [w, value] = solve_trace_sdp_rank1(cost, 1.0);
    CHECK(value == doctest::Approx(5.0));
    CHECK(std::abs(w[0]) == doctest::Approx(1.0));
    CHECK(std::abs(w[1]) <= 1e-12);
    CHECK(w[0].real() > 0.0);  // deterministic phase convention
    CHECK(w[0].imag() == doctest::Approx(0.0));
  }
}

TEST_CASE("invalid problems are rejected") {
  DiagSdpProblem problem;
  problem.cost = CMat::Zero(2, 2);
  problem.cost(0, 1) = cdouble(1.0, 0.0);  // not Hermitian
  problem.diagonal = RVec::Ones(2);
  CHECK_THROWS_AS(solve_diag_sdp(problem), std::invalid_argument);

  problem.cost = CMat::Identity(2, 2);
  problem.diagonal[1] = -1.0;
  CHECK_THROWS_AS(solve_diag_sdp(problem), std::invalid_argument);
}

TEST_CASE("iteration cap raises a convergence error carrying the best iterate") {
  std::mt19937_64 rng(17);
  DiagSdpProblem problem;
  problem.cost = random_hermitian(6, rng);
  problem.diagonal = RVec::Ones(6);
  try {
    solve_diag_sdp(problem, 1e-12, 2);
    FAIL("expected SdpConvergenceError");
  } catch (const SdpConvergenceError& err) {
    CHECK(err.best().primal.rows() == 6);
    CHECK(err.best().iterations == 2);
    CHECK_FALSE(err.best().converged);
  }
}

TEST_CASE("weak duality holds at the returned iterate") {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 5; ++trial) {
    DiagSdpProblem problem;
    problem.cost = random_hermitian(10, rng);
    problem.diagonal = RVec::Constant(10, 1.0);
    const auto sol = solve_diag_sdp(problem);
    CHECK(sol.dual_objective >= sol.primal_objective - std::abs(sol.gap) - 1e-9);
  }
}
