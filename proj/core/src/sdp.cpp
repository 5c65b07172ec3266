#include "metaradar/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace metaradar {

namespace {

constexpr double kFeasTol = 1e-9;
constexpr double kStepFraction = 0.98;

CMat hermitian_part(const CMat& m) { return 0.5 * (m + m.adjoint()); }

void require_hermitian(const CMat& m, double tol = 1e-12) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > tol * scale)
    throw std::invalid_argument("sdp: cost matrix is not Hermitian within tolerance");
}

// Either diag(X) = t (one constraint per diagonal entry) or tr(X) = T.
struct ConstraintSet {
  bool trace_mode = false;
  RVec targets;  // t, or the single value [T]

  Eigen::Index count() const { return trace_mode ? 1 : targets.size(); }

  RVec apply(const CMat& x) const {  // A(X)
    if (trace_mode) {
      RVec v(1);
      v[0] = x.trace().real();
      return v;
    }
    return x.diagonal().real();
  }

  CMat adjoint_apply(const RVec& y, Eigen::Index dim) const {  // A*(y)
    if (trace_mode) return y[0] * CMat::Identity(dim, dim);
    CMat out = CMat::Zero(dim, dim);
    out.diagonal() = y.cast<cdouble>();
    return out;
  }

  // Schur complement M_ij = <A_i, W A_j W>; for diagonal constraints this
  // collapses to elementwise |W|^2, for the trace to ||W||_F^2.
  RMat schur(const CMat& w) const {
    if (trace_mode) {
      RMat m(1, 1);
      m(0, 0) = w.squaredNorm();
      return m;
    }
    return w.cwiseAbs2();
  }
};

double max_feasible_step(const CMat& base, const CMat& delta) {
  // Largest alpha with base + alpha * delta >= 0, via the smallest
  // eigenvalue of L^-1 delta L^-H.
  Eigen::LLT<CMat> llt(base);
  CMat g;
  if (llt.info() == Eigen::Success) {
    const auto lower = llt.matrixL();
    const CMat t1 = lower.solve(delta);
    g = lower.solve(t1.adjoint()).adjoint();
  } else {
    g = delta;  // base nearly singular; fall back to an absolute bound
  }
  Eigen::SelfAdjointEigenSolver<CMat> eig(hermitian_part(g), Eigen::EigenvaluesOnly);
  const double lmin = eig.eigenvalues().minCoeff();
  if (lmin >= 0.0) return std::numeric_limits<double>::infinity();
  return -1.0 / lmin;
}

CMat nt_scaling(const CMat& x, const CMat& s) {
  // W with W S W = X: W = Lx (Lx^H S Lx)^{-1/2} Lx^H.
  Eigen::LLT<CMat> llt(x);
  const CMat lx = llt.matrixL();
  const CMat inner = hermitian_part(lx.adjoint() * s * lx);
  Eigen::SelfAdjointEigenSolver<CMat> eig(inner);
  const RVec d = eig.eigenvalues().cwiseMax(1e-300);
  const CMat root_inv =
      eig.eigenvectors() * d.cwiseSqrt().cwiseInverse().asDiagonal() * eig.eigenvectors().adjoint();
  return hermitian_part(lx * root_inv * lx.adjoint());
}

struct Direction {
  CMat dx, ds;
  RVec dy;
};

SdpSolution run_interior_point(const CMat& cost_in, const ConstraintSet& constraints,
                               double accuracy, int iteration_cap) {
  require_hermitian(cost_in);
  const CMat cost = hermitian_part(cost_in);
  const Eigen::Index dim = cost.rows();
  const Eigen::Index m = constraints.count();
  const RVec& b = constraints.targets;

  // Primal-feasible start; dual slack shifted above the cost spectrum.
  CMat x = constraints.trace_mode
               ? CMat((constraints.targets[0] / static_cast<double>(dim)) *
                      CMat::Identity(dim, dim))
               : CMat(CMat::Zero(dim, dim));
  if (!constraints.trace_mode) x.diagonal() = constraints.targets.cast<cdouble>();
  Eigen::SelfAdjointEigenSolver<CMat> cost_eig(cost, Eigen::EigenvaluesOnly);
  const double shift = cost_eig.eigenvalues().maxCoeff() + 1.0;
  RVec y = RVec::Constant(m, shift);
  CMat s = constraints.adjoint_apply(y, dim) - cost;

  const double cost_scale = 1.0 + cost.norm();
  const double b_scale = 1.0 + b.cwiseAbs().maxCoeff();

  SdpSolution solution;
  auto record = [&](int iter) {
    solution.primal = hermitian_part(x);
    solution.primal_objective = (cost * x).trace().real();
    solution.dual_objective = b.dot(y);
    solution.gap = solution.dual_objective - solution.primal_objective;
    solution.iterations = iter;
  };

  for (int iter = 0; iter < iteration_cap; ++iter) {
    const double mu = std::max((x * s).trace().real() / static_cast<double>(dim), 0.0);
    const RVec rp = b - constraints.apply(x);
    const CMat rd = constraints.adjoint_apply(y, dim) - cost - s;

    record(iter);
    const bool feasible = rp.cwiseAbs().maxCoeff() <= kFeasTol * b_scale &&
                          rd.norm() <= kFeasTol * cost_scale;
    if (feasible && std::abs(solution.gap) <= accuracy * (1.0 + std::abs(solution.primal_objective))) {
      solution.converged = true;
      return solution;
    }

    const CMat w = nt_scaling(x, s);
    const RMat schur = constraints.schur(w);
    Eigen::LDLT<RMat> schur_fact(schur);
    Eigen::LLT<CMat> s_fact(s);
    const CMat s_inv = s_fact.solve(CMat::Identity(dim, dim));

    auto solve_direction = [&](const CMat& r_c) {
      Direction dir;
      const CMat wrw = w * rd * w;
      const RVec rhs = constraints.apply(r_c - wrw) - rp;
      dir.dy = schur_fact.solve(rhs);
      dir.ds = constraints.adjoint_apply(dir.dy, dim) + rd;
      dir.dx = hermitian_part(r_c - w * dir.ds * w);
      return dir;
    };

    // Predictor: aim at zero complementarity to size the centering weight.
    const Direction affine = solve_direction(-x);
    const double ap_aff = std::min(1.0, max_feasible_step(x, affine.dx));
    const double ad_aff = std::min(1.0, max_feasible_step(s, affine.ds));
    const double mu_aff = std::max(
        ((x + ap_aff * affine.dx) * (s + ad_aff * affine.ds)).trace().real() /
            static_cast<double>(dim),
        0.0);
    const double ratio = mu > 0.0 ? mu_aff / mu : 0.0;
    const double sigma = std::clamp(ratio * ratio * ratio, 1e-10, 1.0);

    // Corrector re-targets the sigma-weighted central point. The naive
    // unscaled second-order term destabilizes near the boundary, so the
    // correction stays first-order.
    const CMat r_c = sigma * mu * s_inv - x;
    Direction dir = solve_direction(r_c);

    double ap = kStepFraction * max_feasible_step(x, dir.dx);
    double ad = kStepFraction * max_feasible_step(s, dir.ds);
    ap = std::min(1.0, ap);
    ad = std::min(1.0, ad);
    if (!(ap > 0.0) || !(ad > 0.0)) {
      // Corrector stalled; retreat to a damped centering step.
      const CMat center = mu * s_inv - x;
      dir = solve_direction(center);
      ap = std::min(1.0, 0.5 * kStepFraction * max_feasible_step(x, dir.dx));
      ad = std::min(1.0, 0.5 * kStepFraction * max_feasible_step(s, dir.ds));
    }

    x = hermitian_part(x + ap * dir.dx);
    y += ad * dir.dy;
    s = hermitian_part(s + ad * dir.ds);
  }

  record(iteration_cap);
  throw SdpConvergenceError("sdp: iteration cap reached before requested accuracy", solution);
}

}  // namespace

SdpSolution solve_diag_sdp(const DiagSdpProblem& problem, double accuracy, int iteration_cap) {
  if (problem.cost.rows() != problem.cost.cols())
    throw std::invalid_argument("sdp: cost matrix must be square");
  if (problem.diagonal.size() != problem.cost.rows())
    throw std::invalid_argument("sdp: one diagonal target per row required");
  if ((problem.diagonal.array() <= 0.0).any())
    throw std::invalid_argument("sdp: diagonal targets must be positive");
  ConstraintSet constraints;
  constraints.trace_mode = false;
  constraints.targets = problem.diagonal;
  return run_interior_point(problem.cost, constraints, accuracy, iteration_cap);
}

SdpSolution solve_trace_sdp(const TraceSdpProblem& problem, double accuracy, int iteration_cap) {
  if (problem.cost.rows() != problem.cost.cols())
    throw std::invalid_argument("sdp: cost matrix must be square");
  if (problem.trace <= 0.0) throw std::invalid_argument("sdp: trace target must be positive");
  ConstraintSet constraints;
  constraints.trace_mode = true;
  constraints.targets = RVec::Constant(1, problem.trace);
  return run_interior_point(problem.cost, constraints, accuracy, iteration_cap);
}

std::pair<CVec, double> solve_trace_sdp_rank1(const CMat& cost, double trace) {
  const CMat c = hermitian_part(cost);
  Eigen::SelfAdjointEigenSolver<CMat> eig(c);
  const Eigen::Index top = c.rows() - 1;  // eigenvalues ascend
  CVec v = eig.eigenvectors().col(top);
  // Fix the global phase: first nonzero component made real positive.
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v[i]);
    if (mag > 1e-12) {
      v *= std::conj(v[i]) / mag;
      break;
    }
  }
  const double lambda = eig.eigenvalues()[top];
  return {std::sqrt(trace) * v, trace * lambda};
}

}  // namespace metaradar
