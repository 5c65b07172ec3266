#include "metaradar/wpso.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace metaradar {

namespace {

int wrap_level(long level, int level_count) {
  return static_cast<int>(((level % level_count) + level_count) % level_count);
}

CVec reflections_of(const RVec& shifts, double amplitude_gain) {
  CVec r(shifts.size());
  for (Eigen::Index m = 0; m < shifts.size(); ++m)
    r[m] = reflection_coefficient(shifts[m], amplitude_gain);
  return r;
}

}  // namespace

double quantize_shift(double shift, int level_count) {
  const double step = kTwoPi / level_count;
  const int level = wrap_level(std::lround(shift / step), level_count);
  return (level == 0 ? level_count : level) * step;
}

double shift_for_argument(double argument, int level_count) {
  // r(s) = eta e^{-js}: the grid argument nearest to `argument` is level i,
  // reached by shift N_s - i (full turn for i = 0).
  const double step = kTwoPi / level_count;
  const int level = wrap_level(std::lround(argument / step), level_count);
  return (level_count - level == 0 ? level_count : level_count - level) * step;
}

WaveformOptimum optimize_waveform(const CMat& quadratic_form, double max_power) {
  auto [waveform, value] = solve_trace_sdp_rank1(quadratic_form, max_power);
  return {std::move(waveform), value};
}

PhaseShiftVector coordinate_descent_phase(const PhaseQuadraticForm& form, double amplitude_gain,
                                          int level_count, const PhaseShiftVector& start) {
  const Eigen::Index m_count = form.size();
  PhaseShiftVector shifts = start;
  shifts.mode = PhaseShiftVector::Mode::discrete;
  for (Eigen::Index m = 0; m < m_count; ++m)
    shifts.shifts[m] = quantize_shift(shifts.shifts[m], level_count);
  CVec r = reflections_of(shifts.shifts, amplitude_gain);

  const double step = kTwoPi / level_count;
  bool changed = true;
  while (changed) {
    changed = false;
    for (Eigen::Index m = 0; m < m_count; ++m) {
      // Single-element closed form: the r_m-dependent part of the
      // objective is Re(conj(r_m) g_m) with g_m collecting both quadratic
      // sides and the linear terms.
      cdouble c = form.linear_left[m];
      cdouble d = form.linear_right[m];
      for (Eigen::Index b = 0; b < m_count; ++b) {
        if (b == m) continue;
        c += form.quadratic(m, b) * r[b];
        d += std::conj(r[b]) * form.quadratic(b, m);
      }
      const cdouble g = c + std::conj(d);

      const double current = (std::conj(r[m]) * g).real();
      double best = current;
      int best_level = 0;  // 0 = keep
      for (int i = 1; i <= level_count; ++i) {
        const cdouble candidate = std::conj(reflection_coefficient(i * step, amplitude_gain));
        const double value = (candidate * g).real();
        if (value > best) {
          best = value;
          best_level = i;
        }
      }
      if (best_level != 0) {
        shifts.shifts[m] = best_level * step;
        r[m] = reflection_coefficient(shifts.shifts[m], amplitude_gain);
        changed = true;
      }
    }
  }
  return shifts;
}

std::pair<PhaseShiftVector, double> exhaustive_phase_oracle(const PhaseQuadraticForm& form,
                                                            double amplitude_gain,
                                                            int level_count) {
  const Eigen::Index m_count = form.size();
  const double combos = std::pow(static_cast<double>(level_count), static_cast<double>(m_count));
  if (combos > 1e6)
    throw std::invalid_argument("exhaustive_phase_oracle: search space exceeds 1e6 points");

  const double step = kTwoPi / level_count;
  std::vector<int> levels(static_cast<std::size_t>(m_count), 1);
  PhaseShiftVector best;
  best.shifts.resize(m_count);
  double best_value = -std::numeric_limits<double>::infinity();

  RVec shifts(m_count);
  while (true) {
    for (Eigen::Index m = 0; m < m_count; ++m) shifts[m] = levels[m] * step;
    const double value = evaluate_phase_form(form, reflections_of(shifts, amplitude_gain));
    if (value > best_value) {
      best_value = value;
      best.shifts = shifts;
    }
    // odometer
    Eigen::Index pos = 0;
    while (pos < m_count) {
      if (++levels[pos] <= level_count) break;
      levels[pos] = 1;
      ++pos;
    }
    if (pos == m_count) break;
  }
  return {best, best_value};
}

PhaseOptimum optimize_phase(const PhaseQuadraticForm& form, double amplitude_gain,
                            int level_count, int randomization_count, std::mt19937_64& rng,
                            double sdp_accuracy) {
  const Eigen::Index m_count = form.size();
  PhaseOptimum out;
  if (m_count == 0) {
    out.objective = evaluate_phase_form(form, CVec(0));
    return out;
  }

  // Homogenize: u = (r, t), |t| = 1, cost [[Z, v/2], [v^H/2, 0]] with
  // v = z1 + z2^H collecting both linear terms.
  const CVec v = form.linear_left + form.linear_right.adjoint();
  CMat cost = CMat::Zero(m_count + 1, m_count + 1);
  cost.topLeftCorner(m_count, m_count) = 0.5 * (form.quadratic + form.quadratic.adjoint());
  cost.topRightCorner(m_count, 1) = 0.5 * v;
  cost.bottomLeftCorner(1, m_count) = 0.5 * v.adjoint();

  DiagSdpProblem problem;
  problem.cost = cost;
  problem.diagonal = RVec::Constant(m_count + 1, amplitude_gain * amplitude_gain);
  problem.diagonal[m_count] = 1.0;

  CMat lifted;
  try {
    lifted = solve_diag_sdp(problem, sdp_accuracy).primal;
  } catch (const SdpConvergenceError& err) {
    lifted = err.best().primal;
    out.sdr_fallback = true;
  }

  Eigen::SelfAdjointEigenSolver<CMat> eig(lifted);
  const RVec clamped = eig.eigenvalues().cwiseMax(0.0);
  const CMat factor = eig.eigenvectors() * clamped.cwiseSqrt().asDiagonal();

  auto dehomogenized_shifts = [&](CVec u) {
    const cdouble tail = u[m_count];
    if (std::abs(tail) > 1e-14) u *= std::conj(tail) / std::abs(tail);
    RVec shifts(m_count);
    for (Eigen::Index m = 0; m < m_count; ++m)
      shifts[m] = shift_for_argument(std::arg(u[m]), level_count);
    return shifts;
  };

  std::vector<RVec> candidates;
  candidates.reserve(static_cast<std::size_t>(randomization_count) + 1);
  candidates.push_back(dehomogenized_shifts(eig.eigenvectors().col(m_count)));
  for (int draw = 0; draw < randomization_count; ++draw) {
    CVec g(m_count + 1);
    for (Eigen::Index i = 0; i <= m_count; ++i) g[i] = complex_normal(rng);
    candidates.push_back(dehomogenized_shifts(factor * g));
  }

  double best_value = -std::numeric_limits<double>::infinity();
  RVec best_shifts;
  for (const auto& shifts : candidates) {
    const double value = evaluate_phase_form(form, reflections_of(shifts, amplitude_gain));
    if (value > best_value) {
      best_value = value;
      best_shifts = shifts;
    }
  }

  if (out.sdr_fallback) {
    PhaseShiftVector start;
    start.shifts = best_shifts;
    PhaseShiftVector descended = coordinate_descent_phase(form, amplitude_gain, level_count, start);
    const double descended_value =
        evaluate_phase_form(form, reflections_of(descended.shifts, amplitude_gain));
    if (descended_value > best_value) {
      best_value = descended_value;
      best_shifts = descended.shifts;
    }
  }

  out.phases.shifts = best_shifts;
  out.phases.mode = PhaseShiftVector::Mode::discrete;
  out.objective = best_value;
  return out;
}

PhaseShiftVector random_grid_phases(int count, int level_count, std::mt19937_64& rng) {
  PhaseShiftVector shifts;
  shifts.shifts.resize(count);
  const double step = kTwoPi / level_count;
  for (int m = 0; m < count; ++m) {
    const int level = 1 + static_cast<int>(uniform01(rng) * level_count);
    shifts.shifts[m] = std::min(level, level_count) * step;
  }
  return shifts;
}

CVec random_waveform(Eigen::Index size, double max_power, std::mt19937_64& rng) {
  CVec w(size);
  for (Eigen::Index i = 0; i < size; ++i) w[i] = complex_normal(rng);
  w *= std::sqrt(max_power) / w.norm();
  return w;
}

WpsoResult run_wpso(const DetectionModel& model, std::span<const Hypothesis> hypotheses,
                    const PosteriorState& state, const DesignVariables& initial,
                    const WpsoOptions& options, std::mt19937_64& rng) {
  const auto pairs = pair_weights(state.probabilities);
  const int m_count = model.channels.element_count();

  WpsoResult result;
  result.design = initial;
  double objective = total_objective(model, hypotheses, state, result.design);
  result.trace.objectives.push_back(objective);

  const auto now = [] { return std::chrono::steady_clock::now(); };
  const auto ms_since = [](std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
  };

  for (int iter = 0; iter < options.iteration_cap; ++iter) {
    const double previous = objective;
    SubproblemTimings timings;

    auto mark = now();
    const CMat z = waveform_quadratic_form(model, hypotheses, state.estimates, pairs,
                                           result.design.transmit_phases,
                                           result.design.receive_phases);
    DesignVariables trial = result.design;
    trial.waveform = optimize_waveform(z, options.max_power).waveform;
    double value = total_objective(model, hypotheses, state, trial);
    if (value >= objective) {
      result.design = trial;
      objective = value;
    }
    timings.waveform_ms = ms_since(mark);

    if (m_count > 0) {
      mark = now();
      const auto form_t =
          phase_quadratic_form(model, hypotheses, state.estimates, pairs,
                               result.design.waveform, result.design.receive_phases,
                               PhaseSide::transmit);
      PhaseOptimum opt_t = optimize_phase(form_t, model.amplitude_gain, model.phase_level_count,
                                          options.randomization_count, rng, options.sdp_accuracy);
      result.trace.any_sdr_fallback |= opt_t.sdr_fallback;
      trial = result.design;
      trial.transmit_phases = opt_t.phases;
      value = total_objective(model, hypotheses, state, trial);
      if (value >= objective) {
        result.design = trial;
        objective = value;
      }
      timings.transmit_ms = ms_since(mark);

      mark = now();
      const auto form_r =
          phase_quadratic_form(model, hypotheses, state.estimates, pairs,
                               result.design.waveform, result.design.transmit_phases,
                               PhaseSide::receive);
      PhaseOptimum opt_r = optimize_phase(form_r, model.amplitude_gain, model.phase_level_count,
                                          options.randomization_count, rng, options.sdp_accuracy);
      result.trace.any_sdr_fallback |= opt_r.sdr_fallback;
      trial = result.design;
      trial.receive_phases = opt_r.phases;
      value = total_objective(model, hypotheses, state, trial);
      if (value >= objective) {
        result.design = trial;
        objective = value;
      }
      timings.receive_ms = ms_since(mark);
    }

    result.trace.objectives.push_back(objective);
    result.trace.timings.push_back(timings);
    ++result.trace.iterations;
    if (objective - previous < options.epsilon) {
      result.trace.reason = WpsoTrace::Termination::converged;
      return result;
    }
  }
  result.trace.reason = WpsoTrace::Termination::iteration_cap;
  return result;
}

}  // namespace metaradar
