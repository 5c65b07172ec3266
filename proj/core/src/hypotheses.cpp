#include "metaradar/hypotheses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace metaradar {

namespace {

void append_multisets(int grid_count, int size, int start, std::vector<int>& current,
                      std::vector<Hypothesis>& out) {
  if (static_cast<int>(current.size()) == size) {
    out.push_back(Hypothesis{current});
    return;
  }
  for (int g = start; g < grid_count; ++g) {
    current.push_back(g);
    append_multisets(grid_count, size, g, current, out);
    current.pop_back();
  }
}

}  // namespace

std::vector<Hypothesis> enumerate_hypotheses(int grid_count, int max_targets) {
  if (grid_count < 1) throw std::invalid_argument("enumerate_hypotheses: need at least one grid");
  if (max_targets < 0) throw std::invalid_argument("enumerate_hypotheses: negative target cap");
  std::vector<Hypothesis> out;
  std::vector<int> current;
  for (int size = 0; size <= max_targets; ++size)
    append_multisets(grid_count, size, 0, current, out);
  return out;
}

RVec initial_prior(std::span<const Hypothesis> hypotheses, int max_targets) {
  std::vector<double> class_counts(static_cast<std::size_t>(max_targets) + 1, 0.0);
  for (const auto& h : hypotheses) class_counts.at(h.target_count()) += 1.0;
  RVec prior(static_cast<Eigen::Index>(hypotheses.size()));
  for (std::size_t j = 0; j < hypotheses.size(); ++j)
    prior[static_cast<Eigen::Index>(j)] =
        1.0 / (max_targets + 1) / class_counts[hypotheses[j].target_count()];
  return prior;
}

namespace {

constexpr double kConditionLimit = 1e10;
constexpr double kRidgeScale = 1e-12;

CVec solve_normal_equations(CMat normal, const CVec& rhs) {
  const Eigen::Index k = normal.rows();
  if (k == 0) return CVec(0);
  const double tr = normal.trace().real();
  if (!(tr > 0.0)) return CVec::Zero(k);
  Eigen::SelfAdjointEigenSolver<CMat> eig(normal);
  const double lmax = eig.eigenvalues().maxCoeff();
  const double lmin = eig.eigenvalues().minCoeff();
  if (!(lmin > 0.0) || lmax / lmin > kConditionLimit)
    normal += (kRidgeScale * tr / static_cast<double>(k)) * CMat::Identity(k, k);
  return normal.ldlt().solve(rhs);
}

}  // namespace

CVec estimate_responses(const CMat& stacked_response, const CVec& stacked_measurement) {
  if (stacked_response.rows() != stacked_measurement.size())
    throw std::invalid_argument("estimate_responses: row counts differ");
  const CMat normal = stacked_response.adjoint() * stacked_response;
  const CVec rhs = stacked_response.adjoint() * stacked_measurement;
  return solve_normal_equations(normal, rhs);
}

DesignGains design_gains(const DetectionModel& model, const DesignVariables& design) {
  DesignGains gains;
  const CVec r_t =
      reflection_coefficients(design.transmit_phases, model.amplitude_gain, model.phase_level_count);
  const CVec r_r =
      reflection_coefficients(design.receive_phases, model.amplitude_gain, model.phase_level_count);
  const int grids = model.grid_count();
  gains.transmit.reserve(grids);
  gains.receive.reserve(grids);
  for (int g = 0; g < grids; ++g) {
    gains.transmit.push_back(model.channels.effective_gain(g, r_t));
    gains.receive.push_back(model.channels.effective_gain(g, r_r));
  }
  gains.waveform_matrix = mat_of(design.waveform, model.antenna_count(), model.waveform_len);
  return gains;
}

std::vector<TargetPath> hypothesis_paths(const DetectionModel& model, const DesignGains& gains,
                                         std::span<const int> grids, std::span<const int> delays) {
  if (grids.size() != delays.size())
    throw std::invalid_argument("hypothesis_paths: one delay per target required");
  std::vector<TargetPath> paths;
  paths.reserve(grids.size());
  for (std::size_t k = 0; k < grids.size(); ++k)
    paths.push_back(TargetPath{gains.transmit[grids[k]], gains.receive[grids[k]],
                               ShiftMatrix(delays[k], model.window)});
  return paths;
}

namespace {

// Shared per-history caches: one response column per (cycle, grid, delay
// offset), their Gram matrix summed over cycles, and the projections onto
// the measurements. Delay-tuple search then reduces to K x K lookups.
class PosteriorWorkspace {
 public:
  PosteriorWorkspace(const DetectionModel& model, std::span<const CycleRecord> history)
      : model_(model), offsets_(model.window.offset_count()) {
    const int grids = model.grid_count();
    const int ids = grids * offsets_;
    gram_ = CMat::Zero(ids, ids);
    projection_ = CVec::Zero(ids);
    energy_ = 0.0;

    std::vector<CVec> columns(static_cast<std::size_t>(ids));
    for (const auto& record : history) {
      const DesignGains gains = design_gains(model, record.design);
      const CVec y = record.received.vectorized();
      energy_ += y.squaredNorm();
      for (int g = 0; g < grids; ++g) {
        const CRowVec row = gains.transmit[g] * gains.waveform_matrix;  // 1 x L
        for (int o = 0; o < offsets_; ++o) {
          ShiftMatrix shift(model.window.min_delay + o, model.window);
          const CMat y_mean = gains.receive[g].transpose() * shift.apply_right(row);
          columns[static_cast<std::size_t>(id(g, o))] = vec_of(y_mean);
        }
      }
      for (int a = 0; a < ids; ++a) {
        projection_[a] += columns[a].dot(y);  // conjugate-linear in the column
        for (int b = a; b < ids; ++b) gram_(a, b) += columns[a].dot(columns[b]);
      }
    }
    for (int a = 0; a < ids; ++a)
      for (int b = 0; b < a; ++b) gram_(a, b) = std::conj(gram_(b, a));
  }

  HypothesisEstimate estimate(const Hypothesis& hypothesis) const {
    HypothesisEstimate best;
    best.residual = energy_;
    const int k = hypothesis.target_count();
    if (k == 0) return best;

    best.feasible = false;
    best.residual = std::numeric_limits<double>::infinity();
    std::vector<int> offsets(static_cast<std::size_t>(k), 0);
    search(hypothesis.grid_indices, 0, offsets, best);
    if (!best.feasible) {
      best.delays.clear();
      best.responses.resize(0);
    }
    return best;
  }

  double measurement_energy() const { return energy_; }

 private:
  int id(int grid, int offset) const { return grid * offsets_ + offset; }

  void search(const std::vector<int>& grids, int pos, std::vector<int>& offsets,
              HypothesisEstimate& best) const {
    const int k = static_cast<int>(grids.size());
    if (pos == k) {
      evaluate(grids, offsets, best);
      return;
    }
    // Same-direction targets are interchangeable, so force strictly
    // increasing offsets inside a run of equal grid indices; this both
    // de-duplicates tuples and keeps their delays distinct.
    const int lo = (pos > 0 && grids[pos] == grids[pos - 1]) ? offsets[pos - 1] + 1 : 0;
    for (int o = lo; o < offsets_; ++o) {
      offsets[pos] = o;
      search(grids, pos + 1, offsets, best);
    }
  }

  void evaluate(const std::vector<int>& grids, const std::vector<int>& offsets,
                HypothesisEstimate& best) const {
    const int k = static_cast<int>(grids.size());
    CMat normal(k, k);
    CVec rhs(k);
    for (int a = 0; a < k; ++a) {
      rhs[a] = projection_[id(grids[a], offsets[a])];
      for (int b = 0; b < k; ++b) normal(a, b) = gram_(id(grids[a], offsets[a]), id(grids[b], offsets[b]));
    }
    const CVec gamma = solve_normal_equations(normal, rhs);
    const double residual = energy_ - 2.0 * (gamma.dot(rhs)).real() +
                            (gamma.dot(normal * gamma)).real();
    if (residual < best.residual) {
      best.residual = residual;
      best.responses = gamma;
      best.delays.resize(grids.size());
      for (int a = 0; a < k; ++a) best.delays[a] = model_.window.min_delay + offsets[a];
      best.feasible = true;
    }
  }

  const DetectionModel& model_;
  int offsets_;
  CMat gram_;
  CVec projection_;
  double energy_;
};

}  // namespace

HypothesisEstimate estimate_delays(const DetectionModel& model, const Hypothesis& hypothesis,
                                   std::span<const CycleRecord> history) {
  return PosteriorWorkspace(model, history).estimate(hypothesis);
}

PosteriorState update_posterior(const DetectionModel& model,
                                std::span<const Hypothesis> hypotheses, const RVec& prior,
                                std::span<const CycleRecord> history) {
  if (prior.size() != static_cast<Eigen::Index>(hypotheses.size()))
    throw std::invalid_argument("update_posterior: prior size mismatch");
  PosteriorWorkspace workspace(model, history);

  PosteriorState state;
  state.cycle = static_cast<int>(history.size());
  state.estimates.reserve(hypotheses.size());
  RVec log_post(prior.size());
  for (std::size_t j = 0; j < hypotheses.size(); ++j) {
    HypothesisEstimate est = workspace.estimate(hypotheses[j]);
    const double log_lik = est.feasible
                               ? -est.residual / model.noise_variance
                               : -std::numeric_limits<double>::infinity();
    log_post[static_cast<Eigen::Index>(j)] = std::log(prior[static_cast<Eigen::Index>(j)]) + log_lik;
    state.estimates.push_back(std::move(est));
  }

  const double peak = log_post.maxCoeff();
  if (!std::isfinite(peak))
    throw std::runtime_error("update_posterior: all hypotheses have vanishing likelihood");
  state.probabilities = (log_post.array() - peak).exp().matrix();
  state.probabilities /= state.probabilities.sum();
  return state;
}

DetectionDecision threshold_and_decide(std::span<const Hypothesis> hypotheses,
                                       const PosteriorState& state, double threshold,
                                       double wave_speed) {
  const std::size_t count = hypotheses.size();
  DetectionDecision decision;
  decision.rejected.assign(count, false);

  RVec surviving = state.probabilities;
  for (std::size_t j = 0; j < count; ++j) {
    const auto& est = state.estimates[j];
    bool rejected = !est.feasible && !hypotheses[j].empty();
    for (Eigen::Index k = 0; k < est.responses.size() && !rejected; ++k)
      if (std::abs(est.responses[k]) <= threshold) rejected = true;
    decision.rejected[j] = rejected;
    if (rejected) surviving[static_cast<Eigen::Index>(j)] = 0.0;
  }

  const double total = surviving.sum();
  if (total <= 0.0) {
    // Everything rejected; report "no targets".
    decision.all_rejected_fallback = true;
    decision.hypothesis_index = 0;
    decision.hypothesis = hypotheses[0];
    return decision;
  }
  surviving /= total;

  int best = -1;
  double best_prob = -1.0;
  for (std::size_t j = 0; j < count; ++j) {
    // Strict comparison keeps the first maximizer: hypotheses are ordered
    // by target count then canonical order, which is the tie-break rule.
    if (surviving[static_cast<Eigen::Index>(j)] > best_prob) {
      best_prob = surviving[static_cast<Eigen::Index>(j)];
      best = static_cast<int>(j);
    }
  }

  decision.hypothesis_index = best;
  decision.hypothesis = hypotheses[best];
  const auto& est = state.estimates[best];
  decision.ranges.reserve(est.delays.size());
  for (int delay : est.delays) decision.ranges.push_back(wave_speed * delay / 2.0);
  return decision;
}

}  // namespace metaradar
