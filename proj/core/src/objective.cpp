#include "metaradar/objective.hpp"

#include <map>
#include <stdexcept>
#include <utility>

namespace metaradar {

std::vector<WeightedPair> pair_weights(const RVec& probabilities, double cutoff) {
  std::vector<WeightedPair> pairs;
  const Eigen::Index j_count = probabilities.size();
  for (Eigen::Index j = 0; j < j_count; ++j) {
    for (Eigen::Index j2 = j + 1; j2 < j_count; ++j2) {
      const double beta = probabilities[j] * probabilities[j2];
      if (beta >= cutoff)
        pairs.push_back({static_cast<int>(j), static_cast<int>(j2), beta});
    }
  }
  return pairs;
}

CVec predicted_mean(const DetectionModel& model, const DesignGains& gains,
                    const Hypothesis& hypothesis, const HypothesisEstimate& estimate) {
  const Eigen::Index dim =
      static_cast<Eigen::Index>(model.antenna_count()) * model.window.received_len;
  if (hypothesis.empty() || !estimate.feasible) return CVec::Zero(dim);
  const auto paths =
      hypothesis_paths(model, gains, hypothesis.grid_indices, estimate.delays);
  return vec_of(mean_received(paths, estimate.responses, gains.waveform_matrix, model.window));
}

double predicted_distance(const DetectionModel& model, const DesignVariables& design,
                          const Hypothesis& first, const HypothesisEstimate& first_estimate,
                          const Hypothesis& second, const HypothesisEstimate& second_estimate) {
  if (model.noise_variance <= 0.0)
    throw std::domain_error("predicted_distance: noise variance must be positive");
  const DesignGains gains = design_gains(model, design);
  const CVec mean_first = predicted_mean(model, gains, first, first_estimate);
  const CVec mean_second = predicted_mean(model, gains, second, second_estimate);
  return (mean_first - mean_second).squaredNorm() / model.noise_variance;
}

double total_objective(const DetectionModel& model, std::span<const Hypothesis> hypotheses,
                       const PosteriorState& state, const DesignVariables& design) {
  const auto pairs = pair_weights(state.probabilities);
  if (pairs.empty()) return 0.0;
  const DesignGains gains = design_gains(model, design);

  // Means are shared across pairs; compute each hypothesis once.
  std::vector<CVec> means(hypotheses.size());
  std::vector<bool> ready(hypotheses.size(), false);
  auto mean_of = [&](int j) -> const CVec& {
    if (!ready[j]) {
      means[j] = predicted_mean(model, gains, hypotheses[j], state.estimates[j]);
      ready[j] = true;
    }
    return means[j];
  };

  double value = 0.0;
  for (const auto& pair : pairs)
    value += pair.weight * (mean_of(pair.first) - mean_of(pair.second)).squaredNorm();
  return value / model.noise_variance;
}

namespace {

// Response columns depend on a hypothesis target only through its grid
// index and delay offset, so per-target quantities are cached under that
// key and cross products under key pairs.
struct TargetKey {
  int grid;
  int offset;
  bool operator<(const TargetKey& o) const {
    return grid != o.grid ? grid < o.grid : offset < o.offset;
  }
};

std::vector<TargetKey> target_keys(const DetectionModel& model, const Hypothesis& hyp,
                                   const HypothesisEstimate& est) {
  std::vector<TargetKey> keys;
  keys.reserve(hyp.grid_indices.size());
  for (std::size_t k = 0; k < hyp.grid_indices.size(); ++k)
    keys.push_back({hyp.grid_indices[k], est.delays[k] - model.window.min_delay});
  return keys;
}

// ---- waveform form ----------------------------------------------------

class WaveformFormBuilder {
 public:
  WaveformFormBuilder(const DetectionModel& model, const PhaseShiftVector& transmit,
                      const PhaseShiftVector& receive)
      : model_(model) {
    reflection_t_ =
        reflection_coefficients(transmit, model.amplitude_gain, model.phase_level_count);
    reflection_r_ =
        reflection_coefficients(receive, model.amplitude_gain, model.phase_level_count);
  }

  const CMat& q_of(const TargetKey& key) {
    auto it = q_cache_.find(key);
    if (it != q_cache_.end()) return it->second;
    TargetPath path{model_.channels.effective_gain(key.grid, reflection_t_),
                    model_.channels.effective_gain(key.grid, reflection_r_),
                    ShiftMatrix(model_.window.min_delay + key.offset, model_.window)};
    return q_cache_.emplace(key, q_matrix(path)).first->second;
  }

  const CMat& cross(const TargetKey& a, const TargetKey& b) {
    auto it = cross_cache_.find({a, b});
    if (it != cross_cache_.end()) return it->second;
    return cross_cache_.emplace(std::make_pair(a, b), CMat(q_of(a).adjoint() * q_of(b)))
        .first->second;
  }

  // Z''(U_j, U_j') = sum_i sum_i' conj(gamma_i) gamma_i' Q_i^H Q_i'.
  CMat cross_form(const std::vector<TargetKey>& a, const CVec& gamma_a,
                  const std::vector<TargetKey>& b, const CVec& gamma_b, Eigen::Index dim) {
    CMat out = CMat::Zero(dim, dim);
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t i2 = 0; i2 < b.size(); ++i2)
        out += std::conj(gamma_a[i]) * gamma_b[i2] * cross(a[i], b[i2]);
    return out;
  }

 private:
  const DetectionModel& model_;
  CVec reflection_t_, reflection_r_;
  std::map<TargetKey, CMat> q_cache_;
  std::map<std::pair<TargetKey, TargetKey>, CMat> cross_cache_;
};

}  // namespace

CMat waveform_quadratic_form(const DetectionModel& model, std::span<const Hypothesis> hypotheses,
                             std::span<const HypothesisEstimate> estimates,
                             std::span<const WeightedPair> pairs, const PhaseShiftVector& transmit,
                             const PhaseShiftVector& receive) {
  const Eigen::Index dim =
      static_cast<Eigen::Index>(model.antenna_count()) * model.waveform_len;
  WaveformFormBuilder builder(model, transmit, receive);
  CMat z = CMat::Zero(dim, dim);

  std::vector<std::vector<TargetKey>> keys(hypotheses.size());
  std::vector<bool> have_keys(hypotheses.size(), false);
  auto keys_of = [&](int j) -> const std::vector<TargetKey>& {
    if (!have_keys[j]) {
      keys[j] = estimates[j].feasible ? target_keys(model, hypotheses[j], estimates[j])
                                      : std::vector<TargetKey>{};
      have_keys[j] = true;
    }
    return keys[j];
  };

  for (const auto& pair : pairs) {
    const auto& ka = keys_of(pair.first);
    const auto& kb = keys_of(pair.second);
    const CVec& ga = estimates[pair.first].responses;
    const CVec& gb = estimates[pair.second].responses;
    const double scale = pair.weight / model.noise_variance;
    z += scale * (builder.cross_form(ka, ga, ka, ga, dim) +
                  builder.cross_form(kb, gb, kb, gb, dim) -
                  2.0 * builder.cross_form(ka, ga, kb, gb, dim));
  }
  return z;
}

namespace {

// ---- phase form ---------------------------------------------------------

// Per-target pieces of the reflection-separated response column:
// column k of F = Q_k r + zeta_k, with Q_k's m-th column the rank-one
// image of the m-th RIS element and zeta_k the direct-path part.
class PhaseFormBuilder {
 public:
  PhaseFormBuilder(const DetectionModel& model, const CVec& waveform,
                   const PhaseShiftVector& fixed_phases, PhaseSide side)
      : model_(model), side_(side) {
    waveform_matrix_ = mat_of(waveform, model.antenna_count(), model.waveform_len);
    fixed_reflection_ =
        reflection_coefficients(fixed_phases, model.amplitude_gain, model.phase_level_count);
    if (side == PhaseSide::transmit) {
      // Optimizing r(s^t): rows of H W feed the element columns.
      hw_ = model.channels.channel * waveform_matrix_;  // M x L
    }
  }

  struct Pieces {
    CMat q;     // NL_R x M
    CVec zeta;  // NL_R
  };

  const Pieces& pieces_of(const TargetKey& key) {
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;

    const int n = model_.antenna_count();
    const int lr = model_.window.received_len;
    const int m_count = model_.channels.element_count();
    const ShiftMatrix shift(model_.window.min_delay + key.offset, model_.window);

    Pieces pieces;
    pieces.q.resize(static_cast<Eigen::Index>(n) * lr, m_count);
    if (side_ == PhaseSide::transmit) {
      const CRowVec receive_gain = model_.channels.effective_gain(key.grid, fixed_reflection_);
      for (int m = 0; m < m_count; ++m) {
        const CMat shifted = shift.apply_right(hw_.row(m));  // 1 x L_R
        const cdouble steer = model_.channels.ris_steering(key.grid, m);
        pieces.q.col(m) = vec_of(CMat(receive_gain.transpose() * (steer * shifted)));
      }
      const CRowVec direct_row =
          model_.channels.array_steering.row(key.grid) * waveform_matrix_;  // 1 x L
      pieces.zeta = vec_of(CMat(receive_gain.transpose() * shift.apply_right(direct_row)));
    } else {
      const CRowVec transmit_gain = model_.channels.effective_gain(key.grid, fixed_reflection_);
      const CMat shifted = shift.apply_right(CMat(transmit_gain * waveform_matrix_));  // 1 x L_R
      for (int m = 0; m < m_count; ++m) {
        const cdouble steer = model_.channels.ris_steering(key.grid, m);
        pieces.q.col(m) =
            vec_of(CMat(model_.channels.channel.row(m).transpose() * (steer * shifted)));
      }
      pieces.zeta =
          vec_of(CMat(model_.channels.array_steering.row(key.grid).transpose() * shifted));
    }
    return cache_.emplace(key, std::move(pieces)).first->second;
  }

 private:
  const DetectionModel& model_;
  PhaseSide side_;
  CMat waveform_matrix_;
  CVec fixed_reflection_;
  CMat hw_;
  std::map<TargetKey, Pieces> cache_;
};

struct PhaseCross {
  CMat quadratic;       // Q_a^H Q_b
  CVec left;            // Q_a^H zeta_b
  CRowVec right;        // zeta_a^H Q_b
  cdouble constant;     // zeta_a^H zeta_b
};

}  // namespace

PhaseQuadraticForm phase_quadratic_form(const DetectionModel& model,
                                        std::span<const Hypothesis> hypotheses,
                                        std::span<const HypothesisEstimate> estimates,
                                        std::span<const WeightedPair> pairs, const CVec& waveform,
                                        const PhaseShiftVector& fixed_phases, PhaseSide side) {
  const int m_count = model.channels.element_count();
  PhaseFormBuilder builder(model, waveform, fixed_phases, side);
  std::map<std::pair<TargetKey, TargetKey>, PhaseCross> cross_cache;

  auto cross_of = [&](const TargetKey& a, const TargetKey& b) -> const PhaseCross& {
    auto it = cross_cache.find({a, b});
    if (it != cross_cache.end()) return it->second;
    const auto& pa = builder.pieces_of(a);
    const auto& pb = builder.pieces_of(b);
    PhaseCross cross;
    cross.quadratic = pa.q.adjoint() * pb.q;
    cross.left = pa.q.adjoint() * pb.zeta;
    cross.right = pa.zeta.adjoint() * pb.q;
    cross.constant = pa.zeta.dot(pb.zeta);
    return cross_cache.emplace(std::make_pair(a, b), std::move(cross)).first->second;
  };

  PhaseQuadraticForm form;
  form.quadratic = CMat::Zero(m_count, m_count);
  form.linear_left = CVec::Zero(m_count);
  form.linear_right = CRowVec::Zero(m_count);
  form.constant = 0.0;

  std::vector<std::vector<TargetKey>> keys(hypotheses.size());
  std::vector<bool> have_keys(hypotheses.size(), false);
  auto keys_of = [&](int j) -> const std::vector<TargetKey>& {
    if (!have_keys[j]) {
      keys[j] = estimates[j].feasible ? target_keys(model, hypotheses[j], estimates[j])
                                      : std::vector<TargetKey>{};
      have_keys[j] = true;
    }
    return keys[j];
  };

  // accumulate +1/+1/-2 cross terms of one hypothesis pair
  auto accumulate = [&](const std::vector<TargetKey>& a, const CVec& ga,
                        const std::vector<TargetKey>& b, const CVec& gb, double scale) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (std::size_t i2 = 0; i2 < b.size(); ++i2) {
        const cdouble coeff = scale * std::conj(ga[i]) * gb[i2];
        const auto& cross = cross_of(a[i], b[i2]);
        form.quadratic += coeff * cross.quadratic;
        form.linear_left += coeff * cross.left;
        form.linear_right += coeff * cross.right;
        form.constant += coeff * cross.constant;
      }
    }
  };

  for (const auto& pair : pairs) {
    const auto& ka = keys_of(pair.first);
    const auto& kb = keys_of(pair.second);
    const CVec& ga = estimates[pair.first].responses;
    const CVec& gb = estimates[pair.second].responses;
    const double scale = pair.weight / model.noise_variance;
    accumulate(ka, ga, ka, ga, scale);
    accumulate(kb, gb, kb, gb, scale);
    accumulate(ka, ga, kb, gb, -2.0 * scale);
  }
  return form;
}

double evaluate_phase_form(const PhaseQuadraticForm& form, const CVec& reflection) {
  const cdouble value = reflection.dot(form.quadratic * reflection) +
                        reflection.dot(form.linear_left) +
                        (form.linear_right * reflection).value() + form.constant;
  return value.real();
}

ObjectiveBound objective_upper_bound(int hypothesis_count, double max_power,
                                     double noise_variance) {
  ObjectiveBound bound;
  const double pairs2 = static_cast<double>(hypothesis_count) * (hypothesis_count - 1);
  bound.noise_scaled = pairs2 * max_power / noise_variance;
  bound.noise_free = pairs2 * max_power / 2.0;
  return bound;
}

}  // namespace metaradar
