#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "metaradar/analysis.hpp"
#include "metaradar/rng.hpp"

namespace metaradar::oracles {

CMat reflection_gain_triple_sum(const CMat& ris_steering, const CVec& reflection,
                                const CMat& channel) {
  const Eigen::Index k_count = ris_steering.rows();
  const Eigen::Index m_count = reflection.size();
  const Eigen::Index n_count = channel.cols();
  CMat b = CMat::Zero(k_count, n_count);
  for (Eigen::Index k = 0; k < k_count; ++k)
    for (Eigen::Index n = 0; n < n_count; ++n)
      for (Eigen::Index m = 0; m < m_count; ++m)
        b(k, n) += ris_steering(k, m) * reflection(m) * channel(m, n);
  return b;
}

std::vector<std::vector<int>> multisets_by_filtering(int grid_count, int max_targets) {
  std::set<std::vector<int>> seen;
  std::vector<std::vector<int>> out;
  out.push_back({});
  for (int size = 1; size <= max_targets; ++size) {
    seen.clear();
    // every raw tuple, sorted and deduplicated
    std::vector<int> tuple(size, 0);
    while (true) {
      std::vector<int> sorted = tuple;
      std::sort(sorted.begin(), sorted.end());
      seen.insert(sorted);
      int pos = size - 1;
      while (pos >= 0 && ++tuple[pos] == grid_count) tuple[pos--] = 0;
      if (pos < 0) break;
    }
    for (const auto& m : seen) out.push_back(m);
  }
  return out;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double value = 1.0;
  for (int i = 0; i < k; ++i) value = value * (n - i) / (i + 1);
  return std::round(value);
}

CVec small_normal_solve(const CMat& response, const CVec& measurement) {
  const CMat normal = response.adjoint() * response;
  const CVec rhs = response.adjoint() * measurement;
  const Eigen::Index k = normal.rows();
  if (k == 0) return CVec(0);
  if (k == 1) return rhs / normal(0, 0);
  if (k == 2) {
    const cdouble det = normal(0, 0) * normal(1, 1) - normal(0, 1) * normal(1, 0);
    CVec gamma(2);
    gamma[0] = (normal(1, 1) * rhs[0] - normal(0, 1) * rhs[1]) / det;
    gamma[1] = (normal(0, 0) * rhs[1] - normal(1, 0) * rhs[0]) / det;
    return gamma;
  }
  throw std::invalid_argument("small_normal_solve: sizes 1 and 2 only");
}

std::pair<double, double> sampled_symmetric_kl(const CVec& mean_a, const CVec& mean_b,
                                               double noise_variance, int samples,
                                               std::mt19937_64& rng) {
  // log p_a(y) - log p_b(y) = (||y-mu_b||^2 - ||y-mu_a||^2) / s2; sample
  // under p_a and under p_b and add the two divergence estimates.
  double sum = 0.0, sum_sq = 0.0;
  const Eigen::Index dim = mean_a.size();
  auto draw_around = [&](const CVec& mean) {
    CVec y(dim);
    for (Eigen::Index i = 0; i < dim; ++i) y[i] = mean[i] + complex_normal(rng, noise_variance);
    return y;
  };
  for (int s = 0; s < samples; ++s) {
    const CVec ya = draw_around(mean_a);
    const CVec yb = draw_around(mean_b);
    const double term_a =
        ((ya - mean_b).squaredNorm() - (ya - mean_a).squaredNorm()) / noise_variance;
    const double term_b =
        ((yb - mean_a).squaredNorm() - (yb - mean_b).squaredNorm()) / noise_variance;
    const double value = term_a + term_b;
    sum += value;
    sum_sq += value * value;
  }
  const double mean = sum / samples;
  const double variance = std::max(sum_sq / samples - mean * mean, 0.0);
  return {mean, std::sqrt(variance / samples)};
}

namespace {

void renormalize_rows(CMat& v, const RVec& diagonal) {
  for (Eigen::Index m = 0; m < v.rows(); ++m) {
    const double norm = v.row(m).norm();
    if (norm > 0.0)
      v.row(m) *= std::sqrt(diagonal[m]) / norm;
    else
      v(m, 0) = std::sqrt(diagonal[m]);
  }
}

}  // namespace

double projected_ascent_diag_sdp(const CMat& cost, const RVec& diagonal, int starts,
                                 std::mt19937_64& rng, int max_iterations) {
  const Eigen::Index dim = cost.rows();
  const CMat c = 0.5 * (cost + cost.adjoint());
  double best = -std::numeric_limits<double>::infinity();
  for (int start = 0; start < starts; ++start) {
    CMat v(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i)
      for (Eigen::Index j = 0; j < dim; ++j) v(i, j) = complex_normal(rng);
    renormalize_rows(v, diagonal);

    double value = (v.adjoint() * c * v).trace().real();
    double step = 1.0 / std::max(1.0, c.norm());
    for (int iter = 0; iter < max_iterations; ++iter) {
      const CMat grad = 2.0 * (c * v);
      CMat trial = v + step * grad;
      renormalize_rows(trial, diagonal);
      const double trial_value = (trial.adjoint() * c * trial).trace().real();
      if (trial_value > value + 1e-14 * std::abs(value)) {
        v = trial;
        value = trial_value;
        step *= 1.2;
      } else {
        step *= 0.5;
        if (step < 1e-12) break;
      }
    }
    best = std::max(best, value);
  }
  return best;
}

CMat random_feasible_diag_point(const RVec& diagonal, std::mt19937_64& rng) {
  const Eigen::Index dim = diagonal.size();
  CMat g(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) g(i, j) = complex_normal(rng);
  CMat x = g * g.adjoint();
  RVec scale(dim);
  for (Eigen::Index m = 0; m < dim; ++m) scale[m] = std::sqrt(diagonal[m] / x(m, m).real());
  return scale.asDiagonal() * x * scale.asDiagonal();
}

double random_waveform_envelope(const CMat& quadratic, double power, int count,
                                std::mt19937_64& rng) {
  const Eigen::Index dim = quadratic.rows();
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < count; ++i) {
    CVec w(dim);
    for (Eigen::Index j = 0; j < dim; ++j) w[j] = complex_normal(rng);
    w *= std::sqrt(power) / w.norm();
    best = std::max(best, (w.dot(quadratic * w)).real());
  }
  return best;
}

double swept_one_way_gain(const RadarGeometry& geom, const Direction& target, int steps) {
  const int m_count = geom.element_count();
  if (m_count > 2) throw std::invalid_argument("swept_one_way_gain: M <= 2 only");
  RVec shifts(m_count);
  double best = 0.0;
  if (m_count == 0) return channel_power_gain(geom, target, shifts);
  for (int i = 0; i < steps; ++i) {
    shifts[0] = kTwoPi * i / steps;
    if (m_count == 1) {
      best = std::max(best, channel_power_gain(geom, target, shifts));
      continue;
    }
    for (int j = 0; j < steps; ++j) {
      shifts[1] = kTwoPi * j / steps;
      best = std::max(best, channel_power_gain(geom, target, shifts));
    }
  }
  return best;
}

}  // namespace metaradar::oracles
