#include "metaradar/analysis.hpp"

#include <cmath>
#include <stdexcept>

namespace metaradar {

double mimo_pair_distance(int antenna_count, double antenna_gain, double target_pattern,
                          double response_amplitude, double max_power, double noise_variance) {
  const double core = antenna_count * response_amplitude * antenna_gain * target_pattern;
  return core * core * max_power / noise_variance;
}

double metaradar_pair_distance(double receive_power_gain, double transmit_power_gain,
                               double response_amplitude, double max_power,
                               double noise_variance) {
  return response_amplitude * response_amplitude * max_power / noise_variance *
         receive_power_gain * transmit_power_gain;
}

double rho_factor(double amplitude_gain, double ris_element_gain, double element_area,
                  double target_pattern) {
  return amplitude_gain * std::sqrt(ris_element_gain * element_area * target_pattern) /
         std::sqrt(4.0 * kPi);
}

namespace {

double positive_mod(double value, double period) {
  double r = std::fmod(value, period);
  if (r < 0.0) r += period;
  return r;
}

}  // namespace

OptimalPhases optimal_phases_and_max_gain(const RadarGeometry& geom, const Direction& target) {
  if (geom.antenna_count() != 1)
    throw std::invalid_argument("optimal_phases_and_max_gain: derivation assumes N = 1");

  const Vec3 e = wave_vector(target, geom.wavelength);
  const double rho = rho_factor(geom.amplitude_gain, geom.ris_element_gain, geom.element_area,
                                radiation_pattern(PatternKind::ris, target));
  const double direct = std::sqrt(radiation_pattern(PatternKind::antenna, target));
  const Vec3 antenna = geom.antenna_positions[0];

  OptimalPhases out;
  out.shifts.resize(geom.element_count());
  double aligned_sum = direct;
  for (int m = 0; m < geom.element_count(); ++m) {
    const Vec3 delta = antenna - geom.ris_element_positions[m];
    const double dist = delta.norm();
    const double ct = std::clamp(delta.z() / dist, -1.0, 1.0);
    const Direction toward_antenna{std::acos(ct),
                                   positive_mod(std::atan2(delta.y(), delta.x()), kTwoPi)};
    aligned_sum += rho *
                   std::sqrt(radiation_pattern(PatternKind::antenna, toward_antenna) *
                             radiation_pattern(PatternKind::ris, toward_antenna)) /
                   dist;
    // Phase-align the m-th reflected path with the direct path. The
    // steering phase enters as +e.p^e_m, so the aligning shift is
    // mod(e.p^e_m - e.p^a_1 - 2 pi l_{1,m} / lambda, 2 pi).
    out.shifts[m] = positive_mod(e.dot(geom.element_offset(m)) - e.dot(geom.antenna_offset(0)) -
                                     kTwoPi * dist / geom.wavelength,
                                 kTwoPi);
  }
  const double one_way = geom.antenna_gain * aligned_sum * aligned_sum;
  out.power_gain = one_way * one_way;  // transmit and receive optima coincide
  return out;
}

double channel_power_gain(const RadarGeometry& geom, const Direction& target, const RVec& shifts) {
  const Direction dirs[1] = {target};
  const ChannelSet set = make_channel_set(geom, dirs);
  CVec reflection(shifts.size());
  for (Eigen::Index m = 0; m < shifts.size(); ++m)
    reflection[m] = reflection_coefficient(shifts[m], geom.amplitude_gain);
  return set.effective_gain(0, reflection).squaredNorm();
}

double power_gain_profile(const PlacementScenario& scenario, double antenna_x, double antenna_z) {
  if (antenna_z <= 0.0)
    throw std::domain_error("power_gain_profile: antenna height must be positive");
  const double le = scenario.element_spacing;
  const double half_span = (scenario.element_count + 1) * le / 2.0;
  double sum = 1.0;  // direct path of the isotropic antenna
  for (int m = 1; m <= scenario.element_count; ++m) {
    const double dx = antenna_x + half_span - m * le;
    const double denom = std::pow(antenna_z * antenna_z + dx * dx, 1.25);
    sum += scenario.rho * std::pow(antenna_z, 1.5) / denom;
  }
  return sum * sum * sum * sum;
}

}  // namespace metaradar
