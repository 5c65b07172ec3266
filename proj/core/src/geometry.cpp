#include "metaradar/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace metaradar {

double radiation_pattern(PatternKind kind, const Direction& direction) {
  if (kind == PatternKind::antenna) return 1.0;
  if (direction.theta > kPi / 2.0) return 0.0;
  const double c = std::cos(direction.theta);
  return c * c * c;
}

namespace {

// Near-square rows x cols factorization used for planar grids.
std::pair<int, int> grid_shape(int count) {
  int rows = static_cast<int>(std::floor(std::sqrt(static_cast<double>(count))));
  while (rows > 1 && count % rows != 0) --rows;
  return {rows, count / rows};
}

std::vector<Vec3> centered_grid(int count, double spacing, const Vec3& center) {
  auto [rows, cols] = grid_shape(count);
  std::vector<Vec3> positions;
  positions.reserve(count);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const double x = (c - (cols - 1) / 2.0) * spacing;
      const double y = (r - (rows - 1) / 2.0) * spacing;
      positions.push_back(center + Vec3(x, y, 0.0));
    }
  }
  return positions;
}

Direction direction_between(const Vec3& from, const Vec3& to, double distance) {
  const Vec3 v = to - from;
  const double ct = std::clamp(v.z() / distance, -1.0, 1.0);
  double phi = std::atan2(v.y(), v.x());
  if (phi < 0.0) phi += kTwoPi;
  return {std::acos(ct), phi};
}

}  // namespace

RadarGeometry RadarGeometry::planar(int ris_elements, int antennas, double wavelength,
                                    double boresight_offset, double antenna_spacing,
                                    double lateral_x, double lateral_y) {
  RadarGeometry geom;
  geom.wavelength = wavelength;
  geom.element_spacing = wavelength / 2.0;
  geom.element_area = geom.element_spacing * geom.element_spacing;
  geom.ris_element_gain = 4.0 * kPi * geom.element_area / (wavelength * wavelength);
  geom.ris_center = Vec3::Zero();
  geom.array_center = Vec3(lateral_x, lateral_y, boresight_offset);
  if (ris_elements > 0) {
    geom.ris_element_positions = centered_grid(ris_elements, geom.element_spacing, geom.ris_center);
  }
  geom.antenna_positions = centered_grid(antennas, antenna_spacing, geom.array_center);
  return geom;
}

void RadarGeometry::validate() const {
  if (antenna_count() < 1) throw std::invalid_argument("geometry: at least one antenna required");
  if (wavelength <= 0.0) throw std::invalid_argument("geometry: wavelength must be positive");
  if (amplitude_gain <= 0.0 || amplitude_gain > 1.0)
    throw std::invalid_argument("geometry: amplitude gain must lie in (0, 1]");
  if (phase_level_count < 2) throw std::invalid_argument("geometry: need at least 2 phase levels");
  if (element_area <= 0.0) throw std::invalid_argument("geometry: element area must be positive");
}

Vec3 wave_vector(const Direction& direction, double wavelength) {
  const double k = kTwoPi / wavelength;
  const double st = std::sin(direction.theta);
  return k * Vec3(st * std::cos(direction.phi), st * std::sin(direction.phi),
                  std::cos(direction.theta));
}

cdouble reflection_coefficient(double shift, double amplitude_gain) {
  return amplitude_gain * std::exp(-kImag * shift);
}

void require_on_grid(double shift, int level_count, double tol) {
  const double step = kTwoPi / level_count;
  const double ratio = shift / step;
  const double nearest = std::round(ratio);
  if (std::abs(ratio - nearest) * step > tol)
    throw std::domain_error("phase shift " + std::to_string(shift) +
                            " is not on the discrete grid of " + std::to_string(level_count) +
                            " levels");
}

CVec reflection_coefficients(const PhaseShiftVector& shifts, double amplitude_gain,
                             int level_count) {
  CVec r(shifts.size());
  for (Eigen::Index m = 0; m < shifts.size(); ++m) {
    if (shifts.mode == PhaseShiftVector::Mode::discrete)
      require_on_grid(shifts.shifts[m], level_count);
    r[m] = reflection_coefficient(shifts.shifts[m], amplitude_gain);
  }
  return r;
}

CMat antenna_ris_channel(const RadarGeometry& geom) {
  const int m_count = geom.element_count();
  const int n_count = geom.antenna_count();
  CMat h(m_count, n_count);
  const double front = 1.0 / std::sqrt(4.0 * kPi);
  for (int m = 0; m < m_count; ++m) {
    for (int n = 0; n < n_count; ++n) {
      const double dist = (geom.antenna_positions[n] - geom.ris_element_positions[m]).norm();
      if (dist <= 0.0)
        throw std::invalid_argument("geometry: RIS element and antenna positions coincide");
      const Direction dir =
          direction_between(geom.ris_element_positions[m], geom.antenna_positions[n], dist);
      const double amp = front *
                         std::sqrt(geom.antenna_gain * radiation_pattern(PatternKind::antenna, dir) *
                                   radiation_pattern(PatternKind::ris, dir) * geom.element_area) /
                         dist;
      h(m, n) = amp * std::exp(-kImag * (kTwoPi * dist / geom.wavelength));
    }
  }
  return h;
}

SteeringVectors steering_vectors(const RadarGeometry& geom, std::span<const Direction> directions) {
  const int k_count = static_cast<int>(directions.size());
  SteeringVectors sv;
  sv.ris.resize(k_count, geom.element_count());
  sv.array.resize(k_count, geom.antenna_count());
  for (int k = 0; k < k_count; ++k) {
    const Vec3 e = wave_vector(directions[k], geom.wavelength);
    const double ris_amp =
        std::sqrt(geom.ris_element_gain * radiation_pattern(PatternKind::ris, directions[k]));
    for (int m = 0; m < geom.element_count(); ++m)
      sv.ris(k, m) = ris_amp * std::exp(kImag * e.dot(geom.element_offset(m)));
    const double ant_amp =
        std::sqrt(geom.antenna_gain * radiation_pattern(PatternKind::antenna, directions[k]));
    for (int n = 0; n < geom.antenna_count(); ++n)
      sv.array(k, n) = ant_amp * std::exp(kImag * e.dot(geom.antenna_offset(n)));
  }
  return sv;
}

CMat reflection_path_gain(const CMat& ris_steering, const CVec& reflection, const CMat& channel) {
  if (ris_steering.cols() != reflection.size() || reflection.size() != channel.rows())
    throw std::invalid_argument("reflection_path_gain: dimension mismatch");
  if (reflection.size() == 0)
    return CMat::Zero(ris_steering.rows(), channel.cols());
  return ris_steering * reflection.asDiagonal() * channel;
}

CRowVec ChannelSet::effective_gain(int k, const CVec& reflection) const {
  if (element_count() == 0) return array_steering.row(k);
  return ris_steering.row(k) * reflection.asDiagonal() * channel + array_steering.row(k);
}

ChannelSet make_channel_set(const RadarGeometry& geom, std::span<const Direction> directions) {
  ChannelSet set;
  auto sv = steering_vectors(geom, directions);
  set.ris_steering = std::move(sv.ris);
  set.array_steering = std::move(sv.array);
  set.channel = antenna_ris_channel(geom);
  return set;
}

}  // namespace metaradar
