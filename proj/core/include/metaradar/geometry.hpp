#pragma once

// Deterministic channel quantities of an RIS-aided MIMO radar: element
// reflection coefficients, radiation patterns, the antenna-to-RIS gain
// matrix H, steering vectors toward far-field directions, and the cascaded
// reflection gain B(s) = A diag(r(s)) H.
//
// Frame convention: the RIS lies in the z = 0 plane with boresight normal
// +z; polar angle theta is measured from +z, azimuth phi from +x.

#include <span>
#include <vector>

#include "metaradar/types.hpp"

namespace metaradar {

struct Direction {
  double theta = 0.0;  // polar, [0, pi]
  double phi = 0.0;    // azimuth, [0, 2*pi)
};

enum class PatternKind { ris, antenna };

/// Normalized radiation pattern: cos^3(theta) on the front half-space for
/// an RIS element, zero behind it; isotropic (1) for an antenna.
double radiation_pattern(PatternKind kind, const Direction& direction);

struct PhaseShiftVector {
  enum class Mode { discrete, continuous };

  RVec shifts;                    // radians
  Mode mode = Mode::discrete;

  Eigen::Index size() const { return shifts.size(); }
};

struct RadarGeometry {
  std::vector<Vec3> ris_element_positions;  // absolute coordinates, meters
  std::vector<Vec3> antenna_positions;      // absolute coordinates, meters
  Vec3 ris_center = Vec3::Zero();
  Vec3 array_center = Vec3::Zero();
  double wavelength = 1.0;
  double element_area = 0.25;      // S^e
  double ris_element_gain = kPi;   // G^R, defaults to 4*pi*S^e/lambda^2
  double antenna_gain = 1.0;       // G^A
  double amplitude_gain = 1.0;     // eta, (0, 1]
  int phase_level_count = 8;       // N_s
  double element_spacing = 0.5;    // l^e

  int element_count() const { return static_cast<int>(ris_element_positions.size()); }
  int antenna_count() const { return static_cast<int>(antenna_positions.size()); }
  double phase_step() const { return kTwoPi / phase_level_count; }

  /// p^e_m, relative to the first element.
  Vec3 element_offset(int m) const { return ris_element_positions[m] - ris_element_positions[0]; }
  /// p^a_n, relative to the first antenna.
  Vec3 antenna_offset(int n) const { return antenna_positions[n] - antenna_positions[0]; }

  /// Planar layout: RIS elements on a centered rows x cols grid in the z=0
  /// plane with spacing l^e; the antenna array on a parallel grid with
  /// spacing antenna_spacing, centered boresight_offset along +z and
  /// laterally displaced by (lateral_x, lateral_y).
  static RadarGeometry planar(int ris_elements, int antennas, double wavelength,
                              double boresight_offset, double antenna_spacing,
                              double lateral_x = 0.0, double lateral_y = 0.0);

  void validate() const;  // throws std::invalid_argument
};

/// Wave vector of magnitude 2*pi/lambda toward the given direction.
Vec3 wave_vector(const Direction& direction, double wavelength);

/// Reflection coefficient eta * e^{-j s} of one element.
cdouble reflection_coefficient(double shift, double amplitude_gain);

/// Throws std::domain_error when `shift` is not on {i * 2pi/level_count}
/// within `tol` (phases compared modulo 2*pi).
void require_on_grid(double shift, int level_count, double tol = 1e-12);

/// r(s) for a whole phase-shift vector; validates the grid in discrete mode.
CVec reflection_coefficients(const PhaseShiftVector& shifts, double amplitude_gain,
                             int level_count);

/// Path gains between every RIS element and antenna: H is M x N with
/// H[m,n] per the spherical-spreading model evaluated at the per-pair
/// element-to-antenna direction. Throws std::invalid_argument on
/// coincident element/antenna positions.
CMat antenna_ris_channel(const RadarGeometry& geom);

struct SteeringVectors {
  CMat ris;    // A: K x M
  CMat array;  // Xi: K x N
};

SteeringVectors steering_vectors(const RadarGeometry& geom, std::span<const Direction> directions);

/// Cascaded reflection gain B(s) = A diag(r) H, K x N.
CMat reflection_path_gain(const CMat& ris_steering, const CVec& reflection, const CMat& channel);

/// Precomputed channel quantities for a fixed direction grid.
struct ChannelSet {
  CMat ris_steering;    // A: K x M
  CMat array_steering;  // Xi: K x N
  CMat channel;         // H: M x N

  int direction_count() const { return static_cast<int>(ris_steering.rows()); }
  int antenna_count() const { return static_cast<int>(array_steering.cols()); }
  int element_count() const { return static_cast<int>(ris_steering.cols()); }

  CMat reflection_gain(const CVec& reflection) const {
    return reflection_path_gain(ris_steering, reflection, channel);
  }
  /// b_k(s) + xi_k for one direction.
  CRowVec effective_gain(int k, const CVec& reflection) const;
};

ChannelSet make_channel_set(const RadarGeometry& geom, std::span<const Direction> directions);

}  // namespace metaradar
