#pragma once

// Gaze geometry on unit quaternions.
//
// Frame convention: right-handed, +Y up, the forward (line-of-sight) axis is
// -Z. Azimuth is the rotation about +Y that takes -Z to the direction's
// horizontal projection (positive towards -X), elevation is the angle above
// the horizontal plane (positive towards +Y). A pure yaw of a degrees about +Y
// therefore maps to (a, 0), a pure pitch of e degrees about +X to (0, e).

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>

#include <Eigen/Geometry>

#include "gazeintent/error.hpp"

namespace gazeintent {

enum class Source { kEye, kHead, kGaze };

template <typename Scalar>
struct AngularPointT {
  Scalar azimuth_deg = 0;
  Scalar elevation_deg = 0;
  Source source = Source::kGaze;

  friend bool operator==(const AngularPointT&, const AngularPointT&) = default;
};

using AngularPoint = AngularPointT<double>;

template <typename Scalar>
using UnitQuaternion = Eigen::Quaternion<Scalar>;

inline constexpr double kUnitNormTolerance = 1e-6;

template <typename Scalar>
constexpr Scalar deg_to_rad(Scalar deg) {
  return deg * std::numbers::pi_v<Scalar> / Scalar(180);
}

template <typename Scalar>
constexpr Scalar rad_to_deg(Scalar rad) {
  return rad * Scalar(180) / std::numbers::pi_v<Scalar>;
}

template <typename Scalar>
bool is_unit(const UnitQuaternion<Scalar>& q, Scalar tol = Scalar(kUnitNormTolerance)) {
  return std::abs(q.norm() - Scalar(1)) <= tol;
}

/// Flips q into the w >= 0 hemisphere; q and -q encode the same rotation.
template <typename Scalar>
UnitQuaternion<Scalar> canonical(const UnitQuaternion<Scalar>& q) {
  if (q.w() < Scalar(0)) return UnitQuaternion<Scalar>(-q.coeffs());
  return q;
}

/// Gaze-in-world orientation: head-in-world composed with eye-in-head.
template <typename Scalar>
UnitQuaternion<Scalar> compose_gaze(const UnitQuaternion<Scalar>& head_q,
                                    const UnitQuaternion<Scalar>& eye_q) {
  if (!is_unit(head_q) || !is_unit(eye_q)) {
    throw Error(ErrorCode::kInvalidSample, "compose_gaze requires unit quaternions");
  }
  return (head_q * eye_q).normalized();
}

template <typename Scalar>
Eigen::Matrix<Scalar, 3, 1> forward_axis() {
  return Eigen::Matrix<Scalar, 3, 1>(0, 0, -1);
}

template <typename Scalar>
AngularPointT<Scalar> direction_to_angles(const Eigen::Matrix<Scalar, 3, 1>& dir,
                                          Source source = Source::kGaze) {
  const Eigen::Matrix<Scalar, 3, 1> v = dir.normalized();
  Scalar az = rad_to_deg(std::atan2(-v.x(), -v.z()));
  if (az >= Scalar(180)) az -= Scalar(360);
  // Clamping keeps asin defined when rounding pushes |y| past 1 at the poles.
  const Scalar el = rad_to_deg(std::asin(std::clamp(v.y(), Scalar(-1), Scalar(1))));
  return {az, el, source};
}

template <typename Scalar>
Eigen::Matrix<Scalar, 3, 1> angles_to_direction(const AngularPointT<Scalar>& p) {
  const Scalar az = deg_to_rad(p.azimuth_deg);
  const Scalar el = deg_to_rad(p.elevation_deg);
  return {-std::cos(el) * std::sin(az), std::sin(el), -std::cos(el) * std::cos(az)};
}

/// Azimuth/elevation of the rotated forward axis.
template <typename Scalar>
AngularPointT<Scalar> to_angles(const UnitQuaternion<Scalar>& q, Source source = Source::kGaze) {
  return direction_to_angles<Scalar>(q * forward_axis<Scalar>(), source);
}

/// Yaw about +Y applied after pitch about +X; inverse of to_angles away from the poles.
template <typename Scalar>
UnitQuaternion<Scalar> from_angles(Scalar azimuth_deg, Scalar elevation_deg) {
  using AngleAxis = Eigen::AngleAxis<Scalar>;
  using Vec3 = Eigen::Matrix<Scalar, 3, 1>;
  UnitQuaternion<Scalar> q(AngleAxis(deg_to_rad(azimuth_deg), Vec3::UnitY()) *
                           AngleAxis(deg_to_rad(elevation_deg), Vec3::UnitX()));
  return canonical(UnitQuaternion<Scalar>(q.normalized()));
}

/// Great-circle distance between two directions, in degrees.
template <typename Scalar>
Scalar angular_distance(const AngularPointT<Scalar>& a, const AngularPointT<Scalar>& b) {
  const auto u = angles_to_direction(a);
  const auto v = angles_to_direction(b);
  return rad_to_deg(std::atan2(u.cross(v).norm(), u.dot(v)));
}

/// Angular speed in deg/s.
template <typename Scalar>
Scalar angular_velocity(const AngularPointT<Scalar>& prev, const AngularPointT<Scalar>& cur,
                        Scalar dt_ms) {
  if (!(dt_ms > Scalar(0))) {
    throw Error(ErrorCode::kInvalidInterval, "angular_velocity requires dt_ms > 0");
  }
  return angular_distance(prev, cur) / (dt_ms / Scalar(1000));
}

/// Running azimuth/elevation bounds; dispersion = width + height.
template <typename Scalar>
struct DispersionBounds {
  Scalar min_az = std::numeric_limits<Scalar>::infinity();
  Scalar max_az = -std::numeric_limits<Scalar>::infinity();
  Scalar min_el = std::numeric_limits<Scalar>::infinity();
  Scalar max_el = -std::numeric_limits<Scalar>::infinity();

  bool empty() const { return min_az > max_az; }

  void add(const AngularPointT<Scalar>& p) {
    min_az = std::min(min_az, p.azimuth_deg);
    max_az = std::max(max_az, p.azimuth_deg);
    min_el = std::min(min_el, p.elevation_deg);
    max_el = std::max(max_el, p.elevation_deg);
  }

  DispersionBounds with(const AngularPointT<Scalar>& p) const {
    DispersionBounds b = *this;
    b.add(p);
    return b;
  }

  Scalar dispersion() const { return empty() ? Scalar(0) : (max_az - min_az) + (max_el - min_el); }
};

/// (max az - min az) + (max el - min el). Azimuth wrap at +-180 is not unrolled.
template <typename Scalar>
Scalar dispersion(std::span<const AngularPointT<Scalar>> window) {
  if (window.empty()) throw Error(ErrorCode::kEmptyWindow, "dispersion of an empty window");
  DispersionBounds<Scalar> bounds;
  for (const auto& p : window) bounds.add(p);
  return bounds.dispersion();
}

}  // namespace gazeintent
