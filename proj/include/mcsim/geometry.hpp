#ifndef MCSIM_GEOMETRY_HPP
#define MCSIM_GEOMETRY_HPP

#include <cmath>
#include <optional>

namespace mcsim {

// Cartesian coordinates in meters.
struct Vector3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend constexpr Vector3 operator+(const Vector3& a, const Vector3& b) {
    return {a.x + b.x, a.y + b.y, a.z + b.z};
  }
  friend constexpr Vector3 operator-(const Vector3& a, const Vector3& b) {
    return {a.x - b.x, a.y - b.y, a.z - b.z};
  }
  friend constexpr Vector3 operator*(double s, const Vector3& v) {
    return {s * v.x, s * v.y, s * v.z};
  }
  friend constexpr bool operator==(const Vector3&, const Vector3&) = default;
};

constexpr double dot(const Vector3& a, const Vector3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(const Vector3& v) { return std::sqrt(dot(v, v)); }
inline bool is_finite(const Vector3& v) {
  return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

// Perfectly absorbing spherical boundary.
struct SphereReceiver {
  int id = 0;
  Vector3 center;
  double radius = 0.0;
};

/// |p - center| - radius: positive outside, zero on the boundary, negative inside.
double signed_surface_distance(const Vector3& p, const SphereReceiver& rx);

/// Strict containment; points on the boundary are outside.
bool is_inside(const Vector3& p, const SphereReceiver& rx);

/// Smallest t in [0,1] at which p0 + t (p1 - p0) lies in the closed ball, if any.
/// Returns 0 when p0 is already inside.
std::optional<double> segment_entry_parameter(const Vector3& p0, const Vector3& p1,
                                              const SphereReceiver& rx);

/// True iff the closed segment [p0, p1] meets the closed ball of the receiver.
bool segment_intersects_sphere(const Vector3& p0, const Vector3& p1, const SphereReceiver& rx);

}  // namespace mcsim

#endif
