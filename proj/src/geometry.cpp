#include "mcsim/geometry.hpp"

#include <algorithm>

namespace mcsim {

double signed_surface_distance(const Vector3& p, const SphereReceiver& rx) {
  return norm(p - rx.center) - rx.radius;
}

bool is_inside(const Vector3& p, const SphereReceiver& rx) {
  const Vector3 d = p - rx.center;
  return dot(d, d) < rx.radius * rx.radius;
}

std::optional<double> segment_entry_parameter(const Vector3& p0, const Vector3& p1,
                                              const SphereReceiver& rx) {
  const Vector3 m = p0 - rx.center;
  const double r2 = rx.radius * rx.radius;
  const double c = dot(m, m) - r2;
  if (c <= 0.0) return 0.0;

  const Vector3 dir = p1 - p0;
  const double a = dot(dir, dir);
  if (a == 0.0) return std::nullopt;
  const double b = dot(m, dir);
  // Moving away from the center with p0 outside: no contact for t >= 0.
  if (b >= 0.0) return std::nullopt;

  // Distance of closest approach, computed without the cancellation in b*b - a*c.
  const double t_closest = std::min(-b / a, 1.0);
  const Vector3 closest = m + t_closest * dir;
  if (dot(closest, closest) > r2) return std::nullopt;

  const double disc = b * b - a * c;
  // q = -(b - sqrt(disc)) with b < 0 keeps both terms the same sign.
  const double q = -b + std::sqrt(std::max(disc, 0.0));
  const double t_enter = c / q;
  if (t_enter > 1.0) return std::nullopt;
  return std::clamp(t_enter, 0.0, 1.0);
}

bool segment_intersects_sphere(const Vector3& p0, const Vector3& p1, const SphereReceiver& rx) {
  if (is_inside(p0, rx) || is_inside(p1, rx)) return true;
  return segment_entry_parameter(p0, p1, rx).has_value();
}

}  // namespace mcsim
