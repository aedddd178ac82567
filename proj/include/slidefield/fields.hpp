#pragma once

#include <cmath>
#include <string_view>
#include <utility>

#include "slidefield/common.hpp"
#include "slidefield/geometry.hpp"

namespace slidefield {

/// Pair (X1, X2) over a discontinuity surface. X1 is continuous on the
/// closure of G1 and X2 on the closure of G2; both are stored as total
/// closures and evaluated by continuous extension, so evaluation on the
/// surface never looks at which side x is on.
struct PiecewiseField {
  SurfaceChart surface;
  VectorField lower;  // X1
  VectorField upper;  // X2
};

enum class RegionKind { Crossing, AttractingSliding, RepellingSliding, SingularEqualNormals, TangencyBoundary };

inline std::string_view to_string(RegionKind kind) {
  switch (kind) {
    case RegionKind::Crossing: return "Crossing";
    case RegionKind::AttractingSliding: return "AttractingSliding";
    case RegionKind::RepellingSliding: return "RepellingSliding";
    case RegionKind::SingularEqualNormals: return "SingularEqualNormals";
    case RegionKind::TangencyBoundary: return "TangencyBoundary";
  }
  return "?";
}

/// Kinds on which a sliding vector field is defined.
inline bool is_sliding(RegionKind kind) {
  return kind == RegionKind::AttractingSliding || kind == RegionKind::RepellingSliding ||
         kind == RegionKind::TangencyBoundary;
}

constexpr double kDefaultRegionTol = 1e-9;

/// g(x) = x_n - u(x~)
inline double gap(const SurfaceChart& s, const Vec& x) { return s.gap(x); }

/// Surface membership test used by the on-surface operations:
/// |gap| <= 1e-9 * max(1, |x|).
inline bool on_surface(const SurfaceChart& s, const Vec& x) {
  return std::abs(s.gap(x)) <= 1e-9 * std::max(1.0, x.norm());
}

struct NormalComponents {
  double lower;  // X1N
  double upper;  // X2N
};

inline void require_on_surface(const SurfaceChart& s, const Vec& x) {
  if (!on_surface(s, x)) throw DomainError("point is not on the discontinuity surface");
}

inline NormalComponents normal_components(const PiecewiseField& pf, const Vec& x) {
  require_on_surface(pf.surface, x);
  const Vec n = normal_at(pf.surface, tangential_part(x));
  return {pf.lower(x).dot(n), pf.upper(x).dot(n)};
}

/// Classification from the normal components alone, with band `tol`.
///
/// Both components inside the band count as equal normals. Otherwise a
/// component inside the band makes the point a tangency boundary.
inline RegionKind classify(NormalComponents c, double tol = kDefaultRegionTol) {
  const double a = c.lower;
  const double b = c.upper;
  if (std::abs(a - b) <= tol) return RegionKind::SingularEqualNormals;
  const bool a_zero = std::abs(a) <= tol;
  const bool b_zero = std::abs(b) <= tol;
  if (a_zero && b_zero) return RegionKind::SingularEqualNormals;
  if (a_zero || b_zero) return RegionKind::TangencyBoundary;
  if ((a > 0.0) == (b > 0.0)) return RegionKind::Crossing;
  return a > 0.0 ? RegionKind::AttractingSliding : RegionKind::RepellingSliding;
}

inline RegionKind classify(const PiecewiseField& pf, const Vec& x, double tol = kDefaultRegionTol) {
  return classify(normal_components(pf, x), tol);
}

/// Field with both sides multiplied by a positive constant.
inline PiecewiseField scaled(const PiecewiseField& pf, double factor) {
  return {pf.surface, [f = pf.lower, factor](const Vec& x) { return (factor * f(x)).eval(); },
          [f = pf.upper, factor](const Vec& x) { return (factor * f(x)).eval(); }};
}

/// Pushes both sides forward along d. The caller supplies the image surface.
inline PiecewiseField pushforward(const Diffeo& d, const PiecewiseField& pf, SurfaceChart image) {
  return {std::move(image), pushforward(d, pf.lower), pushforward(d, pf.upper)};
}

inline VectorField constant_field(Vec value) {
  return [value = std::move(value)](const Vec&) { return value; };
}

}  // namespace slidefield
