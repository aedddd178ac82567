#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "slidefield/common.hpp"
#include "slidefield/random.hpp"

namespace slidefield {

/// Central finite-difference gradient of a scalar function on R^{n-1}.
/// Step is 1e-6 * max(1, |x|).
inline Vec finite_difference_gradient(const std::function<double(const Vec&)>& f, const Vec& x) {
  const double step = 1e-6 * std::max(1.0, x.norm());
  Vec grad(x.size());
  Vec probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe(i) = x(i) + step;
    const double up = f(probe);
    probe(i) = x(i) - step;
    const double down = f(probe);
    probe(i) = x(i);
    grad(i) = (up - down) / (2.0 * step);
  }
  return grad;
}

/// Discontinuity surface given as the graph x_n = u(x~) in R^n.
///
/// G1 is the region below the graph (x_n < u), G2 the region above it. For
/// n = 1 the tangential coordinate space is R^0 and u is evaluated on an
/// empty vector.
class SurfaceChart {
 public:
  using Height = std::function<double(const Vec&)>;
  using Gradient = std::function<Vec(const Vec&)>;

  /// Without an analytic gradient the chart falls back to central differences.
  SurfaceChart(int dim, Height u, Gradient grad_u = {}, std::string name = "custom")
      : dim_(dim), u_(std::move(u)), grad_u_(std::move(grad_u)), name_(std::move(name)) {
    if (dim_ < 1) throw ConfigError("surface dimension must be at least 1");
    if (!u_) throw ConfigError("surface height function is empty");
    if (!grad_u_) {
      grad_u_ = [u = u_](const Vec& xt) { return finite_difference_gradient(u, xt); };
    }
  }

  int dim() const { return dim_; }
  const std::string& name() const { return name_; }

  double height(const Vec& xt) const { return u_(xt); }
  Vec gradient(const Vec& xt) const { return grad_u_(xt); }

  /// Signed surface coordinate x_n - u(x~): negative in G1, positive in G2.
  double gap(const Vec& x) const { return x(dim_ - 1) - u_(tangential_part(x)); }

  /// The point of the surface above x~.
  Vec lift(const Vec& xt) const { return join(xt, u_(xt)); }

  /// Moves x vertically onto the surface.
  Vec project(const Vec& x) const { return lift(tangential_part(x)); }

 private:
  int dim_;
  Height u_;
  Gradient grad_u_;
  std::string name_;
};

/// u == 0, so the surface is the hyperplane P = {x_n = 0}.
inline SurfaceChart flat_surface(int dim) {
  return SurfaceChart(
      dim, [](const Vec&) { return 0.0; }, [](const Vec& xt) { return Vec::Zero(xt.size()).eval(); },
      "flat");
}

/// u(x~) = slope * x_1. In R^1 there is no tangential direction and the
/// surface is the point {0}.
inline SurfaceChart tilt_surface(int dim, double slope) {
  return SurfaceChart(
      dim, [slope](const Vec& xt) { return xt.size() > 0 ? slope * xt(0) : 0.0; },
      [slope](const Vec& xt) {
        Vec g = Vec::Zero(xt.size());
        if (xt.size() > 0) g(0) = slope;
        return g;
      },
      "tilt");
}

/// u(x~) = curvature * |x~|^2.
inline SurfaceChart paraboloid_surface(int dim, double curvature) {
  return SurfaceChart(
      dim, [curvature](const Vec& xt) { return curvature * xt.squaredNorm(); },
      [curvature](const Vec& xt) { return (2.0 * curvature * xt).eval(); }, "paraboloid");
}

/// Builds a catalog surface by name. Recognised names: flat, tilt (slope),
/// paraboloid (curvature).
inline SurfaceChart surface_from_catalog(const std::string& name, int dim, double parameter) {
  if (name == "flat") return flat_surface(dim);
  if (name == "tilt") return tilt_surface(dim, parameter);
  if (name == "paraboloid") return paraboloid_surface(dim, parameter);
  throw ConfigError("unknown surface '" + name + "'");
}

/// Unit normal of the surface above x~, pointing into G2.
inline Vec normal_at(const SurfaceChart& s, const Vec& xt) {
  const Vec grad = s.gradient(xt);
  return join(-grad, 1.0) / std::sqrt(1.0 + grad.squaredNorm());
}

/// Element of a tangent space: a base point and a vector.
struct TangentVector {
  Vec base;
  Vec vec;
};

/// A C^1 coordinate change with closed-form inverse.
struct Diffeo {
  std::function<Vec(const Vec&)> forward;
  std::function<Vec(const Vec&)> inverse;
  /// Jacobian of forward at the given point.
  std::function<Mat(const Vec&)> jacobian;

  Vec operator()(const Vec& x) const { return forward(x); }
};

inline Diffeo identity_diffeo(int dim) {
  return {[](const Vec& x) { return x; }, [](const Vec& x) { return x; },
          [dim](const Vec&) { return Mat::Identity(dim, dim).eval(); }};
}

/// outer o inner
inline Diffeo compose(const Diffeo& outer, const Diffeo& inner) {
  return {[=](const Vec& x) { return outer.forward(inner.forward(x)); },
          [=](const Vec& y) { return inner.inverse(outer.inverse(y)); },
          [=](const Vec& x) { return (outer.jacobian(inner.forward(x)) * inner.jacobian(x)).eval(); }};
}

/// Swaps forward and inverse. The Jacobian is the matrix inverse of the
/// forward Jacobian at the preimage.
inline Diffeo inverse_of(const Diffeo& d) {
  return {d.inverse, d.forward, [d](const Vec& y) {
            return d.jacobian(d.inverse(y)).partialPivLu().inverse().eval();
          }};
}

/// x -> x + offset
inline Diffeo translation(const Vec& offset) {
  const auto dim = offset.size();
  return {[offset](const Vec& x) { return (x + offset).eval(); },
          [offset](const Vec& y) { return (y - offset).eval(); },
          [dim](const Vec&) { return Mat::Identity(dim, dim).eval(); }};
}

/// F_A(x) = A x
inline Diffeo linear_diffeo(const Mat& a) {
  if (a.rows() != a.cols()) throw ConfigError("linear map must be square");
  auto lu = a.fullPivLu();
  if (!lu.isInvertible()) throw ConfigError("linear map is singular");
  const Mat inv = lu.inverse();
  return {[a](const Vec& x) { return (a * x).eval(); }, [inv](const Vec& y) { return (inv * y).eval(); },
          [a](const Vec&) { return a; }};
}

/// Psi_Sigma(x) = (x~, x_n + u(x~)), which carries P onto the surface.
inline Vec psi_sigma(const SurfaceChart& s, const Vec& x) {
  Vec y = x;
  y(s.dim() - 1) += s.height(tangential_part(x));
  return y;
}

inline Diffeo psi_sigma_diffeo(const SurfaceChart& s) {
  const int n = s.dim();
  return {[s](const Vec& x) { return psi_sigma(s, x); },
          [s, n](const Vec& y) {
            Vec x = y;
            x(n - 1) -= s.height(tangential_part(y));
            return x;
          },
          [s, n](const Vec& x) {
            Mat j = Mat::Identity(n, n);
            j.row(n - 1).head(n - 1) = s.gradient(tangential_part(x)).transpose();
            return j;
          }};
}

/// Psi_Sigma^{-1} with its closed-form Jacobian (last row (-grad u, 1)).
inline Diffeo psi_sigma_inverse_diffeo(const SurfaceChart& s) {
  const Diffeo psi = psi_sigma_diffeo(s);
  const int n = s.dim();
  return {psi.inverse, psi.forward, [s, n](const Vec& y) {
            Mat j = Mat::Identity(n, n);
            j.row(n - 1).head(n - 1) = -s.gradient(tangential_part(y)).transpose();
            return j;
          }};
}

/// (D Phi X)(y) = D Phi_{Phi^{-1}(y)} X(Phi^{-1}(y))
inline VectorField pushforward(const Diffeo& d, VectorField field) {
  return [d, field = std::move(field)](const Vec& y) {
    const Vec x = d.inverse(y);
    return (d.jacobian(x) * field(x)).eval();
  };
}

/// Maximum of |gap_to(d(x))| over the lifts x of probe points on `from`.
inline double surface_deviation(const Diffeo& d, const SurfaceChart& from, const SurfaceChart& to,
                                std::span<const Vec> probes) {
  double worst = 0.0;
  for (const Vec& xt : probes) {
    const Vec y = d.forward(from.lift(xt));
    worst = std::max(worst, std::abs(to.gap(y)) / std::max(1.0, y.norm()));
  }
  return worst;
}

/// Deterministic probe points in R^{n-1} with components in [-2, 2].
inline std::vector<Vec> surface_probes(int dim, int count = 16, std::uint64_t seed = 0x5eedULL) {
  Rng rng(seed);
  std::vector<Vec> probes;
  probes.reserve(count);
  for (int i = 0; i < count; ++i) probes.push_back(rng.vector(dim - 1, -2.0, 2.0));
  return probes;
}

/// Given d with d(P) in the surface, returns the unique Phi_bar with
/// d = Psi_Sigma o Phi_bar and Phi_bar(P) in P. The precondition is checked
/// at probe points only.
inline Diffeo factorize_through_P(const SurfaceChart& s, const Diffeo& d) {
  const auto probes = surface_probes(s.dim());
  if (surface_deviation(d, flat_surface(s.dim()), s, probes) > 1e-9) {
    throw DomainError("diffeomorphism does not map P into Sigma");
  }
  return compose(psi_sigma_inverse_diffeo(s), d);
}

/// Psi_to o bar o Psi_from^{-1}. Carries the surface `from` onto `to` whenever
/// bar preserves P.
inline Diffeo conjugate_through_charts(const SurfaceChart& from, const SurfaceChart& to, const Diffeo& bar) {
  return compose(psi_sigma_diffeo(to), compose(bar, psi_sigma_inverse_diffeo(from)));
}

// Maps of R^n that carry P = {x_n = 0} onto itself.

/// Translation by (offset~, 0).
inline Diffeo plane_translation(const Vec& tangential_offset) { return translation(join(tangential_offset, 0.0)); }

/// F_A for A with last row (0, ..., 0, d), d != 0.
inline Diffeo plane_linear(const Mat& a) {
  const auto n = a.rows();
  if (n > 1 && a.row(n - 1).head(n - 1).cwiseAbs().maxCoeff() != 0.0) {
    throw ConfigError("plane-preserving linear map needs last row (0, ..., 0, d)");
  }
  if (a(n - 1, n - 1) == 0.0) throw ConfigError("plane-preserving linear map needs d != 0");
  return linear_diffeo(a);
}

/// Nonlinear bijection of the tangential coordinates, x_n untouched.
/// With two or more tangential coordinates: x~_1 += amp * sin(x~_2).
/// With one: x~_1 += |amp| * x~_1 |x~_1|.
inline Diffeo plane_tangential_shear(int dim, double amp) {
  const int m = dim - 1;
  if (m == 0) return identity_diffeo(dim);
  if (m >= 2) {
    return {[amp](const Vec& x) {
              Vec y = x;
              y(0) += amp * std::sin(x(1));
              return y;
            },
            [amp](const Vec& y) {
              Vec x = y;
              x(0) -= amp * std::sin(y(1));
              return x;
            },
            [amp, dim](const Vec& x) {
              Mat j = Mat::Identity(dim, dim);
              j(0, 1) = amp * std::cos(x(1));
              return j;
            }};
  }
  const double b = std::abs(amp);
  return {[b](const Vec& x) {
            Vec y = x;
            y(0) += b * x(0) * std::abs(x(0));
            return y;
          },
          [b](const Vec& y) {
            Vec x = y;
            const double z = std::abs(y(0));
            x(0) = std::copysign(2.0 * z / (1.0 + std::sqrt(1.0 + 4.0 * b * z)), y(0));
            return x;
          },
          [b, dim](const Vec& x) {
            Mat j = Mat::Identity(dim, dim);
            j(0, 0) = 1.0 + 2.0 * b * std::abs(x(0));
            return j;
          }};
}

/// x~ += amp * sin(x_n) * direction. Identity on P but the Jacobian there
/// couples the normal direction into the tangential ones.
inline Diffeo plane_normal_shear(const Vec& direction, double amp) {
  const auto dim = direction.size() + 1;
  return {[=](const Vec& x) {
            Vec y = x;
            y.head(dim - 1) += amp * std::sin(x(dim - 1)) * direction;
            return y;
          },
          [=](const Vec& y) {
            Vec x = y;
            x.head(dim - 1) -= amp * std::sin(y(dim - 1)) * direction;
            return x;
          },
          [=](const Vec& x) {
            Mat j = Mat::Identity(dim, dim);
            j.col(dim - 1).head(dim - 1) = amp * std::cos(x(dim - 1)) * direction;
            return j;
          }};
}

/// x_n *= exp(amp * sin(x~_1)): a position-dependent rescaling of the normal
/// coordinate. In R^1 the factor is the constant exp(amp).
inline Diffeo plane_normal_scaling(int dim, double amp) {
  auto exponent = [amp](const Vec& x) { return x.size() > 1 ? amp * std::sin(x(0)) : amp; };
  return {[=](const Vec& x) {
            Vec y = x;
            y(dim - 1) *= std::exp(exponent(x));
            return y;
          },
          [=](const Vec& y) {
            Vec x = y;
            x(dim - 1) *= std::exp(-exponent(y));
            return x;
          },
          [=](const Vec& x) {
            Mat j = Mat::Identity(dim, dim);
            const double e = std::exp(exponent(x));
            j(dim - 1, dim - 1) = e;
            if (dim > 1) j(dim - 1, 0) = x(dim - 1) * e * amp * std::cos(x(0));
            return j;
          }};
}

}  // namespace slidefield
