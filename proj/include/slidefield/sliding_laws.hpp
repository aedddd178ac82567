#pragma once

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "slidefield/common.hpp"
#include "slidefield/fields.hpp"
#include "slidefield/geometry.hpp"

namespace slidefield {

/// Membership in D = {(p, q, r, s) | q s <= 0, q != s}.
inline bool in_law_domain(double q, double s) { return q * s <= 0.0 && q != s; }

/// A characteristic map alpha(p, q, r, s) on D, with p, r in R^{n-1}.
///
/// Arguments are the chart-coordinate field values u1 = (p, q) and
/// u2 = (r, s); the result is the tangential part of the sliding vector in
/// chart coordinates.
class CharacteristicMap {
 public:
  using Kernel = std::function<Vec(const Vec& p, double q, const Vec& r, double s)>;

  CharacteristicMap(std::string name, Kernel kernel) : name_(std::move(name)), kernel_(std::move(kernel)) {}

  const std::string& name() const { return name_; }

  Vec operator()(const Vec& p, double q, const Vec& r, double s) const {
    if (!in_law_domain(q, s)) {
      std::ostringstream msg;
      msg << "characteristic map '" << name_ << "' evaluated off its domain (q = " << q << ", s = " << s << ")";
      throw DomainError(msg.str());
    }
    return kernel_(p, q, r, s);
  }

  /// Split form alpha(u1, u2).
  Vec operator()(const Vec& u1, const Vec& u2) const {
    const auto m = u1.size() - 1;
    return (*this)(u1.head(m), u1(m), u2.head(m), u2(m));
  }

  /// Raw kernel without the domain check. Used for intermediate Runge-Kutta
  /// stages, which may sit marginally past a sliding exit.
  Vec evaluate_unchecked(const Vec& p, double q, const Vec& r, double s) const { return kernel_(p, q, r, s); }

 private:
  std::string name_;
  Kernel kernel_;
};

/// alpha = s/(s-q) p + q/(q-s) r, evaluated as p + q/(q-s) (r - p) so that
/// p == r returns p exactly.
inline Vec filippov_alpha(const Vec& p, double q, const Vec& r, double s) {
  if (!in_law_domain(q, s)) throw DomainError("filippov_alpha: (q, s) outside the domain");
  return p + (q / (q - s)) * (r - p);
}

inline Vec mean_alpha(const Vec& p, double q, const Vec& r, double s) {
  if (!in_law_domain(q, s)) throw DomainError("mean_alpha: (q, s) outside the domain");
  return 0.5 * (p + r);
}

inline CharacteristicMap filippov_law() {
  return CharacteristicMap("filippov", [](const Vec& p, double q, const Vec& r, double s) {
    return (p + (q / (q - s)) * (r - p)).eval();
  });
}

inline CharacteristicMap mean_law() {
  return CharacteristicMap("mean", [](const Vec& p, double, const Vec& r, double) { return (0.5 * (p + r)).eval(); });
}

/// c times the Filippov law. Keeps homogeneity and matrix equivariance but
/// breaks the continuous-case limit for c != 1.
inline CharacteristicMap scaled_filippov_law(double c) {
  if (c == 1.0 || !std::isfinite(c)) throw ConfigError("scaled_filippov needs a finite factor c != 1");
  std::ostringstream name;
  name.precision(17);
  name << "scaled_filippov(" << c << ")";
  return CharacteristicMap(name.str(), [c](const Vec& p, double q, const Vec& r, double s) {
    return (c * (p + (q / (q - s)) * (r - p))).eval();
  });
}

inline std::vector<std::string> law_names() { return {"filippov", "mean", "scaled_filippov"}; }

/// Looks a law up by name: "filippov", "mean", "scaled_filippov" (c = 2) or
/// "scaled_filippov(c)".
inline CharacteristicMap law_from_name(const std::string& name) {
  if (name == "filippov") return filippov_law();
  if (name == "mean") return mean_law();
  if (name == "scaled_filippov") return scaled_filippov_law(2.0);
  const std::string prefix = "scaled_filippov(";
  if (name.size() > prefix.size() + 1 && name.compare(0, prefix.size(), prefix) == 0 && name.back() == ')') {
    const std::string arg = name.substr(prefix.size(), name.size() - prefix.size() - 1);
    char* end = nullptr;
    const double c = std::strtod(arg.c_str(), &end);
    if (end != arg.c_str() && *end == '\0') return scaled_filippov_law(c);
  }
  throw ConfigError("unknown law '" + name + "'");
}

/// Generating map S built from a characteristic map through the chart Psi.
struct GeneratingMap {
  CharacteristicMap law;
};

/// Chart-coordinate field values u_i = (D Psi^{-1})_x X_i(x).
struct ChartPair {
  Vec lower;
  Vec upper;
};

inline ChartPair pull_back_to_chart(const PiecewiseField& pf, const Vec& x) {
  const Mat jac = psi_sigma_inverse_diffeo(pf.surface).jacobian(x);
  return {jac * pf.lower(x), jac * pf.upper(x)};
}

/// Filippov coefficient lambda = X2N / (X2N - X1N) of X1.
inline double filippov_coefficient(NormalComponents c) { return c.upper / (c.upper - c.lower); }

/// F = X2N/(X2N-X1N) X1 + X1N/(X1N-X2N) X2 evaluated directly in R^n.
inline TangentVector filippov_direct(const PiecewiseField& pf, const Vec& x, double tol = kDefaultRegionTol) {
  const NormalComponents c = normal_components(pf, x);
  if (!is_sliding(classify(c, tol))) throw DomainError("not in sliding region");
  const Vec x1 = pf.lower(x);
  const Vec x2 = pf.upper(x);
  const double mu = c.lower / (c.lower - c.upper);
  return {x, x1 + mu * (x2 - x1)};
}

/// S(X1, X2)(x) = (D Psi)_{Psi^{-1}(x)} (alpha(u1, u2), 0).
///
/// On a tangency boundary the pulled-back normal component that classify
/// treated as zero is set to zero, so that roundoff cannot push (q, s) out
/// of the law's domain.
inline TangentVector generate(const GeneratingMap& gm, const PiecewiseField& pf, const Vec& x,
                              double tol = kDefaultRegionTol) {
  const NormalComponents c = normal_components(pf, x);
  const RegionKind kind = classify(c, tol);
  if (!is_sliding(kind)) throw DomainError("not in sliding region");

  const int n = pf.surface.dim();
  ChartPair u = pull_back_to_chart(pf, x);
  if (kind == RegionKind::TangencyBoundary && u.lower(n - 1) * u.upper(n - 1) > 0.0) {
    if (std::abs(c.lower) <= tol) u.lower(n - 1) = 0.0;
    if (std::abs(c.upper) <= tol) u.upper(n - 1) = 0.0;
  }
  const Vec alpha = gm.law(u.lower, u.upper);

  const Diffeo psi = psi_sigma_diffeo(pf.surface);
  const Vec z = psi.inverse(x);
  return {x, psi.jacobian(z) * join(alpha, 0.0)};
}

}  // namespace slidefield
