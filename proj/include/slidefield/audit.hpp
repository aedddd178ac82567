#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "slidefield/common.hpp"
#include "slidefield/fields.hpp"
#include "slidefield/geometry.hpp"
#include "slidefield/random.hpp"
#include "slidefield/sliding_laws.hpp"

namespace slidefield::audit {

struct SamplerConfig {
  std::uint64_t seed = 1;
  int trials = 1000;
  int dim = 2;
  /// Sampled components have magnitudes in [lo, hi] and a random sign.
  double lo = 0.1;
  double hi = 10.0;

  void validate() const {
    if (trials < 1) throw ConfigError("trials must be at least 1");
    if (dim < 1) throw ConfigError("dim must be at least 1");
    if (!(lo >= 0.0 && lo < hi && std::isfinite(hi))) throw ConfigError("magnitude range needs 0 <= lo < hi");
  }
};

/// One evaluated sample: both sides of the audited identity and the inputs
/// that produced them.
struct Sample {
  std::vector<std::pair<std::string, Vec>> inputs;
  Vec lhs;
  Vec rhs;
  double violation = 0.0;
};

struct Witness {
  std::uint64_t trial = 0;
  Sample sample;
};

struct AuditReport {
  std::string law_name;
  std::string check_name;
  int trials = 0;
  int failures = 0;
  double worst_violation = 0.0;
  double tolerance = 0.0;
  std::vector<Witness> witnesses;  // failing trials in trial order, at most kMaxWitnesses

  bool passed() const { return failures == 0; }
};

constexpr std::size_t kMaxWitnesses = 10;

constexpr double kEquivarianceTol = 1e-8;
constexpr double kHomogeneityTol = 1e-8;
constexpr double kVanishingTol = 1e-8;
constexpr double kLimitTol = 1e-8;
constexpr double kConsistencyTol = 1e-7;
constexpr double kInvarianceTol = 1e-7;
constexpr double kPointwiseTol = 1e-9;
constexpr int kLimitSteps = 40;

inline Vec scalar(double v) { return Vec::Constant(1, v); }

/// Runs `trial_fn` once per trial on an independent sub-stream and reduces
/// the samples in trial order.
inline AuditReport run_trials(std::string law_name, std::string check_name, const SamplerConfig& cfg,
                              double tolerance, const std::function<Sample(Rng&, std::uint64_t)>& trial_fn) {
  cfg.validate();
  AuditReport report{std::move(law_name), std::move(check_name), cfg.trials, 0, 0.0, tolerance, {}};
  for (int t = 0; t < cfg.trials; ++t) {
    const auto trial = static_cast<std::uint64_t>(t);
    Rng rng = Rng::for_trial(cfg.seed, trial);
    Sample sample = trial_fn(rng, trial);
    if (std::isnan(sample.violation)) sample.violation = INFINITY;
    report.worst_violation = std::max(report.worst_violation, sample.violation);
    if (sample.violation > tolerance) {
      ++report.failures;
      if (report.witnesses.size() < kMaxWitnesses) report.witnesses.push_back({trial, std::move(sample)});
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Samplers

struct DomainPoint {
  Vec p;
  double q;
  Vec r;
  double s;
};

/// Point of D. One trial in eight puts q or s exactly on zero.
inline DomainPoint sample_domain_point(Rng& rng, const SamplerConfig& cfg) {
  const int m = cfg.dim - 1;
  DomainPoint d{rng.signed_vector(m, cfg.lo, cfg.hi), rng.signed_magnitude(cfg.lo, cfg.hi),
                rng.signed_vector(m, cfg.lo, cfg.hi), 0.0};
  d.s = -std::copysign(rng.uniform(cfg.lo, cfg.hi), d.q);
  if (rng.index(8) == 0) (rng.coin() ? d.q : d.s) = 0.0;
  if (!in_law_domain(d.q, d.s)) throw std::logic_error("sampler produced a point outside D");
  return d;
}

/// Regular matrix with last row (0, ..., 0, d).
inline Mat sample_plane_matrix(Rng& rng, int dim) {
  Mat a = Mat::Zero(dim, dim);
  for (;;) {
    for (int i = 0; i + 1 < dim; ++i)
      for (int j = 0; j < dim; ++j) a(i, j) = rng.uniform(-2.0, 2.0);
    a(dim - 1, dim - 1) = rng.signed_magnitude(0.5, 2.0);
    if (dim == 1 || std::abs(a.topLeftCorner(dim - 1, dim - 1).determinant()) > 0.1) return a;
  }
}

inline SurfaceChart sample_surface(Rng& rng, int dim) {
  switch (rng.index(3)) {
    case 0: return flat_surface(dim);
    case 1: return tilt_surface(dim, rng.signed_magnitude(0.2, 2.0));
    default: return paraboloid_surface(dim, rng.signed_magnitude(0.1, 1.0));
  }
}

/// Smooth non-constant field c + 0.3 M x + 0.5 sin(x).
inline VectorField sample_smooth_field(Rng& rng, int dim, const SamplerConfig& cfg) {
  const Vec c = rng.signed_vector(dim, cfg.lo, cfg.hi);
  Mat m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
  return [c, m](const Vec& x) { return (c + 0.3 * m * x + 0.5 * x.array().sin().matrix()).eval(); };
}

/// Shifts a field by a constant so its normal component at x equals target.
inline VectorField with_normal_component(VectorField f, const SurfaceChart& s, const Vec& x, double target) {
  const Vec n = normal_at(s, tangential_part(x));
  const Vec shift = (target - f(x).dot(n)) * n;
  return [f = std::move(f), shift](const Vec& y) { return (f(y) + shift).eval(); };
}

struct SurfaceCase {
  PiecewiseField field;
  Vec point;  // on the surface
};

/// Random surface and smooth fields with prescribed normal components at a
/// random surface point.
inline SurfaceCase sample_case_with_normals(Rng& rng, const SamplerConfig& cfg, double lower_normal,
                                            double upper_normal) {
  const int n = cfg.dim;
  SurfaceChart surface = sample_surface(rng, n);
  const Vec x = surface.lift(rng.vector(n - 1, -1.5, 1.5));
  VectorField lower = with_normal_component(sample_smooth_field(rng, n, cfg), surface, x, lower_normal);
  VectorField upper = with_normal_component(sample_smooth_field(rng, n, cfg), surface, x, upper_normal);
  return {PiecewiseField{std::move(surface), std::move(lower), std::move(upper)}, x};
}

/// Point strictly inside the sliding region (attracting or repelling).
inline SurfaceCase sample_sliding_case(Rng& rng, const SamplerConfig& cfg) {
  const double lo = std::max(cfg.lo, 1e-3);
  const double a = rng.signed_magnitude(lo, cfg.hi);
  const double b = -std::copysign(rng.uniform(lo, cfg.hi), a);
  return sample_case_with_normals(rng, cfg, a, b);
}

struct NamedDiffeo {
  std::string name;
  Diffeo map;
};

/// A map of R^n preserving P from the finite catalog used by the audit.
inline NamedDiffeo sample_plane_map(Rng& rng, int dim) {
  switch (rng.index(5)) {
    case 0: return {"translation", plane_translation(rng.vector(dim - 1, -1.0, 1.0))};
    case 1: return {"linear", plane_linear(sample_plane_matrix(rng, dim))};
    case 2: return {"tangential_shear", plane_tangential_shear(dim, rng.signed_magnitude(0.2, 0.8))};
    case 3: return {"normal_shear", plane_normal_shear(rng.vector(dim - 1, -1.0, 1.0), rng.signed_magnitude(0.2, 1.0))};
    default: return {"normal_scaling", plane_normal_scaling(dim, rng.signed_magnitude(0.2, 0.8))};
  }
}

/// Sliding point of a caller-supplied field, by rejection over x~ in [-2, 2].
inline Vec sample_sliding_point(Rng& rng, const PiecewiseField& pf) {
  const int n = pf.surface.dim();
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const Vec x = pf.surface.lift(rng.vector(n - 1, -2.0, 2.0));
    const NormalComponents c = normal_components(pf, x);
    const double margin = 1e-6 * std::max(1.0, std::max(std::abs(c.lower), std::abs(c.upper)));
    const RegionKind kind = classify(c, margin);
    if (kind == RegionKind::AttractingSliding || kind == RegionKind::RepellingSliding) return x;
  }
  throw ConfigError("no sliding point found for the supplied field");
}

// ---------------------------------------------------------------------------
// Single-sample evaluations

/// A (alpha(u1, u2), 0) against (alpha(A u1, A u2), 0).
inline Sample matrix_equivariance_sample(const CharacteristicMap& law, const Mat& a, const Vec& u1, const Vec& u2) {
  const auto n = u1.size();
  Sample out;
  out.inputs = {{"A", Eigen::Map<const Vec>(a.data(), a.size())}, {"u1", u1}, {"u2", u2}};
  out.lhs = a * join(law(u1, u2), 0.0);
  const Vec au1 = a * u1;
  const Vec au2 = a * u2;
  if (!in_law_domain(au1(n - 1), au2(n - 1))) throw DomainError("A u leaves the domain");
  out.rhs = join(law(au1, au2), 0.0);
  out.violation = relative_violation(out.lhs, out.rhs);
  return out;
}

/// Worst of: 0-homogeneity in (q, s), 1-homogeneity in (p, r), additivity
/// in (p, r). The input "subcheck" names which one (0, 1, 2) was worst.
inline Sample homogeneity_sample(const CharacteristicMap& law, const DomainPoint& d, double k, const Vec& p2,
                                 const Vec& r2) {
  const Vec base = law(d.p, d.q, d.r, d.s);
  const std::pair<Vec, Vec> sides[3] = {
      {law(d.p, k * d.q, d.r, k * d.s), base},
      {law(k * d.p, d.q, k * d.r, d.s), k * base},
      {law(d.p + p2, d.q, d.r + r2, d.s), base + law(p2, d.q, r2, d.s)},
  };
  int worst = 0;
  double worst_violation = -1.0;
  for (int i = 0; i < 3; ++i) {
    const double v = relative_violation(sides[i].first, sides[i].second);
    if (v > worst_violation) {
      worst_violation = v;
      worst = i;
    }
  }
  Sample out;
  out.inputs = {{"p", d.p},   {"q", scalar(d.q)},  {"r", d.r},  {"s", scalar(d.s)},
                {"k", scalar(k)}, {"p2", p2}, {"r2", r2}, {"subcheck", scalar(worst)}};
  out.lhs = sides[worst].first;
  out.rhs = sides[worst].second;
  out.violation = worst_violation;
  return out;
}

/// alpha(c1 (k, l), c2 (k, l)) against 0.
inline Sample linear_dependence_sample(const CharacteristicMap& law, const Vec& k, double l, double c1, double c2) {
  const Vec u1 = c1 * join(k, l);
  const Vec u2 = c2 * join(k, l);
  Sample out;
  out.inputs = {{"k", k}, {"l", scalar(l)}, {"c1", scalar(c1)}, {"c2", scalar(c2)}, {"u1", u1}, {"u2", u2}};
  out.lhs = law(u1, u2);
  out.rhs = Vec::Zero(out.lhs.size());
  out.violation = relative_violation(out.lhs, out.rhs);
  return out;
}

/// alpha(p, e_m, p, -rho e_m) against p along e_m = 2^-m, m = 1..40. The
/// comparison at m = 40 decides; "deviation_first" records |alpha - p| at m = 1.
inline Sample continuous_limit_sample(const CharacteristicMap& law, const Vec& p, double rho) {
  Sample out;
  double first = 0.0;
  for (int m = 1; m <= kLimitSteps; ++m) {
    const double eps = std::ldexp(1.0, -m);
    const Vec value = law(p, eps, p, -rho * eps);
    if (m == 1) first = (value - p).norm();
    if (m == kLimitSteps) {
      out.inputs = {{"p", p},
                    {"rho", scalar(rho)},
                    {"q_m", scalar(eps)},
                    {"s_m", scalar(-rho * eps)},
                    {"deviation_first", scalar(first)}};
      out.lhs = value;
      out.rhs = p;
    }
  }
  out.violation = relative_violation(out.lhs, out.rhs);
  return out;
}

/// D Phi S(X1, X2)(x) against S(D Phi X1, D Phi X2)(Phi(x)) for Phi mapping
/// the surface to itself.
inline Sample parametrization_sample(const GeneratingMap& gm, const PiecewiseField& pf, const Diffeo& phi,
                                     const Vec& x) {
  const Vec y = phi.forward(x);
  const PiecewiseField moved = pushforward(phi, pf, pf.surface);
  Sample out;
  out.inputs = {{"x", x}, {"phi_x", y}};
  out.lhs = phi.jacobian(x) * generate(gm, pf, x).vec;
  out.rhs = generate(gm, moved, pf.surface.project(y)).vec;
  out.violation = relative_violation(out.lhs, out.rhs);
  return out;
}

struct RegionPredicates {
  int product_sign;
  bool equal_normals;
};

inline RegionPredicates region_predicates(NormalComponents c, double tol) {
  const double scale = std::max({1.0, std::abs(c.lower), std::abs(c.upper)});
  const double product = c.lower * c.upper;
  const int sign = std::abs(product) <= tol * scale * scale ? 0 : (product > 0.0 ? 1 : -1);
  return {sign, std::abs(c.lower - c.upper) <= tol * scale};
}

/// Sign of X1N X2N and the predicate X1N == X2N at x, compared with the same
/// predicates of the pushed-forward field at Phi(x). Violation is 1 on a
/// mismatch and 0 otherwise.
inline Sample region_invariance_sample(const PiecewiseField& pf, const PiecewiseField& image, const Diffeo& phi,
                                       const Vec& x) {
  const Vec y = image.surface.project(phi.forward(x));
  const NormalComponents before = normal_components(pf, x);
  const NormalComponents after = normal_components(image, y);
  const RegionPredicates pb = region_predicates(before, kInvarianceTol);
  const RegionPredicates pa = region_predicates(after, kInvarianceTol);
  Sample out;
  out.inputs = {{"x", x}, {"phi_x", y}};
  out.lhs = Vec(2);
  out.lhs << pb.product_sign, pb.equal_normals ? 1.0 : 0.0;
  out.rhs = Vec(2);
  out.rhs << pa.product_sign, pa.equal_normals ? 1.0 : 0.0;
  out.violation = (pb.product_sign == pa.product_sign && pb.equal_normals == pa.equal_normals) ? 0.0 : 1.0;
  return out;
}

/// Generating map outputs at x for two fields that agree at x only.
inline Sample pointwise_sample(const GeneratingMap& gm, const PiecewiseField& pf, const PiecewiseField& other,
                               const Vec& x) {
  Sample out;
  out.inputs = {{"x", x}};
  out.lhs = generate(gm, pf, x).vec;
  out.rhs = generate(gm, other, x).vec;
  out.violation = relative_violation(out.lhs, out.rhs);
  return out;
}

/// Adds |y - x|^2 W + gap(y) V to each side: different fields with the same
/// values at x.
inline PiecewiseField perturb_away_from(const PiecewiseField& pf, const Vec& x, Rng& rng, const SamplerConfig& cfg) {
  const int n = pf.surface.dim();
  auto perturb = [&](VectorField f) -> VectorField {
    const Vec w = rng.signed_vector(n, cfg.lo, cfg.hi);
    const Vec v = rng.signed_vector(n, cfg.lo, cfg.hi);
    return [f = std::move(f), w, v, x, s = pf.surface](const Vec& y) {
      return (f(y) + (y - x).squaredNorm() * w + s.gap(y) * v).eval();
    };
  };
  return {pf.surface, perturb(pf.lower), perturb(pf.upper)};
}

// ---------------------------------------------------------------------------
// Randomized checks

inline AuditReport check_matrix_equivariance(const CharacteristicMap& law, const SamplerConfig& cfg) {
  return run_trials(law.name(), "matrix-equivariance", cfg, kEquivarianceTol, [&](Rng& rng, std::uint64_t) {
    for (;;) {
      const DomainPoint d = sample_domain_point(rng, cfg);
      const Mat a = sample_plane_matrix(rng, cfg.dim);
      try {
        return matrix_equivariance_sample(law, a, join(d.p, d.q), join(d.r, d.s));
      } catch (const DomainError&) {
        // (A u1, A u2) left D; draw again.
      }
    }
  });
}

inline AuditReport check_homogeneity_and_linearity(const CharacteristicMap& law, const SamplerConfig& cfg) {
  return run_trials(law.name(), "homogeneity-linearity", cfg, kHomogeneityTol, [&](Rng& rng, std::uint64_t) {
    const DomainPoint d = sample_domain_point(rng, cfg);
    const double k = rng.uniform(0.1, 10.0);
    const Vec p2 = rng.signed_vector(cfg.dim - 1, cfg.lo, cfg.hi);
    const Vec r2 = rng.signed_vector(cfg.dim - 1, cfg.lo, cfg.hi);
    return homogeneity_sample(law, d, k, p2, r2);
  });
}

inline AuditReport check_linear_dependence_vanishing(const CharacteristicMap& law, const SamplerConfig& cfg) {
  return run_trials(law.name(), "linear-dependence", cfg, kVanishingTol, [&](Rng& rng, std::uint64_t) {
    const Vec k = rng.signed_vector(cfg.dim - 1, cfg.lo, cfg.hi);
    const double l = rng.uniform(cfg.lo, cfg.hi);
    double c1 = rng.signed_magnitude(0.1, 2.0);
    double c2 = -std::copysign(rng.uniform(0.1, 2.0), c1);
    if (rng.index(8) == 0) (rng.coin() ? c1 : c2) = 0.0;
    return linear_dependence_sample(law, k, l, c1, c2);
  });
}

inline AuditReport check_continuous_limit(const CharacteristicMap& law, const SamplerConfig& cfg) {
  return run_trials(law.name(), "continuous-limit", cfg, kLimitTol, [&](Rng& rng, std::uint64_t) {
    const Vec p = rng.signed_vector(cfg.dim - 1, cfg.lo, cfg.hi);
    const double rho = 2.0 * (1.0 - rng.unit());
    return continuous_limit_sample(law, p, rho);
  });
}

/// With a field, sliding points are drawn from it; without, every trial
/// draws its own surface, field and point.
inline AuditReport check_parametrization_consistency(const CharacteristicMap& law,
                                                     const std::optional<PiecewiseField>& pf,
                                                     const SamplerConfig& cfg) {
  const GeneratingMap gm{law};
  return run_trials(law.name(), "parametrization-consistency", cfg, kConsistencyTol, [&](Rng& rng, std::uint64_t) {
    SurfaceCase c = pf ? SurfaceCase{*pf, sample_sliding_point(rng, *pf)} : sample_sliding_case(rng, cfg);
    NamedDiffeo bar = sample_plane_map(rng, cfg.dim);
    const Diffeo phi = conjugate_through_charts(c.field.surface, c.field.surface, bar.map);
    Sample s = parametrization_sample(gm, c.field, phi, c.point);
    s.inputs.emplace_back(bar.name, Vec());
    return s;
  });
}

/// Classification predicates under Psi_to o bar o Psi_from^{-1}, which maps
/// the field's surface onto a random catalog surface. Normal components are
/// drawn with independent signs and, one trial in eight, equal.
inline AuditReport check_sliding_region_invariance(const std::optional<PiecewiseField>& pf, const SamplerConfig& cfg,
                                                   const std::string& law_name = "-") {
  return run_trials(law_name, "sliding-region-invariance", cfg, 0.0, [&](Rng& rng, std::uint64_t) {
    SurfaceCase c = [&]() -> SurfaceCase {
      if (pf) return {*pf, pf->surface.lift(rng.vector(cfg.dim - 1, -2.0, 2.0))};
      const double lo = std::max(cfg.lo, 1e-3);
      const double a = rng.signed_magnitude(lo, cfg.hi);
      const double b = rng.index(8) == 0 ? a : rng.signed_magnitude(lo, cfg.hi);
      return sample_case_with_normals(rng, cfg, a, b);
    }();
    SurfaceChart target = sample_surface(rng, cfg.dim);
    NamedDiffeo bar = sample_plane_map(rng, cfg.dim);
    const Diffeo phi = conjugate_through_charts(c.field.surface, target, bar.map);
    const PiecewiseField image = pushforward(phi, c.field, std::move(target));
    Sample s = region_invariance_sample(c.field, image, phi, c.point);
    s.inputs.emplace_back(bar.name, Vec());
    return s;
  });
}

inline AuditReport check_pointwise(const CharacteristicMap& law, const SamplerConfig& cfg) {
  const GeneratingMap gm{law};
  return run_trials(law.name(), "pointwise", cfg, kPointwiseTol, [&](Rng& rng, std::uint64_t) {
    SurfaceCase c = sample_sliding_case(rng, cfg);
    const PiecewiseField other = perturb_away_from(c.field, c.point, rng, cfg);
    return pointwise_sample(gm, c.field, other, c.point);
  });
}

inline std::vector<std::string> check_names() {
  return {"matrix-equivariance", "homogeneity-linearity",       "linear-dependence", "continuous-limit",
          "parametrization-consistency", "sliding-region-invariance", "pointwise"};
}

inline AuditReport run_check(const std::string& check, const CharacteristicMap& law, const SamplerConfig& cfg) {
  if (check == "matrix-equivariance") return check_matrix_equivariance(law, cfg);
  if (check == "homogeneity-linearity") return check_homogeneity_and_linearity(law, cfg);
  if (check == "linear-dependence") return check_linear_dependence_vanishing(law, cfg);
  if (check == "continuous-limit") return check_continuous_limit(law, cfg);
  if (check == "parametrization-consistency") return check_parametrization_consistency(law, std::nullopt, cfg);
  if (check == "sliding-region-invariance") return check_sliding_region_invariance(std::nullopt, cfg, law.name());
  if (check == "pointwise") return check_pointwise(law, cfg);
  throw ConfigError("unknown check '" + check + "'");
}

// ---------------------------------------------------------------------------
// JSON

/// Non-finite values are written as null.
inline nlohmann::ordered_json number_json(double v) {
  return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

inline nlohmann::ordered_json vec_json(const Vec& v) {
  auto arr = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(number_json(v(i)));
  return arr;
}

inline nlohmann::ordered_json to_json(const AuditReport& r) {
  nlohmann::ordered_json j;
  j["law"] = r.law_name;
  j["check"] = r.check_name;
  j["trials"] = r.trials;
  j["failures"] = r.failures;
  j["worst_violation"] = number_json(r.worst_violation);
  j["tolerance"] = r.tolerance;
  auto witnesses = nlohmann::ordered_json::array();
  for (const Witness& w : r.witnesses) {
    nlohmann::ordered_json wj;
    wj["trial"] = w.trial;
    nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
    for (const auto& [name, value] : w.sample.inputs) inputs[name] = vec_json(value);
    wj["inputs"] = std::move(inputs);
    wj["lhs"] = vec_json(w.sample.lhs);
    wj["rhs"] = vec_json(w.sample.rhs);
    wj["violation"] = number_json(w.sample.violation);
    witnesses.push_back(std::move(wj));
  }
  j["witnesses"] = std::move(witnesses);
  return j;
}

}  // namespace slidefield::audit
