#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "slidefield/common.hpp"
#include "slidefield/fields.hpp"
#include "slidefield/geometry.hpp"
#include "slidefield/sliding_laws.hpp"

namespace slidefield {

enum class Mode { FreeG1, FreeG2, Sliding };

enum class EventKind { SurfaceHit, SlidingEntry, SlidingExit, CrossingThrough, SingularStop, TimeEnd };

inline std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::FreeG1: return "FreeG1";
    case Mode::FreeG2: return "FreeG2";
    case Mode::Sliding: return "Sliding";
  }
  return "?";
}

inline std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::SurfaceHit: return "SurfaceHit";
    case EventKind::SlidingEntry: return "SlidingEntry";
    case EventKind::SlidingExit: return "SlidingExit";
    case EventKind::CrossingThrough: return "CrossingThrough";
    case EventKind::SingularStop: return "SingularStop";
    case EventKind::TimeEnd: return "TimeEnd";
  }
  return "?";
}

struct EventRecord {
  double time;
  Vec state;
  EventKind kind;
  NormalComponents detail;  // (X1N, X2N) at the event
};

struct Segment {
  Mode mode;
  std::vector<double> times;
  std::vector<Vec> states;
};

struct Trajectory {
  std::vector<Segment> segments;
  std::vector<EventRecord> events;

  bool empty() const { return segments.empty(); }
  Mode final_mode() const { return segments.back().mode; }
  const Vec& final_state() const { return segments.back().states.back(); }
  double final_time() const { return segments.back().times.back(); }

  std::vector<const EventRecord*> events_of(EventKind kind) const {
    std::vector<const EventRecord*> out;
    for (const auto& e : events)
      if (e.kind == kind) out.push_back(&e);
    return out;
  }
};

struct IntegratorOptions {
  double step = 1e-2;
  double t_end = 1.0;
  /// Relative width of the bisection bracket for event times.
  double event_tol = 1e-10;
  /// A start point this close to the surface is treated as on it.
  double sliding_tol = 1e-7;
  /// Band used by classify at surface events.
  double region_tol = kDefaultRegionTol;
  int max_events = 1000;

  void validate(double t0) const {
    if (!(step > 0.0) || !std::isfinite(step)) throw ConfigError("step must be positive");
    if (!(event_tol > 0.0) || !(sliding_tol > 0.0) || !(region_tol > 0.0))
      throw ConfigError("tolerances must be positive");
    if (max_events < 1) throw ConfigError("max_events must be at least 1");
    if (!(t_end >= t0) || !std::isfinite(t_end)) throw ConfigError("t_end must not precede t0");
  }
};

/// Integration failure. Carries the trajectory computed up to the failure.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, Trajectory partial) : Error(what), partial_(std::move(partial)) {}
  const Trajectory& partial() const { return partial_; }

 private:
  Trajectory partial_;
};

/// Classical fourth-order Runge-Kutta step.
inline Vec step_free(const VectorField& field, const Vec& x, double h) {
  const Vec k1 = field(x);
  const Vec k2 = field(x + 0.5 * h * k1);
  const Vec k3 = field(x + 0.5 * h * k2);
  const Vec k4 = field(x + h * k3);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

namespace detail {

/// Shrinks [lo, hi] with !happened(lo), happened(hi) to width rel_tol * (hi - lo).
inline std::pair<double, double> bisect(const std::function<bool(double)>& happened, double lo, double hi,
                                        double rel_tol) {
  const double width = rel_tol * (hi - lo);
  while (hi - lo > width) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (happened(mid) ? hi : lo) = mid;
  }
  return {lo, hi};
}

}  // namespace detail

/// Root of f in [lo, hi] by bisection on a sign change, to a bracket of
/// width tol * (hi - lo). Returns the bracket midpoint.
inline double locate_event(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-10) {
  const double f_lo = f(lo);
  const double f_hi = f(hi);
  if (!(f_lo * f_hi < 0.0)) throw DomainError("locate_event: no sign change on the bracket");
  const bool lo_negative = f_lo < 0.0;
  const auto [a, b] = detail::bisect(
      [&](double t) {
        const double v = f(t);
        return v == 0.0 || (v < 0.0) != lo_negative;
      },
      lo, hi, tol);
  return 0.5 * (a + b);
}

namespace detail {

class HybridRun {
 public:
  HybridRun(const PiecewiseField& pf, const GeneratingMap& law, const IntegratorOptions& opts)
      : pf_(pf), law_(law), opts_(opts), n_(pf.surface.dim()) {}

  Trajectory run(const Vec& x0, double t0) {
    if (x0.size() != n_) throw ConfigError("initial state has the wrong dimension");
    opts_.validate(t0);
    if (opts_.t_end == t0) return std::move(traj_);

    t_ = t0;
    x_ = x0;
    require_finite();
    bool running = true;
    if (std::abs(pf_.surface.gap(x_)) <= opts_.sliding_tol) {
      x_ = pf_.surface.project(x_);
      event(EventKind::SurfaceHit, feet_normals());
      running = leave_surface(std::nullopt);
    } else {
      begin_segment(pf_.surface.gap(x_) < 0.0 ? Mode::FreeG1 : Mode::FreeG2);
    }

    try {
      while (running && t_ < opts_.t_end) {
        running = mode_ == Mode::Sliding ? slide() : fly();
      }
    } catch (const DomainError& e) {
      fail(e.what());
    }
    if (running) event(EventKind::TimeEnd, feet_normals());
    return std::move(traj_);
  }

 private:
  // Step length that lands exactly on t_end.
  double next_step() const { return std::min(opts_.step, opts_.t_end - t_); }

  void advance(double h, Vec x) {
    t_ = (h == opts_.t_end - t_) ? opts_.t_end : t_ + h;
    x_ = std::move(x);
    require_finite();
    record();
  }

  void require_finite() {
    if (!x_.allFinite() || !std::isfinite(t_)) fail("non-finite state during integration");
  }

  [[noreturn]] void fail(const std::string& what) { throw IntegrationError(what, std::move(traj_)); }

  void begin_segment(Mode mode) {
    mode_ = mode;
    if (!traj_.segments.empty() && traj_.segments.back().mode == mode) return;
    traj_.segments.push_back({mode, {}, {}});
    record();
  }

  void record() {
    Segment& seg = traj_.segments.back();
    seg.times.push_back(t_);
    seg.states.push_back(x_);
  }

  void event(EventKind kind, NormalComponents detail) {
    traj_.events.push_back({t_, x_, kind, detail});
    if (kind != EventKind::TimeEnd && ++event_count_ > opts_.max_events) fail("maximum number of events exceeded");
  }

  // X_i(x) . n(x~) without requiring x to be on the surface.
  NormalComponents feet_normals() const {
    const Vec n = normal_at(pf_.surface, tangential_part(x_));
    return {pf_.lower(x_).dot(n), pf_.upper(x_).dot(n)};
  }

  // Chooses the continuation at a surface point. Returns false on halt.
  bool leave_surface(std::optional<Mode> arriving) {
    const NormalComponents c = normal_components(pf_, x_);
    const double tol = opts_.region_tol;
    const RegionKind kind = classify(c, tol);
    const bool transversal = std::max(std::abs(c.lower), std::abs(c.upper)) > tol;
    if (kind == RegionKind::SingularEqualNormals && transversal) {
      // Equal, non-zero normal components: both sides push the same way.
      event(EventKind::CrossingThrough, c);
      begin_segment(c.lower + c.upper > 0.0 ? Mode::FreeG2 : Mode::FreeG1);
      return true;
    }
    if (kind == RegionKind::SingularEqualNormals) {
      if (!arriving) begin_segment(Mode::Sliding);
      event(EventKind::SingularStop, c);
      return false;
    }
    const bool slides = kind == RegionKind::AttractingSliding || kind == RegionKind::RepellingSliding ||
                        (kind == RegionKind::TangencyBoundary && (c.lower > tol || c.upper < -tol));
    if (slides) {
      attracting_ = kind != RegionKind::RepellingSliding;
      event(EventKind::SlidingEntry, c);
      begin_segment(Mode::Sliding);
      return true;
    }
    // Crossing, or a tangency where the non-zero side points away.
    const bool upward = kind == RegionKind::Crossing ? c.lower > 0.0 : c.upper > tol;
    event(EventKind::CrossingThrough, c);
    begin_segment(upward ? Mode::FreeG2 : Mode::FreeG1);
    return true;
  }

  bool fly() {
    const Mode mode = mode_;
    const VectorField& field = mode == Mode::FreeG1 ? pf_.lower : pf_.upper;
    const double g0 = pf_.surface.gap(x_);
    const auto crossed = [&](double g) {
      if (g == 0.0) return g0 != 0.0;
      return mode == Mode::FreeG1 ? g > 0.0 : g < 0.0;
    };

    const double h = next_step();
    Vec next = step_free(field, x_, h);
    if (!next.allFinite()) fail("non-finite state during free flight");
    if (!crossed(pf_.surface.gap(next))) {
      advance(h, std::move(next));
      return true;
    }

    const Vec start = x_;
    const auto [lo, hi] = bisect(
        [&](double tau) { return crossed(pf_.surface.gap(step_free(field, start, tau))); }, 0.0, h, opts_.event_tol);
    const double tau = 0.5 * (lo + hi);
    t_ += tau;
    x_ = pf_.surface.project(step_free(field, start, tau));
    require_finite();
    record();
    event(EventKind::SurfaceHit, normal_components(pf_, x_));
    return leave_surface(mode);
  }

  // Tangential velocity in chart coordinates at z~.
  Vec chart_velocity(const Vec& z) const {
    const ChartPair u = pull_back_to_chart(pf_, pf_.surface.lift(z));
    const auto m = n_ - 1;
    const double q = u.lower(m);
    const double s = u.upper(m);
    if (q == s) throw DomainError("equal normal components during sliding");
    return law_.law.evaluate_unchecked(u.lower.head(m), q, u.upper.head(m), s);
  }

  bool exited(const NormalComponents& c) const {
    return attracting_ ? (c.lower <= 0.0 || c.upper >= 0.0) : (c.lower >= 0.0 || c.upper <= 0.0);
  }

  bool slide() {
    const auto reduced = [this](const Vec& z) { return chart_velocity(z); };
    const Vec z0 = tangential_part(x_);
    const double h = next_step();
    Vec z1 = step_free(reduced, z0, h);
    if (!z1.allFinite()) fail("non-finite state during sliding");

    Vec x1 = pf_.surface.lift(z1);
    if (!exited(normal_components(pf_, x1))) {
      advance(h, std::move(x1));
      return true;
    }

    const auto [lo, hi] = bisect(
        [&](double tau) { return exited(normal_components(pf_, pf_.surface.lift(step_free(reduced, z0, tau)))); },
        0.0, h, opts_.event_tol);
    t_ += hi;
    x_ = pf_.surface.lift(step_free(reduced, z0, hi));
    require_finite();
    record();
    const NormalComponents c = normal_components(pf_, x_);
    event(EventKind::SlidingExit, c);
    // Leave into the region whose field points away from the surface.
    const bool to_lower = attracting_ ? c.lower <= 0.0 : c.upper <= 0.0;
    begin_segment(to_lower ? Mode::FreeG1 : Mode::FreeG2);
    return true;
  }

  const PiecewiseField& pf_;
  const GeneratingMap& law_;
  IntegratorOptions opts_;
  int n_;

  Trajectory traj_;
  Mode mode_ = Mode::FreeG1;
  double t_ = 0.0;
  Vec x_;
  bool attracting_ = true;
  int event_count_ = 0;
};

}  // namespace detail

/// Event-driven integration of a piecewise field with sliding governed by `law`.
///
/// Free flight uses fixed-step RK4. Surface crossings of the gap function are
/// bisected on a re-integrated sub-step, the state is projected onto the
/// surface, and the point is classified. Sliding motion is integrated in
/// chart coordinates on P and mapped back through Psi, so sliding states lie
/// on the surface up to roundoff. Sliding ends when X1N or X2N changes sign.
inline Trajectory integrate(const PiecewiseField& pf, const GeneratingMap& law, const Vec& x0, double t0,
                            const IntegratorOptions& opts) {
  return detail::HybridRun(pf, law, opts).run(x0, t0);
}

}  // namespace slidefield
