#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "slidefield/common.hpp"
#include "slidefield/fields.hpp"
#include "slidefield/geometry.hpp"
#include "slidefield/integrator.hpp"
#include "slidefield/sliding_laws.hpp"

namespace slidefield {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kScenarioSchema = "slidefield.scenario/1";

/// A simulation run as read from a JSON config file.
struct ScenarioConfig {
  std::string scenario;
  std::map<std::string, double> params;
  std::vector<double> x0;
  double t0 = 0.0;
  double t_end = 0.0;
  double step = 0.0;
  std::string law = "filippov";
  std::uint64_t seed = 0;
  std::optional<double> event_tol;
  std::optional<double> sliding_tol;
  std::optional<double> region_tol;
  std::optional<int> max_events;

  bool operator==(const ScenarioConfig&) const = default;

  IntegratorOptions integrator_options() const {
    IntegratorOptions o;
    o.step = step;
    o.t_end = t_end;
    if (event_tol) o.event_tol = *event_tol;
    if (sliding_tol) o.sliding_tol = *sliding_tol;
    if (region_tol) o.region_tol = *region_tol;
    if (max_events) o.max_events = *max_events;
    return o;
  }

  Vec initial_state() const { return Eigen::Map<const Vec>(x0.data(), static_cast<Eigen::Index>(x0.size())); }
};

/// Forced Coulomb friction, autonomized with a clock: state (theta, v),
/// theta' = 1, v' = A cos(omega theta) - f sgn(v). Surface v = 0.
inline PiecewiseField scenario_friction(double f, double amplitude, double omega) {
  if (!(f > 0.0)) throw ConfigError("friction coefficient f must be positive");
  auto forcing = [amplitude, omega](const Vec& x) { return amplitude * std::cos(omega * x(0)); };
  return {flat_surface(2),
          [forcing, f](const Vec& x) {
            Vec v(2);
            v << 1.0, forcing(x) + f;
            return v;
          },
          [forcing, f](const Vec& x) {
            Vec v(2);
            v << 1.0, forcing(x) - f;
            return v;
          }};
}

/// Constant fields over the plane x_n = slope * x_1.
inline PiecewiseField scenario_constant_tilt(double slope, const Vec& lower, const Vec& upper) {
  if (lower.size() != upper.size() || lower.size() < 1) throw ConfigError("constant fields need equal dimension");
  return {tilt_surface(static_cast<int>(lower.size()), slope), constant_field(lower), constant_field(upper)};
}

/// Constant fields over the paraboloid x_n = curvature * |x~|^2.
inline PiecewiseField scenario_constant_paraboloid(double curvature, const Vec& lower, const Vec& upper) {
  if (lower.size() != upper.size() || lower.size() < 1) throw ConfigError("constant fields need equal dimension");
  return {paraboloid_surface(static_cast<int>(lower.size()), curvature), constant_field(lower),
          constant_field(upper)};
}

inline std::vector<std::string> scenario_names() { return {"friction", "constant_tilt", "constant_paraboloid"}; }

namespace detail {

/// Parameter names a scenario requires for state dimension n.
inline std::vector<std::string> required_params(const std::string& scenario, std::size_t n) {
  if (scenario == "friction") return {"f", "A", "omega"};
  std::vector<std::string> names;
  if (scenario == "constant_tilt") names.push_back("slope");
  else if (scenario == "constant_paraboloid") names.push_back("curvature");
  else throw ConfigError("unknown scenario '" + scenario + "'");
  for (const char* side : {"X1_", "X2_"})
    for (std::size_t i = 1; i <= n; ++i) names.push_back(side + std::to_string(i));
  return names;
}

inline Vec constant_from_params(const std::map<std::string, double>& params, const std::string& side, std::size_t n) {
  Vec v(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) v(static_cast<Eigen::Index>(i)) = params.at(side + std::to_string(i + 1));
  return v;
}

}  // namespace detail

/// Checks the catalog constraints: known scenario, complete parameters,
/// matching dimension, positive step, t_end >= t0.
inline void validate(const ScenarioConfig& cfg) {
  if (cfg.x0.empty()) throw ConfigError("x0 must be non-empty");
  if (cfg.scenario == "friction" && cfg.x0.size() != 2) throw ConfigError("friction scenario needs a 2-dimensional x0");
  const auto required = detail::required_params(cfg.scenario, cfg.x0.size());
  const std::set<std::string> wanted(required.begin(), required.end());
  for (const auto& name : required)
    if (!cfg.params.contains(name)) throw ConfigError("missing parameter '" + name + "'");
  for (const auto& [name, value] : cfg.params) {
    if (!wanted.contains(name)) throw ConfigError("unexpected parameter '" + name + "'");
    if (!std::isfinite(value)) throw ConfigError("parameter '" + name + "' is not finite");
  }
  if (!(cfg.step > 0.0)) throw ConfigError("step must be positive");
  if (!(cfg.t_end >= cfg.t0)) throw ConfigError("t_end must not precede t0");
  law_from_name(cfg.law);
  cfg.integrator_options().validate(cfg.t0);
}

inline PiecewiseField build_scenario(const ScenarioConfig& cfg) {
  validate(cfg);
  const auto& p = cfg.params;
  const auto n = cfg.x0.size();
  if (cfg.scenario == "friction") return scenario_friction(p.at("f"), p.at("A"), p.at("omega"));
  const Vec lower = detail::constant_from_params(p, "X1_", n);
  const Vec upper = detail::constant_from_params(p, "X2_", n);
  if (cfg.scenario == "constant_tilt") return scenario_constant_tilt(p.at("slope"), lower, upper);
  return scenario_constant_paraboloid(p.at("curvature"), lower, upper);
}

// ---------------------------------------------------------------------------
// JSON

inline ScenarioConfig parse_config(const nlohmann::json& j) {
  try {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    if (j.value("schema", std::string()) != kScenarioSchema)
      throw ConfigError(std::string("config schema must be '") + kScenarioSchema + "'");
    static const std::set<std::string> known = {"schema", "scenario", "params", "x0",   "t0",
                                                "t_end",  "step",     "law",    "seed", "tolerances"};
    for (const auto& item : j.items())
      if (!known.contains(item.key())) throw ConfigError("unknown config field '" + item.key() + "'");

    ScenarioConfig cfg;
    cfg.scenario = j.at("scenario").get<std::string>();
    for (const auto& item : j.at("params").items()) cfg.params[item.key()] = item.value().get<double>();
    cfg.x0 = j.at("x0").get<std::vector<double>>();
    cfg.t0 = j.value("t0", 0.0);
    cfg.t_end = j.at("t_end").get<double>();
    cfg.step = j.at("step").get<double>();
    cfg.law = j.value("law", std::string("filippov"));
    cfg.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("tolerances")) {
      const auto& tol = j.at("tolerances");
      static const std::set<std::string> tol_keys = {"event_tol", "sliding_tol", "region_tol", "max_events"};
      for (const auto& item : tol.items())
        if (!tol_keys.contains(item.key())) throw ConfigError("unknown tolerance '" + item.key() + "'");
      if (tol.contains("event_tol")) cfg.event_tol = tol.at("event_tol").get<double>();
      if (tol.contains("sliding_tol")) cfg.sliding_tol = tol.at("sliding_tol").get<double>();
      if (tol.contains("region_tol")) cfg.region_tol = tol.at("region_tol").get<double>();
      if (tol.contains("max_events")) cfg.max_events = tol.at("max_events").get<int>();
    }
    validate(cfg);
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
}

inline ScenarioConfig parse_config_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

inline nlohmann::ordered_json to_json(const ScenarioConfig& cfg) {
  nlohmann::ordered_json j;
  j["schema"] = kScenarioSchema;
  j["scenario"] = cfg.scenario;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto& [name, value] : cfg.params) params[name] = value;
  j["params"] = std::move(params);
  j["x0"] = cfg.x0;
  j["t0"] = cfg.t0;
  j["t_end"] = cfg.t_end;
  j["step"] = cfg.step;
  j["law"] = cfg.law;
  j["seed"] = cfg.seed;
  nlohmann::ordered_json tol = nlohmann::ordered_json::object();
  if (cfg.event_tol) tol["event_tol"] = *cfg.event_tol;
  if (cfg.sliding_tol) tol["sliding_tol"] = *cfg.sliding_tol;
  if (cfg.region_tol) tol["region_tol"] = *cfg.region_tol;
  if (cfg.max_events) tol["max_events"] = *cfg.max_events;
  if (!tol.empty()) j["tolerances"] = std::move(tol);
  return j;
}

}  // namespace slidefield
