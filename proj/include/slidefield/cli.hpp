#pragma once

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "slidefield/audit.hpp"
#include "slidefield/integrator.hpp"
#include "slidefield/scenario.hpp"
#include "slidefield/sliding_laws.hpp"
#include "slidefield/trajectory_io.hpp"

namespace slidefield::cli {

enum ExitCode : int { kOk = 0, kAuditFailed = 1, kUsageError = 2, kRuntimeError = 3 };

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  return out;
}

inline void write_outputs(const std::string& prefix, const Trajectory& traj, const SurfaceChart& surface,
                          const ScenarioConfig& cfg) {
  auto csv = open_output(prefix + ".csv");
  write_trajectory_csv(csv, traj, surface, cfg);
  auto events = open_output(prefix + ".events.json");
  events << events_json(traj).dump(2) << '\n';
}

}  // namespace detail

/// simulate: config file -> <prefix>.csv and <prefix>.events.json.
inline int run_simulate(const std::string& config_path, const std::string& out_prefix, std::ostream& err = std::cerr) {
  ScenarioConfig cfg;
  PiecewiseField pf = scenario_friction(1.0, 0.0, 1.0);
  try {
    cfg = parse_config_text(detail::read_file(config_path));
    pf = build_scenario(cfg);
  } catch (const ConfigError& e) {
    err << "simulate: " << e.what() << '\n';
    return kUsageError;
  }

  const GeneratingMap law{law_from_name(cfg.law)};
  try {
    const Trajectory traj = integrate(pf, law, cfg.initial_state(), cfg.t0, cfg.integrator_options());
    detail::write_outputs(out_prefix, traj, pf.surface, cfg);
  } catch (const IntegrationError& e) {
    err << "simulate: " << e.what() << '\n';
    try {
      detail::write_outputs(out_prefix, e.partial(), pf.surface, cfg);
    } catch (const std::exception&) {
    }
    return kRuntimeError;
  } catch (const ConfigError& e) {
    err << "simulate: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "simulate: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kOk;
}

struct AuditArgs {
  std::string law = "filippov";
  std::string check = "all";
  audit::SamplerConfig sampler;
  std::string out;  // empty: report goes to stdout only as a summary
};

/// audit: runs one check or all of them. Exit 0 when every check passes.
inline int run_audit(const AuditArgs& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  std::vector<audit::AuditReport> reports;
  try {
    args.sampler.validate();
    const CharacteristicMap law = law_from_name(args.law);
    const std::vector<std::string> checks = args.check == "all" ? audit::check_names() : std::vector{args.check};
    for (const auto& name : checks) reports.push_back(audit::run_check(name, law, args.sampler));
  } catch (const ConfigError& e) {
    err << "audit: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "audit: " << e.what() << '\n';
    return kRuntimeError;
  }

  bool all_passed = true;
  for (const auto& r : reports) {
    all_passed = all_passed && r.passed();
    out << (r.passed() ? "PASS " : "FAIL ") << r.law_name << ' ' << r.check_name << " failures=" << r.failures << '/'
        << r.trials << " worst_violation=" << format_double(r.worst_violation) << '\n';
  }

  if (!args.out.empty()) {
    try {
      nlohmann::ordered_json j;
      if (args.check == "all") {
        j["law"] = reports.front().law_name;
        j["passed"] = all_passed;
        auto arr = nlohmann::ordered_json::array();
        for (const auto& r : reports) arr.push_back(audit::to_json(r));
        j["reports"] = std::move(arr);
      } else {
        j = audit::to_json(reports.front());
      }
      auto file = detail::open_output(args.out);
      file << j.dump(2) << '\n';
    } catch (const ConfigError& e) {
      err << "audit: " << e.what() << '\n';
      return kUsageError;
    }
  }
  return all_passed ? kOk : kAuditFailed;
}

/// plotdata: trajectory CSV -> (t, value) column pairs per selected series.
inline int run_plotdata(const std::string& in_path, const std::vector<std::string>& cols, const std::string& out_path,
                        std::ostream& err = std::cerr) {
  try {
    std::ifstream in(in_path);
    if (!in) throw ConfigError("cannot open '" + in_path + "'");
    const TrajectoryTable table = read_trajectory_csv(in);
    validate_trajectory_table(table);
    std::ostringstream buffer;
    write_plotdata(buffer, table, cols);
    auto out = detail::open_output(out_path);
    out << buffer.str();
  } catch (const ConfigError& e) {
    err << "plotdata: " << e.what() << '\n';
    return kUsageError;
  }
  return kOk;
}

}  // namespace slidefield::cli
