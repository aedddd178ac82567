// Command-line front end.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "slidefield/cli.hpp"

int main(int argc, char** argv) {
  namespace cli = slidefield::cli;

  CLI::App app{"Sliding vector fields on discontinuity surfaces"};
  app.set_version_flag("--version", slidefield::kVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::string out_prefix = "trajectory";
  auto* simulate = app.add_subcommand("simulate", "Integrate a scenario from a JSON config");
  simulate->add_option("--config", config_path, "Scenario config file")->required();
  simulate->add_option("--out-prefix", out_prefix, "Writes <prefix>.csv and <prefix>.events.json");

  cli::AuditArgs audit_args;
  auto* audit = app.add_subcommand("audit", "Randomized audit of a sliding law");
  audit->add_option("--law", audit_args.law, "filippov, mean, scaled_filippov or scaled_filippov(c)");
  audit->add_option("--check", audit_args.check, "Check name or 'all'");
  audit->add_option("--trials", audit_args.sampler.trials, "Trials per check");
  audit->add_option("--seed", audit_args.sampler.seed, "Random seed");
  audit->add_option("--dim", audit_args.sampler.dim, "State dimension n");
  audit->add_option("--lo", audit_args.sampler.lo, "Smallest sampled magnitude");
  audit->add_option("--hi", audit_args.sampler.hi, "Largest sampled magnitude");
  audit->add_option("--out", audit_args.out, "JSON report file");

  std::string plot_in;
  std::string plot_out;
  std::vector<std::string> plot_cols;
  auto* plotdata = app.add_subcommand("plotdata", "Extract plot columns from a trajectory CSV");
  plotdata->add_option("--in", plot_in, "Trajectory CSV")->required();
  plotdata->add_option("--cols", plot_cols, "Comma-separated columns, e.g. x1,x2")->required()->delimiter(',');
  plotdata->add_option("--out", plot_out, "Plot file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kUsageError;
  }

  if (*simulate) return cli::run_simulate(config_path, out_prefix);
  if (*audit) return cli::run_audit(audit_args);
  return cli::run_plotdata(plot_in, plot_cols, plot_out);
}
