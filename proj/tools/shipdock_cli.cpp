#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "shipdock/commands.hpp"

int main(int argc, char** argv) {
  using shipdock::CommandOptions;
  CLI::App app{"Trajectory optimization and NMPC for ship docking"};
  app.require_subcommand(1);

  CommandOptions options;
  double duration = 0.0;
  double horizon = 0.0;
  int intervals = 0;
  std::string trajectory;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--scenario", options.scenario, "Scenario file or bundled scenario name")->required();
    sub->add_option("--out", options.out, "Output directory")->capture_default_str();
    sub->add_option("--horizon", horizon, "Override the horizon length T [s]");
    sub->add_option("--intervals", intervals, "Override the number of intervals N");
    sub->add_flag("-v,--verbose", options.verbose, "Print solver progress");
  };

  CLI::App* solve = app.add_subcommand("solve", "Solve one open-loop docking problem");
  add_common(solve);
  CLI::App* simulate = app.add_subcommand("simulate", "Run the closed-loop controller against the plant");
  add_common(simulate);
  simulate->add_option("--duration", duration, "Simulated time [s], a multiple of T/N (default 600)");
  CLI::App* check = app.add_subcommand("check-derivatives", "Compare analytic derivatives with finite differences");
  add_common(check);
  check->add_option("--seed", options.seed, "Seed of the random evaluation points")->capture_default_str();
  CLI::App* plot = app.add_subcommand("plot", "Plot a trajectory CSV written by solve or simulate");
  add_common(plot);
  plot->add_option("--trajectory", trajectory, "Trajectory CSV (default <out>/trajectory.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : shipdock::kExitValidation;
  }

  auto set_optionals = [&](CLI::App* sub) {
    if (sub->count("--horizon")) options.horizon = horizon;
    if (sub->count("--intervals")) options.intervals = intervals;
  };
  int (*command)(const CommandOptions&, std::ostream&) = nullptr;
  CLI::App* chosen = nullptr;
  if (*solve) {
    chosen = solve;
    command = shipdock::cmd_solve;
  } else if (*simulate) {
    chosen = simulate;
    command = shipdock::cmd_simulate;
    if (simulate->count("--duration")) options.duration = duration;
  } else if (*check) {
    chosen = check;
    command = shipdock::cmd_check_derivatives;
  } else {
    chosen = plot;
    command = shipdock::cmd_plot;
    if (plot->count("--trajectory")) options.trajectory = trajectory;
  }
  set_optionals(chosen);
  return shipdock::run_command(command, options, std::cout, std::cerr);
}
