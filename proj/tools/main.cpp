#include <string>

#include <CLI11.hpp>

#include "bohmq/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"bohmq: many-particle Bohm quantum potential toolkit"};
  app.require_subcommand(1);

  bohmq::CommandOptions opts;
  app.add_option("--threads", opts.threads, "worker cap for slice solves")
      ->capture_default_str();
  app.add_flag("--verbose", opts.verbose, "chatty progress output");
  app.add_option("--output-dir", opts.output_dir,
                 "override the configured output directory");

  std::string config_path;
  std::string starts_path;

  auto* validate = app.add_subcommand(
      "validate", "parse a run configuration and report normalization checks");
  validate->add_option("config", config_path, "run configuration file")
      ->required();

  auto* qpot = app.add_subcommand(
      "qpot", "write the initial-guess quantum potential and densities");
  qpot->add_option("config", config_path, "run configuration file")->required();

  auto* scf = app.add_subcommand(
      "scf", "run the self-consistent iteration and reduce the potential");
  scf->add_option("config", config_path, "run configuration file")->required();
  scf->add_flag("--slice-log", opts.slice_log,
                "write per-slice eikonal residuals to slices.csv");

  auto* traj = app.add_subcommand(
      "trajectories", "integrate velocity-field trajectories from a checkpoint");
  traj->add_option("config", config_path, "run configuration file")->required();
  traj->add_option("starts", starts_path, "CSV of start coordinates")->required();

  CLI11_PARSE(app, argc, argv);

  if (validate->parsed()) return bohmq::cmd_validate(config_path, opts);
  if (qpot->parsed()) return bohmq::cmd_qpot(config_path, opts);
  if (scf->parsed()) return bohmq::cmd_scf(config_path, opts);
  if (traj->parsed()) return bohmq::cmd_trajectories(config_path, starts_path, opts);
  return 1;
}
