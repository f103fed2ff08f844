#include <CLI11.hpp>

#include "sgmave/cli.hpp"
#include "sgmave/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Shrinkage group-wise minimum average variance estimation"};
  app.set_version_flag("--version", sgmave::kVersion);
  app.require_subcommand(1);

  sgmave::FitOptions fit;
  CLI::App* cmd_fit = app.add_subcommand("fit", "fit a CSV dataset");
  cmd_fit->add_option("--data", fit.data_path, "input CSV with header")
      ->required();
  cmd_fit->add_option("--response", fit.response, "response column name")
      ->required();
  cmd_fit
      ->add_option("--groups", fit.groups,
                   "JSON list of {columns:[...], dim:int}, or @file")
      ->required();
  cmd_fit->add_option("--penalty", fit.penalty, "lasso|scad|mcp|none")
      ->check(CLI::IsMember({"lasso", "scad", "mcp", "none"}));
  cmd_fit->add_option("--lambda", fit.lambda, "auto or a nonnegative value");
  std::string standardize = "on";
  cmd_fit->add_option("--standardize", standardize, "on|off (default on)")
      ->check(CLI::IsMember({"on", "off"}));
  cmd_fit->add_option("--seed", fit.seed, "recorded in the artifact");
  cmd_fit->add_option("--out", fit.out_path, "output JSON artifact")->required();
  cmd_fit->add_option("--lambda-grid", fit.lambda_grid_size,
                      "number of grid points");
  cmd_fit->add_option("--lambda-min-ratio", fit.lambda_min_ratio,
                      "smallest grid value relative to lambda_max");

  sgmave::FitOptions path_opts;
  CLI::App* cmd_path = app.add_subcommand(
      "path", "dump the full regularization path as CSV");
  cmd_path->add_option("--data", path_opts.data_path, "input CSV with header")
      ->required();
  cmd_path->add_option("--response", path_opts.response, "response column name")
      ->required();
  cmd_path
      ->add_option("--groups", path_opts.groups,
                   "JSON list of {columns:[...], dim:int}, or @file")
      ->required();
  cmd_path->add_option("--penalty", path_opts.penalty, "lasso|scad|mcp")
      ->check(CLI::IsMember({"lasso", "scad", "mcp"}));
  cmd_path->add_option("--lambda", path_opts.lambda,
                       "auto or a nonnegative value");
  std::string path_standardize = "on";
  cmd_path->add_option("--standardize", path_standardize, "on|off (default on)")
      ->check(CLI::IsMember({"on", "off"}));
  cmd_path->add_option("--seed", path_opts.seed, "recorded only");
  cmd_path->add_option("--out", path_opts.out_path, "output CSV")->required();
  cmd_path->add_option("--lambda-grid", path_opts.lambda_grid_size,
                       "number of grid points");
  cmd_path->add_option("--lambda-min-ratio", path_opts.lambda_min_ratio,
                       "smallest grid value relative to lambda_max");

  sgmave::SimulateOptions sim;
  CLI::App* cmd_sim = app.add_subcommand(
      "simulate", "run Monte-Carlo replications of a simulation design");
  cmd_sim->add_option("--model", sim.model,
                      "illus|m3.1|m3.2|m3.3|m3.4c1|m3.4c2|m3.5|m3.6");
  cmd_sim->add_option("--corr", sim.corr, "ar|cs|indep");
  cmd_sim->add_option("--n", sim.n, "sample size");
  cmd_sim->add_option("--p0", sim.p0,
                      "per-group size for the three-group designs");
  cmd_sim->add_option("--reps", sim.reps, "number of replications");
  cmd_sim->add_option("--penalties", sim.penalties,
                      "comma list of gmave,lasso,scad,mcp");
  cmd_sim->add_option("--seed", sim.seed, "base seed");
  cmd_sim->add_option("--threads", sim.threads,
                      "parallel replications (SGMAVE_THREADS as fallback)");
  cmd_sim->add_option("--out-dir", sim.out_dir,
                      "directory for summary.csv / summary.json");

  CLI11_PARSE(app, argc, argv);

  if (cmd_fit->parsed()) {
    fit.standardize = standardize == "on";
    return sgmave::cmd_fit(fit);
  }
  if (cmd_path->parsed()) {
    path_opts.standardize = path_standardize == "on";
    return sgmave::cmd_path(path_opts);
  }
  return sgmave::cmd_simulate(sim);
}
