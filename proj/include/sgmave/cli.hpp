#pragma once

#include <string>
#include <vector>

#include "sgmave/core.hpp"
#include "sgmave/gmave.hpp"
#include "sgmave/sim.hpp"

namespace sgmave {

// One entry of the --groups specification: named predictor columns plus
// the group's index dimension.
struct GroupSpecEntry {
  std::vector<std::string> columns;
  Index dim = 1;
};

std::vector<GroupSpecEntry> parse_group_spec(const std::string& text);

// CSV columns rearranged into contiguous group blocks; block_columns maps
// block order back to the user's column names.
struct LoadedData {
  Dataset data;
  GroupStructure groups;
  std::vector<std::string> block_columns;
  std::string response_name;
};

LoadedData load_dataset(const std::string& csv_path,
                        const std::string& response,
                        const std::vector<GroupSpecEntry>& spec,
                        bool standardize);

struct FitOptions {
  std::string data_path;
  std::string response;
  std::string groups;        // inline JSON or @file
  std::string penalty = "scad";  // lasso | scad | mcp | none
  std::string lambda = "auto";   // auto | nonnegative real
  bool standardize = true;
  std::uint64_t seed = 0;
  std::string out_path;
  int lambda_grid_size = 50;
  double lambda_min_ratio = 1e-3;
};

struct SimulateOptions {
  std::string model = "m3.1";
  std::string corr = "ar";
  Index n = 200;
  Index p0 = 0;
  int reps = 50;
  std::string penalties = "gmave,scad";
  std::uint64_t seed = 0;
  int threads = 0;  // 0: SGMAVE_THREADS, else hardware concurrency
  std::string out_dir;
};

int cmd_fit(const FitOptions& options);
int cmd_simulate(const SimulateOptions& options);
int cmd_path(const FitOptions& options);

// Full fit pipeline shared by cmd_fit and cmd_path.
struct PipelineResult {
  FitResult fit;
  GmaveResult gmave;
  std::vector<std::string> warnings;
};

PipelineResult run_fit_pipeline(const Dataset& data,
                                const GroupStructure& groups,
                                const FitOptions& options);

}  // namespace sgmave
