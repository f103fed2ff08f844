#include "sgmave/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "sgmave/csv.hpp"
#include "sgmave/metrics.hpp"
#include "sgmave/shrinkage.hpp"
#include "sgmave/tuning.hpp"
#include "sgmave/version.hpp"

namespace sgmave {

namespace {

using json = nlohmann::ordered_json;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double parse_cell(const std::string& text, const std::string& column,
                  std::size_t row) {
  std::size_t pos = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != text.size() || text.empty())
    throw std::runtime_error("non-numeric cell in column '" + column +
                             "', data row " + std::to_string(row + 1) + ": '" +
                             text + "'");
  return value;
}

std::string fmt_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json blocks_to_json(const std::vector<Matrix>& blocks) {
  json out = json::array();
  for (const Matrix& b : blocks) out.push_back(matrix_to_json(b));
  return out;
}

}  // namespace

std::vector<GroupSpecEntry> parse_group_spec(const std::string& text) {
  std::string payload = text;
  if (!payload.empty() && payload[0] == '@') payload = slurp(payload.substr(1));
  json parsed;
  try {
    parsed = json::parse(payload);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("cannot parse --groups JSON: ") +
                             e.what());
  }
  if (!parsed.is_array() || parsed.empty())
    throw std::runtime_error("--groups must be a non-empty JSON array");
  std::vector<GroupSpecEntry> entries;
  for (const auto& item : parsed) {
    if (!item.is_object() || !item.contains("columns") ||
        !item["columns"].is_array() || item["columns"].empty())
      throw std::runtime_error(
          "each group needs a non-empty \"columns\" array");
    GroupSpecEntry entry;
    for (const auto& c : item["columns"]) {
      if (!c.is_string())
        throw std::runtime_error("group column names must be strings");
      entry.columns.push_back(c.get<std::string>());
    }
    entry.dim = item.value("dim", 1);
    if (entry.dim < 1)
      throw std::runtime_error("group dim must be a positive integer");
    entries.push_back(std::move(entry));
  }
  return entries;
}

LoadedData load_dataset(const std::string& csv_path,
                        const std::string& response,
                        const std::vector<GroupSpecEntry>& spec,
                        bool standardize) {
  const CsvTable table = read_csv_file(csv_path);
  const long y_col = table.column(response);
  if (y_col < 0)
    throw std::runtime_error("response column '" + response + "' not found");

  LoadedData out;
  out.response_name = response;
  std::set<std::string> seen;
  for (const GroupSpecEntry& entry : spec) {
    out.groups.sizes.push_back(static_cast<Index>(entry.columns.size()));
    out.groups.dims.push_back(entry.dim);
    for (const std::string& name : entry.columns) {
      if (name == response)
        throw std::runtime_error("group spec is not a partition: '" + name +
                                 "' is the response");
      if (!seen.insert(name).second)
        throw std::runtime_error("group spec is not a partition: '" + name +
                                 "' appears twice");
      if (table.column(name) < 0)
        throw std::runtime_error("group column '" + name + "' not found");
      out.block_columns.push_back(name);
    }
  }

  const std::size_t n = table.rows.size();
  if (n < 2) throw std::runtime_error("need at least two data rows");
  const Index p = out.groups.total_size();
  out.data.predictors.resize(static_cast<Index>(n), p);
  out.data.response.resize(static_cast<Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    out.data.response(static_cast<Index>(i)) =
        parse_cell(table.rows[i][static_cast<std::size_t>(y_col)], response, i);
    for (Index j = 0; j < p; ++j) {
      const std::string& name = out.block_columns[static_cast<std::size_t>(j)];
      const long col = table.column(name);
      out.data.predictors(static_cast<Index>(i), j) =
          parse_cell(table.rows[i][static_cast<std::size_t>(col)], name, i);
    }
  }

  if (standardize) {
    // mean zero, unit Euclidean length per predictor column
    for (Index j = 0; j < p; ++j) {
      auto col = out.data.predictors.col(j);
      col.array() -= col.mean();
      const double norm = col.norm();
      if (!(norm > 0.0))
        throw std::runtime_error(
            "predictor '" + out.block_columns[static_cast<std::size_t>(j)] +
            "' has no variability; remove it or disable standardization");
      col /= norm;
    }
  }
  return out;
}

PipelineResult run_fit_pipeline(const Dataset& data,
                                const GroupStructure& groups,
                                const FitOptions& options) {
  PipelineResult out;
  validate(data, groups, &out.warnings);
  out.gmave = gmave_fit(data, groups);
  if (!out.gmave.converged)
    out.warnings.push_back("group-wise smoothing stage hit the iteration limit");

  FitResult& fit = out.fit;
  fit.basis_unshrunk = out.gmave.basis;
  fit.gmave_converged = out.gmave.converged;
  fit.gmave_iterations = out.gmave.iterations;

  const Index p = groups.total_size();
  if (options.penalty == "none") {
    fit.alpha.alpha = Vector::Ones(p);
    fit.basis = fit.basis_unshrunk;
    fit.selected_lambda = 0.0;
  } else {
    const PenaltyKind kind = [&] {
      if (options.penalty == "lasso") return PenaltyKind::lasso;
      if (options.penalty == "scad") return PenaltyKind::scad;
      if (options.penalty == "mcp") return PenaltyKind::mcp;
      throw std::runtime_error("unknown penalty: " + options.penalty);
    }();
    const ShrinkageDesign design = build_design(data, groups, out.gmave);
    std::vector<double> grid;
    if (options.lambda == "auto") {
      grid = default_lambda_grid(design, options.lambda_grid_size,
                                 options.lambda_min_ratio);
    } else {
      std::size_t pos = 0;
      const double value = std::stod(options.lambda, &pos);
      if (pos != options.lambda.size() || value < 0.0)
        throw std::runtime_error("--lambda must be 'auto' or a nonnegative real");
      grid = {value};
    }
    RegularizationPath path = fit_path(design, kind, grid);
    fill_path_criteria(path, design, groups);
    for (const PathRecord& r : path.records)
      if (!r.cd_converged) {
        fit.path_converged = false;
        out.warnings.push_back("coordinate descent hit the sweep limit at lambda " +
                               fmt_g17(r.lambda));
      }
    const PathRecord chosen = select_lambda(path);
    fit.selected_lambda = chosen.lambda;
    fit.alpha.alpha = chosen.alpha;
    fit.basis = assemble_estimator(fit.alpha, fit.basis_unshrunk, groups);
    fit.path = std::move(path);
  }
  fit.support = nonzero_row_support(fit.basis.blocks);
  fit.indices = project(data.predictors, groups, fit.basis);
  return out;
}

namespace {

json artifact_json(const PipelineResult& result, const LoadedData& loaded,
                   const FitOptions& options,
                   const std::vector<GroupSpecEntry>& spec) {
  const FitResult& fit = result.fit;
  json root;
  root["tool"] = "sgmave";
  root["version"] = kVersion;
  json jopt;
  jopt["data"] = options.data_path;
  jopt["response"] = options.response;
  jopt["penalty"] = options.penalty;
  jopt["lambda"] = options.lambda;
  jopt["standardize"] = options.standardize;
  jopt["seed"] = options.seed;
  jopt["lambda_grid_size"] = options.lambda_grid_size;
  jopt["lambda_min_ratio"] = options.lambda_min_ratio;
  root["options"] = jopt;
  json jgroups = json::array();
  for (const GroupSpecEntry& entry : spec) {
    json jg;
    jg["columns"] = entry.columns;
    jg["dim"] = entry.dim;
    jgroups.push_back(jg);
  }
  root["groups"] = jgroups;
  root["warnings"] = result.warnings;
  json jconv;
  jconv["gmave_converged"] = fit.gmave_converged;
  jconv["gmave_iterations"] = fit.gmave_iterations;
  jconv["path_converged"] = fit.path_converged;
  jconv["degenerate_anchors"] = result.gmave.degenerate_anchors;
  root["convergence"] = jconv;
  root["basis_unshrunk"] = blocks_to_json(fit.basis_unshrunk.blocks);
  root["basis"] = blocks_to_json(fit.basis.blocks);
  json alpha = json::array();
  for (Index s = 0; s < fit.alpha.alpha.size(); ++s)
    alpha.push_back(fit.alpha.alpha(s));
  root["alpha"] = alpha;
  json support = json::array();
  Index offset = 0;
  for (std::size_t l = 0; l < fit.support.size(); ++l) {
    json names = json::array();
    for (Index s : fit.support[l])
      names.push_back(loaded.block_columns[static_cast<std::size_t>(offset + s)]);
    support.push_back(names);
    offset += static_cast<Index>(spec[l].columns.size());
  }
  root["support"] = support;
  root["selected_lambda"] = fit.selected_lambda;
  json jpath = json::array();
  for (const PathRecord& r : fit.path.records) {
    json jr;
    jr["lambda"] = r.lambda;
    jr["rss"] = r.rss;
    jr["df"] = r.df;
    jr["bic"] = r.bic;
    Index active = 0;
    for (Index s = 0; s < r.alpha.size(); ++s)
      if (r.alpha(s) != 0.0) ++active;
    jr["n_active"] = active;
    jpath.push_back(jr);
  }
  root["path"] = jpath;
  root["indices"] = matrix_to_json(fit.indices);
  return root;
}

}  // namespace

int cmd_fit(const FitOptions& options) {
  try {
    const auto spec = parse_group_spec(options.groups);
    const LoadedData loaded = load_dataset(options.data_path, options.response,
                                           spec, options.standardize);
    const PipelineResult result =
        run_fit_pipeline(loaded.data, loaded.groups, options);
    for (const std::string& w : result.warnings)
      std::cerr << "warning: " << w << '\n';
    std::ofstream out(options.out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + options.out_path);
    out << artifact_json(result, loaded, options, spec).dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed: " + options.out_path);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

int cmd_path(const FitOptions& options) {
  try {
    const auto spec = parse_group_spec(options.groups);
    const LoadedData loaded = load_dataset(options.data_path, options.response,
                                           spec, options.standardize);
    if (options.penalty == "none")
      throw std::runtime_error("path dump needs a penalty");
    const PipelineResult result =
        run_fit_pipeline(loaded.data, loaded.groups, options);
    for (const std::string& w : result.warnings)
      std::cerr << "warning: " << w << '\n';
    std::ofstream out(options.out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + options.out_path);
    out << "lambda,rss,df,bic";
    for (const std::string& name : loaded.block_columns)
      out << ',' << csv_escape("alpha:" + name);
    out << '\n';
    for (const PathRecord& r : result.fit.path.records) {
      out << fmt_g17(r.lambda) << ',' << fmt_g17(r.rss) << ',' << fmt_g17(r.df)
          << ',' << fmt_g17(r.bic);
      for (Index s = 0; s < r.alpha.size(); ++s)
        out << ',' << fmt_g17(r.alpha(s));
      out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + options.out_path);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

int cmd_simulate(const SimulateOptions& options) {
  try {
    SimConfig config;
    config.model = parse_model_id(options.model);
    config.corr = parse_correlation(options.corr);
    config.n = options.n;
    config.p0 = options.p0;
    config.reps = options.reps;
    if (config.reps < 1) throw std::runtime_error("--reps must be at least 1");
    config.seed = options.seed;
    config.methods.clear();
    std::stringstream tokens(options.penalties);
    std::string token;
    while (std::getline(tokens, token, ','))
      if (!token.empty()) config.methods.push_back(parse_method(token));
    if (config.methods.empty())
      throw std::runtime_error("--penalties must name at least one method");

    int threads = options.threads;
    if (threads <= 0) {
      if (const char* env = std::getenv("SGMAVE_THREADS"))
        threads = std::atoi(env);
    }
    if (threads <= 0)
      threads = static_cast<int>(std::thread::hardware_concurrency());
    config.threads = std::max(1, threads);

    const ReplicationSummary summary = run_replications(config);

    const std::string dir = options.out_dir.empty() ? "." : options.out_dir;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    {
      std::ofstream csv(dir + "/summary.csv", std::ios::binary);
      if (!csv) throw std::runtime_error("cannot write " + dir + "/summary.csv");
      write_summary_csv(summary, csv);
    }
    {
      std::ofstream js(dir + "/summary.json", std::ios::binary);
      if (!js) throw std::runtime_error("cannot write " + dir + "/summary.json");
      write_summary_json(summary, js);
    }
    std::cout << format_summary_table(summary);
    if (summary.failed > 0)
      std::cerr << "warning: " << summary.failed << " replication(s) failed\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace sgmave
