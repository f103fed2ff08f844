#pragma once

#include <iosfwd>
#include <optional>
#include <random>
#include <string>

#include "sgmave/core.hpp"
#include "sgmave/gmave.hpp"
#include "sgmave/shrinkage.hpp"

namespace sgmave {

enum class ModelId { illus, m3_1, m3_2, m3_3, m3_4c1, m3_4c2, m3_5, m3_6 };
enum class Correlation { indep, ar, cs };
enum class Method { gmave, lasso, scad, mcp };

ModelId parse_model_id(const std::string& name);
Correlation parse_correlation(const std::string& name);
Method parse_method(const std::string& name);
std::string to_string(ModelId id);
std::string to_string(Correlation corr);
std::string to_string(Method method);

// Everything a simulated design pins down: the group structure, the true
// per-group bases (unit-normalized columns), the true row supports and
// whether the design forces independent predictors.
struct ModelSpec {
  ModelId id;
  GroupStructure groups;
  std::vector<Matrix> true_basis;
  std::vector<std::vector<Index>> true_support;
  bool forces_independent = false;
};

// p0 sets the per-group size for the three-group designs; 0 keeps each
// model's published size.
ModelSpec model_spec(ModelId id, Index p0 = 0);

// Rows drawn from N(0, Sigma) through a Cholesky factor; ar has
// Sigma_st = 0.5^|s-t|, cs has unit diagonal and 0.5 off-diagonal.
Matrix gen_predictors(Index n, Index p, Correlation corr, std::mt19937_64& rng);

// Exact model equation plus 0.5 * N(0, 1) noise.
Vector gen_response(ModelId id, const Matrix& V, std::mt19937_64& rng);

// Noise-free conditional mean, exposed for plug-in checks.
Vector model_mean(ModelId id, const Matrix& V);

struct SimConfig {
  ModelId model = ModelId::m3_1;
  Correlation corr = Correlation::ar;
  Index n = 200;
  Index p0 = 0;
  int reps = 50;
  std::vector<Method> methods = {Method::gmave, Method::scad};
  std::uint64_t seed = 0;
  int threads = 1;
  GmaveOptions gmave;
  int lambda_grid_size = 50;
  double lambda_min_ratio = 1e-3;
};

// One replication's outcome for one method.
struct MethodRecord {
  std::vector<double> vcc;  // per group
  std::vector<double> tcc;
  std::vector<double> ms;   // empty for the unpenalized fit
  std::vector<double> tpr;
  std::vector<double> fpr;
  bool exact_support = false;
  bool path_converged = true;
  double max_kkt_residual = 0.0;  // worst stationarity residual on the path
  double selected_lambda = 0.0;
};

struct RepRecord {
  bool failed = false;
  std::string error;
  std::vector<MethodRecord> methods;  // aligned with config.methods
  // numerical audit of the smoothing stage
  double weight_row_error = 0.0;   // max |row sum - 1| of the refined weights
  double descent_violation = 0.0;  // worst relative objective increase
};

struct GroupStats {
  double vcc_mean = 0.0, vcc_sd = 0.0;
  double tcc_mean = 0.0, tcc_sd = 0.0;
  double ms = 0.0, tpr = 0.0, fpr = 0.0;
};

struct MethodSummary {
  Method method;
  std::vector<GroupStats> groups;
  double exact_support_rate = 0.0;  // meaningless for the unpenalized fit
};

struct ReplicationSummary {
  SimConfig config;
  ModelSpec spec;
  int completed = 0;
  int failed = 0;
  std::vector<MethodSummary> methods;
  std::vector<RepRecord> reps;
};

// Runs config.reps independent replications (in parallel when
// config.threads > 1), fits every requested method against the model
// truth and aggregates means with across-replication standard deviations.
// Per-replication failures are recorded and skipped.
ReplicationSummary run_replications(const SimConfig& config);

void write_summary_csv(const ReplicationSummary& summary, std::ostream& out);
void write_summary_json(const ReplicationSummary& summary, std::ostream& out);
std::string format_summary_table(const ReplicationSummary& summary);

}  // namespace sgmave
