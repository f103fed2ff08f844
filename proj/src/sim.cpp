#include "sgmave/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "sgmave/metrics.hpp"
#include "sgmave/rng.hpp"
#include "sgmave/tuning.hpp"

namespace sgmave {

namespace {

using json = nlohmann::ordered_json;

Vector pattern(Index p, std::initializer_list<double> head) {
  Vector v = Vector::Zero(p);
  Index i = 0;
  for (double x : head) v(i++) = x;
  return v;
}

std::vector<Index> support_of(const Vector& beta) {
  std::vector<Index> s;
  for (Index i = 0; i < beta.size(); ++i)
    if (beta(i) != 0.0) s.push_back(i);
  return s;
}

struct RawModel {
  GroupStructure groups;
  std::vector<Matrix> betas;  // raw per-group coefficient columns
  bool forces_independent = false;
};

RawModel raw_model(ModelId id, Index p0) {
  RawModel m;
  switch (id) {
    case ModelId::illus: {
      m.groups.sizes = {10, 10};
      m.groups.dims = {1, 1};
      m.betas = {pattern(10, {1, -1}), pattern(10, {1, 1})};
      m.forces_independent = true;
      return m;
    }
    case ModelId::m3_1:
    case ModelId::m3_2:
      m.groups.sizes = {20, 20};
      m.groups.dims = {1, 1};
      m.betas = {pattern(20, {1, 1, 1}), pattern(20, {1, 1})};
      return m;
    case ModelId::m3_3:
      m.groups.sizes = {20, 20};
      m.groups.dims = {1, 1};
      m.betas = {pattern(20, {1, 1, 1}), pattern(20, {1, 1})};
      return m;
    case ModelId::m3_4c1: {
      m.groups.sizes = {20, 20};
      m.groups.dims = {2, 1};
      Matrix b1(20, 2);
      b1.col(0) = pattern(20, {1, 1});
      b1.col(1) = pattern(20, {1, -1});
      m.betas = {b1, pattern(20, {1, 1})};
      return m;
    }
    case ModelId::m3_4c2: {
      m.groups.sizes = {20, 20};
      m.groups.dims = {2, 1};
      Matrix b1(20, 2);
      b1.col(0) = pattern(20, {1, 1});
      b1.col(1) = pattern(20, {0, 0, 1, 1});
      m.betas = {b1, pattern(20, {1, 1})};
      return m;
    }
    case ModelId::m3_5:
    case ModelId::m3_6: {
      const Index size = p0 > 0 ? p0 : 20;
      if (size < 2) throw std::invalid_argument("p0 must be at least 2");
      m.groups.sizes = {size, size, size};
      m.groups.dims = {1, 1, 1};
      m.betas = {pattern(size, {1, -1}), pattern(size, {1, 1}),
                 pattern(size, {1, -1})};
      return m;
    }
  }
  throw std::invalid_argument("unknown model id");
}

PenaltyKind penalty_kind(Method method) {
  switch (method) {
    case Method::lasso:
      return PenaltyKind::lasso;
    case Method::scad:
      return PenaltyKind::scad;
    case Method::mcp:
      return PenaltyKind::mcp;
    case Method::gmave:
      break;
  }
  throw std::logic_error("unpenalized method has no penalty kind");
}

std::string fmt_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

ModelId parse_model_id(const std::string& name) {
  if (name == "illus") return ModelId::illus;
  if (name == "m3.1") return ModelId::m3_1;
  if (name == "m3.2") return ModelId::m3_2;
  if (name == "m3.3") return ModelId::m3_3;
  if (name == "m3.4c1") return ModelId::m3_4c1;
  if (name == "m3.4c2") return ModelId::m3_4c2;
  if (name == "m3.5") return ModelId::m3_5;
  if (name == "m3.6") return ModelId::m3_6;
  throw std::invalid_argument("unknown model id: " + name);
}

Correlation parse_correlation(const std::string& name) {
  if (name == "ar") return Correlation::ar;
  if (name == "cs") return Correlation::cs;
  if (name == "indep") return Correlation::indep;
  throw std::invalid_argument("unknown correlation structure: " + name);
}

Method parse_method(const std::string& name) {
  if (name == "gmave" || name == "none") return Method::gmave;
  if (name == "lasso") return Method::lasso;
  if (name == "scad") return Method::scad;
  if (name == "mcp") return Method::mcp;
  throw std::invalid_argument("unknown method: " + name);
}

std::string to_string(ModelId id) {
  switch (id) {
    case ModelId::illus: return "illus";
    case ModelId::m3_1: return "m3.1";
    case ModelId::m3_2: return "m3.2";
    case ModelId::m3_3: return "m3.3";
    case ModelId::m3_4c1: return "m3.4c1";
    case ModelId::m3_4c2: return "m3.4c2";
    case ModelId::m3_5: return "m3.5";
    case ModelId::m3_6: return "m3.6";
  }
  return "?";
}

std::string to_string(Correlation corr) {
  switch (corr) {
    case Correlation::indep: return "indep";
    case Correlation::ar: return "ar";
    case Correlation::cs: return "cs";
  }
  return "?";
}

std::string to_string(Method method) {
  switch (method) {
    case Method::gmave: return "gMAVE";
    case Method::lasso: return "SgMAVE-LASSO";
    case Method::scad: return "SgMAVE-SCAD";
    case Method::mcp: return "SgMAVE-MCP";
  }
  return "?";
}

ModelSpec model_spec(ModelId id, Index p0) {
  RawModel raw = raw_model(id, p0);
  ModelSpec spec;
  spec.id = id;
  spec.groups = std::move(raw.groups);
  spec.forces_independent = raw.forces_independent;
  for (Matrix beta : raw.betas) {
    for (Index t = 0; t < beta.cols(); ++t) beta.col(t).normalize();
    spec.true_support.push_back(
        nonzero_row_support({beta}).front());
    spec.true_basis.push_back(std::move(beta));
  }
  return spec;
}

Matrix gen_predictors(Index n, Index p, Correlation corr,
                      std::mt19937_64& rng) {
  if (p < 1) throw std::invalid_argument("gen_predictors: need p >= 1");
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix z(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) z(i, j) = normal(rng);
  if (corr == Correlation::indep) return z;

  Matrix sigma(p, p);
  if (corr == Correlation::ar) {
    for (Index s = 0; s < p; ++s)
      for (Index t = 0; t < p; ++t)
        sigma(s, t) = std::pow(0.5, std::abs(static_cast<double>(s - t)));
  } else {
    sigma.setConstant(0.5);
    sigma.diagonal().setOnes();
  }
  Eigen::LLT<Matrix> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("gen_predictors: covariance not positive definite");
  return z * llt.matrixL().transpose();
}

Vector model_mean(ModelId id, const Matrix& V) {
  const auto index = [&](const GroupStructure& g, Index l, const Vector& beta) {
    return (V.middleCols(g.offset(l), g.sizes[l]) * beta).eval();
  };
  RawModel m = raw_model(id, id == ModelId::m3_5 || id == ModelId::m3_6
                                 ? V.cols() / 3
                                 : 0);
  if (V.cols() != m.groups.total_size())
    throw std::invalid_argument("model_mean: predictor count does not match model");
  switch (id) {
    case ModelId::illus: {
      const Vector z1 = index(m.groups, 0, m.betas[0]);
      const Vector z2 = index(m.groups, 1, m.betas[1]);
      return z1.array() + (0.2 * EIGEN_PI * z2.array()).sin();
    }
    case ModelId::m3_1: {
      const Vector z1 = index(m.groups, 0, m.betas[0]);
      const Vector z2 = index(m.groups, 1, m.betas[1]);
      return z1.array() * (1.0 + z2.array());
    }
    case ModelId::m3_2: {
      const Vector z1 = index(m.groups, 0, m.betas[0]);
      const Vector z2 = index(m.groups, 1, m.betas[1]);
      return z1.array() / (0.5 + (1.5 + z2.array()).square());
    }
    case ModelId::m3_3: {
      const Vector z1 = index(m.groups, 0, m.betas[0]);
      const Vector z2 = index(m.groups, 1, m.betas[1]);
      return (0.5 * z1.array()).exp() + (0.2 * EIGEN_PI * z2.array()).sin();
    }
    case ModelId::m3_4c1:
    case ModelId::m3_4c2: {
      const Vector z11 = index(m.groups, 0, m.betas[0].col(0));
      const Vector z12 = index(m.groups, 0, m.betas[0].col(1));
      const Vector z2 = index(m.groups, 1, m.betas[1]);
      return 2.5 * z11.array() / (0.5 + (1.5 + z12.array()).square()) +
             z2.array();
    }
    case ModelId::m3_5: {
      const Vector z1 = index(m.groups, 0, m.betas[0]);
      const Vector z2 = index(m.groups, 1, m.betas[1]);
      const Vector z3 = index(m.groups, 2, m.betas[2]);
      return z1.array() + 2.0 * z2.array() / (0.5 + (1.5 + z3.array()).square());
    }
    case ModelId::m3_6: {
      const Vector z1 = index(m.groups, 0, m.betas[0]);
      const Vector z2 = index(m.groups, 1, m.betas[1]);
      const Vector z3 = index(m.groups, 2, m.betas[2]);
      return z1.array() + 0.2 * (2.0 + z2.array()).square() +
             2.0 * (0.2 * EIGEN_PI * z3.array()).sin();
    }
  }
  throw std::invalid_argument("unknown model id");
}

Vector gen_response(ModelId id, const Matrix& V, std::mt19937_64& rng) {
  Vector y = model_mean(id, V);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Index i = 0; i < y.size(); ++i) y(i) += 0.5 * normal(rng);
  return y;
}

namespace {

RepRecord run_one(const SimConfig& config, const ModelSpec& spec, int rep) {
  RepRecord record;
  try {
    std::mt19937_64 rng = replication_stream(config.seed,
                                             static_cast<std::uint64_t>(rep));
    const Correlation corr =
        spec.forces_independent ? Correlation::indep : config.corr;
    Dataset data;
    data.predictors =
        gen_predictors(config.n, spec.groups.total_size(), corr, rng);
    data.response = gen_response(spec.id, data.predictors, rng);

    const GmaveResult gm = gmave_fit(data, spec.groups, config.gmave);

    record.weight_row_error =
        (gm.local.weights.rowwise().sum().array() - 1.0).abs().maxCoeff();
    for (const IterationTrace& tr : gm.trace) {
      const double v1 =
          (tr.after_local - tr.entering) / (1.0 + std::abs(tr.entering));
      const double v2 =
          (tr.after_basis - tr.after_local) / (1.0 + std::abs(tr.after_local));
      record.descent_violation =
          std::max({record.descent_violation, v1, v2});
    }

    bool any_penalized = false;
    for (Method m : config.methods)
      if (m != Method::gmave) any_penalized = true;
    ShrinkageDesign design;
    std::vector<double> grid;
    if (any_penalized) {
      design = build_design(data, spec.groups, gm);
      grid = default_lambda_grid(design, config.lambda_grid_size,
                                 config.lambda_min_ratio);
    }

    const Index g = spec.groups.group_count();
    for (Method m : config.methods) {
      MethodRecord mr;
      std::vector<Matrix> blocks;
      if (m == Method::gmave) {
        blocks = gm.basis.blocks;
      } else {
        RegularizationPath path = fit_path(design, penalty_kind(m), grid);
        fill_path_criteria(path, design, spec.groups);
        for (const PathRecord& r : path.records) {
          if (!r.cd_converged) mr.path_converged = false;
          mr.max_kkt_residual = std::max(mr.max_kkt_residual, r.kkt_residual);
        }
        const PathRecord chosen = select_lambda(path);
        mr.selected_lambda = chosen.lambda;
        const GroupedBasis assembled = assemble_estimator(
            ShrinkageVector{chosen.alpha}, gm.basis, spec.groups);
        blocks = assembled.blocks;
        const auto sel =
            selection_metrics(blocks, spec.true_support, spec.groups);
        mr.exact_support = true;
        const auto selected_support = nonzero_row_support(blocks);
        for (Index l = 0; l < g; ++l) {
          mr.ms.push_back(sel[l].ms);
          mr.tpr.push_back(sel[l].tpr);
          mr.fpr.push_back(sel[l].fpr);
          if (selected_support[l] != spec.true_support[l])
            mr.exact_support = false;
        }
      }
      for (Index l = 0; l < g; ++l) {
        if (!(blocks[l].cwiseAbs().maxCoeff() > 0.0)) {
          // everything deselected scores zero by convention
          mr.vcc.push_back(0.0);
          mr.tcc.push_back(0.0);
        } else {
          mr.vcc.push_back(vcc(blocks[l], spec.true_basis[l]));
          mr.tcc.push_back(tcc(blocks[l], spec.true_basis[l]));
        }
      }
      record.methods.push_back(std::move(mr));
    }
  } catch (const std::exception& e) {
    record.failed = true;
    record.error = e.what();
    record.methods.clear();
  }
  return record;
}

double mean_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return xs.empty() ? std::numeric_limits<double>::quiet_NaN()
                    : s / static_cast<double>(xs.size());
}

double sd_of(const std::vector<double>& xs) {
  if (xs.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double m = mean_of(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

}  // namespace

ReplicationSummary run_replications(const SimConfig& config) {
  if (config.reps < 1) throw std::invalid_argument("need at least one replication");
  ReplicationSummary summary;
  summary.config = config;
  summary.spec = model_spec(config.model, config.p0);

  summary.reps.resize(static_cast<std::size_t>(config.reps));
  const int threads = std::max(1, config.threads);
  if (threads == 1) {
    for (int r = 0; r < config.reps; ++r)
      summary.reps[static_cast<std::size_t>(r)] =
          run_one(config, summary.spec, r);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&]() {
        for (int r = next.fetch_add(1); r < config.reps;
             r = next.fetch_add(1)) {
          summary.reps[static_cast<std::size_t>(r)] =
              run_one(config, summary.spec, r);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  for (const RepRecord& rep : summary.reps)
    rep.failed ? ++summary.failed : ++summary.completed;

  const Index g = summary.spec.groups.group_count();
  for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
    MethodSummary ms;
    ms.method = config.methods[mi];
    int exact = 0;
    for (Index l = 0; l < g; ++l) {
      std::vector<double> vccs, tccs, mss, tprs, fprs;
      for (const RepRecord& rep : summary.reps) {
        if (rep.failed) continue;
        const MethodRecord& mr = rep.methods[mi];
        vccs.push_back(mr.vcc[static_cast<std::size_t>(l)]);
        tccs.push_back(mr.tcc[static_cast<std::size_t>(l)]);
        if (!mr.ms.empty()) {
          mss.push_back(mr.ms[static_cast<std::size_t>(l)]);
          tprs.push_back(mr.tpr[static_cast<std::size_t>(l)]);
          fprs.push_back(mr.fpr[static_cast<std::size_t>(l)]);
        }
      }
      GroupStats stats;
      stats.vcc_mean = mean_of(vccs);
      stats.vcc_sd = sd_of(vccs);
      stats.tcc_mean = mean_of(tccs);
      stats.tcc_sd = sd_of(tccs);
      stats.ms = mean_of(mss);
      stats.tpr = mean_of(tprs);
      stats.fpr = mean_of(fprs);
      ms.groups.push_back(stats);
    }
    for (const RepRecord& rep : summary.reps)
      if (!rep.failed && rep.methods[mi].exact_support) ++exact;
    ms.exact_support_rate =
        summary.completed > 0
            ? static_cast<double>(exact) / summary.completed
            : std::numeric_limits<double>::quiet_NaN();
    summary.methods.push_back(std::move(ms));
  }
  return summary;
}

void write_summary_csv(const ReplicationSummary& summary, std::ostream& out) {
  const auto cell = [](double x) {
    return std::isnan(x) ? std::string() : fmt_g17(x);
  };
  out << "model,corr,n,p,reps,completed,failed,method,group,"
         "vcc_mean,vcc_sd,tcc_mean,tcc_sd,ms,tpr,fpr,exact_support_rate\n";
  const SimConfig& c = summary.config;
  for (const MethodSummary& ms : summary.methods) {
    const bool penalized = ms.method != Method::gmave;
    for (std::size_t l = 0; l < ms.groups.size(); ++l) {
      const GroupStats& s = ms.groups[l];
      out << to_string(c.model) << ',' << to_string(c.corr) << ',' << c.n
          << ',' << summary.spec.groups.total_size() << ',' << c.reps << ','
          << summary.completed << ',' << summary.failed << ','
          << to_string(ms.method) << ',' << (l + 1) << ',' << cell(s.vcc_mean)
          << ',' << cell(s.vcc_sd) << ',' << cell(s.tcc_mean) << ','
          << cell(s.tcc_sd) << ',' << (penalized ? cell(s.ms) : "") << ','
          << (penalized ? cell(s.tpr) : "") << ','
          << (penalized ? cell(s.fpr) : "") << ','
          << (penalized ? cell(ms.exact_support_rate) : "") << '\n';
    }
  }
}

void write_summary_json(const ReplicationSummary& summary, std::ostream& out) {
  const SimConfig& c = summary.config;
  json root;
  root["model"] = to_string(c.model);
  root["corr"] = to_string(c.corr);
  root["n"] = c.n;
  root["p"] = summary.spec.groups.total_size();
  root["reps"] = c.reps;
  root["completed"] = summary.completed;
  root["failed"] = summary.failed;
  root["seed"] = c.seed;
  root["methods"] = json::array();
  for (const MethodSummary& ms : summary.methods) {
    json jm;
    jm["method"] = to_string(ms.method);
    jm["groups"] = json::array();
    for (const GroupStats& s : ms.groups) {
      json jg;
      jg["vcc_mean"] = s.vcc_mean;
      jg["vcc_sd"] = s.vcc_sd;
      jg["tcc_mean"] = s.tcc_mean;
      jg["tcc_sd"] = s.tcc_sd;
      if (ms.method != Method::gmave) {
        jg["ms"] = s.ms;
        jg["tpr"] = s.tpr;
        jg["fpr"] = s.fpr;
      }
      jm["groups"].push_back(jg);
    }
    if (ms.method != Method::gmave)
      jm["exact_support_rate"] = ms.exact_support_rate;
    root["methods"].push_back(jm);
  }
  root["replications"] = json::array();
  for (const RepRecord& rep : summary.reps) {
    json jr;
    jr["failed"] = rep.failed;
    if (rep.failed) {
      jr["error"] = rep.error;
    } else {
      jr["methods"] = json::array();
      for (std::size_t mi = 0; mi < rep.methods.size(); ++mi) {
        const MethodRecord& mr = rep.methods[mi];
        json jm;
        jm["method"] = to_string(summary.config.methods[mi]);
        jm["vcc"] = mr.vcc;
        jm["tcc"] = mr.tcc;
        if (!mr.ms.empty()) {
          jm["ms"] = mr.ms;
          jm["tpr"] = mr.tpr;
          jm["fpr"] = mr.fpr;
          jm["exact_support"] = mr.exact_support;
          jm["selected_lambda"] = mr.selected_lambda;
        }
        jr["methods"].push_back(jm);
      }
    }
    root["replications"].push_back(jr);
  }
  out << root.dump(2) << '\n';
}

std::string format_summary_table(const ReplicationSummary& summary) {
  std::ostringstream out;
  const SimConfig& c = summary.config;
  out << "Model " << to_string(c.model) << " (" << to_string(c.corr)
      << "), n = " << c.n << ", p = " << summary.spec.groups.total_size()
      << ", " << summary.completed << "/" << c.reps << " replications";
  if (summary.failed > 0) out << " (" << summary.failed << " failed)";
  out << "\n";
  char line[256];
  std::snprintf(line, sizeof(line), "%-14s %-5s %-16s %-16s %7s %7s %7s\n",
                "method", "group", "VCC", "TCC", "MS", "TPR", "FPR");
  out << line;
  for (const MethodSummary& ms : summary.methods) {
    for (std::size_t l = 0; l < ms.groups.size(); ++l) {
      const GroupStats& s = ms.groups[l];
      char vccs[32], tccs[32];
      if (std::isnan(s.vcc_sd))
        std::snprintf(vccs, sizeof(vccs), "%.4f", s.vcc_mean);
      else
        std::snprintf(vccs, sizeof(vccs), "%.4f (%.4f)", s.vcc_mean, s.vcc_sd);
      if (std::isnan(s.tcc_sd))
        std::snprintf(tccs, sizeof(tccs), "%.4f", s.tcc_mean);
      else
        std::snprintf(tccs, sizeof(tccs), "%.4f (%.4f)", s.tcc_mean, s.tcc_sd);
      if (ms.method == Method::gmave) {
        std::snprintf(line, sizeof(line), "%-14s %-5zu %-16s %-16s %7s %7s %7s\n",
                      to_string(ms.method).c_str(), l + 1, vccs, tccs, "", "",
                      "");
      } else {
        std::snprintf(line, sizeof(line),
                      "%-14s %-5zu %-16s %-16s %7.3f %7.3f %7.4f\n",
                      to_string(ms.method).c_str(), l + 1, vccs, tccs, s.ms,
                      s.tpr, s.fpr);
      }
      out << line;
    }
  }
  return out.str();
}

}  // namespace sgmave
