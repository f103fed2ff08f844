#include "sgmave/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sgmave {

double rss(const ShrinkageDesign& design, const ShrinkageVector& alpha) {
  if (alpha.alpha.size() != design.p())
    throw std::invalid_argument("rss: alpha length mismatch");
  const Vector resid = design.response - design.X * alpha.alpha;
  return design.weights.dot(resid.cwiseAbs2());
}

double effective_df(const ShrinkageVector& alpha,
                    const GroupStructure& groups) {
  if (alpha.alpha.size() != groups.total_size())
    throw std::invalid_argument("effective_df: alpha length mismatch");
  double df = 0.0;
  for (Index l = 0; l < groups.group_count(); ++l) {
    const auto seg = alpha.group(groups, l);
    Index active = 0;
    for (Index s = 0; s < seg.size(); ++s)
      if (seg(s) != 0.0) ++active;
    df += static_cast<double>(groups.dims[l]) * static_cast<double>(active);
  }
  return df;
}

double bic(double rss_value, double df, Index n, bool* degenerate) {
  if (rss_value < 0.0) throw std::invalid_argument("bic: negative rss");
  if (df < 0.0) throw std::invalid_argument("bic: negative df");
  if (n < 1) throw std::invalid_argument("bic: need n >= 1");
  if (degenerate != nullptr) *degenerate = false;
  if (rss_value == 0.0) {
    if (degenerate != nullptr) *degenerate = true;
    return std::numeric_limits<double>::lowest();
  }
  return std::log(rss_value) +
         df * std::log(static_cast<double>(n)) / static_cast<double>(n);
}

void fill_path_criteria(RegularizationPath& path, const ShrinkageDesign& design,
                        const GroupStructure& groups) {
  for (PathRecord& record : path.records) {
    record.rss = rss(design, ShrinkageVector{record.alpha});
    record.df = effective_df(ShrinkageVector{record.alpha}, groups);
    record.bic = bic(record.rss, record.df, design.n, &record.rss_degenerate);
  }
}

PathRecord select_lambda(const RegularizationPath& path) {
  if (path.records.empty())
    throw std::invalid_argument("select_lambda: empty path");
  for (const PathRecord& r : path.records)
    if (std::isnan(r.rss) || std::isnan(r.df) || std::isnan(r.bic))
      throw std::invalid_argument("select_lambda: criteria not filled");

  std::vector<const PathRecord*> ordered;
  ordered.reserve(path.records.size());
  for (const PathRecord& r : path.records) ordered.push_back(&r);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const PathRecord* x, const PathRecord* y) {
                     return x->lambda > y->lambda;
                   });
  const PathRecord* best = ordered.front();
  for (const PathRecord* r : ordered)
    if (r->bic < best->bic) best = r;  // strict: ties keep the larger lambda
  return *best;
}

}  // namespace sgmave
