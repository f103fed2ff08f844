#pragma once

#include "sgmave/core.hpp"
#include "sgmave/shrinkage.hpp"

namespace sgmave {

// Weighted pairwise residual sum of squares at the given shrinkage vector.
double rss(const ShrinkageDesign& design, const ShrinkageVector& alpha);

// df = sum_l d_l * #{s : alpha_ls != 0}
double effective_df(const ShrinkageVector& alpha, const GroupStructure& groups);

// log(rss) + df * log(n) / n. A zero rss yields the lowest finite double
// as sentinel and sets *degenerate when provided.
double bic(double rss_value, double df, Index n, bool* degenerate = nullptr);

// Fills rss/df/bic on every record of the path.
void fill_path_criteria(RegularizationPath& path, const ShrinkageDesign& design,
                        const GroupStructure& groups);

// Record with minimal BIC; ties go to the largest lambda. The path is
// re-sorted internally, so record order does not matter.
PathRecord select_lambda(const RegularizationPath& path);

}  // namespace sgmave
