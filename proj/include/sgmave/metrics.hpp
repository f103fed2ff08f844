#pragma once

#include "sgmave/core.hpp"

namespace sgmave {

// Vector correlation coefficient: sqrt of the product of the eigenvalues
// of Bhat' Bstar Bstar' Bhat after span-preserving orthonormalization of
// both arguments. Throws on a zero input.
double vcc(const Matrix& b_hat, const Matrix& b_star);

// Trace correlation coefficient: sqrt of the mean of the same eigenvalues.
double tcc(const Matrix& b_hat, const Matrix& b_star);

struct SelectionMetrics {
  double ms = 0.0;   // nonzero rows
  double tpr = 0.0;  // recovered fraction of the true rows
  double fpr = 0.0;  // selected fraction of the false rows
  bool fpr_flagged = false;  // no false rows exist, fpr reported as 0
};

// Row-support quality of the assembled blocks against the true index
// sets, one entry per group.
std::vector<SelectionMetrics> selection_metrics(
    const std::vector<Matrix>& b_hat_blocks,
    const std::vector<std::vector<Index>>& true_supports,
    const GroupStructure& groups);

}  // namespace sgmave
