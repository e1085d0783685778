#pragma once

#include <utility>

#include "spmi/types.hpp"

namespace spmi {

struct MvsvdOptions {
  double tol = 1e-6;   // relative change of the lambda-objective
  int max_iter = 100;  // outer iterations
};

struct MvsvdResult {
  SvdResult svd;       // decomposition of the final imputed matrix
  int iterations = 0;  // accepted outer iterations
  double objective = 0.0;  // final lambda-objective value
};

// Top-d singular triplets of m (1 <= d <= min(rows, cols)).
SvdResult truncated_svd(const Matrix& m, Index d);

// SVD-on-SPPMI baseline: truncated_svd(sppmi(masked), d) plus the
// sigma^{1/2}-split embeddings.
std::pair<SvdResult, EmbeddingPair> svd_sppmi_embeddings(
    const MaskedMatrix& masked, Index d);

// EM-style missing-value SVD: impute missing cells with the observed mean,
// then iterate {rank-d SVD; closed-form lambda blend toward the new
// reconstruction; re-impute missing cells}; the lambda-objective is the
// squared error against the observed entries. Objective increases trigger
// lambda halving (up to 20 times, then convergence is declared).
MvsvdResult em_mvsvd(const MaskedMatrix& masked, Index d,
                     const MvsvdOptions& options = {});

// Distribution-dependent variant: same loop, but lambda minimizes a
// chi-square-style statistic against the dense estimate w_tilde with cell
// weights max(|w_tilde|, 1e-6), evaluated on the observed cells.
MvsvdResult dd_mvsvd(const MaskedMatrix& masked, const Matrix& w_tilde,
                     Index d, const MvsvdOptions& options = {});

// Closed-form minimizer of
//   sum_observed [w_obs - (lambda * w_hat + (1 - lambda) * w_prev)]^2,
// i.e. sum (w-wp)(wh-wp) / sum (wh-wp)^2 over observed cells; returns 1 when
// the denominator is below 1e-12 (the objective is lambda-independent).
double lambda_star_frobenius(const MaskedMatrix& w_obs, const Matrix& w_hat,
                             const Matrix& w_prev);

// Weighted counterpart used by dd_mvsvd: minimizes
//   sum_observed [w_tilde - (lambda * w_hat + (1 - lambda) * w_prev)]^2 / c
// with cell weights c = max(|w_tilde|, 1e-6), summed over cells where
// `missing` is false; same 1e-12 tie-break to 1.
double lambda_star_chisq(const Matrix& w_tilde, const MaskMatrix& missing,
                         const Matrix& w_hat, const Matrix& w_prev);

// W = U * diag(sqrt(sigma)), C = V * diag(sqrt(sigma)), so W C^T equals the
// rank-d reconstruction.
EmbeddingPair embeddings_from_svd(const SvdResult& svd);

}  // namespace spmi
