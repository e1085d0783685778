#pragma once

#include "spmi/types.hpp"

namespace spmi {

struct CooccurrenceCounts;  // defined in cooccur.hpp

// Zipf(s, V) rank distribution: pmf[r] = (r+1)^{-s} / H for 0-based storage
// rank r, H = sum_{j=1..V} j^{-s}. Strictly decreasing, sums to one.
struct ZipfMarginal {
  Index V = 0;
  double s = 1.0;
  Vector pmf;
  Vector cdf;
};

// Bivariate Gaussian copula parameterized by its single correlation rho,
// |rho| < 1 (enforced by the operations that consume it).
struct GaussianCopula {
  double rho = 0.0;
};

// Discretized population joint over ranked word pairs: strictly positive
// V x V cell probabilities summing to one, plus its marginals.
struct JointCooccurrence {
  Matrix p;
  Vector row_marginal;
  Vector col_marginal;
};

// Row-stochastic conditional next-word distribution.
struct TransitionMatrix {
  Matrix t;
};

// Where the estimated dense target's marginals come from when rebuilding a
// joint from fitted copula parameters.
enum class MarginalSource {
  kFittedZipf,      // Zipf(s, V) at a configured exponent (model-consistent)
  kEmpiricalRanks,  // the empirical rank distribution of the counts
};

struct CopulaFitOptions {
  double zipf_exponent = 1.0;
  MarginalSource marginal_source = MarginalSource::kFittedZipf;
};

// Zipf rank distribution over V >= 2 ranks with exponent s > 0.
ZipfMarginal zipf_marginal(Index V, double s = 1.0);

// Rectangle-discretizes the Gaussian copula over the Zipf CDF cells:
// p[i][j] is the copula mass of cell [F(i-1), F(i)] x [F(j-1), F(j)] in
// 1-based rank coordinates. All cells strictly positive; realized marginals
// match the Zipf pmf to 1e-8; p is exactly symmetric.
JointCooccurrence copula_joint(const ZipfMarginal& marginal,
                               const GaussianCopula& copula);

// Normalizes rows of the joint into conditional distributions.
TransitionMatrix to_transition(const JointCooccurrence& joint);

// True iff the directed graph with an edge (i -> j) whenever t[i][j] > 0 is
// strongly connected (the dense-language-model criterion).
bool is_dense(const TransitionMatrix& transition);

// Population shifted PMI: entry (i,j) = log(p_ij / (rm_i * cm_j)) - log k.
Matrix population_spmi(const JointCooccurrence& joint, int k);

// Fits the copula correlation from co-occurrence counts: symmetrizes the
// counts, ranks words by marginal frequency (ties by first index), maps each
// rank to the normal score of its mid-CDF under the empirical marginal, and
// takes the count-weighted correlation of the scores, clamped to +-0.999.
GaussianCopula estimate_copula(const CooccurrenceCounts& counts);
GaussianCopula estimate_copula(const Matrix& counts);

// Dense SPMI estimate (the matrix written W-tilde in the factorization
// module): rank words empirically, fit the copula, rebuild a joint over the
// configured marginal, take its population SPMI, and un-permute back to the
// original word order.
Matrix estimated_population_spmi(const CooccurrenceCounts& counts, int k,
                                 const CopulaFitOptions& options = {});
Matrix estimated_population_spmi(const Matrix& counts, int k,
                                 const CopulaFitOptions& options = {});

}  // namespace spmi
