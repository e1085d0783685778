#include "spmi/genmodel.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "spmi/cooccur.hpp"
#include "spmi/errors.hpp"
#include "spmi/gaussian.hpp"

namespace spmi {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_copula(const GaussianCopula& copula) {
  if (std::isnan(copula.rho) || std::abs(copula.rho) >= 1.0) {
    throw InvalidParameterError("GaussianCopula: require |rho| < 1");
  }
}

// Words ordered by symmetrized marginal count (descending), ties broken by
// the lower original index; plus the empirical rank pmf.
struct RankedMarginal {
  std::vector<Index> order;    // order[r] = original index of rank r+1
  std::vector<Index> rank0;    // rank0[i] = 0-based rank of word i
  Vector rank_pmf;             // empirical marginal mass per rank
};

RankedMarginal rank_by_marginal(const Vector& marginal, double total) {
  const Index v = marginal.size();
  RankedMarginal out;
  out.order.resize(static_cast<std::size_t>(v));
  std::iota(out.order.begin(), out.order.end(), Index{0});
  std::stable_sort(out.order.begin(), out.order.end(),
                   [&](Index a, Index b) { return marginal[a] > marginal[b]; });
  out.rank0.resize(static_cast<std::size_t>(v));
  out.rank_pmf.resize(v);
  for (Index r = 0; r < v; ++r) {
    out.rank0[static_cast<std::size_t>(out.order[static_cast<std::size_t>(r)])] = r;
    out.rank_pmf[r] = marginal[out.order[static_cast<std::size_t>(r)]] / total;
  }
  return out;
}

// Core of estimate_copula on an already symmetrized counts matrix.
double fit_rho(const Matrix& sym, const RankedMarginal& ranked) {
  const Index v = sym.rows();
  // Normal scores of the mid-CDF of the empirical rank distribution. Ranks
  // with zero marginal mass never appear in a positive cell, so their score
  // is irrelevant (left as zero).
  Vector score = Vector::Zero(v);
  double cum = 0.0;
  for (Index r = 0; r < v; ++r) {
    const double q = ranked.rank_pmf[r];
    if (q > 0.0) score[r] = normal_quantile(cum + q / 2.0);
    cum += q;
  }

  double wsum = 0.0, mx = 0.0, my = 0.0;
  for (Index i = 0; i < v; ++i) {
    for (Index j = 0; j < v; ++j) {
      const double w = sym(i, j);
      if (w <= 0.0) continue;
      wsum += w;
      mx += w * score[ranked.rank0[static_cast<std::size_t>(i)]];
      my += w * score[ranked.rank0[static_cast<std::size_t>(j)]];
    }
  }
  mx /= wsum;
  my /= wsum;

  double vx = 0.0, vy = 0.0, cov = 0.0;
  for (Index i = 0; i < v; ++i) {
    for (Index j = 0; j < v; ++j) {
      const double w = sym(i, j);
      if (w <= 0.0) continue;
      const double x = score[ranked.rank0[static_cast<std::size_t>(i)]] - mx;
      const double y = score[ranked.rank0[static_cast<std::size_t>(j)]] - my;
      vx += w * x * x;
      vy += w * y * y;
      cov += w * x * y;
    }
  }
  if (vx <= 1e-24 * wsum || vy <= 1e-24 * wsum) {
    throw DegenerateDataError(
        "estimate_copula: normal scores have zero variance");
  }
  return std::clamp(cov / std::sqrt(vx * vy), -0.999, 0.999);
}

// Rectangle-discretizes a copula over an arbitrary marginal CDF.
JointCooccurrence joint_from_cdf(const Vector& cdf, double rho) {
  const Index v = cdf.size();
  // z[m] = Phi^{-1}(F(m)) for cut m = 0..V, with the outer cuts at -+inf.
  Vector z(v + 1);
  z[0] = -kInf;
  z[v] = kInf;
  for (Index m = 1; m < v; ++m) z[m] = normal_quantile(cdf[m - 1]);

  // Upper-orthant grid L[m][n] = Pr(X > z_m, Y > z_n). Anchoring the
  // differences at the upper tail keeps the four corner terms on the scale
  // of the cell mass even deep in the low-probability corner, which the
  // lower-CDF form cannot do without catastrophic cancellation. Filling
  // n <= m and mirroring makes the result exactly symmetric.
  Matrix upper(v + 1, v + 1);
  for (Index m = 0; m <= v; ++m) {
    for (Index n = 0; n <= m; ++n) {
      const double val = bvn_upper(z[m], z[n], rho);
      upper(m, n) = val;
      upper(n, m) = val;
    }
  }

  JointCooccurrence joint;
  joint.p.resize(v, v);
  for (Index i = 0; i < v; ++i) {
    for (Index j = 0; j <= i; ++j) {
      // The corner sum is order-sensitive in floating point, so assemble each
      // mass once and mirror it rather than recomputing with swapped indices.
      const double mass = upper(i, j) - upper(i + 1, j) - upper(i, j + 1) +
                          upper(i + 1, j + 1);
      // Rounding can leave a nonpositive sliver in extreme corners; clamp to
      // the smallest normal so the dense (strictly positive) invariant holds.
      const double cell = mass > 0.0 ? mass : DBL_MIN;
      joint.p(i, j) = cell;
      joint.p(j, i) = cell;
    }
  }
  joint.p /= joint.p.sum();
  joint.row_marginal = joint.p.rowwise().sum();
  joint.col_marginal = joint.p.colwise().sum().transpose();
  return joint;
}

}  // namespace

ZipfMarginal zipf_marginal(Index V, double s) {
  if (V < 2) throw InvalidParameterError("zipf_marginal: require V >= 2");
  if (!(s > 0.0)) throw InvalidParameterError("zipf_marginal: require s > 0");
  ZipfMarginal zm;
  zm.V = V;
  zm.s = s;
  zm.pmf.resize(V);
  double h = 0.0;
  for (Index r = V; r >= 1; --r) {  // small terms first for accuracy
    h += std::pow(static_cast<double>(r), -s);
  }
  for (Index r = 0; r < V; ++r) {
    zm.pmf[r] = std::pow(static_cast<double>(r + 1), -s) / h;
  }
  zm.cdf.resize(V);
  double cum = 0.0;
  for (Index r = 0; r < V; ++r) {
    cum += zm.pmf[r];
    zm.cdf[r] = cum;
  }
  return zm;
}

JointCooccurrence copula_joint(const ZipfMarginal& marginal,
                               const GaussianCopula& copula) {
  check_copula(copula);
  if (marginal.V < 2 || marginal.cdf.size() != marginal.V) {
    throw InvalidParameterError("copula_joint: invalid marginal");
  }
  return joint_from_cdf(marginal.cdf, copula.rho);
}

TransitionMatrix to_transition(const JointCooccurrence& joint) {
  const Index v = joint.p.rows();
  if (joint.row_marginal.size() != v) {
    throw InvalidParameterError("to_transition: inconsistent joint");
  }
  TransitionMatrix out;
  out.t.resize(v, joint.p.cols());
  for (Index i = 0; i < v; ++i) {
    const double rm = joint.row_marginal[i];
    if (!(rm > 0.0) || !std::isfinite(rm)) {
      throw DegenerateDataError("to_transition: zero row marginal");
    }
    out.t.row(i) = joint.p.row(i) / rm;
  }
  return out;
}

bool is_dense(const TransitionMatrix& transition) {
  const Matrix& t = transition.t;
  const Index v = t.rows();
  if (v == 0) return false;
  // Strong connectivity = every node reachable from 0 in the graph and in
  // its transpose (Kosaraju-style double sweep on the dense adjacency).
  auto reaches_all = [&](bool transpose) {
    std::vector<char> seen(static_cast<std::size_t>(v), 0);
    std::vector<Index> stack = {0};
    seen[0] = 1;
    Index count = 1;
    while (!stack.empty()) {
      const Index i = stack.back();
      stack.pop_back();
      for (Index j = 0; j < v; ++j) {
        const double edge = transpose ? t(j, i) : t(i, j);
        if (edge > 0.0 && !seen[static_cast<std::size_t>(j)]) {
          seen[static_cast<std::size_t>(j)] = 1;
          ++count;
          stack.push_back(j);
        }
      }
    }
    return count == v;
  };
  return reaches_all(false) && reaches_all(true);
}

Matrix population_spmi(const JointCooccurrence& joint, int k) {
  if (k < 1) throw InvalidParameterError("population_spmi: require k >= 1");
  const Matrix outer = joint.row_marginal * joint.col_marginal.transpose();
  return ((joint.p.array() / outer.array()).log() -
          std::log(static_cast<double>(k)))
      .matrix();
}

GaussianCopula estimate_copula(const Matrix& counts) {
  if (counts.rows() != counts.cols() || counts.rows() < 1) {
    throw InvalidParameterError("estimate_copula: counts must be square");
  }
  if ((counts.array() < 0.0).any()) {
    throw InvalidParameterError("estimate_copula: counts must be nonnegative");
  }
  const Matrix sym = (counts + counts.transpose()) / 2.0;
  const double total = sym.sum();
  if (!(total > 0.0)) {
    throw DegenerateDataError("estimate_copula: no co-occurrence mass");
  }
  const RankedMarginal ranked = rank_by_marginal(sym.rowwise().sum(), total);
  return GaussianCopula{fit_rho(sym, ranked)};
}

GaussianCopula estimate_copula(const CooccurrenceCounts& counts) {
  return estimate_copula(counts.counts);
}

Matrix estimated_population_spmi(const Matrix& counts, int k,
                                 const CopulaFitOptions& options) {
  if (k < 1) {
    throw InvalidParameterError("estimated_population_spmi: require k >= 1");
  }
  if (counts.rows() != counts.cols() || counts.rows() < 2) {
    throw InvalidParameterError(
        "estimated_population_spmi: counts must be square with V >= 2");
  }
  const Index v = counts.rows();
  const Matrix sym = (counts + counts.transpose()) / 2.0;
  const double total = sym.sum();
  if (!(total > 0.0)) {
    throw DegenerateDataError(
        "estimated_population_spmi: no co-occurrence mass");
  }
  const RankedMarginal ranked = rank_by_marginal(sym.rowwise().sum(), total);
  const double rho = fit_rho(sym, ranked);

  JointCooccurrence joint;
  if (options.marginal_source == MarginalSource::kFittedZipf) {
    joint = joint_from_cdf(zipf_marginal(v, options.zipf_exponent).cdf, rho);
  } else {
    if ((ranked.rank_pmf.array() <= 0.0).any()) {
      throw DegenerateDataError(
          "estimated_population_spmi: empirical marginal has zero-mass ranks; "
          "use the fitted-Zipf marginal instead");
    }
    Vector cdf(v);
    double cum = 0.0;
    for (Index r = 0; r < v; ++r) {
      cum += ranked.rank_pmf[r];
      cdf[r] = cum;
    }
    cdf[v - 1] = 1.0;
    joint = joint_from_cdf(cdf, rho);
  }
  const Matrix ranked_spmi = population_spmi(joint, k);

  // ranked_spmi is indexed by rank; map back to original word order.
  Matrix out(v, v);
  for (Index i = 0; i < v; ++i) {
    const Index ri = ranked.rank0[static_cast<std::size_t>(i)];
    for (Index j = 0; j < v; ++j) {
      out(i, j) = ranked_spmi(ri, ranked.rank0[static_cast<std::size_t>(j)]);
    }
  }
  return out;
}

Matrix estimated_population_spmi(const CooccurrenceCounts& counts, int k,
                                 const CopulaFitOptions& options) {
  return estimated_population_spmi(counts.counts, k, options);
}

}  // namespace spmi
