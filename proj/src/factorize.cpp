#include "spmi/factorize.hpp"

#include <cmath>
#include <limits>

#include <Eigen/SVD>

#include "spmi/cooccur.hpp"
#include "spmi/errors.hpp"

namespace spmi {
namespace {

void check_masked(const MaskedMatrix& masked) {
  if (masked.values.rows() != masked.missing.rows() ||
      masked.values.cols() != masked.missing.cols()) {
    throw ShapeMismatchError("masked matrix: values/mask shapes differ");
  }
}

// Shared EM/DD iteration. The two variants differ only in the lambda
// objective: EM fits the observed entries of the data, DD fits the dense
// estimate w_tilde under chi-square-style weights, both evaluated on the
// observed cells and minimized in closed form along the blend segment.
MvsvdResult mvsvd_loop(const MaskedMatrix& masked, const Matrix* w_tilde,
                       Index d, const MvsvdOptions& options) {
  check_masked(masked);
  const Index rows = masked.rows();
  const Index cols = masked.cols();
  if (d < 1 || d > std::min(rows, cols)) {
    throw InvalidParameterError("mvsvd: require 1 <= d <= min(rows, cols)");
  }
  if (options.max_iter < 0) {
    throw InvalidParameterError("mvsvd: max_iter must be nonnegative");
  }
  const Index observed = masked.observed_count();
  if (observed == 0) {
    throw NoObservedDataError("mvsvd: all entries are missing");
  }

  const bool dd = w_tilde != nullptr;
  Matrix weights;
  if (dd) {
    if (w_tilde->rows() != rows || w_tilde->cols() != cols) {
      throw ShapeMismatchError("dd_mvsvd: w_tilde shape differs from data");
    }
    if (!w_tilde->allFinite()) {
      throw InvalidParameterError("dd_mvsvd: w_tilde must be fully finite");
    }
    weights = w_tilde->cwiseAbs().cwiseMax(1e-6);
  }

  // The lambda-objective of a candidate blend state.
  auto lambda_objective = [&](const Matrix& blend) {
    double sum = 0.0;
    for (Index j = 0; j < cols; ++j) {
      for (Index i = 0; i < rows; ++i) {
        if (masked.missing(i, j)) continue;
        const double target = dd ? (*w_tilde)(i, j) : masked.values(i, j);
        const double r = target - blend(i, j);
        sum += dd ? r * r / weights(i, j) : r * r;
      }
    }
    return sum;
  };
  auto lambda_star = [&](const Matrix& w_hat, const Matrix& w_prev) {
    return dd ? lambda_star_chisq(*w_tilde, masked.missing, w_hat, w_prev)
              : lambda_star_frobenius(masked, w_hat, w_prev);
  };

  // Impute missing cells with the mean of the observed ones.
  double mean = 0.0;
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      if (!masked.missing(i, j)) mean += masked.values(i, j);
    }
  }
  mean /= static_cast<double>(observed);
  Matrix imputed = masked.missing.array().select(
      Matrix::Constant(rows, cols, mean), masked.values);

  MvsvdResult result;

  // With nothing missing, re-imputation is vacuous and the imputed matrix
  // never changes: the loop is a fixed point after its first SVD.
  if (observed == rows * cols && options.max_iter >= 1) {
    result.iterations = 1;
    result.svd = truncated_svd(masked.values, d);
    result.objective = lambda_objective(reconstruction(result.svd));
    return result;
  }

  // anchor holds W-hat^(t-1), the previously accepted blend. The first
  // iteration has no previous state and takes the reconstruction directly
  // (the lambda-independent case, equivalent to lambda = 1).
  Matrix anchor;
  bool have_anchor = false;
  double prev_obj = std::numeric_limits<double>::infinity();
  for (int iter = 1; iter <= options.max_iter; ++iter) {
    const SvdResult svd = truncated_svd(imputed, d);
    const Matrix w_hat = reconstruction(svd);

    double lambda = have_anchor ? lambda_star(w_hat, anchor) : 1.0;
    Matrix blend =
        have_anchor ? Matrix(lambda * w_hat + (1.0 - lambda) * anchor) : w_hat;
    double obj = lambda_objective(blend);
    int halvings = 0;
    while (obj > prev_obj && halvings < 20) {
      lambda /= 2.0;
      blend = lambda * w_hat + (1.0 - lambda) * anchor;
      obj = lambda_objective(blend);
      ++halvings;
    }
    bool declared_converged = false;
    if (obj > prev_obj) {  // 20 halvings could not restore descent
      blend = anchor;
      obj = prev_obj;
      declared_converged = true;
    }

    anchor = blend;
    have_anchor = true;
    for (Index j = 0; j < cols; ++j) {
      for (Index i = 0; i < rows; ++i) {
        if (masked.missing(i, j)) imputed(i, j) = blend(i, j);
      }
    }
    result.iterations = iter;

    const bool have_prev = std::isfinite(prev_obj);
    const double rel_change =
        have_prev ? std::abs(obj - prev_obj) / std::max(prev_obj, 1e-300)
                  : std::numeric_limits<double>::infinity();
    prev_obj = obj;
    if (declared_converged || obj == 0.0 ||
        (have_prev && rel_change < options.tol)) {
      break;
    }
  }

  result.objective =
      std::isfinite(prev_obj) ? prev_obj : lambda_objective(imputed);
  result.svd = truncated_svd(imputed, d);
  return result;
}

}  // namespace

SvdResult truncated_svd(const Matrix& m, Index d) {
  if (d < 1 || d > std::min(m.rows(), m.cols())) {
    throw InvalidParameterError(
        "truncated_svd: require 1 <= d <= min(rows, cols)");
  }
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SvdResult out;
  out.u = svd.matrixU().leftCols(d);
  out.sigma = svd.singularValues().head(d);
  out.vt = svd.matrixV().leftCols(d).transpose();
  return out;
}

std::pair<SvdResult, EmbeddingPair> svd_sppmi_embeddings(
    const MaskedMatrix& masked, Index d) {
  check_masked(masked);
  SvdResult svd = truncated_svd(sppmi(masked), d);
  EmbeddingPair pair = embeddings_from_svd(svd);
  return {std::move(svd), std::move(pair)};
}

MvsvdResult em_mvsvd(const MaskedMatrix& masked, Index d,
                     const MvsvdOptions& options) {
  return mvsvd_loop(masked, nullptr, d, options);
}

MvsvdResult dd_mvsvd(const MaskedMatrix& masked, const Matrix& w_tilde,
                     Index d, const MvsvdOptions& options) {
  return mvsvd_loop(masked, &w_tilde, d, options);
}

double lambda_star_frobenius(const MaskedMatrix& w_obs, const Matrix& w_hat,
                             const Matrix& w_prev) {
  check_masked(w_obs);
  if (w_hat.rows() != w_obs.rows() || w_hat.cols() != w_obs.cols() ||
      w_prev.rows() != w_obs.rows() || w_prev.cols() != w_obs.cols()) {
    throw ShapeMismatchError("lambda_star_frobenius: shapes differ");
  }
  double num = 0.0, den = 0.0;
  for (Index j = 0; j < w_obs.cols(); ++j) {
    for (Index i = 0; i < w_obs.rows(); ++i) {
      if (w_obs.missing(i, j)) continue;
      const double dh = w_hat(i, j) - w_prev(i, j);
      num += (w_obs.values(i, j) - w_prev(i, j)) * dh;
      den += dh * dh;
    }
  }
  return den < 1e-12 ? 1.0 : num / den;
}

double lambda_star_chisq(const Matrix& w_tilde, const MaskMatrix& missing,
                         const Matrix& w_hat, const Matrix& w_prev) {
  if (w_tilde.rows() != missing.rows() || w_tilde.cols() != missing.cols() ||
      w_hat.rows() != missing.rows() || w_hat.cols() != missing.cols() ||
      w_prev.rows() != missing.rows() || w_prev.cols() != missing.cols()) {
    throw ShapeMismatchError("lambda_star_chisq: shapes differ");
  }
  double num = 0.0, den = 0.0;
  for (Index j = 0; j < w_tilde.cols(); ++j) {
    for (Index i = 0; i < w_tilde.rows(); ++i) {
      if (missing(i, j)) continue;
      const double c = std::max(std::abs(w_tilde(i, j)), 1e-6);
      const double dh = w_hat(i, j) - w_prev(i, j);
      num += (w_tilde(i, j) - w_prev(i, j)) * dh / c;
      den += dh * dh / c;
    }
  }
  return den < 1e-12 ? 1.0 : num / den;
}

EmbeddingPair embeddings_from_svd(const SvdResult& svd) {
  const Vector root = svd.sigma.cwiseSqrt();
  EmbeddingPair pair;
  pair.w = svd.u * root.asDiagonal();
  pair.c = svd.vt.transpose() * root.asDiagonal();
  return pair;
}

}  // namespace spmi
