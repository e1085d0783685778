#include "spmi/cooccur.hpp"

#include <cmath>

#include "spmi/errors.hpp"

namespace spmi {

CooccurrenceCounts count_cooccurrences(const Corpus& corpus, int window,
                                       Index V) {
  if (window < 1) {
    throw InvalidParameterError("count_cooccurrences: require window >= 1");
  }
  const Index n = corpus.length();
  if (n < 2) {
    throw InvalidParameterError(
        "count_cooccurrences: require corpus length >= 2");
  }
  CooccurrenceCounts out;
  out.window = window;
  out.counts = Matrix::Zero(V, V);
  for (Index t = 0; t < n; ++t) {
    const std::int32_t w = corpus.ids[static_cast<std::size_t>(t)];
    if (w < 0 || w >= V) {
      throw InvalidParameterError("count_cooccurrences: id out of range");
    }
    const Index lo = t - window < 0 ? 0 : t - window;
    const Index hi = t + window >= n ? n - 1 : t + window;
    for (Index u = lo; u <= hi; ++u) {
      if (u == t) continue;
      out.counts(w, corpus.ids[static_cast<std::size_t>(u)]) += 1.0;
    }
  }
  out.total_pairs = out.counts.sum();
  return out;
}

MaskedMatrix empirical_spmi(const CooccurrenceCounts& counts, int k) {
  if (k < 1) throw InvalidParameterError("empirical_spmi: require k >= 1");
  if (!(counts.total_pairs > 0.0)) {
    throw InvalidParameterError("empirical_spmi: total_pairs must be > 0");
  }
  const Matrix& c = counts.counts;
  const Index v = c.rows();
  const Vector row_sum = c.rowwise().sum();
  const Vector col_sum = c.colwise().sum().transpose();
  const double log_k = std::log(static_cast<double>(k));

  MaskedMatrix out;
  out.shift_k = k;
  out.values = Matrix::Zero(v, c.cols());
  out.missing = MaskMatrix::Constant(v, c.cols(), true);
  for (Index i = 0; i < v; ++i) {
    for (Index j = 0; j < c.cols(); ++j) {
      if (c(i, j) > 0.0) {
        out.values(i, j) =
            std::log(c(i, j) * counts.total_pairs / (row_sum[i] * col_sum[j])) -
            log_k;
        out.missing(i, j) = false;
      }
    }
  }
  return out;
}

Matrix sppmi(const MaskedMatrix& masked) {
  return (masked.missing.array())
      .select(Matrix::Zero(masked.rows(), masked.cols()),
              masked.values.cwiseMax(0.0));
}

}  // namespace spmi
