#pragma once

#include "spmi/corpus.hpp"
#include "spmi/types.hpp"

namespace spmi {

// Windowed word-context pair counts. counts(i, j) is the number of ordered
// (word=i, context=j) pairs; total_pairs is the grand sum. Counts are stored
// as doubles so that exact *expected* (real-valued) counts can flow through
// the same estimators; corpus-derived counts are integers exactly.
struct CooccurrenceCounts {
  Matrix counts;
  int window = 1;
  double total_pairs = 0.0;
};

// Symmetric unit-weight window: for every position t and offset o with
// 1 <= |o| <= window and t+o in range, counts(ids[t], ids[t+o]) += 1.
CooccurrenceCounts count_cooccurrences(const Corpus& corpus, int window,
                                       Index V);

// Empirical shifted PMI. Where counts > 0:
//   values(i, j) = log(counts(i,j) * total / (row_sum_i * col_sum_j)) - log k;
// zero-count cells (the -inf entries in exact arithmetic) are masked missing.
MaskedMatrix empirical_spmi(const CooccurrenceCounts& counts, int k);

// Positive part: max(value, 0) on observed entries, 0 on missing ones.
Matrix sppmi(const MaskedMatrix& masked);

}  // namespace spmi
