#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "spmi/corpus.hpp"
#include "spmi/types.hpp"

namespace spmi {

struct SgnsConfig {
  Index d = 25;
  int k = 5;                       // negatives per positive pair
  int window = 1;                  // symmetric context window
  int epochs = 40;
  double lr_initial = 0.05;
  double lr_final = 1e-4;          // linear anneal per pair-step
  double negative_exponent = 1.0;  // power applied to context counts
  std::uint64_t seed = 0;
};

struct TrainStats {
  std::vector<double> epoch_loss;      // mean per-pair loss, one per epoch
  std::int64_t pairs_per_epoch = 0;    // equals the window's pair total
};

// Skip-gram with negative sampling, trained by SGD over every windowed
// (word, context) pair. Negatives are drawn from the context-count
// distribution raised to negative_exponent; the per-pair loss is
//   -log sigmoid(w.c) - sum_n log sigmoid(-w.c_n)
// with logits clamped to +-30. Single-threaded and bit-deterministic for a
// fixed (corpus, V, config).
std::pair<EmbeddingPair, TrainStats> train_sgns(const Corpus& corpus, Index V,
                                                const SgnsConfig& config);

// The trained SPMI estimate W C^T.
Matrix sgns_product(const EmbeddingPair& pair);

// Per-pair objective and analytic gradients, exposed for verification.
// `negatives` holds one sampled context embedding per row.
double sgns_pair_loss(const Vector& w, const Vector& c_pos,
                      const Matrix& negatives);

struct SgnsPairGradient {
  Vector w;
  Vector c_pos;
  Matrix negatives;  // same layout as the input rows
};
SgnsPairGradient sgns_pair_gradient(const Vector& w, const Vector& c_pos,
                                    const Matrix& negatives);

}  // namespace spmi
