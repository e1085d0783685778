#include "spmi/sgns.hpp"

#include <algorithm>
#include <cmath>

#include "spmi/errors.hpp"
#include "spmi/rng.hpp"

namespace spmi {
namespace {

using RowMajorMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline double clamp_logit(double z) { return std::clamp(z, -30.0, 30.0); }

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// log sigmoid(z) with the same +-30 logit clamp as the trainer.
inline double log_sigmoid(double z) {
  return -std::log1p(std::exp(-clamp_logit(z)));
}

void check_config(const SgnsConfig& config) {
  if (config.d < 1) throw InvalidParameterError("sgns: require d >= 1");
  if (config.k < 1) throw InvalidParameterError("sgns: require k >= 1");
  if (config.window < 1) {
    throw InvalidParameterError("sgns: require window >= 1");
  }
  if (config.epochs < 0) {
    throw InvalidParameterError("sgns: epochs must be nonnegative");
  }
  if (!(config.lr_final > 0.0) || !(config.lr_initial >= config.lr_final)) {
    throw InvalidParameterError("sgns: require lr_initial >= lr_final > 0");
  }
  if (!(config.negative_exponent >= 0.0)) {
    throw InvalidParameterError("sgns: negative_exponent must be >= 0");
  }
}

}  // namespace

std::pair<EmbeddingPair, TrainStats> train_sgns(const Corpus& corpus, Index V,
                                                const SgnsConfig& config) {
  check_config(config);
  const Index n = corpus.length();
  if (n < 2) throw InvalidParameterError("sgns: require corpus length >= 2");
  if (V < 1) throw InvalidParameterError("sgns: require V >= 1");
  for (std::int32_t id : corpus.ids) {
    if (id < 0 || id >= V) {
      throw InvalidParameterError("sgns: token id out of range");
    }
  }
  const Index d = config.d;

  std::mt19937_64 gen(config.seed);
  RowMajorMatrix w(V, d), c(V, d);
  for (Index i = 0; i < V; ++i) {
    for (Index j = 0; j < d; ++j) {
      w(i, j) = (uniform01(gen) - 0.5) / static_cast<double>(d);
    }
  }
  for (Index i = 0; i < V; ++i) {
    for (Index j = 0; j < d; ++j) {
      c(i, j) = (uniform01(gen) - 0.5) / static_cast<double>(d);
    }
  }

  // Context counts over the same symmetric window define both the pair
  // total and the negative-sampling distribution.
  std::vector<double> ctx_count(static_cast<std::size_t>(V), 0.0);
  std::int64_t pairs = 0;
  for (Index t = 0; t < n; ++t) {
    for (int o = -config.window; o <= config.window; ++o) {
      if (o == 0) continue;
      const Index u = t + o;
      if (u < 0 || u >= n) continue;
      ctx_count[static_cast<std::size_t>(
          corpus.ids[static_cast<std::size_t>(u)])] += 1.0;
      ++pairs;
    }
  }
  std::vector<double> neg_cdf(static_cast<std::size_t>(V));
  double cum = 0.0;
  for (Index i = 0; i < V; ++i) {
    cum += std::pow(ctx_count[static_cast<std::size_t>(i)],
                    config.negative_exponent);
    neg_cdf[static_cast<std::size_t>(i)] = cum;
  }
  for (double& x : neg_cdf) x /= cum;

  TrainStats stats;
  stats.pairs_per_epoch = pairs;

  const double total_steps =
      static_cast<double>(pairs) * static_cast<double>(config.epochs);
  const double lr0 = config.lr_initial;
  const double lr1 = config.lr_final;
  Vector grad_w(d);

  std::int64_t step = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    double epoch_loss = 0.0;
    for (Index t = 0; t < n; ++t) {
      const Index wi = corpus.ids[static_cast<std::size_t>(t)];
      double* wrow = w.row(wi).data();
      auto wvec = Eigen::Map<Vector>(wrow, d);
      for (int o = -config.window; o <= config.window; ++o) {
        if (o == 0) continue;
        const Index u = t + o;
        if (u < 0 || u >= n) continue;
        const Index ci = corpus.ids[static_cast<std::size_t>(u)];
        const double lr =
            lr0 + (lr1 - lr0) * static_cast<double>(step) / total_steps;
        ++step;

        // Positive pair: coefficient (1 - sigmoid(w.c)); the context row is
        // updated with the pre-step word vector while the word gradient is
        // accumulated and applied after the negatives (simultaneous update).
        auto cvec = Eigen::Map<Vector>(c.row(ci).data(), d);
        const double z = clamp_logit(wvec.dot(cvec));
        const double g_pos = 1.0 - sigmoid(z);
        epoch_loss += -log_sigmoid(z);
        grad_w = g_pos * cvec;
        cvec += (lr * g_pos) * wvec;

        for (int neg = 0; neg < config.k; ++neg) {
          const Index ni =
              static_cast<Index>(sample_cdf(neg_cdf, uniform01(gen)));
          auto nvec = Eigen::Map<Vector>(c.row(ni).data(), d);
          const double zn = clamp_logit(wvec.dot(nvec));
          const double g_neg = sigmoid(zn);
          epoch_loss += -log_sigmoid(-zn);
          grad_w -= g_neg * nvec;
          nvec -= (lr * g_neg) * wvec;
        }
        wvec += lr * grad_w;
      }
    }
    stats.epoch_loss.push_back(epoch_loss /
                               static_cast<double>(std::max<std::int64_t>(
                                   pairs, 1)));
  }

  EmbeddingPair out;
  out.w = w;
  out.c = c;
  return {std::move(out), std::move(stats)};
}

Matrix sgns_product(const EmbeddingPair& pair) {
  if (pair.w.cols() != pair.c.cols()) {
    throw ShapeMismatchError("sgns_product: embedding widths differ");
  }
  return pair.w * pair.c.transpose();
}

double sgns_pair_loss(const Vector& w, const Vector& c_pos,
                      const Matrix& negatives) {
  if (c_pos.size() != w.size() || negatives.cols() != w.size()) {
    throw ShapeMismatchError("sgns_pair_loss: dimension mismatch");
  }
  double loss = -log_sigmoid(w.dot(c_pos));
  for (Index r = 0; r < negatives.rows(); ++r) {
    loss += -log_sigmoid(-w.dot(negatives.row(r).transpose()));
  }
  return loss;
}

SgnsPairGradient sgns_pair_gradient(const Vector& w, const Vector& c_pos,
                                    const Matrix& negatives) {
  if (c_pos.size() != w.size() || negatives.cols() != w.size()) {
    throw ShapeMismatchError("sgns_pair_gradient: dimension mismatch");
  }
  SgnsPairGradient g;
  const double g_pos = 1.0 - sigmoid(clamp_logit(w.dot(c_pos)));
  g.w = -g_pos * c_pos;
  g.c_pos = -g_pos * w;
  g.negatives.resize(negatives.rows(), negatives.cols());
  for (Index r = 0; r < negatives.rows(); ++r) {
    const double g_neg = sigmoid(clamp_logit(w.dot(negatives.row(r).transpose())));
    g.w += g_neg * negatives.row(r).transpose();
    g.negatives.row(r) = g_neg * w.transpose();
  }
  return g;
}

}  // namespace spmi
