#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "spmi/cooccur.hpp"
#include "spmi/corpus.hpp"
#include "spmi/errors.hpp"
#include "spmi/genmodel.hpp"
#include "spmi/sgns.hpp"

#include "oracles.hpp"

namespace {

spmi::Corpus alternating(spmi::Index length) {
  spmi::Corpus corpus;
  for (spmi::Index i = 0; i < length; ++i) {
    corpus.ids.push_back(static_cast<std::int32_t>(i % 2));
  }
  return corpus;
}

}  // namespace

TEST_CASE("train_sgns approaches the empirical SPMI on the two-word chain") {
  const spmi::Corpus corpus = alternating(10000);
  spmi::SgnsConfig config;
  config.d = 2;
  config.k = 1;
  config.epochs = 25;
  config.seed = 20240817;

  const auto [pair, stats] = spmi::train_sgns(corpus, 2, config);
  const spmi::Matrix product = spmi::sgns_product(pair);

  const auto counts = spmi::count_cooccurrences(corpus, 1, 2);
  const spmi::MaskedMatrix target = spmi::empirical_spmi(counts, 1);
  // Observed pairs are the off-diagonals, both equal to log 2.
  CHECK(std::abs(product(0, 1) - target.values(0, 1)) < 0.3);
  CHECK(std::abs(product(1, 0) - target.values(1, 0)) < 0.3);
  CHECK(stats.pairs_per_epoch == static_cast<std::int64_t>(counts.total_pairs));
  CHECK(static_cast<int>(stats.epoch_loss.size()) == config.epochs);
  for (double loss : stats.epoch_loss) CHECK(std::isfinite(loss));
}

TEST_CASE("zero epochs leaves the initialization untouched") {
  const spmi::Corpus corpus = alternating(100);
  spmi::SgnsConfig config;
  config.d = 4;
  config.k = 2;
  config.epochs = 0;
  config.seed = 5;

  const auto [pair, stats] = spmi::train_sgns(corpus, 2, config);
  CHECK(stats.epoch_loss.empty());
  // Uniform(-0.5/d, 0.5/d) initialization, no training step applied.
  CHECK(pair.w.cwiseAbs().maxCoeff() <= 0.5 / 4.0);
  CHECK(pair.c.cwiseAbs().maxCoeff() <= 0.5 / 4.0);
  CHECK(pair.w.cwiseAbs().minCoeff() > 0.0);

  const auto [pair2, stats2] = spmi::train_sgns(corpus, 2, config);
  CHECK((pair.w - pair2.w).cwiseAbs().maxCoeff() == 0.0);
  CHECK((pair.c - pair2.c).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("training is bit-deterministic for a fixed seed") {
  const auto joint = spmi::copula_joint(spmi::zipf_marginal(6, 1.0),
                                        spmi::GaussianCopula{0.4});
  const auto corpus = spmi::generate_corpus(spmi::to_transition(joint), 3000,
                                            spmi::GeneratorSeed{17});
  spmi::SgnsConfig config;
  config.d = 5;
  config.k = 3;
  config.epochs = 3;
  config.seed = 1234;

  const auto [a, sa] = spmi::train_sgns(corpus, 6, config);
  const auto [b, sb] = spmi::train_sgns(corpus, 6, config);
  CHECK((a.w - b.w).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.c - b.c).cwiseAbs().maxCoeff() == 0.0);
  CHECK(sa.epoch_loss == sb.epoch_loss);

  config.seed = 1235;
  const auto [c, sc] = spmi::train_sgns(corpus, 6, config);
  CHECK((a.w - c.w).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("train_sgns validates its configuration") {
  const spmi::Corpus corpus = alternating(50);
  spmi::SgnsConfig config;

  config.d = 0;
  CHECK_THROWS_AS(spmi::train_sgns(corpus, 2, config),
                  spmi::InvalidParameterError);
  config = {};
  config.k = 0;
  CHECK_THROWS_AS(spmi::train_sgns(corpus, 2, config),
                  spmi::InvalidParameterError);
  config = {};
  config.epochs = -1;
  CHECK_THROWS_AS(spmi::train_sgns(corpus, 2, config),
                  spmi::InvalidParameterError);
  config = {};
  config.lr_initial = 1e-5;  // below lr_final
  CHECK_THROWS_AS(spmi::train_sgns(corpus, 2, config),
                  spmi::InvalidParameterError);
  config = {};
  config.lr_final = 0.0;
  CHECK_THROWS_AS(spmi::train_sgns(corpus, 2, config),
                  spmi::InvalidParameterError);

  spmi::Corpus tiny;
  tiny.ids = {0};
  CHECK_THROWS_AS(spmi::train_sgns(tiny, 2, spmi::SgnsConfig{}),
                  spmi::InvalidParameterError);
}

TEST_CASE("analytic pair gradients match central finite differences") {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double h = 1e-5;
  const double rel_tol = 1e-4;

  for (int instance = 0; instance < 100; ++instance) {
    const spmi::Index d = 1 + static_cast<spmi::Index>(gen() % 6);
    const int k = 1 + static_cast<int>(gen() % 4);
    spmi::Vector w(d), c(d);
    spmi::Matrix negatives(k, d);
    for (spmi::Index i = 0; i < d; ++i) {
      w(i) = u(gen);
      c(i) = u(gen);
    }
    for (spmi::Index i = 0; i < negatives.size(); ++i) negatives(i) = u(gen);

    const spmi::SgnsPairGradient grad =
        spmi::sgns_pair_gradient(w, c, negatives);

    auto check_coord = [&](double analytic, double* coord) {
      const double saved = *coord;
      *coord = saved + h;
      const double up = spmi::sgns_pair_loss(w, c, negatives);
      *coord = saved - h;
      const double down = spmi::sgns_pair_loss(w, c, negatives);
      *coord = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double scale = std::max({1.0, std::abs(analytic),
                                     std::abs(numeric)});
      CHECK(std::abs(analytic - numeric) / scale < rel_tol);
    };

    for (spmi::Index i = 0; i < d; ++i) check_coord(grad.w(i), &w(i));
    for (spmi::Index i = 0; i < d; ++i) check_coord(grad.c_pos(i), &c(i));
    for (spmi::Index r = 0; r < k; ++r) {
      for (spmi::Index i = 0; i < d; ++i) {
        check_coord(grad.negatives(r, i), &negatives(r, i));
      }
    }
  }
}

TEST_CASE("pair loss stays finite under extreme logits") {
  spmi::Vector w = spmi::Vector::Constant(2, 100.0);
  spmi::Vector c = spmi::Vector::Constant(2, 100.0);
  spmi::Matrix negatives = spmi::Matrix::Constant(3, 2, -100.0);
  CHECK(std::isfinite(spmi::sgns_pair_loss(w, c, negatives)));
  CHECK(std::isfinite(spmi::sgns_pair_loss(w, -c, -negatives)));
}

TEST_CASE("more epochs track the empirical SPMI at least as well") {
  const auto joint = spmi::copula_joint(spmi::zipf_marginal(4, 1.0),
                                        spmi::GaussianCopula{0.4});
  const auto corpus = spmi::generate_corpus(spmi::to_transition(joint), 20000,
                                            spmi::GeneratorSeed{2718});
  const auto counts = spmi::count_cooccurrences(corpus, 1, 4);
  const spmi::MaskedMatrix masked = spmi::empirical_spmi(counts, 1);
  spmi::Matrix target = masked.values;  // all cells observed at this length
  REQUIRE_FALSE(masked.missing.any());

  double prev = std::numeric_limits<double>::infinity();
  for (int epochs : {5, 25, 100}) {
    spmi::SgnsConfig config;
    config.d = 4;
    config.k = 1;
    config.epochs = epochs;
    config.seed = 31;
    const auto [pair, stats] = spmi::train_sgns(corpus, 4, config);
    const double rms = oracle::rms_on_frequent_cells(
        spmi::sgns_product(pair), target, counts.counts, 100.0);
    MESSAGE("epochs ", epochs, " -> rms ", rms);
    CHECK(rms <= prev + 0.05);
    prev = rms;
  }
}

TEST_CASE("sgns_product frozen cases") {
  spmi::EmbeddingPair zero;
  zero.w = spmi::Matrix::Zero(3, 2);
  zero.c = spmi::Matrix::Zero(3, 2);
  CHECK(spmi::sgns_product(zero).isZero(0.0));

  spmi::EmbeddingPair outer;
  outer.w = spmi::Matrix(2, 1);
  outer.w << 1.0, 2.0;
  outer.c = spmi::Matrix(2, 1);
  outer.c << 3.0, 4.0;
  const spmi::Matrix product = spmi::sgns_product(outer);
  CHECK(product(0, 0) == 3.0);
  CHECK(product(0, 1) == 4.0);
  CHECK(product(1, 0) == 6.0);
  CHECK(product(1, 1) == 8.0);
}
