#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "spmi/corpus.hpp"
#include "spmi/errors.hpp"
#include "spmi/genmodel.hpp"

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("spmi_corpus_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

spmi::TransitionMatrix iid_rows(const spmi::Vector& p) {
  spmi::TransitionMatrix t;
  t.t = p.transpose().replicate(p.size(), 1);
  return t;
}

}  // namespace

TEST_CASE("generate_corpus walks a deterministic two-cycle") {
  spmi::TransitionMatrix t;
  t.t.resize(2, 2);
  t.t << 0.0, 1.0, 1.0, 0.0;
  const auto corpus = spmi::generate_corpus(t, 10, spmi::GeneratorSeed{3});
  REQUIRE(corpus.length() == 10);
  for (spmi::Index i = 1; i < 10; ++i) {
    CHECK(corpus.ids[i] == 1 - corpus.ids[i - 1]);
  }
}

TEST_CASE("generate_corpus with identical rows samples i.i.d.") {
  const auto marginal = spmi::zipf_marginal(10, 1.0);
  const auto corpus = spmi::generate_corpus(iid_rows(marginal.pmf), 1000000,
                                            spmi::GeneratorSeed{99});
  const spmi::CountVector freq = spmi::unigram_freqs(corpus, 10);
  CHECK(freq.sum() == corpus.length());
  for (spmi::Index i = 0; i < 10; ++i) {
    const double rel = static_cast<double>(freq(i)) / 1e6;
    CHECK(std::abs(rel - marginal.pmf(i)) < 0.01);
  }
}

TEST_CASE("generate_corpus is seed-deterministic") {
  const auto joint = spmi::copula_joint(spmi::zipf_marginal(8, 1.0),
                                        spmi::GaussianCopula{0.4});
  const auto t = spmi::to_transition(joint);
  const auto a = spmi::generate_corpus(t, 5000, spmi::GeneratorSeed{42});
  const auto b = spmi::generate_corpus(t, 5000, spmi::GeneratorSeed{42});
  const auto c = spmi::generate_corpus(t, 5000, spmi::GeneratorSeed{43});
  CHECK(a.ids == b.ids);
  CHECK(a.ids != c.ids);
}

TEST_CASE("generate_corpus rejects bad inputs") {
  spmi::TransitionMatrix t;
  t.t.resize(2, 2);
  t.t << 0.5, 0.5, 0.5, 0.5;
  CHECK_THROWS_AS(spmi::generate_corpus(t, 1, spmi::GeneratorSeed{1}),
                  spmi::InvalidParameterError);

  spmi::TransitionMatrix bad;
  bad.t.resize(2, 2);
  bad.t << 0.7, 0.7, 0.5, 0.5;  // row sums off
  CHECK_THROWS_AS(spmi::generate_corpus(bad, 10, spmi::GeneratorSeed{1}),
                  spmi::InvalidParameterError);

  spmi::TransitionMatrix rect;
  rect.t = spmi::Matrix::Constant(2, 3, 1.0 / 3.0);
  CHECK_THROWS_AS(spmi::generate_corpus(rect, 10, spmi::GeneratorSeed{1}),
                  spmi::InvalidParameterError);
}

TEST_CASE("empirical distribution approaches the stationary law") {
  const auto joint = spmi::copula_joint(spmi::zipf_marginal(50, 1.0),
                                        spmi::GaussianCopula{0.5});
  const auto t = spmi::to_transition(joint);
  const spmi::Vector pi = spmi::stationary_distribution(t);
  CHECK(pi.sum() == doctest::Approx(1.0).epsilon(1e-10));
  // The symmetric joint's chain is reversible with stationary law equal to
  // the row marginal.
  CHECK((pi - joint.row_marginal).cwiseAbs().maxCoeff() < 1e-8);

  const auto corpus =
      spmi::generate_corpus(t, 1000000, spmi::GeneratorSeed{7});
  const spmi::CountVector freq = spmi::unigram_freqs(corpus, 50);
  double tv = 0.0;
  for (spmi::Index i = 0; i < 50; ++i) {
    tv += std::abs(static_cast<double>(freq(i)) / 1e6 - pi(i));
  }
  tv *= 0.5;
  MESSAGE("total variation distance: ", tv);
  CHECK(tv < 0.02);
}

TEST_CASE("stationary_distribution of explicit chains") {
  spmi::TransitionMatrix t;
  t.t.resize(2, 2);
  t.t << 2.0 / 3.0, 1.0 / 3.0, 2.0 / 3.0, 1.0 / 3.0;
  const spmi::Vector pi = spmi::stationary_distribution(t);
  CHECK(pi(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
  CHECK(pi(1) == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("ingest_text frozen hand example") {
  std::istringstream text("The cat the CAT sat");
  const auto [vocab, corpus] = spmi::ingest_text(text);
  REQUIRE(vocab.size() == 3);
  CHECK(vocab.tokens[0] == "the");
  CHECK(vocab.tokens[1] == "cat");
  CHECK(vocab.tokens[2] == "sat");
  CHECK(vocab.rank_of.at("the") == 1);
  CHECK(vocab.rank_of.at("cat") == 2);
  CHECK(vocab.rank_of.at("sat") == 3);
  CHECK(vocab.freq(0) == 2);
  CHECK(vocab.freq(1) == 2);
  CHECK(vocab.freq(2) == 1);
  CHECK(corpus.ids == std::vector<std::int32_t>{0, 1, 0, 1, 2});
}

TEST_CASE("ingest_text honors stopwords and min_count") {
  {
    std::istringstream text("the cat the cat sat");
    const auto [vocab, corpus] = spmi::ingest_text(text, 0, {"the"});
    REQUIRE(vocab.size() == 2);
    CHECK(vocab.tokens[0] == "cat");
    CHECK(vocab.tokens[1] == "sat");
    CHECK(corpus.ids == std::vector<std::int32_t>{0, 0, 1});
  }
  {
    std::istringstream text("The cat the CAT sat");
    const auto [vocab, corpus] = spmi::ingest_text(text, 2);
    REQUIRE(vocab.size() == 2);
    CHECK(vocab.tokens[0] == "the");
    CHECK(vocab.tokens[1] == "cat");
    CHECK(corpus.ids == std::vector<std::int32_t>{0, 1, 0, 1});
  }
  {
    std::istringstream text("a b c");
    CHECK_THROWS_AS(spmi::ingest_text(text, 100), spmi::DegenerateDataError);
  }
  {
    std::istringstream text("punctuation, splits; tokens! and? numbers42 ok");
    const auto [vocab, corpus] = spmi::ingest_text(text);
    CHECK(vocab.rank_of.count("punctuation") == 1);
    CHECK(vocab.rank_of.count("numbers42") == 1);
    CHECK(corpus.length() == 6);
  }
}

TEST_CASE("ingest_text is idempotent on its own output") {
  std::istringstream text(
      "To be, or not to be, that is the question: whether tis nobler in "
      "the mind to suffer the slings and arrows of outrageous fortune");
  const auto [vocab, corpus] = spmi::ingest_text(text);

  std::string rendered;
  for (spmi::Index i = 0; i < corpus.length(); ++i) {
    if (i) rendered += ' ';
    rendered += vocab.tokens[corpus.ids[i]];
  }
  std::istringstream again(rendered);
  const auto [vocab2, corpus2] = spmi::ingest_text(again);
  CHECK(vocab2.tokens == vocab.tokens);
  CHECK((vocab2.freq.array() == vocab.freq.array()).all());
  CHECK(corpus2.ids == corpus.ids);
}

TEST_CASE("unigram_freqs counts ids") {
  spmi::Corpus corpus;
  corpus.ids = {0, 1, 0};
  const spmi::CountVector freq = spmi::unigram_freqs(corpus, 2);
  CHECK(freq(0) == 2);
  CHECK(freq(1) == 1);

  spmi::Corpus bad;
  bad.ids = {0, 5};
  CHECK_THROWS_AS(spmi::unigram_freqs(bad, 2), spmi::InvalidParameterError);
}

TEST_CASE("corpus files round-trip") {
  TempDir tmp;
  const auto path = tmp.path / "corpus.txt";
  spmi::Corpus corpus;
  corpus.ids = {0, 3, 1, 2, 1, 0};
  spmi::save_corpus(path, corpus, 4, {{"seed", 9}});
  const spmi::LoadedCorpus loaded = spmi::load_corpus(path);
  CHECK(loaded.corpus.ids == corpus.ids);
  CHECK(loaded.V == 4);
  CHECK(loaded.header.at("seed") == 9);
}

TEST_CASE("corpus loader rejects malformed files") {
  TempDir tmp;
  CHECK_THROWS_AS(spmi::load_corpus(tmp.path / "missing.txt"), spmi::IoError);

  const auto not_json = tmp.path / "a.txt";
  std::ofstream(not_json) << "hello\n0\n1\n";
  CHECK_THROWS_AS(spmi::load_corpus(not_json), spmi::FormatError);

  const auto wrong_format = tmp.path / "b.txt";
  std::ofstream(wrong_format)
      << R"({"format":"something-else","version":1,"V":2,"length":2})"
      << "\n0\n1\n";
  CHECK_THROWS_AS(spmi::load_corpus(wrong_format), spmi::FormatError);

  const auto wrong_version = tmp.path / "c.txt";
  std::ofstream(wrong_version)
      << R"({"format":"spmilab-corpus","version":99,"V":2,"length":2})"
      << "\n0\n1\n";
  CHECK_THROWS_AS(spmi::load_corpus(wrong_version), spmi::VersionError);

  const auto truncated = tmp.path / "d.txt";
  std::ofstream(truncated)
      << R"({"format":"spmilab-corpus","version":1,"V":2,"length":5})"
      << "\n0\n1\n";
  CHECK_THROWS_AS(spmi::load_corpus(truncated), spmi::FormatError);

  const auto out_of_range = tmp.path / "e.txt";
  std::ofstream(out_of_range)
      << R"({"format":"spmilab-corpus","version":1,"V":2,"length":2})"
      << "\n0\n7\n";
  CHECK_THROWS_AS(spmi::load_corpus(out_of_range), spmi::FormatError);
}

TEST_CASE("vocabulary files round-trip") {
  TempDir tmp;
  const auto path = tmp.path / "vocab.tsv";
  std::istringstream text("the cat the CAT sat");
  const auto [vocab, corpus] = spmi::ingest_text(text);
  spmi::save_vocabulary(path, vocab);
  const spmi::Vocabulary loaded = spmi::load_vocabulary(path);
  CHECK(loaded.tokens == vocab.tokens);
  CHECK((loaded.freq.array() == vocab.freq.array()).all());
  CHECK(loaded.rank_of.at("sat") == 3);
}
