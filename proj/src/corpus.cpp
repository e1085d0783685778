#include "spmi/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include "spmi/errors.hpp"
#include "spmi/rng.hpp"

namespace spmi {
namespace {

void check_transition(const TransitionMatrix& transition) {
  const Matrix& t = transition.t;
  if (t.rows() < 1 || t.rows() != t.cols()) {
    throw InvalidParameterError("transition matrix must be square");
  }
  if ((t.array() < 0.0).any()) {
    throw InvalidParameterError("transition matrix has negative entries");
  }
  for (Index i = 0; i < t.rows(); ++i) {
    if (std::abs(t.row(i).sum() - 1.0) > 1e-8) {
      throw InvalidParameterError("transition matrix rows must sum to 1");
    }
  }
}

std::vector<double> row_cdf(const Matrix& t, Index i) {
  std::vector<double> cdf(static_cast<std::size_t>(t.cols()));
  double cum = 0.0;
  for (Index j = 0; j < t.cols(); ++j) {
    cum += t(i, j);
    cdf[static_cast<std::size_t>(j)] = cum;
  }
  return cdf;
}

}  // namespace

Vector stationary_distribution(const TransitionMatrix& transition) {
  check_transition(transition);
  const Matrix& t = transition.t;
  const Index v = t.rows();
  Vector pi = Vector::Constant(v, 1.0 / static_cast<double>(v));
  constexpr int kMaxSweeps = 100000;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    Vector next = (pi.transpose() * t).transpose();
    next /= next.sum();
    const double delta = (next - pi).cwiseAbs().sum();
    pi = next;
    if (delta <= 1e-12) return pi;
  }
  // Did not settle (e.g. a periodic chain): fall back to the marginal of the
  // rows, i.e. the next-state distribution from a uniform state.
  Vector fallback = t.colwise().mean().transpose();
  fallback /= fallback.sum();
  return fallback;
}

Corpus generate_corpus(const TransitionMatrix& transition, Index length,
                       GeneratorSeed seed) {
  if (length < 2) {
    throw InvalidParameterError("generate_corpus: require length >= 2");
  }
  check_transition(transition);
  const Matrix& t = transition.t;
  const Index v = t.rows();

  const Vector pi = stationary_distribution(transition);
  std::vector<double> start_cdf(static_cast<std::size_t>(v));
  double cum = 0.0;
  for (Index j = 0; j < v; ++j) {
    cum += pi[j];
    start_cdf[static_cast<std::size_t>(j)] = cum;
  }
  std::vector<std::vector<double>> cdfs;
  cdfs.reserve(static_cast<std::size_t>(v));
  for (Index i = 0; i < v; ++i) cdfs.push_back(row_cdf(t, i));

  std::mt19937_64 gen(seed.seed);
  Corpus corpus;
  corpus.ids.resize(static_cast<std::size_t>(length));
  std::int32_t state =
      static_cast<std::int32_t>(sample_cdf(start_cdf, uniform01(gen)));
  corpus.ids[0] = state;
  for (Index n = 1; n < length; ++n) {
    state = static_cast<std::int32_t>(
        sample_cdf(cdfs[static_cast<std::size_t>(state)], uniform01(gen)));
    corpus.ids[static_cast<std::size_t>(n)] = state;
  }
  return corpus;
}

std::pair<Vocabulary, Corpus> ingest_text(
    std::istream& text, std::int64_t min_count,
    const std::unordered_set<std::string>& stopwords) {
  if (min_count < 0) {
    throw InvalidParameterError("ingest_text: min_count must be nonnegative");
  }
  // Pass 1 (buffered): lowercase and split on non-alphanumeric runs.
  std::vector<std::string> raw_tokens;
  std::string token;
  char ch;
  while (text.get(ch)) {
    const unsigned char u = static_cast<unsigned char>(ch);
    if (std::isalnum(u)) {
      token.push_back(static_cast<char>(std::tolower(u)));
    } else if (!token.empty()) {
      raw_tokens.push_back(std::move(token));
      token.clear();
    }
  }
  if (!token.empty()) raw_tokens.push_back(std::move(token));

  // Count frequencies; remember first-occurrence order for tie-breaks.
  std::unordered_map<std::string, std::int64_t> count;
  std::vector<std::string> first_seen;
  for (const std::string& w : raw_tokens) {
    auto [it, inserted] = count.emplace(w, 0);
    if (inserted) first_seen.push_back(w);
    ++it->second;
  }

  std::vector<std::string> kept;
  for (const std::string& w : first_seen) {
    if (stopwords.count(w)) continue;
    if (count[w] < min_count) continue;
    kept.push_back(w);
  }
  if (kept.empty()) {
    throw DegenerateDataError("ingest_text: no words survive filtering");
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [&](const std::string& a, const std::string& b) {
                     return count[a] > count[b];
                   });

  Vocabulary vocab;
  vocab.tokens = kept;
  vocab.freq.resize(static_cast<Index>(kept.size()));
  for (std::size_t r = 0; r < kept.size(); ++r) {
    vocab.rank_of[kept[r]] = static_cast<int>(r) + 1;
    vocab.freq[static_cast<Index>(r)] = count[kept[r]];
  }

  Corpus corpus;
  corpus.ids.reserve(raw_tokens.size());
  for (const std::string& w : raw_tokens) {
    auto it = vocab.rank_of.find(w);
    if (it != vocab.rank_of.end()) {
      corpus.ids.push_back(static_cast<std::int32_t>(it->second - 1));
    }
  }
  return {std::move(vocab), std::move(corpus)};
}

CountVector unigram_freqs(const Corpus& corpus, Index V) {
  if (V < 1) throw InvalidParameterError("unigram_freqs: require V >= 1");
  CountVector freq = CountVector::Zero(V);
  for (std::int32_t id : corpus.ids) {
    if (id < 0 || id >= V) {
      throw InvalidParameterError("unigram_freqs: token id out of range");
    }
    ++freq[id];
  }
  return freq;
}

void save_corpus(const std::filesystem::path& path, const Corpus& corpus,
                 Index V, const nlohmann::json& extra) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  nlohmann::json header = {{"format", "spmilab-corpus"},
                           {"version", 1},
                           {"V", V},
                           {"length", corpus.length()}};
  for (auto it = extra.begin(); it != extra.end(); ++it) {
    header[it.key()] = it.value();
  }
  out << header.dump() << "\n";
  for (std::int32_t id : corpus.ids) out << id << "\n";
  if (!out) throw IoError("write failed: " + path.string());
}

LoadedCorpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  std::string line;
  if (!std::getline(in, line)) {
    throw FormatError("corpus file is empty: " + path.string());
  }
  LoadedCorpus loaded;
  try {
    loaded.header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception&) {
    throw FormatError("corpus header is not valid JSON: " + path.string());
  }
  if (loaded.header.value("format", "") != "spmilab-corpus") {
    throw FormatError("not a corpus file: " + path.string());
  }
  if (loaded.header.value("version", 0) != 1) {
    throw VersionError("unsupported corpus format version: " + path.string());
  }
  loaded.V = loaded.header.value("V", Index{0});
  const auto expected = loaded.header.value("length", std::int64_t{-1});
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::size_t pos = 0;
    int id;
    try {
      id = std::stoi(line, &pos);
    } catch (const std::exception&) {
      throw FormatError("bad token id line: " + path.string());
    }
    if (pos != line.size()) {
      throw FormatError("bad token id line: " + path.string());
    }
    if (id < 0 || (loaded.V > 0 && id >= loaded.V)) {
      throw FormatError("token id out of range: " + path.string());
    }
    loaded.corpus.ids.push_back(static_cast<std::int32_t>(id));
  }
  if (expected >= 0 && expected != loaded.corpus.length()) {
    throw FormatError("corpus length does not match header: " +
                      path.string());
  }
  return loaded;
}

void save_vocabulary(const std::filesystem::path& path, const Vocabulary& v) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  nlohmann::json header = {{"format", "spmilab-vocab"},
                           {"version", 1},
                           {"V", v.size()}};
  out << header.dump() << "\n";
  for (Index r = 0; r < v.size(); ++r) {
    out << v.tokens[static_cast<std::size_t>(r)] << "\t" << v.freq[r] << "\n";
  }
  if (!out) throw IoError("write failed: " + path.string());
}

Vocabulary load_vocabulary(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  std::string line;
  if (!std::getline(in, line)) {
    throw FormatError("vocabulary file is empty: " + path.string());
  }
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception&) {
    throw FormatError("vocabulary header is not valid JSON: " +
                      path.string());
  }
  if (header.value("format", "") != "spmilab-vocab") {
    throw FormatError("not a vocabulary file: " + path.string());
  }
  if (header.value("version", 0) != 1) {
    throw VersionError("unsupported vocabulary format version: " +
                       path.string());
  }
  Vocabulary vocab;
  std::vector<std::int64_t> freqs;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw FormatError("bad vocabulary line: " + path.string());
    }
    const std::string word = line.substr(0, tab);
    std::int64_t f;
    try {
      f = std::stoll(line.substr(tab + 1));
    } catch (const std::exception&) {
      throw FormatError("bad vocabulary frequency: " + path.string());
    }
    vocab.rank_of[word] = static_cast<int>(vocab.tokens.size()) + 1;
    vocab.tokens.push_back(word);
    freqs.push_back(f);
  }
  vocab.freq.resize(static_cast<Index>(freqs.size()));
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    vocab.freq[static_cast<Index>(i)] = freqs[i];
  }
  return vocab;
}

}  // namespace spmi
