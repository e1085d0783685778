#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "spmi/genmodel.hpp"
#include "spmi/types.hpp"

namespace spmi {

// Frequency-ranked vocabulary: tokens[r] is the word of 1-based rank r+1,
// rank_of maps word -> rank (1 = most frequent), freq is aligned with tokens.
// Ties in frequency are broken by first occurrence in the source text.
struct Vocabulary {
  std::vector<std::string> tokens;
  std::unordered_map<std::string, int> rank_of;
  CountVector freq;

  Index size() const { return static_cast<Index>(tokens.size()); }
};

// A token-id sequence; ids are 0-based ranks into the owning vocabulary.
struct Corpus {
  std::vector<std::int32_t> ids;

  Index length() const { return static_cast<Index>(ids.size()); }
};

struct GeneratorSeed {
  std::uint64_t seed = 0;
};

// Stationary distribution of a row-stochastic matrix by power iteration
// (L1 tolerance 1e-12, at most 1e5 sweeps; falls back to the column-wise
// mean of the rows if iteration fails to settle).
Vector stationary_distribution(const TransitionMatrix& transition);

// Samples a Markov chain of `length >= 2` tokens: the first token from the
// stationary distribution, each next token from the predecessor's row.
// Bit-identical output for identical (transition, length, seed).
Corpus generate_corpus(const TransitionMatrix& transition, Index length,
                       GeneratorSeed seed);

// Lowercases, splits on non-alphanumeric runs, drops stopwords and words
// rarer than min_count, ranks the survivors by frequency, and re-encodes the
// surviving tokens (in original order) as rank ids.
std::pair<Vocabulary, Corpus> ingest_text(
    std::istream& text, std::int64_t min_count = 0,
    const std::unordered_set<std::string>& stopwords = {});

// Occurrence count of every id in [0, V); sums to the corpus length.
CountVector unigram_freqs(const Corpus& corpus, Index V);

// Plain-text persistence: a one-line JSON header {"format", "version", "V",
// "length", ...extra} followed by one token id per line.
void save_corpus(const std::filesystem::path& path, const Corpus& corpus,
                 Index V,
                 const nlohmann::json& extra = nlohmann::json::object());

struct LoadedCorpus {
  Corpus corpus;
  Index V = 0;
  nlohmann::json header;
};
LoadedCorpus load_corpus(const std::filesystem::path& path);

// Vocabulary persistence: JSON header line, then "token<TAB>freq" rows in
// rank order.
void save_vocabulary(const std::filesystem::path& path, const Vocabulary& v);
Vocabulary load_vocabulary(const std::filesystem::path& path);

}  // namespace spmi
