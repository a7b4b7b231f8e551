#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "langid/corpus.hpp"

namespace langid {

inline constexpr std::string_view kEndOfSentence = "</s>";

/// Splits on Unicode whitespace and appends the `</s>` sentinel.
std::vector<std::string> tokenize(std::string_view text);

/// Code-point n-grams of `<word>` for every length in [nmin, nmax], grouped
/// by length then by start position. The sentinel yields nothing.
std::vector<std::string> char_ngrams(std::string_view word, int nmin, int nmax);

/// FNV-1a 32-bit of the n-gram's UTF-8 bytes, modulo `bucket_size`.
uint32_t hash_ngram(std::string_view ngram, uint64_t bucket_size);

/// Frequent words plus the hashed n-gram bucket space. Feature ids in
/// [0, W) are words, ids in [W, W + B) are n-gram buckets.
class Vocabulary {
 public:
  Vocabulary() = default;

  /// `words` must already be in id order.
  Vocabulary(std::vector<std::string> words, std::vector<uint64_t> counts,
             uint64_t min_count, uint64_t bucket_size, int ngram_min,
             int ngram_max);

  int32_t word_id(std::string_view word) const;  // -1 when absent
  const std::string& word(int32_t id) const { return words_.at(id); }
  uint64_t count(int32_t id) const { return counts_.at(id); }

  size_t num_words() const { return words_.size(); }
  uint64_t bucket_size() const { return bucket_size_; }
  uint64_t min_count() const { return min_count_; }
  int ngram_min() const { return ngram_min_; }
  int ngram_max() const { return ngram_max_; }
  uint64_t feature_space() const { return words_.size() + bucket_size_; }

  const std::vector<std::string>& words() const { return words_; }
  const std::vector<uint64_t>& counts() const { return counts_; }

  /// `word \t id \t count`, one line per word in id order.
  void dump(std::ostream& out) const;

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.words_ == b.words_ && a.counts_ == b.counts_ &&
           a.min_count_ == b.min_count_ && a.bucket_size_ == b.bucket_size_ &&
           a.ngram_min_ == b.ngram_min_ && a.ngram_max_ == b.ngram_max_;
  }

 private:
  std::vector<std::string> words_;
  std::vector<uint64_t> counts_;
  std::unordered_map<std::string, int32_t> index_;
  uint64_t min_count_ = 1;
  uint64_t bucket_size_ = 0;
  int ngram_min_ = 2;
  int ngram_max_ = 5;
};

/// Keeps words seen at least `min_count` times (and always `</s>`); ids go
/// by descending count, ties broken by byte-wise word order.
Vocabulary build_vocab(const Corpus& corpus, uint64_t min_count,
                       uint64_t bucket_size, int ngram_min, int ngram_max);

using FeatureIds = std::vector<int32_t>;

/// Appends the features of one token: its word id when in vocabulary, then
/// one bucket id per character n-gram.
void featurize_token(std::string_view token, const Vocabulary& vocab,
                     FeatureIds& out);

FeatureIds featurize(std::string_view text, const Vocabulary& vocab);

}  // namespace langid
