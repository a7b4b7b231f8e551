#include "langid/features.hpp"

#include <unicode/utf8.h>

#include <algorithm>
#include <limits>
#include <ostream>

#include "langid/error.hpp"
#include "langid/hash.hpp"
#include "langid/text.hpp"

namespace langid {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char32_t cp : decode_utf8(text)) {
    if (is_unicode_whitespace(cp)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      append_utf8(current, cp);
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  tokens.emplace_back(kEndOfSentence);
  return tokens;
}

std::vector<std::string> char_ngrams(std::string_view word, int nmin, int nmax) {
  std::vector<std::string> out;
  if (word == kEndOfSentence || nmin < 1 || nmax < nmin) return out;
  std::u32string wrapped = U"<";
  wrapped += decode_utf8(word);
  wrapped += U'>';
  const int length = static_cast<int>(wrapped.size());
  for (int n = nmin; n <= std::min(nmax, length); ++n) {
    for (int start = 0; start + n <= length; ++start) {
      out.push_back(encode_utf8(std::u32string_view(wrapped).substr(start, n)));
    }
  }
  return out;
}

uint32_t hash_ngram(std::string_view ngram, uint64_t bucket_size) {
  return static_cast<uint32_t>(fnv1a_32(ngram) % bucket_size);
}

Vocabulary::Vocabulary(std::vector<std::string> words,
                       std::vector<uint64_t> counts, uint64_t min_count,
                       uint64_t bucket_size, int ngram_min, int ngram_max)
    : words_(std::move(words)),
      counts_(std::move(counts)),
      min_count_(min_count),
      bucket_size_(bucket_size),
      ngram_min_(ngram_min),
      ngram_max_(ngram_max) {
  if (words_.size() != counts_.size()) {
    throw Error(Errc::kInvalidArgument, "vocabulary words/counts size mismatch");
  }
  if (bucket_size_ == 0) {
    throw Error(Errc::kInvalidArgument, "bucket size must be > 0");
  }
  if (ngram_min_ < 1 || ngram_max_ < ngram_min_) {
    throw Error(Errc::kInvalidArgument, "need 1 <= minn <= maxn");
  }
  if (words_.size() + bucket_size_ >
      static_cast<uint64_t>(std::numeric_limits<int32_t>::max())) {
    throw Error(Errc::kInvalidArgument, "feature space exceeds 2^31 - 1 ids");
  }
  index_.reserve(words_.size());
  for (size_t i = 0; i < words_.size(); ++i) {
    if (!index_.emplace(words_[i], static_cast<int32_t>(i)).second) {
      throw Error(Errc::kFormat, "duplicate vocabulary word '" + words_[i] + "'");
    }
  }
}

int32_t Vocabulary::word_id(std::string_view word) const {
  auto it = index_.find(std::string(word));
  return it == index_.end() ? -1 : it->second;
}

void Vocabulary::dump(std::ostream& out) const {
  for (size_t i = 0; i < words_.size(); ++i) {
    out << words_[i] << '\t' << i << '\t' << counts_[i] << '\n';
  }
}

Vocabulary build_vocab(const Corpus& corpus, uint64_t min_count,
                       uint64_t bucket_size, int ngram_min, int ngram_max) {
  if (corpus.empty()) {
    throw Error(Errc::kEmptyCorpus, "cannot build a vocabulary from an empty corpus");
  }
  if (min_count < 1) throw Error(Errc::kInvalidArgument, "min count must be >= 1");

  std::unordered_map<std::string, uint64_t> counts;
  for (const auto& line : corpus) {
    for (auto& token : tokenize(line.text)) ++counts[std::move(token)];
  }
  std::vector<std::pair<std::string, uint64_t>> kept;
  for (auto& [word, n] : counts) {
    if (n >= min_count || word == kEndOfSentence) kept.emplace_back(word, n);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<std::string> words;
  std::vector<uint64_t> word_counts;
  words.reserve(kept.size());
  word_counts.reserve(kept.size());
  for (auto& [word, n] : kept) {
    words.push_back(std::move(word));
    word_counts.push_back(n);
  }
  return Vocabulary(std::move(words), std::move(word_counts), min_count,
                    bucket_size, ngram_min, ngram_max);
}

void featurize_token(std::string_view token, const Vocabulary& vocab,
                     FeatureIds& out) {
  const int32_t id = vocab.word_id(token);
  if (id >= 0) out.push_back(id);
  if (token == kEndOfSentence) return;

  // Hash byte ranges of the wrapped word directly instead of materialising
  // each n-gram; the windows are the same ones char_ngrams() produces.
  std::string wrapped;
  wrapped.reserve(token.size() + 2);
  wrapped += '<';
  wrapped += token;
  wrapped += '>';
  std::vector<uint32_t> starts;  // byte offset of each code point, plus end
  starts.reserve(wrapped.size() + 1);
  const auto* s = reinterpret_cast<const uint8_t*>(wrapped.data());
  const auto length = static_cast<int32_t>(wrapped.size());
  for (int32_t i = 0; i < length;) {
    starts.push_back(static_cast<uint32_t>(i));
    UChar32 c;
    U8_NEXT(s, i, length, c);
  }
  starts.push_back(static_cast<uint32_t>(length));

  const int cps = static_cast<int>(starts.size()) - 1;
  const auto offset = static_cast<int32_t>(vocab.num_words());
  const std::string_view view(wrapped);
  for (int n = vocab.ngram_min(); n <= std::min(vocab.ngram_max(), cps); ++n) {
    for (int b = 0; b + n <= cps; ++b) {
      const auto gram = view.substr(starts[b], starts[b + n] - starts[b]);
      out.push_back(offset + static_cast<int32_t>(hash_ngram(gram, vocab.bucket_size())));
    }
  }
}

FeatureIds featurize(std::string_view text, const Vocabulary& vocab) {
  FeatureIds ids;
  for (const auto& token : tokenize(text)) featurize_token(token, vocab, ids);
  return ids;
}

}  // namespace langid
