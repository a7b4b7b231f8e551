#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "langid/label.hpp"

namespace langid {

struct LabeledLine {
  std::string text;
  LanguageLabel label;

  friend bool operator==(const LabeledLine&, const LabeledLine&) = default;
};

using Corpus = std::vector<LabeledLine>;

enum class SourceFormat { kLabeledLines, kPlainLines };

struct ManifestEntry {
  std::string source_name;
  std::string license;
  std::filesystem::path path;
  // Set for plain-lines sources only; labeled-lines sources label each line.
  std::optional<LanguageLabel> label;
  SourceFormat format = SourceFormat::kPlainLines;
};

struct CorpusManifest {
  std::vector<ManifestEntry> entries;
};

/// Reads the TSV manifest
///   source_name \t license \t label|perline \t format \t path
/// `#` starts a comment line. Relative paths resolve against the manifest's
/// directory.
CorpusManifest read_manifest(const std::filesystem::path& path);
CorpusManifest parse_manifest(std::istream& in,
                              const std::filesystem::path& base_dir = {});

/// Parses `__label__xxx_Yyyy text`. The text is returned verbatim.
LabeledLine parse_labeled_line(std::string_view line);
std::string format_labeled_line(const LabeledLine& line);

/// Reads a labeled-lines file without cleaning or filtering.
Corpus read_labeled_lines(const std::filesystem::path& path);
void write_labeled_lines(std::ostream& out, const Corpus& corpus);

/// True iff the line has at least one character in its label's script.
bool script_filter(const LabeledLine& line);

struct LabelDrops {
  std::size_t kept = 0;
  std::size_t empty = 0;       // nothing left after cleaning
  std::size_t wrong_script = 0;
};

struct FilterResult {
  Corpus lines;
  std::map<LanguageLabel, LabelDrops> per_label;

  std::size_t dropped() const;
};

/// Cleans every line with remove_nonprinting and keeps it only if the
/// result is non-empty and passes script_filter.
FilterResult clean_and_filter(Corpus corpus);

/// Reads every manifest source in order and runs clean_and_filter over the
/// concatenation. Unreadable sources raise Error(kIo) naming the source.
FilterResult ingest_manifest(const CorpusManifest& manifest);

struct CorpusStats {
  std::map<LanguageLabel, std::size_t> per_label_lines;
  std::size_t total_lines = 0;
  std::map<LanguageLabel, double> fractions;
};

CorpusStats corpus_stats(const Corpus& corpus);

/// `label \t count \t fraction`, sorted by label.
void write_stats_tsv(std::ostream& out, const CorpusStats& stats);
CorpusStats read_stats_tsv(const std::filesystem::path& path);

/// Per-label output counts for temperature sampling: the share of label l is
/// proportional to p_l^alpha, rounded with the largest-remainder method so
/// the counts sum to `target_total`. Remainder ties go to the smaller label.
std::map<LanguageLabel, std::size_t> temperature_quotas(
    const std::map<LanguageLabel, std::size_t>& counts, double alpha,
    std::size_t target_total);

/// Resamples the corpus to temperature_quotas(). Output is grouped by label
/// in label order. A label whose quota fits its lines gets a uniform subset
/// (kept in source order); otherwise all its lines followed by uniform draws
/// with replacement. Each label draws from its own seeded stream.
Corpus temperature_sample(const Corpus& corpus, double alpha, uint64_t seed,
                          std::size_t target_total);

}  // namespace langid
