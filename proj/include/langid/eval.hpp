#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "langid/corpus.hpp"

// Evaluation works on label *codes* (strings) rather than LanguageLabel so
// that the same machinery applies after labels have been normalised to
// coarser codes such as BCP-47 macrolanguages.
namespace langid::eval {

/// Rows are gold labels, columns predicted labels.
struct ConfusionMatrix {
  std::vector<std::string> labels;
  std::vector<uint64_t> counts;  // labels.size()^2, row-major

  size_t size() const { return labels.size(); }
  uint64_t at(size_t gold, size_t predicted) const {
    return counts[gold * labels.size() + predicted];
  }
  uint64_t& at(size_t gold, size_t predicted) {
    return counts[gold * labels.size() + predicted];
  }
  uint64_t total() const;
  uint64_t row_sum(size_t gold) const;
  uint64_t column_sum(size_t predicted) const;
  /// Throws Error(kUnknownLabel).
  size_t index_of(const std::string& label) const;
};

struct ClassMetrics {
  std::string label;
  uint64_t tp = 0;
  uint64_t fp = 0;
  uint64_t fn = 0;
  uint64_t tn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double fpr = 0.0;

  /// Classes with no gold and no predicted lines stay out of macro averages.
  bool active() const { return tp + fp + fn > 0; }
};

/// Fills precision/recall/F1/FPR from the four counts; zero denominators
/// give 0.
ClassMetrics metrics_from_counts(std::string label, uint64_t tp, uint64_t fp,
                                 uint64_t fn, uint64_t tn);

struct EvalReport {
  std::vector<ClassMetrics> per_class;  // confusion.labels order
  double macro_f1 = 0.0;
  double macro_fpr = 0.0;
  size_t macro_classes = 0;
  ConfusionMatrix confusion;
  uint64_t n_lines = 0;
  // Lines whose prediction fell outside the label universe (or was empty)
  // and were scored as misses; zero unless ForeignPolicy::kCountAsMiss.
  uint64_t foreign_predictions = 0;

  const ClassMetrics& metrics(const std::string& label) const;
};

enum class ForeignPolicy {
  kError,        // a prediction outside the universe is an unknown-label error
  kCountAsMiss,  // it is a false negative for the gold class and nothing else
};

struct EvalOptions {
  // Sorted union of gold and predicted labels when unset.
  std::optional<std::vector<std::string>> universe;
  ForeignPolicy foreign = ForeignPolicy::kError;
};

EvalReport evaluate(std::span<const std::string> gold,
                    std::span<const std::string> predicted,
                    const EvalOptions& options = {});

EvalReport evaluate(const Corpus& gold, std::span<const LanguageLabel> predicted,
                    const EvalOptions& options = {});

struct Intersection {
  std::vector<size_t> kept;                // indices into gold, in order
  std::vector<std::string> kept_labels;    // sorted
  std::vector<std::string> removed_labels; // sorted
};

/// Keeps gold lines whose label is supported. Throws Error(kEmptyResult)
/// if nothing survives and Error(kInvalidArgument) if `supported` is empty.
Intersection restrict_to_intersection(std::span<const std::string> gold,
                                      const std::set<std::string>& supported);

struct RestrictedCorpus {
  Corpus lines;
  std::vector<std::string> removed_labels;
};

RestrictedCorpus restrict_to_intersection(const Corpus& gold,
                                          const std::set<LanguageLabel>& supported);

struct LabelMapping {
  std::map<std::string, std::string> rules;
};

/// TSV `label \t normalized_code`; `#` comments.
LabelMapping read_label_mapping(const std::filesystem::path& path);

/// Throws Error(kUnmappedLabel) naming the first label without a rule.
std::vector<std::string> normalize_labels(std::span<const std::string> labels,
                                          const LabelMapping& mapping);

struct TaxonomyMap {
  std::map<std::string, int> class_of;
};

/// TSV `label \t class`; classes outside 0-5 are rejected (kFormat).
TaxonomyMap read_taxonomy(const std::filesystem::path& path);

struct TaxonomyRow {
  int taxonomy_class = 0;
  size_t count = 0;
  double mean_f1 = 0.0;
  double mean_fpr = 0.0;
};

struct TaxonomySummary {
  std::vector<TaxonomyRow> rows;  // ascending class, only classes present
  std::vector<std::string> skipped_labels;

  size_t skipped() const { return skipped_labels.size(); }
};

/// Unweighted per-class means over the report's active classes.
TaxonomySummary taxonomy_report(const EvalReport& report, const TaxonomyMap& taxonomy);

struct SubsetConfusion {
  ConfusionMatrix matrix;
  // Per subset row: gold lines predicted as a label outside the subset.
  std::vector<uint64_t> off_subset;
};

/// The |subset| x |subset| minor, in subset order. Cell values are copied
/// unchanged. Throws Error(kUnknownLabel).
SubsetConfusion confusion_subset(const ConfusionMatrix& confusion,
                                 std::span<const std::string> subset);

/// Sample Pearson correlation. Throws Error(kLengthMismatch) for unequal or
/// too-short inputs and Error(kDegenerateVariance) for constant inputs.
double pearson(std::span<const double> x, std::span<const double> y);

std::string report_json(const EvalReport& report,
                        const TaxonomySummary* taxonomy = nullptr,
                        const std::optional<double>& size_correlation = std::nullopt);
void write_report_text(std::ostream& out, const EvalReport& report);
void write_taxonomy_text(std::ostream& out, const TaxonomySummary& summary);
/// Header row and column of labels; rows gold, columns predicted.
void write_confusion_tsv(std::ostream& out, const ConfusionMatrix& confusion);

}  // namespace langid::eval
