#include "langid/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <unordered_map>

#include <json.hpp>

#include "langid/error.hpp"

namespace langid::eval {

uint64_t ConfusionMatrix::total() const {
  return std::accumulate(counts.begin(), counts.end(), uint64_t{0});
}

uint64_t ConfusionMatrix::row_sum(size_t gold) const {
  uint64_t s = 0;
  for (size_t c = 0; c < size(); ++c) s += at(gold, c);
  return s;
}

uint64_t ConfusionMatrix::column_sum(size_t predicted) const {
  uint64_t s = 0;
  for (size_t r = 0; r < size(); ++r) s += at(r, predicted);
  return s;
}

size_t ConfusionMatrix::index_of(const std::string& label) const {
  auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) {
    throw Error(Errc::kUnknownLabel, "label '" + label + "' is not in the confusion matrix");
  }
  return static_cast<size_t>(it - labels.begin());
}

ClassMetrics metrics_from_counts(std::string label, uint64_t tp, uint64_t fp,
                                 uint64_t fn, uint64_t tn) {
  ClassMetrics m;
  m.label = std::move(label);
  m.tp = tp;
  m.fp = fp;
  m.fn = fn;
  m.tn = tn;
  auto ratio = [](uint64_t num, uint64_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  m.precision = ratio(tp, tp + fp);
  m.recall = ratio(tp, tp + fn);
  m.f1 = m.precision + m.recall > 0.0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  m.fpr = ratio(fp, fp + tn);
  return m;
}

const ClassMetrics& EvalReport::metrics(const std::string& label) const {
  for (const auto& m : per_class) {
    if (m.label == label) return m;
  }
  throw Error(Errc::kUnknownLabel, "label '" + label + "' is not in the report");
}

EvalReport evaluate(std::span<const std::string> gold,
                    std::span<const std::string> predicted,
                    const EvalOptions& options) {
  if (gold.size() != predicted.size()) {
    throw Error(Errc::kLengthMismatch,
                "gold has " + std::to_string(gold.size()) + " lines but predictions have " +
                    std::to_string(predicted.size()));
  }

  std::vector<std::string> universe;
  if (options.universe) {
    universe = *options.universe;
    std::sort(universe.begin(), universe.end());
    universe.erase(std::unique(universe.begin(), universe.end()), universe.end());
  } else {
    std::set<std::string> seen(gold.begin(), gold.end());
    for (const auto& p : predicted) {
      if (!p.empty() || options.foreign == ForeignPolicy::kError) seen.insert(p);
    }
    universe.assign(seen.begin(), seen.end());
  }
  std::unordered_map<std::string, size_t> index;
  for (size_t i = 0; i < universe.size(); ++i) index.emplace(universe[i], i);

  EvalReport report;
  report.n_lines = gold.size();
  report.confusion.labels = universe;
  report.confusion.counts.assign(universe.size() * universe.size(), 0);

  std::vector<uint64_t> foreign_per_gold(universe.size(), 0);
  for (size_t i = 0; i < gold.size(); ++i) {
    auto g = index.find(gold[i]);
    if (g == index.end()) {
      throw Error(Errc::kUnknownLabel,
                  "gold label '" + gold[i] + "' is outside the label universe");
    }
    auto p = index.find(predicted[i]);
    if (p == index.end()) {
      if (options.foreign == ForeignPolicy::kError) {
        throw Error(Errc::kUnknownLabel,
                    "predicted label '" + predicted[i] + "' is outside the label universe");
      }
      ++foreign_per_gold[g->second];
      ++report.foreign_predictions;
      continue;
    }
    ++report.confusion.at(g->second, p->second);
  }

  const ConfusionMatrix& cm = report.confusion;
  double f1_sum = 0.0;
  double fpr_sum = 0.0;
  for (size_t c = 0; c < universe.size(); ++c) {
    const uint64_t tp = cm.at(c, c);
    const uint64_t fn = cm.row_sum(c) - tp + foreign_per_gold[c];
    const uint64_t fp = cm.column_sum(c) - tp;
    const uint64_t tn = report.n_lines - tp - fn - fp;
    report.per_class.push_back(metrics_from_counts(universe[c], tp, fp, fn, tn));
    const auto& m = report.per_class.back();
    if (m.active()) {
      f1_sum += m.f1;
      fpr_sum += m.fpr;
      ++report.macro_classes;
    }
  }
  if (report.macro_classes > 0) {
    report.macro_f1 = f1_sum / static_cast<double>(report.macro_classes);
    report.macro_fpr = fpr_sum / static_cast<double>(report.macro_classes);
  }
  return report;
}

EvalReport evaluate(const Corpus& gold, std::span<const LanguageLabel> predicted,
                    const EvalOptions& options) {
  std::vector<std::string> g;
  std::vector<std::string> p;
  g.reserve(gold.size());
  p.reserve(predicted.size());
  for (const auto& line : gold) g.push_back(line.label.str());
  for (const auto& label : predicted) p.push_back(label.str());
  return evaluate(g, p, options);
}

Intersection restrict_to_intersection(std::span<const std::string> gold,
                                      const std::set<std::string>& supported) {
  if (supported.empty()) {
    throw Error(Errc::kInvalidArgument, "supported label set is empty");
  }
  Intersection out;
  std::set<std::string> kept;
  std::set<std::string> removed;
  for (size_t i = 0; i < gold.size(); ++i) {
    if (supported.count(gold[i]) != 0) {
      out.kept.push_back(i);
      kept.insert(gold[i]);
    } else {
      removed.insert(gold[i]);
    }
  }
  if (out.kept.empty()) {
    throw Error(Errc::kEmptyResult, "no gold label is in the supported set");
  }
  out.kept_labels.assign(kept.begin(), kept.end());
  out.removed_labels.assign(removed.begin(), removed.end());
  return out;
}

RestrictedCorpus restrict_to_intersection(const Corpus& gold,
                                          const std::set<LanguageLabel>& supported) {
  std::vector<std::string> codes;
  codes.reserve(gold.size());
  for (const auto& line : gold) codes.push_back(line.label.str());
  std::set<std::string> supported_codes;
  for (const auto& label : supported) supported_codes.insert(label.str());
  const Intersection cut = restrict_to_intersection(codes, supported_codes);
  RestrictedCorpus out;
  out.lines.reserve(cut.kept.size());
  for (size_t i : cut.kept) out.lines.push_back(gold[i]);
  out.removed_labels = cut.removed_labels;
  return out;
}

namespace {

std::vector<std::vector<std::string>> read_tsv(const std::filesystem::path& path,
                                               const char* what) {
  std::ifstream in(path);
  if (!in) {
    throw Error(Errc::kIo, std::string("cannot open ") + what + " '" + path.string() + "'");
  }
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> fields;
    size_t start = 0;
    while (true) {
      const size_t tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (fields.size() != 2) {
      throw Error(Errc::kFormat, std::string(what) + ": expected 2 fields in '" + line + "'");
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace

LabelMapping read_label_mapping(const std::filesystem::path& path) {
  LabelMapping mapping;
  for (auto& row : read_tsv(path, "mapping file")) {
    mapping.rules[row[0]] = row[1];
  }
  return mapping;
}

std::vector<std::string> normalize_labels(std::span<const std::string> labels,
                                          const LabelMapping& mapping) {
  std::vector<std::string> out;
  out.reserve(labels.size());
  for (const auto& label : labels) {
    auto it = mapping.rules.find(label);
    if (it == mapping.rules.end()) {
      throw Error(Errc::kUnmappedLabel, "no normalisation rule for label '" + label + "'");
    }
    out.push_back(it->second);
  }
  return out;
}

TaxonomyMap read_taxonomy(const std::filesystem::path& path) {
  TaxonomyMap taxonomy;
  for (auto& row : read_tsv(path, "taxonomy file")) {
    int cls = -1;
    if (row[1].size() == 1 && row[1][0] >= '0' && row[1][0] <= '9') cls = row[1][0] - '0';
    if (cls < 0 || cls > 5) {
      throw Error(Errc::kFormat,
                  "taxonomy class for '" + row[0] + "' must be 0-5, got '" + row[1] + "'");
    }
    taxonomy.class_of[row[0]] = cls;
  }
  return taxonomy;
}

TaxonomySummary taxonomy_report(const EvalReport& report, const TaxonomyMap& taxonomy) {
  struct Acc {
    size_t count = 0;
    double f1 = 0.0;
    double fpr = 0.0;
  };
  std::map<int, Acc> by_class;
  TaxonomySummary summary;
  for (const auto& m : report.per_class) {
    if (!m.active()) continue;
    auto it = taxonomy.class_of.find(m.label);
    if (it == taxonomy.class_of.end()) {
      summary.skipped_labels.push_back(m.label);
      continue;
    }
    Acc& acc = by_class[it->second];
    ++acc.count;
    acc.f1 += m.f1;
    acc.fpr += m.fpr;
  }
  for (const auto& [cls, acc] : by_class) {
    const auto n = static_cast<double>(acc.count);
    summary.rows.push_back({cls, acc.count, acc.f1 / n, acc.fpr / n});
  }
  return summary;
}

SubsetConfusion confusion_subset(const ConfusionMatrix& confusion,
                                 std::span<const std::string> subset) {
  std::vector<size_t> idx;
  idx.reserve(subset.size());
  for (const auto& label : subset) idx.push_back(confusion.index_of(label));

  SubsetConfusion out;
  out.matrix.labels.assign(subset.begin(), subset.end());
  out.matrix.counts.assign(subset.size() * subset.size(), 0);
  out.off_subset.assign(subset.size(), 0);
  for (size_t r = 0; r < idx.size(); ++r) {
    uint64_t inside = 0;
    for (size_t c = 0; c < idx.size(); ++c) {
      out.matrix.at(r, c) = confusion.at(idx[r], idx[c]);
      inside += out.matrix.at(r, c);
    }
    out.off_subset[r] = confusion.row_sum(idx[r]) - inside;
  }
  return out;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(Errc::kLengthMismatch, "pearson needs equally long inputs");
  }
  if (x.size() < 2) throw Error(Errc::kLengthMismatch, "pearson needs at least 2 points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw Error(Errc::kDegenerateVariance, "pearson is undefined for a constant input");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::string report_json(const EvalReport& report, const TaxonomySummary* taxonomy,
                        const std::optional<double>& size_correlation) {
  nlohmann::ordered_json j;
  j["n_lines"] = report.n_lines;
  j["macro_f1"] = report.macro_f1;
  j["macro_fpr"] = report.macro_fpr;
  j["macro_classes"] = report.macro_classes;
  j["foreign_predictions"] = report.foreign_predictions;
  auto& classes = j["per_class"] = nlohmann::ordered_json::array();
  for (const auto& m : report.per_class) {
    classes.push_back({{"label", m.label},
                       {"tp", m.tp},
                       {"fp", m.fp},
                       {"fn", m.fn},
                       {"tn", m.tn},
                       {"precision", m.precision},
                       {"recall", m.recall},
                       {"f1", m.f1},
                       {"fpr", m.fpr}});
  }
  j["confusion"] = {{"labels", report.confusion.labels},
                    {"counts", report.confusion.counts}};
  if (taxonomy != nullptr) {
    auto& rows = j["taxonomy"]["classes"] = nlohmann::ordered_json::array();
    for (const auto& r : taxonomy->rows) {
      rows.push_back({{"class", r.taxonomy_class},
                      {"count", r.count},
                      {"mean_f1", r.mean_f1},
                      {"mean_fpr", r.mean_fpr}});
    }
    j["taxonomy"]["skipped_labels"] = taxonomy->skipped_labels;
  }
  if (size_correlation) j["pearson_train_lines_vs_f1"] = *size_correlation;
  return j.dump(2);
}

void write_report_text(std::ostream& out, const EvalReport& report) {
  size_t width = 5;
  for (const auto& m : report.per_class) width = std::max(width, m.label.size());
  const auto flags = out.flags();
  out << std::left << std::setw(static_cast<int>(width)) << "label" << std::right
      << std::setw(9) << "tp" << std::setw(9) << "fp" << std::setw(9) << "fn"
      << std::setw(10) << "prec" << std::setw(10) << "recall" << std::setw(10) << "f1"
      << std::setw(10) << "fpr" << '\n';
  out << std::fixed << std::setprecision(4);
  for (const auto& m : report.per_class) {
    out << std::left << std::setw(static_cast<int>(width)) << m.label << std::right
        << std::setw(9) << m.tp << std::setw(9) << m.fp << std::setw(9) << m.fn
        << std::setw(10) << m.precision << std::setw(10) << m.recall << std::setw(10)
        << m.f1 << std::setw(10) << m.fpr << '\n';
  }
  out << "lines: " << report.n_lines << "  classes: " << report.macro_classes
      << "  macro F1: " << report.macro_f1 << "  macro FPR: " << report.macro_fpr;
  if (report.foreign_predictions > 0) {
    out << "  out-of-set predictions: " << report.foreign_predictions;
  }
  out << '\n';
  out.flags(flags);
}

void write_taxonomy_text(std::ostream& out, const TaxonomySummary& summary) {
  const auto flags = out.flags();
  out << std::setw(5) << "class" << std::setw(7) << "count" << std::setw(10) << "mean F1"
      << std::setw(10) << "mean FPR" << '\n';
  out << std::fixed << std::setprecision(3);
  for (const auto& r : summary.rows) {
    out << std::setw(5) << r.taxonomy_class << std::setw(7) << r.count << std::setw(10)
        << r.mean_f1 << std::setw(10) << r.mean_fpr << '\n';
  }
  out << "skipped (not in taxonomy): " << summary.skipped() << '\n';
  out.flags(flags);
}

void write_confusion_tsv(std::ostream& out, const ConfusionMatrix& confusion) {
  out << "gold\\predicted";
  for (const auto& label : confusion.labels) out << '\t' << label;
  out << '\n';
  for (size_t r = 0; r < confusion.size(); ++r) {
    out << confusion.labels[r];
    for (size_t c = 0; c < confusion.size(); ++c) out << '\t' << confusion.at(r, c);
    out << '\n';
  }
}

}  // namespace langid::eval
