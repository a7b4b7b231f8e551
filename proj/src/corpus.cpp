#include "langid/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>

#include "langid/error.hpp"
#include "langid/hash.hpp"
#include "langid/text.hpp"

namespace langid {
namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  size_t start = 0;
  while (true) {
    const size_t tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return fields;
}

std::string_view chomp(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

std::ifstream open_input(const std::filesystem::path& path,
                         const std::string& what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Errc::kIo, "cannot open " + what + " '" + path.string() + "'");
  }
  return in;
}

}  // namespace

CorpusManifest parse_manifest(std::istream& in,
                              const std::filesystem::path& base_dir) {
  CorpusManifest manifest;
  std::string raw;
  size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = chomp(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split_tabs(line);
    const std::string where = "manifest line " + std::to_string(line_no);
    if (fields.size() != 5) {
      throw Error(Errc::kFormat, where + ": expected 5 tab-separated fields, got " +
                                     std::to_string(fields.size()));
    }
    ManifestEntry entry;
    entry.source_name = std::string(fields[0]);
    entry.license = std::string(fields[1]);
    if (fields[3] == "plain-lines") {
      entry.format = SourceFormat::kPlainLines;
    } else if (fields[3] == "labeled-lines") {
      entry.format = SourceFormat::kLabeledLines;
    } else {
      throw Error(Errc::kFormat,
                  where + ": unknown format '" + std::string(fields[3]) + "'");
    }
    if (fields[2] == "perline") {
      if (entry.format == SourceFormat::kPlainLines) {
        throw Error(Errc::kFormat,
                    where + ": plain-lines source needs a single label");
      }
    } else {
      if (entry.format == SourceFormat::kLabeledLines) {
        throw Error(Errc::kFormat,
                    where + ": labeled-lines source must use 'perline'");
      }
      entry.label = parse_label(fields[2]);
    }
    const std::filesystem::path path{std::string(fields[4])};
    entry.path = path.is_relative() && !base_dir.empty() ? base_dir / path : path;
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

CorpusManifest read_manifest(const std::filesystem::path& path) {
  auto in = open_input(path, "manifest");
  return parse_manifest(in, path.parent_path());
}

LabeledLine parse_labeled_line(std::string_view line) {
  line = chomp(line);
  const size_t space = line.find(' ');
  const std::string_view code = line.substr(0, space);
  if (!code.starts_with(kLabelPrefix)) {
    throw Error(Errc::kMalformedLabel,
                "line does not start with __label__: '" +
                    std::string(line.substr(0, 40)) + "'");
  }
  LabeledLine out;
  out.label = parse_label(code);
  if (space != std::string_view::npos) out.text = std::string(line.substr(space + 1));
  return out;
}

std::string format_labeled_line(const LabeledLine& line) {
  std::string out(kLabelPrefix);
  out += line.label.str();
  out += ' ';
  out += line.text;
  return out;
}

Corpus read_labeled_lines(const std::filesystem::path& path) {
  auto in = open_input(path, "corpus file");
  Corpus corpus;
  std::string raw;
  while (std::getline(in, raw)) {
    if (chomp(raw).empty()) continue;
    corpus.push_back(parse_labeled_line(raw));
  }
  return corpus;
}

void write_labeled_lines(std::ostream& out, const Corpus& corpus) {
  for (const auto& line : corpus) out << format_labeled_line(line) << '\n';
}

bool script_filter(const LabeledLine& line) {
  return has_script_char(line.text, line.label.script);
}

size_t FilterResult::dropped() const {
  size_t n = 0;
  for (const auto& [label, d] : per_label) n += d.empty + d.wrong_script;
  return n;
}

FilterResult clean_and_filter(Corpus corpus) {
  FilterResult result;
  result.lines.reserve(corpus.size());
  for (auto& line : corpus) {
    LabelDrops& drops = result.per_label[line.label];
    line.text = remove_nonprinting(line.text);
    if (line.text.empty()) {
      ++drops.empty;
    } else if (!script_filter(line)) {
      ++drops.wrong_script;
    } else {
      ++drops.kept;
      result.lines.push_back(std::move(line));
    }
  }
  return result;
}

FilterResult ingest_manifest(const CorpusManifest& manifest) {
  Corpus raw;
  for (const auto& entry : manifest.entries) {
    std::ifstream in(entry.path, std::ios::binary);
    if (!in) {
      throw Error(Errc::kIo, "source '" + entry.source_name +
                                 "': cannot read '" + entry.path.string() + "'");
    }
    std::string line;
    while (std::getline(in, line)) {
      if (entry.format == SourceFormat::kPlainLines) {
        raw.push_back(LabeledLine{std::string(chomp(line)), *entry.label});
      } else {
        if (chomp(line).empty()) continue;
        raw.push_back(parse_labeled_line(line));
      }
    }
    if (in.bad()) {
      throw Error(Errc::kIo, "source '" + entry.source_name + "': read error");
    }
  }
  return clean_and_filter(std::move(raw));
}

CorpusStats corpus_stats(const Corpus& corpus) {
  CorpusStats stats;
  for (const auto& line : corpus) ++stats.per_label_lines[line.label];
  stats.total_lines = corpus.size();
  if (stats.total_lines == 0) return stats;
  for (const auto& [label, n] : stats.per_label_lines) {
    stats.fractions[label] =
        static_cast<double>(n) / static_cast<double>(stats.total_lines);
  }
  return stats;
}

void write_stats_tsv(std::ostream& out, const CorpusStats& stats) {
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::setprecision(9) << std::fixed;
  for (const auto& [label, n] : stats.per_label_lines) {
    out << label.str() << '\t' << n << '\t' << stats.fractions.at(label) << '\n';
  }
  out.flags(flags);
  out.precision(precision);
}

CorpusStats read_stats_tsv(const std::filesystem::path& path) {
  auto in = open_input(path, "stats file");
  CorpusStats stats;
  std::string raw;
  while (std::getline(in, raw)) {
    const std::string_view line = chomp(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split_tabs(line);
    if (fields.size() < 2) {
      throw Error(Errc::kFormat, "stats line needs label and count: '" +
                                     std::string(line) + "'");
    }
    const LanguageLabel label = parse_label(fields[0]);
    size_t n = 0;
    try {
      n = std::stoull(std::string(fields[1]));
    } catch (const std::exception&) {
      throw Error(Errc::kFormat, "bad count in stats line '" + std::string(line) + "'");
    }
    stats.per_label_lines[label] += n;
    stats.total_lines += n;
  }
  for (const auto& [label, n] : stats.per_label_lines) {
    stats.fractions[label] =
        static_cast<double>(n) / static_cast<double>(stats.total_lines);
  }
  return stats;
}

std::map<LanguageLabel, size_t> temperature_quotas(
    const std::map<LanguageLabel, size_t>& counts, double alpha,
    size_t target_total) {
  if (!(alpha > 0.0)) {
    throw Error(Errc::kInvalidArgument, "sampling alpha must be > 0");
  }
  size_t total = 0;
  for (const auto& [label, n] : counts) total += n;
  if (total == 0) throw Error(Errc::kEmptyCorpus, "cannot sample an empty corpus");

  std::vector<std::pair<LanguageLabel, long double>> weights;
  long double norm = 0;
  for (const auto& [label, n] : counts) {
    if (n == 0) continue;
    const long double p =
        static_cast<long double>(n) / static_cast<long double>(total);
    const long double w = std::pow(p, static_cast<long double>(alpha));
    weights.emplace_back(label, w);
    norm += w;
  }
  if (target_total < weights.size()) {
    throw Error(Errc::kInvalidArgument,
                "target total " + std::to_string(target_total) +
                    " is smaller than the number of labels (" +
                    std::to_string(weights.size()) + ")");
  }

  struct Share {
    size_t index;
    long double remainder;
  };
  std::map<LanguageLabel, size_t> quotas;
  std::vector<Share> shares;
  size_t assigned = 0;
  for (size_t i = 0; i < weights.size(); ++i) {
    const long double exact =
        static_cast<long double>(target_total) * weights[i].second / norm;
    const auto floor = static_cast<size_t>(std::floor(exact));
    quotas[weights[i].first] = floor;
    assigned += floor;
    shares.push_back({i, exact - static_cast<long double>(floor)});
  }
  // Labels are already in ascending order, so a stable sort breaks
  // remainder ties in favour of the smaller label.
  std::stable_sort(shares.begin(), shares.end(), [](const Share& a, const Share& b) {
    return a.remainder > b.remainder;
  });
  for (size_t k = 0; assigned < target_total; ++k, ++assigned) {
    ++quotas[weights[shares[k % shares.size()].index].first];
  }
  return quotas;
}

Corpus temperature_sample(const Corpus& corpus, double alpha, uint64_t seed,
                          size_t target_total) {
  if (corpus.empty()) throw Error(Errc::kEmptyCorpus, "cannot sample an empty corpus");

  std::map<LanguageLabel, std::vector<size_t>> by_label;
  for (size_t i = 0; i < corpus.size(); ++i) by_label[corpus[i].label].push_back(i);
  std::map<LanguageLabel, size_t> counts;
  for (const auto& [label, idx] : by_label) counts[label] = idx.size();
  const auto quotas = temperature_quotas(counts, alpha, target_total);

  Corpus out;
  out.reserve(target_total);
  for (const auto& [label, indices] : by_label) {
    const size_t quota = quotas.at(label);
    const std::string code = label.str();
    std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32),
                      fnv1a_32(code)};
    std::mt19937_64 rng(seq);
    const size_t available = indices.size();
    if (quota <= available) {
      // Partial Fisher-Yates over positions, then restore source order.
      std::vector<size_t> pos(available);
      std::iota(pos.begin(), pos.end(), size_t{0});
      for (size_t i = 0; i < quota; ++i) {
        std::uniform_int_distribution<size_t> pick(i, available - 1);
        std::swap(pos[i], pos[pick(rng)]);
      }
      pos.resize(quota);
      std::sort(pos.begin(), pos.end());
      for (size_t p : pos) out.push_back(corpus[indices[p]]);
    } else {
      for (size_t i : indices) out.push_back(corpus[i]);
      std::uniform_int_distribution<size_t> pick(0, available - 1);
      for (size_t k = available; k < quota; ++k) {
        out.push_back(corpus[indices[pick(rng)]]);
      }
    }
  }
  return out;
}

}  // namespace langid
