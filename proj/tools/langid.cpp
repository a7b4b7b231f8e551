// Command-line front end: corpus filtering, temperature sampling, corpus
// statistics, training, batch prediction and evaluation.
//
// Data goes to the output stream (or --output), diagnostics to stderr.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "langid/corpus.hpp"
#include "langid/error.hpp"
#include "langid/eval.hpp"
#include "langid/model.hpp"
#include "langid/model_io.hpp"
#include "langid/simd.hpp"
#include "langid/text.hpp"

namespace {

using langid::Errc;
using langid::Error;
using Clock = std::chrono::steady_clock;

// Either the named file or stdout.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
    if (!*file_) throw Error(Errc::kIo, "cannot write '" + path + "'");
    path_ = path;
  }

  std::ostream& stream() { return file_ ? *file_ : std::cout; }

  void finish() {
    stream().flush();
    if (!stream()) throw Error(Errc::kIo, "error writing '" + (path_.empty() ? "stdout" : path_) + "'");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::string path_;
};

void require_file(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kIo, std::string("cannot open ") + what + " '" + path + "'");
}

std::vector<std::string> read_lines(const std::string& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIo, std::string("cannot open ") + what + " '" + path + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Common {
  std::string kernels = "auto";
};

void apply_kernels(const Common& common) {
  langid::simd::set_backend(langid::simd::parse_backend(common.kernels));
}

// ---------------------------------------------------------------- filter

struct FilterArgs {
  std::string manifest;
  std::string input;
  std::string output;
};

int cmd_filter(const FilterArgs& args) {
  langid::FilterResult result;
  if (!args.manifest.empty()) {
    result = langid::ingest_manifest(langid::read_manifest(args.manifest));
  } else {
    require_file(args.input, "corpus file");
    result = langid::clean_and_filter(langid::read_labeled_lines(args.input));
  }
  Output out(args.output);
  langid::write_labeled_lines(out.stream(), result.lines);
  out.finish();

  std::cerr << "label\tkept\tdropped_empty\tdropped_script\n";
  for (const auto& [label, d] : result.per_label) {
    std::cerr << label.str() << '\t' << d.kept << '\t' << d.empty << '\t' << d.wrong_script
              << '\n';
  }
  std::cerr << "kept " << result.lines.size() << " lines, dropped " << result.dropped()
            << '\n';
  return 0;
}

// ---------------------------------------------------------------- sample

struct SampleArgs {
  std::string input;
  std::string output;
  double alpha = 0.3;
  uint64_t seed = langid::kDefaultSeed;
  size_t target_total = 0;
};

int cmd_sample(const SampleArgs& args) {
  require_file(args.input, "corpus file");
  const auto corpus = langid::read_labeled_lines(args.input);
  const auto sampled =
      langid::temperature_sample(corpus, args.alpha, args.seed, args.target_total);
  Output out(args.output);
  langid::write_labeled_lines(out.stream(), sampled);
  out.finish();
  std::cerr << "sampled " << sampled.size() << " lines from " << corpus.size()
            << " (alpha " << args.alpha << ")\n";
  return 0;
}

// ----------------------------------------------------------------- stats

struct StatsArgs {
  std::string input;
  std::string output;
};

int cmd_stats(const StatsArgs& args) {
  require_file(args.input, "corpus file");
  const auto stats = langid::corpus_stats(langid::read_labeled_lines(args.input));
  Output out(args.output);
  langid::write_stats_tsv(out.stream(), stats);
  out.finish();
  std::cerr << stats.per_label_lines.size() << " labels, " << stats.total_lines
            << " lines\n";
  return 0;
}

// ----------------------------------------------------------------- train

struct TrainArgs {
  std::string input;
  std::string output;
  std::string dump_vocab;
  std::string loss = "softmax";
  langid::Hyperparams hp;
};

int cmd_train(const TrainArgs& args, const Common& common) {
  require_file(args.input, "training file");
  apply_kernels(common);
  const auto corpus = langid::read_labeled_lines(args.input);

  const auto start = Clock::now();
  const auto model = langid::train(
      corpus, args.hp, [](const langid::EpochSummary& s, const langid::Model&) {
        std::cerr << "epoch " << s.epoch << ": mean loss " << s.mean_loss << '\n';
      });
  const double elapsed = seconds_since(start);

  langid::save_model(model, args.output);
  if (!args.dump_vocab.empty()) {
    Output vocab_out(args.dump_vocab);
    model.vocab.dump(vocab_out.stream());
    vocab_out.finish();
  }

  const double examples = static_cast<double>(corpus.size()) * args.hp.epochs;
  std::cerr << "labels: " << model.num_labels() << "\n"
            << "words (W): " << model.vocab.num_words() << "\n"
            << "buckets (B): " << model.vocab.bucket_size() << "\n"
            << "parameters: " << model.parameter_count() << "\n"
            << "kernels: " << langid::simd::active().name << "\n"
            << "wall time: " << elapsed << " s\n"
            << "throughput: " << (elapsed > 0 ? examples / elapsed : 0.0)
            << " lines/sec\n";
  return 0;
}

// --------------------------------------------------------------- predict

struct PredictArgs {
  std::string model;
  std::string input;
  std::string output;
  int k = 1;
  double threshold = 0.0;
  int threads = 1;
  bool labeled_input = false;
};

int cmd_predict(const PredictArgs& args, const Common& common) {
  apply_kernels(common);
  const auto model = langid::load_model(args.model);
  auto lines = read_lines(args.input, "input file");
  for (auto& line : lines) {
    if (args.labeled_input && line.starts_with(langid::kLabelPrefix)) {
      const size_t space = line.find(' ');
      line = space == std::string::npos ? std::string() : line.substr(space + 1);
    }
    line = langid::remove_nonprinting(line);
  }

  const auto start = Clock::now();
  const auto predictions =
      langid::predict_batch(model, lines, args.k, args.threshold, args.threads);
  const double elapsed = seconds_since(start);

  Output out(args.output);
  for (const auto& p : predictions) out.stream() << langid::format_predictions(p) << '\n';
  out.finish();
  std::cerr << "predicted " << lines.size() << " lines in " << elapsed << " s ("
            << (elapsed > 0 ? static_cast<double>(lines.size()) / elapsed : 0.0)
            << " lines/sec)\n";
  return 0;
}

// ------------------------------------------------------------------ eval

struct EvalArgs {
  std::string gold;
  std::string predictions;
  std::string supported;
  std::string mapping;
  std::string taxonomy;
  std::string train_stats;
  std::string output;
  std::string format = "json";
  std::string confusion;
  std::string subset;
  std::string subset_output;
};

std::string first_label(const std::string& line) {
  std::string code = line.substr(0, line.find_first_of(" \t"));
  if (code.starts_with(langid::kLabelPrefix)) code.erase(0, langid::kLabelPrefix.size());
  return code;
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int cmd_eval(const EvalArgs& args) {
  namespace ev = langid::eval;
  std::vector<std::string> gold;
  std::vector<std::string> predicted;
  for (const auto& line : read_lines(args.gold, "gold file")) {
    if (!line.empty()) gold.push_back(first_label(line));
  }
  for (const auto& line : read_lines(args.predictions, "prediction file")) {
    predicted.push_back(first_label(line));
  }
  if (predicted.size() != gold.size()) {
    throw Error(Errc::kLengthMismatch, "gold has " + std::to_string(gold.size()) +
                                           " lines but predictions have " +
                                           std::to_string(predicted.size()));
  }

  std::optional<ev::LabelMapping> mapping;
  if (!args.mapping.empty()) {
    mapping = ev::read_label_mapping(args.mapping);
    gold = ev::normalize_labels(gold, *mapping);
    for (auto& p : predicted) {
      if (!p.empty()) p = ev::normalize_labels(std::span(&p, 1), *mapping).front();
    }
  }

  ev::EvalOptions options;
  options.foreign = ev::ForeignPolicy::kCountAsMiss;
  if (!args.supported.empty()) {
    std::set<std::string> supported;
    for (const auto& line : read_lines(args.supported, "supported-label file")) {
      if (line.empty() || line.front() == '#') continue;
      supported.insert(first_label(line));
    }
    const auto cut = ev::restrict_to_intersection(gold, supported);
    std::vector<std::string> g;
    std::vector<std::string> p;
    for (size_t i : cut.kept) {
      g.push_back(gold[i]);
      p.push_back(predicted[i]);
    }
    gold = std::move(g);
    predicted = std::move(p);
    options.universe = cut.kept_labels;
    std::cerr << "restricted to " << cut.kept_labels.size() << " labels ("
              << cut.removed_labels.size() << " removed, " << gold.size() << " lines)\n";
  }

  if (!options.universe) {
    const std::set<std::string> labels(gold.begin(), gold.end());
    options.universe = std::vector<std::string>(labels.begin(), labels.end());
  }
  const ev::EvalReport report = ev::evaluate(gold, predicted, options);

  std::optional<ev::TaxonomySummary> taxonomy;
  if (!args.taxonomy.empty()) {
    taxonomy = ev::taxonomy_report(report, ev::read_taxonomy(args.taxonomy));
  }

  std::optional<double> correlation;
  if (!args.train_stats.empty()) {
    const auto stats = langid::read_stats_tsv(args.train_stats);
    std::map<std::string, double> lines_per_code;
    for (const auto& [label, n] : stats.per_label_lines) {
      std::string code = label.str();
      if (mapping) code = ev::normalize_labels(std::span(&code, 1), *mapping).front();
      lines_per_code[code] += static_cast<double>(n);
    }
    std::vector<double> x;
    std::vector<double> y;
    for (const auto& m : report.per_class) {
      auto it = lines_per_code.find(m.label);
      if (!m.active() || it == lines_per_code.end()) continue;
      x.push_back(it->second);
      y.push_back(m.f1);
    }
    correlation = ev::pearson(x, y);
  }

  Output out(args.output);
  if (args.format == "text") {
    ev::write_report_text(out.stream(), report);
    if (taxonomy) {
      out.stream() << '\n';
      ev::write_taxonomy_text(out.stream(), *taxonomy);
    }
    if (correlation) {
      out.stream() << "pearson(train lines, F1): " << *correlation << '\n';
    }
  } else {
    out.stream() << ev::report_json(report, taxonomy ? &*taxonomy : nullptr, correlation)
                 << '\n';
  }
  out.finish();

  if (!args.confusion.empty()) {
    Output cm(args.confusion);
    ev::write_confusion_tsv(cm.stream(), report.confusion);
    cm.finish();
  }
  if (!args.subset.empty()) {
    const auto subset = ev::confusion_subset(report.confusion, split_commas(args.subset));
    Output sub(args.subset_output);
    ev::write_confusion_tsv(sub.stream(), subset.matrix);
    sub.finish();
    for (size_t i = 0; i < subset.off_subset.size(); ++i) {
      std::cerr << subset.matrix.labels[i] << ": " << subset.off_subset[i]
                << " predictions outside the subset\n";
    }
  }
  std::cerr << "macro F1 " << report.macro_f1 << ", macro FPR " << report.macro_fpr
            << " over " << report.macro_classes << " classes\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Language identification toolkit: corpus preparation, training, "
               "prediction and evaluation"};
  app.require_subcommand(1);
  Common common;

  FilterArgs filter;
  auto* filter_cmd = app.add_subcommand(
      "filter", "Clean lines and drop those without a character in the label's script");
  auto* manifest_opt =
      filter_cmd->add_option("--manifest", filter.manifest, "Source manifest (TSV)");
  auto* input_opt =
      filter_cmd->add_option("--input", filter.input, "Labeled-lines corpus file");
  manifest_opt->excludes(input_opt);
  filter_cmd->add_option("-o,--output", filter.output, "Output file (default stdout)");
  filter_cmd->callback([&] {
    if (filter.manifest.empty() && filter.input.empty()) {
      throw CLI::RequiredError("--manifest or --input");
    }
  });

  SampleArgs sample;
  auto* sample_cmd =
      app.add_subcommand("sample", "Temperature-sample a labeled corpus (q_l ~ p_l^alpha)");
  sample_cmd->add_option("--input", sample.input, "Labeled-lines corpus file")->required();
  sample_cmd->add_option("-o,--output", sample.output, "Output file (default stdout)");
  sample_cmd->add_option("--alpha", sample.alpha, "Sampling exponent")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sample_cmd->add_option("--seed", sample.seed, "Random seed")->capture_default_str();
  sample_cmd->add_option("--target-total", sample.target_total, "Number of output lines")
      ->required()
      ->check(CLI::PositiveNumber);

  StatsArgs stats;
  auto* stats_cmd = app.add_subcommand("stats", "Per-label line counts and fractions");
  stats_cmd->add_option("--input", stats.input, "Labeled-lines corpus file")->required();
  stats_cmd->add_option("-o,--output", stats.output, "Output file (default stdout)");

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train a classifier");
  train_cmd->add_option("--input", train.input, "Labeled-lines training file")->required();
  train_cmd->add_option("-o,--output", train.output, "Model file to write")->required();
  train_cmd->add_option("--loss", train.loss, "Loss function")
      ->check(CLI::IsMember({"softmax"}))
      ->capture_default_str();
  train_cmd->add_option("--lr", train.hp.lr, "Initial learning rate")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train_cmd->add_option("--dim", train.hp.dim, "Embedding dimension")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train_cmd->add_option("--epochs", train.hp.epochs, "Training epochs")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train_cmd->add_option("--min-count", train.hp.min_count, "Minimum word occurrences")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train_cmd->add_option("--minn", train.hp.ngram_min, "Minimum character n-gram length")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train_cmd->add_option("--maxn", train.hp.ngram_max, "Maximum character n-gram length")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train_cmd->add_option("--word-ngrams", train.hp.word_ngrams, "Word n-gram length")
      ->check(CLI::Range(1, 1))
      ->capture_default_str();
  train_cmd->add_option("--bucket", train.hp.bucket_size, "Number of n-gram hash buckets")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train_cmd->add_option("--threads", train.hp.threads, "Training threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train_cmd->add_option("--seed", train.hp.seed, "Random seed")->capture_default_str();
  train_cmd->add_option("--dump-vocab", train.dump_vocab,
                        "Also write the vocabulary as word<TAB>id<TAB>count");
  train_cmd->add_option("--kernels", common.kernels, "SIMD kernels: auto, scalar, avx2")
      ->check(CLI::IsMember({"auto", "scalar", "avx2"}))
      ->capture_default_str();

  PredictArgs predict;
  auto* predict_cmd = app.add_subcommand("predict", "Predict labels, one line per input line");
  predict_cmd->add_option("--model", predict.model, "Model file")->required();
  predict_cmd->add_option("--input", predict.input, "Text file, one example per line")
      ->required();
  predict_cmd->add_option("-o,--output", predict.output, "Output file (default stdout)");
  predict_cmd->add_option("-k", predict.k, "Labels per line")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  predict_cmd->add_option("--threshold", predict.threshold, "Minimum probability")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  predict_cmd->add_option("--threads", predict.threads, "Prediction threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  predict_cmd->add_flag("--labeled-input", predict.labeled_input,
                        "Ignore a leading __label__ token on each input line");
  predict_cmd->add_option("--kernels", common.kernels, "SIMD kernels: auto, scalar, avx2")
      ->check(CLI::IsMember({"auto", "scalar", "avx2"}))
      ->capture_default_str();

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Score predictions against gold labels");
  eval_cmd->add_option("--gold", eval.gold, "Gold file: leading label on each line")
      ->required();
  eval_cmd->add_option("--predictions", eval.predictions, "Output of `predict`")->required();
  eval_cmd->add_option("--supported", eval.supported,
                       "Restrict to gold labels listed here (one per line)");
  eval_cmd->add_option("--mapping", eval.mapping, "label<TAB>normalized_code TSV");
  eval_cmd->add_option("--taxonomy", eval.taxonomy, "label<TAB>class TSV (classes 0-5)");
  eval_cmd->add_option("--train-stats", eval.train_stats,
                       "Stats TSV of the training data; adds Pearson(lines, F1)");
  eval_cmd->add_option("-o,--output", eval.output, "Report file (default stdout)");
  eval_cmd->add_option("--format", eval.format, "Report format")
      ->check(CLI::IsMember({"json", "text"}))
      ->capture_default_str();
  eval_cmd->add_option("--confusion", eval.confusion, "Write the confusion matrix TSV here");
  eval_cmd->add_option("--subset", eval.subset,
                       "Comma-separated labels for a confusion sub-matrix");
  eval_cmd->add_option("--subset-output", eval.subset_output,
                       "Where to write the sub-matrix (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*filter_cmd) return cmd_filter(filter);
    if (*sample_cmd) return cmd_sample(sample);
    if (*stats_cmd) return cmd_stats(stats);
    if (*train_cmd) return cmd_train(train, common);
    if (*predict_cmd) return cmd_predict(predict, common);
    if (*eval_cmd) return cmd_eval(eval);
  } catch (const Error& e) {
    std::cerr << "error (" << langid::errc_name(e.code()) << "): " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
