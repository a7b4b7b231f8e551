#include "langid/model.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <set>
#include <thread>

#include "langid/error.hpp"
#include "langid/simd.hpp"

namespace langid {

void Hyperparams::validate() const {
  auto fail = [](const std::string& msg) {
    throw Error(Errc::kInvalidArgument, "invalid hyperparameter: " + msg);
  };
  if (loss != LossKind::kSoftmax) fail("loss must be softmax");
  if (epochs < 1) fail("epochs must be >= 1");
  if (!(lr >= 0.0) || !std::isfinite(lr)) fail("lr must be finite and >= 0");
  if (dim < 1) fail("dim must be >= 1");
  if (min_count < 1) fail("min count must be >= 1");
  if (ngram_min < 1 || ngram_max < ngram_min) fail("need 1 <= minn <= maxn");
  if (word_ngrams != 1) fail("only word n-grams of length 1 are supported");
  if (bucket_size < 1) fail("bucket size must be >= 1");
  if (threads < 1) fail("threads must be >= 1");
  if (!(sample_alpha > 0.0)) fail("sampling alpha must be > 0");
}

uint64_t Model::parameter_count() const {
  return static_cast<uint64_t>(input.rows()) * input.cols() +
         static_cast<uint64_t>(output.rows()) * output.cols();
}

int Model::label_index(const LanguageLabel& label) const {
  auto it = std::lower_bound(labels.begin(), labels.end(), label);
  if (it != labels.end() && *it == label) return static_cast<int>(it - labels.begin());
  // Loaded models are not required to keep labels sorted.
  auto lin = std::find(labels.begin(), labels.end(), label);
  return lin == labels.end() ? -1 : static_cast<int>(lin - labels.begin());
}

void hidden_vector(const Model& model, std::span<const int32_t> features,
                   std::span<float> hidden) {
  const auto& k = simd::active();
  std::fill(hidden.begin(), hidden.end(), 0.0f);
  for (int32_t id : features) k.axpy(1.0f, model.input.row(id), hidden);
  k.scale(1.0f / static_cast<float>(features.size()), hidden);
}

void softmax(std::span<float> logits) {
  const float top = simd::active().max(logits);
  float sum = 0.0f;
  for (float& z : logits) {
    z = std::exp(z - top);
    sum += z;
  }
  simd::active().scale(1.0f / sum, logits);
}

namespace {

void compute_probs(const Model& model, std::span<const int32_t> features,
                   std::span<float> hidden, std::span<float> probs) {
  const auto& k = simd::active();
  hidden_vector(model, features, hidden);
  for (size_t i = 0; i < model.num_labels(); ++i) {
    probs[i] = k.dot(model.output.row(i), hidden);
  }
  softmax(probs);
}

std::vector<Prediction> top_k(const Model& model, std::span<const float> probs,
                              int k, double threshold) {
  std::vector<int> order(probs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return probs[a] > probs[b]; });
  std::vector<Prediction> out;
  for (int i : order) {
    if (static_cast<int>(out.size()) >= k) break;
    if (static_cast<double>(probs[i]) < threshold) break;
    out.push_back({model.labels[i], static_cast<double>(probs[i])});
  }
  return out;
}

void check_features(const Model& model, std::span<const int32_t> features) {
  if (features.empty()) {
    throw Error(Errc::kEmptyFeatures, "cannot classify an empty feature set");
  }
  for (int32_t id : features) {
    if (id < 0 || static_cast<size_t>(id) >= model.input.rows()) {
      throw Error(Errc::kInvalidArgument,
                  "feature id " + std::to_string(id) + " out of range");
    }
  }
}

}  // namespace

std::vector<float> forward(const Model& model, std::span<const int32_t> features) {
  check_features(model, features);
  std::vector<float> hidden(model.dim());
  std::vector<float> probs(model.num_labels());
  compute_probs(model, features, hidden, probs);
  return probs;
}

std::vector<Prediction> predict_topk(const Model& model, std::string_view text,
                                     int k, double threshold) {
  if (k < 1) throw Error(Errc::kInvalidArgument, "k must be >= 1");
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw Error(Errc::kInvalidArgument, "threshold must lie in [0, 1]");
  }
  const FeatureIds features = featurize(text, model.vocab);
  return top_k(model, forward(model, features), k, threshold);
}

std::vector<std::vector<Prediction>> predict_batch(
    const Model& model, std::span<const std::string> lines, int k,
    double threshold, int threads) {
  if (k < 1) throw Error(Errc::kInvalidArgument, "k must be >= 1");
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw Error(Errc::kInvalidArgument, "threshold must lie in [0, 1]");
  }
  std::vector<std::vector<Prediction>> results(lines.size());
  auto worker = [&](size_t begin, size_t end) {
    std::vector<float> hidden(model.dim());
    std::vector<float> probs(model.num_labels());
    FeatureIds features;
    for (size_t i = begin; i < end; ++i) {
      features.clear();
      for (const auto& token : tokenize(lines[i])) {
        featurize_token(token, model.vocab, features);
      }
      compute_probs(model, features, hidden, probs);
      results[i] = top_k(model, probs, k, threshold);
    }
  };
  const size_t n = lines.size();
  const size_t workers = std::clamp<size_t>(static_cast<size_t>(std::max(threads, 1)), 1,
                                            std::max<size_t>(n, 1));
  if (workers == 1) {
    worker(0, n);
    return results;
  }
  std::vector<std::thread> pool;
  for (size_t t = 0; t < workers; ++t) {
    pool.emplace_back(worker, n * t / workers, n * (t + 1) / workers);
  }
  for (auto& th : pool) th.join();
  return results;
}

std::string format_predictions(std::span<const Prediction> predictions) {
  std::string out;
  char buf[32];
  for (size_t i = 0; i < predictions.size(); ++i) {
    if (i > 0) out += '\t';
    out += kLabelPrefix;
    out += predictions[i].label.str();
    std::snprintf(buf, sizeof(buf), "\t%.6f", predictions[i].probability);
    out += buf;
  }
  return out;
}

double loss(const Model& model, const LabeledLine& line) {
  const int target = model.label_index(line.label);
  if (target < 0) {
    throw Error(Errc::kUnknownLabel,
                "label '" + line.label.str() + "' is not known to the model");
  }
  const auto probs = forward(model, featurize(line.text, model.vocab));
  return -std::log(static_cast<double>(probs[target]));
}

double learning_rate(double lr0, uint64_t processed, uint64_t total) {
  return lr0 * (1.0 - static_cast<double>(processed) / static_cast<double>(total));
}

Model initialize_model(const Corpus& corpus, const Hyperparams& hp) {
  hp.validate();
  if (corpus.empty()) throw Error(Errc::kEmptyCorpus, "training corpus is empty");
  std::set<LanguageLabel> label_set;
  for (const auto& line : corpus) label_set.insert(line.label);
  if (label_set.size() < 2) {
    throw Error(Errc::kSingleLabel, "training needs at least two distinct labels, got " +
                                        std::to_string(label_set.size()));
  }

  Model model;
  model.hyperparams = hp;
  model.vocab = build_vocab(corpus, hp.min_count, hp.bucket_size, hp.ngram_min,
                            hp.ngram_max);
  model.labels.assign(label_set.begin(), label_set.end());
  const auto dim = static_cast<size_t>(hp.dim);
  model.input = Matrix(model.vocab.feature_space(), dim);
  model.output = Matrix(model.labels.size(), dim);

  std::mt19937_64 rng(hp.seed);
  const float bound = 1.0f / static_cast<float>(hp.dim);
  std::uniform_real_distribution<float> init(-bound, bound);
  for (float& v : model.input.data()) v = init(rng);
  return model;
}

double sgd_step(Model& model, std::span<const int32_t> features, int target,
                float lr, StepBuffers& buffers) {
  const auto& k = simd::active();
  const size_t dim = model.dim();
  const size_t labels = model.num_labels();
  buffers.hidden.resize(dim);
  buffers.probs.resize(labels);
  buffers.hidden_grad.assign(dim, 0.0f);

  compute_probs(model, features, buffers.hidden, buffers.probs);
  const double example_loss =
      -std::log(std::max(static_cast<double>(buffers.probs[target]), 1e-30));

  for (size_t i = 0; i < labels; ++i) {
    const float g = buffers.probs[i] - (static_cast<int>(i) == target ? 1.0f : 0.0f);
    k.axpy(g, model.output.row(i), buffers.hidden_grad);
    k.axpy(-lr * g, buffers.hidden, model.output.row(i));
  }
  const float row_step = -lr / static_cast<float>(features.size());
  for (int32_t id : features) k.axpy(row_step, buffers.hidden_grad, model.input.row(id));
  return example_loss;
}

namespace {

int target_of(const Model& model, const LanguageLabel& label) {
  const int t = model.label_index(label);
  if (t < 0) throw Error(Errc::kUnknownLabel, "unknown label " + label.str());
  return t;
}

bool all_finite(const Matrix& m) {
  return std::all_of(m.data().begin(), m.data().end(),
                     [](float v) { return std::isfinite(v); });
}

}  // namespace

Model train(const Corpus& corpus, const Hyperparams& hp,
            const EpochCallback& on_epoch_end) {
  Model model = initialize_model(corpus, hp);

  std::vector<int> targets(corpus.size());
  for (size_t i = 0; i < corpus.size(); ++i) targets[i] = target_of(model, corpus[i].label);

  // The permutation stream is separate from the initialisation stream so
  // that changing the model size does not reshuffle the data.
  std::mt19937_64 shuffle_rng(hp.seed ^ 0x9e3779b97f4a7c15ULL);
  const uint64_t total = static_cast<uint64_t>(hp.epochs) * corpus.size();
  std::atomic<uint64_t> processed{0};
  std::vector<size_t> order(corpus.size());

  for (int epoch = 1; epoch <= hp.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), size_t{0});
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    const size_t workers =
        std::min<size_t>(static_cast<size_t>(hp.threads), std::max<size_t>(corpus.size(), 1));
    std::vector<double> loss_sums(workers, 0.0);
    auto worker = [&](size_t w) {
      StepBuffers buffers;
      FeatureIds features;
      const size_t begin = order.size() * w / workers;
      const size_t end = order.size() * (w + 1) / workers;
      for (size_t j = begin; j < end; ++j) {
        const size_t i = order[j];
        features.clear();
        for (const auto& token : tokenize(corpus[i].text)) {
          featurize_token(token, model.vocab, features);
        }
        const uint64_t t = processed.fetch_add(1, std::memory_order_relaxed);
        const auto lr = static_cast<float>(learning_rate(hp.lr, t, total));
        loss_sums[w] += sgd_step(model, features, targets[i], lr, buffers);
      }
    };
    if (workers == 1) {
      worker(0);
    } else {
      std::vector<std::thread> pool;
      for (size_t w = 0; w < workers; ++w) pool.emplace_back(worker, w);
      for (auto& th : pool) th.join();
    }

    if (!all_finite(model.input) || !all_finite(model.output)) {
      throw Error(Errc::kInvalidArgument,
                  "training diverged (non-finite weights) in epoch " + std::to_string(epoch));
    }
    if (on_epoch_end) {
      EpochSummary summary;
      summary.epoch = epoch;
      summary.examples = corpus.size();
      summary.mean_loss = std::accumulate(loss_sums.begin(), loss_sums.end(), 0.0) /
                          static_cast<double>(corpus.size());
      on_epoch_end(summary, model);
    }
  }
  return model;
}

}  // namespace langid
