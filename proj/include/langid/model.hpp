#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "langid/corpus.hpp"
#include "langid/features.hpp"
#include "langid/label.hpp"
#include "langid/matrix.hpp"

namespace langid {

inline constexpr uint64_t kDefaultSeed = 42;

enum class LossKind : uint8_t { kSoftmax = 0 };

/// Training configuration. Defaults are the published language-ID settings.
struct Hyperparams {
  LossKind loss = LossKind::kSoftmax;
  int epochs = 2;
  double lr = 0.8;
  int dim = 256;
  uint64_t min_count = 1000;
  int ngram_min = 2;
  int ngram_max = 5;
  int word_ngrams = 1;
  uint64_t bucket_size = 1'000'000;
  int threads = 1;
  uint64_t seed = kDefaultSeed;
  double sample_alpha = 0.3;

  /// Throws Error(kInvalidArgument) naming the first bad field.
  void validate() const;

  friend bool operator==(const Hyperparams&, const Hyperparams&) = default;
};

struct Model {
  Hyperparams hyperparams;
  Vocabulary vocab;
  std::vector<LanguageLabel> labels;
  Matrix input;   // (W + B) x dim
  Matrix output;  // L x dim

  size_t dim() const { return input.cols(); }
  size_t num_labels() const { return labels.size(); }
  /// (W + B) * dim + L * dim
  uint64_t parameter_count() const;
  /// Index into `labels`, or -1.
  int label_index(const LanguageLabel& label) const;

  friend bool operator==(const Model&, const Model&) = default;
};

struct Prediction {
  LanguageLabel label;
  double probability = 0.0;
};

/// Averages the embedding rows of `features` (repeats count) into `hidden`.
void hidden_vector(const Model& model, std::span<const int32_t> features,
                   std::span<float> hidden);

/// In-place numerically stable softmax.
void softmax(std::span<float> logits);

/// Label probabilities for a feature multiset. Throws Error(kEmptyFeatures)
/// when `features` is empty.
std::vector<float> forward(const Model& model, std::span<const int32_t> features);

/// Top `k` labels with probability >= threshold, by descending probability;
/// equal probabilities keep model label order.
std::vector<Prediction> predict_topk(const Model& model, std::string_view text,
                                     int k, double threshold);

/// Predicts every line, splitting the work over `threads` workers. The
/// result is independent of the thread count.
std::vector<std::vector<Prediction>> predict_batch(
    const Model& model, std::span<const std::string> lines, int k,
    double threshold, int threads);

/// `__label__<code>\t<p>` pairs joined by tabs, p with six decimals.
std::string format_predictions(std::span<const Prediction> predictions);

/// -log p(label). Throws Error(kUnknownLabel) if the label is not in the model.
double loss(const Model& model, const LabeledLine& line);

/// lr0 * (1 - processed / total)
double learning_rate(double lr0, uint64_t processed, uint64_t total);

/// Vocabulary, sorted label list and initial weights: embeddings uniform in
/// [-1/dim, 1/dim] from the seeded stream, output layer zero.
Model initialize_model(const Corpus& corpus, const Hyperparams& hp);

/// Scratch buffers for sgd_step so the training loop does not allocate.
struct StepBuffers {
  std::vector<float> hidden;
  std::vector<float> probs;
  std::vector<float> hidden_grad;
};

/// One cross-entropy SGD update on a single example; returns the example's
/// loss before the update. The embedding gradient is taken with the output
/// weights as they were before this step.
double sgd_step(Model& model, std::span<const int32_t> features, int target,
                float lr, StepBuffers& buffers);

struct EpochSummary {
  int epoch = 0;             // 1-based
  double mean_loss = 0.0;    // running loss over the epoch's updates
  uint64_t examples = 0;
};

using EpochCallback = std::function<void(const EpochSummary&, const Model&)>;

/// Trains from initialize_model(). Each epoch visits the corpus in a fresh
/// seeded permutation; the learning rate decays linearly to zero over
/// epochs * |corpus| examples. With threads > 1 workers update the shared
/// weights without locking, so only threads == 1 is reproducible.
Model train(const Corpus& corpus, const Hyperparams& hp,
            const EpochCallback& on_epoch_end = {});

}  // namespace langid
