#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "langid/gradient.hpp"
#include "langid/model.hpp"
#include "langid/simd.hpp"
#include "synthetic.hpp"
#include "test_util.hpp"

using langid::Corpus;
using langid::Errc;
using langid::Hyperparams;
using langid::LabeledLine;
using langid::Model;
using langid::parse_label;

namespace {

Hyperparams small_hp() {
  Hyperparams hp;
  hp.dim = 16;
  hp.bucket_size = 5000;
  hp.min_count = 2;
  return hp;
}

// Two labels with disjoint character sets.
Corpus separable_corpus() {
  return synthetic::generate(200, 7, 2);
}

// Random weights everywhere; rows = words + buckets.
Model random_model(std::mt19937_64& rng, int dim, int labels, uint64_t buckets) {
  Corpus c;
  for (int l = 0; l < labels; ++l) {
    c.push_back({"w", langid::LanguageLabel{std::string("aa") + static_cast<char>('a' + l), "Latn"}});
  }
  Hyperparams hp;
  hp.dim = dim;
  hp.bucket_size = buckets;
  hp.min_count = 1;
  Model m = langid::initialize_model(c, hp);
  std::uniform_real_distribution<float> d(-1.0f, 1.0f);
  for (float& v : m.input.data()) v = d(rng);
  for (float& v : m.output.data()) v = d(rng);
  return m;
}

double mean_loss(const Model& m, const Corpus& c) {
  double s = 0;
  for (const auto& line : c) s += langid::loss(m, line);
  return s / static_cast<double>(c.size());
}

}  // namespace

TEST_CASE("Hyperparams defaults are the published settings") {
  const Hyperparams hp;
  CHECK(hp.loss == langid::LossKind::kSoftmax);
  CHECK(hp.epochs == 2);
  CHECK(hp.lr == 0.8);
  CHECK(hp.dim == 256);
  CHECK(hp.min_count == 1000);
  CHECK(hp.ngram_min == 2);
  CHECK(hp.ngram_max == 5);
  CHECK(hp.word_ngrams == 1);
  CHECK(hp.bucket_size == 1'000'000);
  CHECK(hp.sample_alpha == 0.3);
  CHECK_NOTHROW(hp.validate());
}

TEST_CASE("Hyperparams validation") {
  auto bad = [](auto mutate) {
    Hyperparams hp;
    mutate(hp);
    return test::error_code([&] { hp.validate(); });
  };
  CHECK(bad([](Hyperparams& h) { h.epochs = 0; }) == Errc::kInvalidArgument);
  CHECK(bad([](Hyperparams& h) { h.lr = -0.1; }) == Errc::kInvalidArgument);
  CHECK(bad([](Hyperparams& h) { h.lr = std::nan(""); }) == Errc::kInvalidArgument);
  CHECK(bad([](Hyperparams& h) { h.dim = 0; }) == Errc::kInvalidArgument);
  CHECK(bad([](Hyperparams& h) { h.ngram_min = 3, h.ngram_max = 2; }) == Errc::kInvalidArgument);
  CHECK(bad([](Hyperparams& h) { h.word_ngrams = 2; }) == Errc::kInvalidArgument);
  CHECK(bad([](Hyperparams& h) { h.threads = 0; }) == Errc::kInvalidArgument);
}

TEST_CASE("forward on a zero model is uniform") {
  Model m = langid::initialize_model(synthetic::generate(5, 1, 4), small_hp());
  std::fill(m.input.data().begin(), m.input.data().end(), 0.0f);
  const auto p = langid::forward(m, langid::featurize("anything", m.vocab));
  REQUIRE(p.size() == 4);
  for (float v : p) CHECK(v == doctest::Approx(0.25).epsilon(1e-7));
  CHECK(langid::loss(m, {"x", parse_label("sla_Latn")}) == doctest::Approx(std::log(4.0)));
}

TEST_CASE("forward: normalisation, single-feature hidden vector, errors") {
  std::mt19937_64 rng(5);
  const Model m = random_model(rng, 8, 5, 50);
  std::vector<float> hidden(8);
  const int32_t ids[] = {7};
  langid::hidden_vector(m, ids, hidden);
  for (size_t d = 0; d < 8; ++d) CHECK(hidden[d] == m.input.at(7, d));

  for (int t = 0; t < 100; ++t) {
    std::vector<int32_t> f(1 + rng() % 20);
    for (auto& id : f) id = static_cast<int32_t>(rng() % m.input.rows());
    const auto p = langid::forward(m, f);
    double sum = 0;
    for (float v : p) {
      CHECK(v > 0.0f);
      CHECK(v < 1.0f);
      sum += v;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-6);
  }
  CHECK(test::error_code([&] { langid::forward(m, {}); }) == Errc::kEmptyFeatures);
  const int32_t out_of_range[] = {static_cast<int32_t>(m.input.rows())};
  CHECK(test::error_code([&] { langid::forward(m, out_of_range); }) == Errc::kInvalidArgument);
}

TEST_CASE("softmax ordering is invariant under a constant logit shift") {
  std::mt19937 rng(8);
  std::uniform_real_distribution<float> d(-5.0f, 5.0f);
  for (int t = 0; t < 200; ++t) {
    std::vector<float> z(2 + rng() % 10);
    for (float& v : z) v = d(rng);
    auto shifted = z;
    const float c = d(rng) * 10.0f;
    for (float& v : shifted) v += c;
    langid::softmax(z);
    langid::softmax(shifted);
    std::vector<int> o1(z.size()), o2(z.size());
    std::iota(o1.begin(), o1.end(), 0);
    std::iota(o2.begin(), o2.end(), 0);
    std::stable_sort(o1.begin(), o1.end(), [&](int a, int b) { return z[a] > z[b]; });
    std::stable_sort(o2.begin(), o2.end(), [&](int a, int b) { return shifted[a] > shifted[b]; });
    CHECK(o1 == o2);
  }
}

TEST_CASE("predict_topk") {
  std::mt19937_64 rng(6);
  const Model m = random_model(rng, 8, 5, 50);
  const auto all = langid::predict_topk(m, "some text", 5, 0.0);
  REQUIRE(all.size() == 5);
  double sum = 0;
  for (size_t i = 0; i < all.size(); ++i) {
    sum += all[i].probability;
    if (i > 0) CHECK(all[i - 1].probability >= all[i].probability);
  }
  CHECK(std::abs(sum - 1.0) <= 1e-6);
  CHECK(langid::predict_topk(m, "some text", 1, 1.0).size() <= 1);
  CHECK(langid::predict_topk(m, "some text", 2, 0.0).size() == 2);
  CHECK(langid::predict_topk(m, "", 1, 0.0).size() == 1);  // sentinel feature
  CHECK(test::error_code([&] { langid::predict_topk(m, "x", 0, 0.0); }) == Errc::kInvalidArgument);
  CHECK(test::error_code([&] { langid::predict_topk(m, "x", 1, 1.5); }) == Errc::kInvalidArgument);
}

TEST_CASE("predict_topk breaks probability ties by label order") {
  Model m = langid::initialize_model(synthetic::generate(3, 1, 3), small_hp());
  const auto p = langid::predict_topk(m, "x", 3, 0.0);  // zero output layer
  REQUIRE(p.size() == 3);
  CHECK(p[0].label == m.labels[0]);
  CHECK(p[1].label == m.labels[1]);
  CHECK(p[2].label == m.labels[2]);
}

TEST_CASE("format_predictions") {
  const langid::Prediction p[] = {{parse_label("eng_Latn"), 0.9876543},
                                  {parse_label("zho_Hant"), 0.0123457}};
  CHECK(langid::format_predictions(p) ==
        "__label__eng_Latn\t0.987654\t__label__zho_Hant\t0.012346");
  CHECK(langid::format_predictions({}) == "");
}

TEST_CASE("initialisation") {
  const auto hp = small_hp();
  const Model m = langid::initialize_model(separable_corpus(), hp);
  CHECK(m.labels == std::vector<langid::LanguageLabel>{parse_label("sla_Latn"),
                                                       parse_label("slb_Grek")});
  CHECK(m.input.rows() == m.vocab.feature_space());
  CHECK(m.input.cols() == 16);
  const float bound = 1.0f / 16.0f;
  for (float v : m.input.data()) CHECK((v >= -bound && v <= bound));
  for (float v : m.output.data()) CHECK(v == 0.0f);
  CHECK(m.parameter_count() == (m.vocab.num_words() + 5000) * 16 + 2 * 16);
}

TEST_CASE("learning-rate schedule is linear to zero") {
  CHECK(langid::learning_rate(0.8, 0, 100) == 0.8);
  CHECK(langid::learning_rate(0.8, 50, 100) == 0.8 * (1.0 - 50.0 / 100.0));
  CHECK(langid::learning_rate(0.8, 99, 100) >= 0.0);
  CHECK(langid::learning_rate(0.8, 100, 100) == 0.0);
  for (uint64_t t = 0; t < 1000; t += 37) {
    CHECK(langid::learning_rate(0.5, t, 1000) == 0.5 * (1.0 - static_cast<double>(t) / 1000.0));
  }
}

TEST_CASE("training errors") {
  CHECK(test::error_code([] { langid::train({}, small_hp()); }) == Errc::kEmptyCorpus);
  CHECK(test::error_code([] { langid::train(synthetic::generate(10, 1, 1), small_hp()); }) ==
        Errc::kSingleLabel);
}

TEST_CASE("lr0 = 0 leaves the model at its initialisation") {
  auto hp = small_hp();
  hp.lr = 0.0;
  const Corpus c = separable_corpus();
  CHECK(langid::train(c, hp) == langid::initialize_model(c, hp));
}

TEST_CASE("separable corpus: perfect training accuracy and decreasing loss") {
  const Corpus c = separable_corpus();
  std::vector<double> losses;
  const Model m = langid::train(c, small_hp(), [&](const langid::EpochSummary& s, const Model& mm) {
    CHECK(s.examples == c.size());
    losses.push_back(mean_loss(mm, c));
  });
  REQUIRE(losses.size() == 2);
  CHECK(losses[0] > losses[1]);
  size_t correct = 0;
  for (const auto& line : c) {
    correct += langid::predict_topk(m, line.text, 1, 0.0).front().label == line.label;
  }
  CHECK(correct == c.size());
  // Held-out lines from the same languages.
  for (const auto& line : synthetic::generate(50, 99, 2)) {
    CHECK(langid::predict_topk(m, line.text, 1, 0.0).front().label == line.label);
  }
}

TEST_CASE("single-threaded training is bit-reproducible") {
  const Corpus c = synthetic::generate(50, 3, 3);
  CHECK(langid::train(c, small_hp()) == langid::train(c, small_hp()));
  auto other = small_hp();
  other.seed = 7;
  CHECK_FALSE(langid::train(c, other) == langid::train(c, small_hp()));
}

TEST_CASE("multi-threaded training produces a finite, accurate model") {
  auto hp = small_hp();
  hp.threads = 4;
  const Corpus c = synthetic::generate(200, 3, 4);
  const Model m = langid::train(c, hp);
  for (float v : m.input.data()) REQUIRE(std::isfinite(v));
  size_t correct = 0;
  const Corpus test = synthetic::generate(50, 77, 4);
  for (const auto& line : test) {
    correct += langid::predict_topk(m, line.text, 1, 0.0).front().label == line.label;
  }
  CHECK(static_cast<double>(correct) / static_cast<double>(test.size()) >= 0.95);
}

TEST_CASE("predict_batch matches predict_topk for any thread count") {
  const Model m = langid::train(synthetic::generate(100, 3, 3), small_hp());
  std::vector<std::string> lines;
  for (const auto& l : synthetic::generate(30, 8, 3)) lines.push_back(l.text);
  lines.push_back("");
  for (int threads : {1, 3, 8}) {
    const auto batch = langid::predict_batch(m, lines, 2, 0.0, threads);
    REQUIRE(batch.size() == lines.size());
    for (size_t i = 0; i < lines.size(); ++i) {
      const auto single = langid::predict_topk(m, lines[i], 2, 0.0);
      REQUIRE(batch[i].size() == single.size());
      for (size_t j = 0; j < single.size(); ++j) {
        CHECK(batch[i][j].label == single[j].label);
        CHECK(batch[i][j].probability == single[j].probability);
      }
    }
  }
}

TEST_CASE("loss of an unknown label is an error") {
  const Model m = langid::initialize_model(separable_corpus(), small_hp());
  CHECK(test::error_code([&] { langid::loss(m, {"x", parse_label("zzz_Latn")}); }) ==
        Errc::kUnknownLabel);
}

TEST_CASE("sgd_step applies exactly -lr times the analytic gradient") {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 20; ++t) {
    Model m = random_model(rng, 8, 4, 40);
    std::vector<int32_t> f(1 + rng() % 20);
    for (auto& id : f) id = static_cast<int32_t>(rng() % m.input.rows());
    const int target = static_cast<int>(rng() % 4);

    const auto before = langid::to_dense<double>(m);
    langid::DenseParams<double> grad;
    langid::dense_gradient(before, f, target, grad);
    const double expected_loss = langid::dense_loss(before, f, target);

    const float lr = 0.1f;
    // Weights lie in [-1, 1]; one float rounding of the stored value is at most 6e-8.
    constexpr double kUpdateTol = 2e-7;
    langid::StepBuffers buffers;
    const double step_loss = langid::sgd_step(m, f, target, lr, buffers);
    CHECK(step_loss == doctest::Approx(expected_loss).epsilon(1e-5));
    const auto after = langid::to_dense<double>(m);
    for (size_t i = 0; i < before.output.size(); ++i) {
      CHECK(std::abs(after.output[i] - before.output[i] + lr * grad.output[i]) <= kUpdateTol);
    }
    for (size_t i = 0; i < before.input.size(); ++i) {
      CHECK(std::abs(after.input[i] - before.input[i] + lr * grad.input[i]) <= kUpdateTol);
    }
  }
}

TEST_CASE("scalar and SIMD kernels train equivalent models") {
  if (!langid::simd::available(langid::simd::Backend::kAvx2)) return;
  const auto previous = langid::simd::active().backend;
  const Corpus c = synthetic::generate(150, 21, 5);
  const Corpus test = synthetic::generate(40, 22, 5);

  langid::simd::set_backend(langid::simd::Backend::kScalar);
  const Model scalar_model = langid::train(c, small_hp());
  langid::simd::set_backend(langid::simd::Backend::kAvx2);
  const Model simd_model = langid::train(c, small_hp());

  for (const auto& line : test) {
    const auto features = langid::featurize(line.text, simd_model.vocab);
    langid::simd::set_backend(langid::simd::Backend::kScalar);
    const auto p_scalar = langid::forward(scalar_model, features);
    langid::simd::set_backend(langid::simd::Backend::kAvx2);
    const auto p_simd = langid::forward(simd_model, features);
    for (size_t i = 0; i < p_scalar.size(); ++i) CHECK(std::abs(p_scalar[i] - p_simd[i]) < 1e-3);
    const auto top_scalar = std::max_element(p_scalar.begin(), p_scalar.end()) - p_scalar.begin();
    const auto top_simd = std::max_element(p_simd.begin(), p_simd.end()) - p_simd.begin();
    CHECK(top_scalar == top_simd);
  }
  langid::simd::set_backend(previous);
}

TEST_CASE("analytic gradient agrees with central differences in double") {
  std::mt19937_64 rng(31);
  constexpr double kEps = 1e-4;
  for (int t = 0; t < 10; ++t) {
    const Model m = random_model(rng, 8, 4, 60);
    auto p = langid::to_dense<double>(m);
    std::vector<int32_t> f(20);
    for (auto& id : f) id = static_cast<int32_t>(rng() % p.rows);
    const int target = static_cast<int>(rng() % 4);
    langid::DenseParams<double> grad;
    langid::dense_gradient(p, f, target, grad);

    auto check = [&](std::vector<double>& params, const std::vector<double>& analytic) {
      for (size_t i = 0; i < params.size(); ++i) {
        if (&params == &p.input && analytic[i] == 0.0 &&
            std::find(f.begin(), f.end(), static_cast<int32_t>(i / p.dim)) == f.end()) {
          continue;
        }
        const double saved = params[i];
        params[i] = saved + kEps;
        const double up = langid::dense_loss(p, f, target);
        params[i] = saved - kEps;
        const double down = langid::dense_loss(p, f, target);
        params[i] = saved;
        const double numeric = (up - down) / (2 * kEps);
        const double rel = std::abs(numeric - analytic[i]) /
                           std::max({std::abs(numeric), std::abs(analytic[i]), 1e-8});
        CHECK((rel < 1e-4 || std::abs(numeric - analytic[i]) < 1e-9));
      }
    };
    check(p.output, grad.output);
    check(p.input, grad.input);
  }
}
