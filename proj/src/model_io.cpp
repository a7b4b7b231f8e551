#include "langid/model_io.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <span>
#include <type_traits>

#include "langid/error.hpp"

namespace langid {
namespace {

static_assert(std::numeric_limits<float>::is_iec559 && sizeof(float) == 4);
static_assert(sizeof(double) == 8);

class Writer {
 public:
  template <class T>
  void put(T value) {
    static_assert(std::is_arithmetic_v<T>);
    using U = std::conditional_t<sizeof(T) == 1, uint8_t,
              std::conditional_t<sizeof(T) == 2, uint16_t,
              std::conditional_t<sizeof(T) == 4, uint32_t, uint64_t>>>;
    U bits;
    std::memcpy(&bits, &value, sizeof(T));
    for (size_t i = 0; i < sizeof(T); ++i) {
      buf_.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
    }
  }

  void put_string(std::string_view s) {
    put(static_cast<uint32_t>(s.size()));
    buf_.append(s);
  }

  void put_floats(std::span<const float> values) {
    if constexpr (std::endian::native == std::endian::little) {
      buf_.append(reinterpret_cast<const char*>(values.data()), values.size_bytes());
    } else {
      for (float v : values) put(v);
    }
  }

  void put_raw(std::string_view s) { buf_.append(s); }
  std::string& bytes() { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}

  template <class T>
  T get() {
    using U = std::conditional_t<sizeof(T) == 1, uint8_t,
              std::conditional_t<sizeof(T) == 2, uint16_t,
              std::conditional_t<sizeof(T) == 4, uint32_t, uint64_t>>>;
    need(sizeof(T));
    U bits = 0;
    for (size_t i = 0; i < sizeof(T); ++i) {
      bits |= static_cast<U>(static_cast<uint8_t>(data_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(T);
    T value;
    std::memcpy(&value, &bits, sizeof(T));
    return value;
  }

  std::string get_string() {
    const auto n = get<uint32_t>();
    need(n);
    std::string s(data_.substr(pos_, n));
    pos_ += n;
    return s;
  }

  void get_floats(std::span<float> out) {
    need(out.size_bytes());
    if constexpr (std::endian::native == std::endian::little) {
      std::memcpy(out.data(), data_.data() + pos_, out.size_bytes());
      pos_ += out.size_bytes();
    } else {
      for (float& v : out) v = get<float>();
    }
  }

  bool done() const { return pos_ == data_.size(); }

 private:
  void need(size_t n) const {
    if (data_.size() - pos_ < n) {
      throw Error(Errc::kFormat, "model payload ends prematurely");
    }
  }

  std::string_view data_;
  size_t pos_ = 0;
};

uint32_t crc32_of(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed large payloads in chunks.
  constexpr size_t kChunk = 1u << 30;
  for (size_t off = 0; off < bytes.size(); off += kChunk) {
    const size_t n = std::min(kChunk, bytes.size() - off);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data() + off),
                static_cast<uInt>(n));
  }
  return static_cast<uint32_t>(crc);
}

void put_matrix(Writer& w, const Matrix& m) {
  w.put(static_cast<uint64_t>(m.rows()));
  w.put(static_cast<uint64_t>(m.cols()));
  w.put_floats(m.data());
}

Matrix get_matrix(Reader& r, size_t max_bytes) {
  const auto rows = r.get<uint64_t>();
  const auto cols = r.get<uint64_t>();
  if (cols != 0 && rows > max_bytes / 4 / cols) {
    throw Error(Errc::kFormat, "matrix shape exceeds the payload size");
  }
  Matrix m(rows, cols);
  r.get_floats(m.data());
  return m;
}

constexpr size_t kHeaderSize = 4 + 2;
constexpr size_t kCrcSize = 4;

}  // namespace

std::string serialize_model(const Model& model) {
  Writer w;
  w.put_raw(kModelMagic);
  w.put(kModelFormatVersion);

  const Hyperparams& hp = model.hyperparams;
  w.put(static_cast<uint8_t>(hp.loss));
  w.put(static_cast<int32_t>(hp.epochs));
  w.put(hp.lr);
  w.put(static_cast<int32_t>(hp.dim));
  w.put(hp.min_count);
  w.put(static_cast<int32_t>(hp.ngram_min));
  w.put(static_cast<int32_t>(hp.ngram_max));
  w.put(static_cast<int32_t>(hp.word_ngrams));
  w.put(hp.bucket_size);
  w.put(static_cast<int32_t>(hp.threads));
  w.put(hp.seed);
  w.put(hp.sample_alpha);

  w.put(static_cast<uint32_t>(model.labels.size()));
  for (const auto& label : model.labels) w.put_string(label.str());

  const Vocabulary& v = model.vocab;
  w.put(v.min_count());
  w.put(v.bucket_size());
  w.put(static_cast<int32_t>(v.ngram_min()));
  w.put(static_cast<int32_t>(v.ngram_max()));
  w.put(static_cast<uint64_t>(v.num_words()));
  for (size_t i = 0; i < v.num_words(); ++i) {
    w.put_string(v.words()[i]);
    w.put(v.counts()[i]);
  }

  put_matrix(w, model.input);
  put_matrix(w, model.output);

  const uint32_t crc = crc32_of(w.bytes());
  w.put(crc);
  return std::move(w.bytes());
}

Model deserialize_model(std::string_view bytes) {
  if (bytes.size() < kHeaderSize + kCrcSize) {
    if (bytes.substr(0, std::min(bytes.size(), kModelMagic.size())) !=
        kModelMagic.substr(0, std::min(bytes.size(), kModelMagic.size()))) {
      throw Error(Errc::kFormat, "not a model file (bad magic)");
    }
    throw Error(Errc::kChecksum, "model file is truncated");
  }
  if (bytes.substr(0, 4) != kModelMagic) {
    throw Error(Errc::kFormat, "not a model file (bad magic)");
  }
  Reader header(bytes.substr(4, 2));
  const auto version = header.get<uint16_t>();
  if (version != kModelFormatVersion) {
    throw Error(Errc::kVersionMismatch,
                "unsupported model format version " + std::to_string(version) +
                    " (expected " + std::to_string(kModelFormatVersion) + ")");
  }
  const std::string_view payload = bytes.substr(0, bytes.size() - kCrcSize);
  Reader trailer(bytes.substr(bytes.size() - kCrcSize));
  if (trailer.get<uint32_t>() != crc32_of(payload)) {
    throw Error(Errc::kChecksum, "model checksum mismatch (file corrupt or truncated)");
  }

  Reader r(payload.substr(kHeaderSize));
  Model model;
  Hyperparams& hp = model.hyperparams;
  hp.loss = static_cast<LossKind>(r.get<uint8_t>());
  hp.epochs = r.get<int32_t>();
  hp.lr = r.get<double>();
  hp.dim = r.get<int32_t>();
  hp.min_count = r.get<uint64_t>();
  hp.ngram_min = r.get<int32_t>();
  hp.ngram_max = r.get<int32_t>();
  hp.word_ngrams = r.get<int32_t>();
  hp.bucket_size = r.get<uint64_t>();
  hp.threads = r.get<int32_t>();
  hp.seed = r.get<uint64_t>();
  hp.sample_alpha = r.get<double>();

  const auto num_labels = r.get<uint32_t>();
  for (uint32_t i = 0; i < num_labels; ++i) {
    model.labels.push_back(parse_label(r.get_string()));
  }

  const auto min_count = r.get<uint64_t>();
  const auto bucket = r.get<uint64_t>();
  const auto minn = r.get<int32_t>();
  const auto maxn = r.get<int32_t>();
  const auto num_words = r.get<uint64_t>();
  if (num_words > payload.size()) throw Error(Errc::kFormat, "bad vocabulary size");
  std::vector<std::string> words;
  std::vector<uint64_t> counts;
  words.reserve(num_words);
  counts.reserve(num_words);
  for (uint64_t i = 0; i < num_words; ++i) {
    words.push_back(r.get_string());
    counts.push_back(r.get<uint64_t>());
  }
  model.vocab = Vocabulary(std::move(words), std::move(counts), min_count, bucket,
                           minn, maxn);

  model.input = get_matrix(r, payload.size());
  model.output = get_matrix(r, payload.size());
  if (!r.done()) throw Error(Errc::kFormat, "trailing bytes after model payload");

  if (model.input.rows() != model.vocab.feature_space() ||
      model.output.rows() != model.labels.size() ||
      model.input.cols() != model.output.cols() ||
      model.input.cols() != static_cast<size_t>(hp.dim)) {
    throw Error(Errc::kFormat, "model matrix shapes are inconsistent");
  }
  return model;
}

void save_model(const Model& model, const std::filesystem::path& path) {
  const std::string bytes = serialize_model(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::kIo, "cannot write model file '" + path.string() + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) throw Error(Errc::kIo, "error writing model file '" + path.string() + "'");
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIo, "cannot open model file '" + path.string() + "'");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(Errc::kIo, "error reading model file '" + path.string() + "'");
  return deserialize_model(bytes);
}

}  // namespace langid
