#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace langid {

/// Row-major dense float matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(size_t rows, size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }

  std::span<float> row(size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const float> row(size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  float& at(size_t r, size_t c) { return data_[r * cols_ + c]; }
  float at(size_t r, size_t c) const { return data_[r * cols_ + c]; }

  std::span<float> data() { return data_; }
  std::span<const float> data() const { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  size_t rows_ = 0;
  size_t cols_ = 0;
  std::vector<float> data_;
};

}  // namespace langid
