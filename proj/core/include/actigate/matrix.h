/*
 * Copyright 2026 The Actigate Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef ACTIGATE_MATRIX_H_
#define ACTIGATE_MATRIX_H_

#include <cstddef>
#include <span>
#include <vector>

namespace actigate {

// Dense row-major float32 matrix. Activation sequences are stored and
// exchanged in this type; one row per token.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols);
  // `values.size()` must equal rows * cols.
  Matrix(std::size_t rows, std::size_t cols, std::vector<float> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return values_.empty(); }

  float& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  float operator()(std::size_t r, std::size_t c) const {
    return values_[r * cols_ + c];
  }

  std::span<float> row(std::size_t r) {
    return {values_.data() + r * cols_, cols_};
  }
  std::span<const float> row(std::size_t r) const {
    return {values_.data() + r * cols_, cols_};
  }

  std::span<float> values() { return values_; }
  std::span<const float> values() const { return values_; }

  // Rows [first, first + count).
  Matrix Slice(std::size_t first, std::size_t count) const;

  bool AllFinite() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<float> values_;
};

// Same shape and identical bit patterns (distinguishes -0.0 from 0.0).
bool BitwiseEqual(const Matrix& a, const Matrix& b);

}  // namespace actigate

#endif  // ACTIGATE_MATRIX_H_
