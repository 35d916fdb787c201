/*
 * Copyright 2026 The pcbgnn Authors.
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

// Dense float64 matrices and a reverse-mode tape.
//
// Every tensor is rank <= 2 (scalars are 1x1, vectors are 1xn or nx1), stored
// row-major. Ops take and return Var handles into a Tape; an op records a
// backward closure only when one of its inputs requires a gradient, so a tape
// used purely for inference stores values and nothing else.
//
// Notes for writing backward closures:
//  1) closures must ACCUMULATE into input gradients (an input may feed many
//     ops);
//  2) a closure is only invoked when its own output gradient is non-empty;
//  3) use Tape::grad_buffer() to get a zero-initialized gradient for inputs.

#ifndef PCBGNN_TENSOR_H_
#define PCBGNN_TENSOR_H_

#include <cstddef>
#include <deque>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace pcbgnn {

class Tensor {
 public:
  Tensor() = default;
  Tensor(std::size_t rows, std::size_t cols, double fill = 0.0);
  Tensor(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Tensor scalar(double v) { return Tensor(1, 1, v); }
  static Tensor from_rows(
      std::initializer_list<std::initializer_list<double>> rows);
  static Tensor identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }
  std::vector<std::size_t> shape() const { return {rows_, cols_}; }
  bool same_shape(const Tensor& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_;
  }

  double& operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }
  std::span<double> row(std::size_t r) {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  // Value of a 1x1 tensor.
  double item() const;

  void fill(double v);
  void add_inplace(const Tensor& o);
  void scale_inplace(double s);

  std::string shape_string() const;

  friend bool operator==(const Tensor& a, const Tensor& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

class Tape;

// Handle to a node on a Tape. Cheap to copy; valid while the tape lives.
struct Var {
  Tape* tape = nullptr;
  std::size_t id = 0;

  const Tensor& value() const;
  const Tensor& grad() const;
  bool requires_grad() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
};

class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, std::size_t self)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Leaf that never receives a gradient.
  Var constant(Tensor value);
  // Leaf whose gradient is accumulated by backward().
  Var variable(Tensor value);

  // Records an op result. `backward` is dropped when no input requires grad.
  Var record(Tensor value, std::span<const Var> inputs, BackwardFn backward);
  Var record(Tensor value, std::initializer_list<Var> inputs,
             BackwardFn backward) {
    return record(std::move(value), std::span<const Var>(inputs.begin(),
                                                         inputs.size()),
                  std::move(backward));
  }

  // Populates gradients of every variable reachable from `loss`.
  // Intermediate gradients are recomputed per call; leaf gradients accumulate
  // until zero_grad().
  void backward(Var loss);
  void zero_grad();

  const Tensor& value(std::size_t id) const { return nodes_[id].value; }
  const Tensor& grad(std::size_t id) const { return nodes_[id].grad; }
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }
  // Zero-initialized (on first use) gradient buffer of node `id`.
  Tensor& grad_buffer(std::size_t id);
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    bool leaf = true;
    BackwardFn backward;
  };
  std::deque<Node> nodes_;
};

// Forward ops. Binary elementwise ops broadcast the second operand when it is
// 1x1, 1xC (row) or Rx1 (column); gradients are reduced back accordingly.
Var matmul(Var a, Var b);
Var add(Var a, Var b);
Var subtract(Var a, Var b);
Var multiply(Var a, Var b);
Var divide(Var a, Var b);
Var scale(Var a, double s);
Var add_scalar(Var a, double s);
Var negate(Var a);
Var square(Var a);
Var transpose(Var a);

// axis 0 stacks rows, axis 1 stacks columns.
Var concat(std::span<const Var> parts, int axis);
Var concat(std::initializer_list<Var> parts, int axis);
Var slice_rows(Var a, std::size_t begin, std::size_t end);
Var slice_cols(Var a, std::size_t begin, std::size_t end);

Var sum(Var a);
Var mean(Var a);
// Sums consecutive groups of `cols/blocks` columns: RxC -> Rxblocks.
Var sum_blocks(Var a, std::size_t blocks);
// Repeats every column `times` times in place: RxC -> Rx(C*times).
Var repeat_cols(Var a, std::size_t times);

Var relu(Var a);
Var leaky_relu(Var a, double slope = 0.2);
Var sigmoid(Var a);
Var log(Var a);
Var exp(Var a);
// Clamps values to [lo, hi]; gradient passes only strictly inside.
Var clamp(Var a, double lo, double hi);
// axis 1 normalizes each row, axis 0 each column.
Var softmax(Var a, int axis);

// out[i] = a[index[i]].
Var gather_rows(Var a, std::span<const std::size_t> index);
// out[index[i]] += a[i]; `num_rows` rows in the output.
Var scatter_add_rows(Var a, std::span<const std::size_t> index,
                     std::size_t num_rows);
// Column-wise softmax of `scores` (ExH) within groups of rows sharing the
// same segment id; used for neighborhood attention.
Var segment_softmax(Var scores, std::span<const std::size_t> segment,
                    std::size_t num_segments);

}  // namespace pcbgnn

#endif  // PCBGNN_TENSOR_H_
