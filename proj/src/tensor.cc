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

#include "pcbgnn/tensor.h"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

namespace pcbgnn {
namespace {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMatrix = Eigen::Map<RowMatrix>;
using ConstMapMatrix = Eigen::Map<const RowMatrix>;

ConstMapMatrix as_matrix(const Tensor& t) {
  return ConstMapMatrix(t.data(), static_cast<Eigen::Index>(t.rows()),
                        static_cast<Eigen::Index>(t.cols()));
}
MapMatrix as_matrix(Tensor& t) {
  return MapMatrix(t.data(), static_cast<Eigen::Index>(t.rows()),
                   static_cast<Eigen::Index>(t.cols()));
}

[[noreturn]] void shape_error(const char* op, const Tensor& a,
                              const Tensor& b) {
  throw std::invalid_argument(std::string(op) + ": shape mismatch " +
                              a.shape_string() + " vs " + b.shape_string());
}

Tape& tape_of(Var a) {
  if (a.tape == nullptr) throw std::invalid_argument("Var is not on a tape");
  return *a.tape;
}

Tape& tape_of(Var a, Var b) {
  if (a.tape != b.tape) {
    throw std::invalid_argument("operands live on different tapes");
  }
  return tape_of(a);
}

enum class Broadcast { kSame, kScalar, kRow, kCol };

Broadcast broadcast_kind(const char* op, const Tensor& a, const Tensor& b) {
  if (a.same_shape(b)) return Broadcast::kSame;
  if (b.rows() == 1 && b.cols() == 1) return Broadcast::kScalar;
  if (b.rows() == 1 && b.cols() == a.cols()) return Broadcast::kRow;
  if (b.cols() == 1 && b.rows() == a.rows()) return Broadcast::kCol;
  shape_error(op, a, b);
}

// Index of the element of `b` paired with a(r, c).
inline std::size_t b_index(Broadcast k, std::size_t r, std::size_t c,
                           std::size_t cols) {
  switch (k) {
    case Broadcast::kSame:
      return r * cols + c;
    case Broadcast::kScalar:
      return 0;
    case Broadcast::kRow:
      return c;
    case Broadcast::kCol:
      return r;
  }
  return 0;
}

template <typename Fn>
Tensor zip(const Tensor& a, const Tensor& b, Broadcast k, Fn fn) {
  Tensor out(a.rows(), a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) {
      out(r, c) = fn(a(r, c), b[b_index(k, r, c, a.cols())]);
    }
  }
  return out;
}

template <typename Fn>
Tensor map(const Tensor& a, Fn fn) {
  Tensor out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = fn(a[i]);
  return out;
}

std::shared_ptr<const std::vector<std::size_t>> copy_index(
    std::span<const std::size_t> index) {
  return std::make_shared<const std::vector<std::size_t>>(index.begin(),
                                                          index.end());
}

// Elementwise unary op whose derivative is a function of (input, output).
template <typename Fwd, typename Deriv>
Var unary(Var a, Fwd fwd, Deriv deriv) {
  Tape& tape = tape_of(a);
  const std::size_t ia = a.id;
  return tape.record(map(a.value(), fwd), {a},
                     [ia, deriv](Tape& t, std::size_t self) {
                       if (!t.requires_grad(ia)) return;
                       const Tensor& g = t.grad(self);
                       const Tensor& x = t.value(ia);
                       const Tensor& y = t.value(self);
                       Tensor& ga = t.grad_buffer(ia);
                       for (std::size_t i = 0; i < g.size(); ++i) {
                         ga[i] += g[i] * deriv(x[i], y[i]);
                       }
                     });
}

}  // namespace

// ---------------------------------------------------------------- Tensor

Tensor::Tensor(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Tensor::Tensor(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw std::invalid_argument("Tensor: data length " +
                                std::to_string(data_.size()) +
                                " does not match shape " + shape_string());
  }
}

Tensor Tensor::from_rows(
    std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<double> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw std::invalid_argument("ragged rows");
    data.insert(data.end(), row.begin(), row.end());
  }
  return Tensor(r, c, std::move(data));
}

Tensor Tensor::identity(std::size_t n) {
  Tensor t(n, n);
  for (std::size_t i = 0; i < n; ++i) t(i, i) = 1.0;
  return t;
}

double Tensor::item() const {
  if (data_.size() != 1) {
    throw std::invalid_argument("item() on non-scalar tensor " +
                                shape_string());
  }
  return data_[0];
}

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

void Tensor::add_inplace(const Tensor& o) {
  if (!same_shape(o)) shape_error("add_inplace", *this, o);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
}

void Tensor::scale_inplace(double s) {
  for (double& v : data_) v *= s;
}

std::string Tensor::shape_string() const {
  return "[" + std::to_string(rows_) + "x" + std::to_string(cols_) + "]";
}

// ---------------------------------------------------------------- Var/Tape

const Tensor& Var::value() const { return tape->value(id); }
const Tensor& Var::grad() const { return tape->grad(id); }
bool Var::requires_grad() const { return tape->requires_grad(id); }

Var Tape::constant(Tensor value) {
  nodes_.push_back(Node{std::move(value), Tensor(), false, true, nullptr});
  return Var{this, nodes_.size() - 1};
}

Var Tape::variable(Tensor value) {
  nodes_.push_back(Node{std::move(value), Tensor(), true, true, nullptr});
  return Var{this, nodes_.size() - 1};
}

Var Tape::record(Tensor value, std::span<const Var> inputs,
                 BackwardFn backward) {
  bool needs = false;
  for (const Var& v : inputs) {
    if (v.tape != this) {
      throw std::invalid_argument("operands live on different tapes");
    }
    needs = needs || nodes_[v.id].requires_grad;
  }
  nodes_.push_back(Node{std::move(value), Tensor(), needs, false,
                        needs ? std::move(backward) : nullptr});
  return Var{this, nodes_.size() - 1};
}

Tensor& Tape::grad_buffer(std::size_t id) {
  Node& n = nodes_[id];
  if (n.grad.empty() && !n.value.empty()) {
    n.grad = Tensor(n.value.rows(), n.value.cols());
  }
  return n.grad;
}

void Tape::backward(Var loss) {
  if (loss.tape != this) throw std::invalid_argument("loss not on this tape");
  const Tensor& lv = nodes_[loss.id].value;
  if (lv.rows() != 1 || lv.cols() != 1) {
    throw std::invalid_argument("backward() needs a scalar loss, got " +
                                lv.shape_string());
  }
  for (Node& n : nodes_) {
    if (!n.leaf) n.grad = Tensor();
  }
  if (!nodes_[loss.id].requires_grad) return;
  grad_buffer(loss.id)[0] += 1.0;
  for (std::size_t i = loss.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (n.backward && !n.grad.empty()) n.backward(*this, i);
  }
}

void Tape::zero_grad() {
  for (Node& n : nodes_) n.grad = Tensor();
}

// ---------------------------------------------------------------- ops

Var matmul(Var a, Var b) {
  Tape& tape = tape_of(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (av.cols() != bv.rows()) shape_error("matmul", av, bv);
  Tensor out(av.rows(), bv.cols());
  if (av.cols() > 0) as_matrix(out).noalias() = as_matrix(av) * as_matrix(bv);
  const std::size_t ia = a.id, ib = b.id;
  return tape.record(std::move(out), {a, b}, [ia, ib](Tape& t, std::size_t s) {
    const Tensor& g = t.grad(s);
    if (t.requires_grad(ia)) {
      as_matrix(t.grad_buffer(ia)).noalias() +=
          as_matrix(g) * as_matrix(t.value(ib)).transpose();
    }
    if (t.requires_grad(ib)) {
      as_matrix(t.grad_buffer(ib)).noalias() +=
          as_matrix(t.value(ia)).transpose() * as_matrix(g);
    }
  });
}

namespace {

// Shared implementation of broadcasting binary ops. `da` and `db` give the
// partial derivatives as functions of (a, b, out).
template <typename Fwd, typename Da, typename Db>
Var binary(const char* name, Var a, Var b, Fwd fwd, Da da, Db db) {
  Tape& tape = tape_of(a, b);
  const Broadcast k = broadcast_kind(name, a.value(), b.value());
  const std::size_t ia = a.id, ib = b.id;
  return tape.record(
      zip(a.value(), b.value(), k, fwd), {a, b},
      [ia, ib, k, da, db](Tape& t, std::size_t s) {
        const Tensor& g = t.grad(s);
        const Tensor& av = t.value(ia);
        const Tensor& bv = t.value(ib);
        const Tensor& ov = t.value(s);
        const std::size_t cols = av.cols();
        if (t.requires_grad(ia)) {
          Tensor& ga = t.grad_buffer(ia);
          for (std::size_t r = 0; r < av.rows(); ++r) {
            for (std::size_t c = 0; c < cols; ++c) {
              const std::size_t i = r * cols + c;
              ga[i] += g[i] * da(av[i], bv[b_index(k, r, c, cols)], ov[i]);
            }
          }
        }
        if (t.requires_grad(ib)) {
          Tensor& gb = t.grad_buffer(ib);
          for (std::size_t r = 0; r < av.rows(); ++r) {
            for (std::size_t c = 0; c < cols; ++c) {
              const std::size_t i = r * cols + c;
              const std::size_t j = b_index(k, r, c, cols);
              gb[j] += g[i] * db(av[i], bv[j], ov[i]);
            }
          }
        }
      });
}

}  // namespace

Var add(Var a, Var b) {
  return binary(
      "add", a, b, [](double x, double y) { return x + y; },
      [](double, double, double) { return 1.0; },
      [](double, double, double) { return 1.0; });
}

Var subtract(Var a, Var b) {
  return binary(
      "subtract", a, b, [](double x, double y) { return x - y; },
      [](double, double, double) { return 1.0; },
      [](double, double, double) { return -1.0; });
}

Var multiply(Var a, Var b) {
  return binary(
      "multiply", a, b, [](double x, double y) { return x * y; },
      [](double, double y, double) { return y; },
      [](double x, double, double) { return x; });
}

Var divide(Var a, Var b) {
  return binary(
      "divide", a, b, [](double x, double y) { return x / y; },
      [](double, double y, double) { return 1.0 / y; },
      [](double x, double y, double) { return -x / (y * y); });
}

Var scale(Var a, double s) {
  return unary(
      a, [s](double x) { return s * x; },
      [s](double, double) { return s; });
}

Var add_scalar(Var a, double s) {
  return unary(
      a, [s](double x) { return x + s; }, [](double, double) { return 1.0; });
}

Var negate(Var a) { return scale(a, -1.0); }

Var square(Var a) {
  return unary(
      a, [](double x) { return x * x; },
      [](double x, double) { return 2.0 * x; });
}

Var transpose(Var a) {
  Tape& tape = tape_of(a);
  const Tensor& av = a.value();
  Tensor out(av.cols(), av.rows());
  as_matrix(out) = as_matrix(av).transpose();
  const std::size_t ia = a.id;
  return tape.record(std::move(out), {a}, [ia](Tape& t, std::size_t s) {
    if (!t.requires_grad(ia)) return;
    as_matrix(t.grad_buffer(ia)) += as_matrix(t.grad(s)).transpose();
  });
}

Var concat(std::span<const Var> parts, int axis) {
  if (parts.empty()) throw std::invalid_argument("concat of nothing");
  if (axis != 0 && axis != 1) throw std::invalid_argument("concat axis");
  Tape& tape = tape_of(parts[0]);
  const Tensor& first = parts[0].value();
  std::size_t rows = axis == 0 ? 0 : first.rows();
  std::size_t cols = axis == 1 ? 0 : first.cols();
  for (const Var& p : parts) {
    const Tensor& v = p.value();
    if (axis == 0) {
      if (v.cols() != cols) shape_error("concat", first, v);
      rows += v.rows();
    } else {
      if (v.rows() != rows) shape_error("concat", first, v);
      cols += v.cols();
    }
  }
  Tensor out(rows, cols);
  std::vector<std::size_t> ids;
  std::size_t offset = 0;
  for (const Var& p : parts) {
    const Tensor& v = p.value();
    ids.push_back(p.id);
    for (std::size_t r = 0; r < v.rows(); ++r) {
      for (std::size_t c = 0; c < v.cols(); ++c) {
        if (axis == 0) {
          out(offset + r, c) = v(r, c);
        } else {
          out(r, offset + c) = v(r, c);
        }
      }
    }
    offset += axis == 0 ? v.rows() : v.cols();
  }
  return tape.record(std::move(out), parts, [ids, axis](Tape& t,
                                                        std::size_t s) {
    const Tensor& g = t.grad(s);
    std::size_t offset = 0;
    for (std::size_t id : ids) {
      const Tensor& v = t.value(id);
      if (t.requires_grad(id)) {
        Tensor& gp = t.grad_buffer(id);
        for (std::size_t r = 0; r < v.rows(); ++r) {
          for (std::size_t c = 0; c < v.cols(); ++c) {
            gp(r, c) += axis == 0 ? g(offset + r, c) : g(r, offset + c);
          }
        }
      }
      offset += axis == 0 ? v.rows() : v.cols();
    }
  });
}

Var concat(std::initializer_list<Var> parts, int axis) {
  return concat(std::span<const Var>(parts.begin(), parts.size()), axis);
}

Var slice_rows(Var a, std::size_t begin, std::size_t end) {
  Tape& tape = tape_of(a);
  const Tensor& av = a.value();
  if (begin > end || end > av.rows()) {
    throw std::invalid_argument("slice_rows out of range on " +
                                av.shape_string());
  }
  const std::size_t cols = av.cols();
  std::vector<double> data(av.data() + begin * cols, av.data() + end * cols);
  const std::size_t ia = a.id;
  return tape.record(Tensor(end - begin, cols, std::move(data)), {a},
                     [ia, begin, cols](Tape& t, std::size_t s) {
                       if (!t.requires_grad(ia)) return;
                       const Tensor& g = t.grad(s);
                       Tensor& ga = t.grad_buffer(ia);
                       for (std::size_t i = 0; i < g.size(); ++i) {
                         ga[begin * cols + i] += g[i];
                       }
                     });
}

Var slice_cols(Var a, std::size_t begin, std::size_t end) {
  Tape& tape = tape_of(a);
  const Tensor& av = a.value();
  if (begin > end || end > av.cols()) {
    throw std::invalid_argument("slice_cols out of range on " +
                                av.shape_string());
  }
  Tensor out(av.rows(), end - begin);
  for (std::size_t r = 0; r < av.rows(); ++r) {
    for (std::size_t c = begin; c < end; ++c) out(r, c - begin) = av(r, c);
  }
  const std::size_t ia = a.id;
  return tape.record(std::move(out), {a}, [ia, begin](Tape& t, std::size_t s) {
    if (!t.requires_grad(ia)) return;
    const Tensor& g = t.grad(s);
    Tensor& ga = t.grad_buffer(ia);
    for (std::size_t r = 0; r < g.rows(); ++r) {
      for (std::size_t c = 0; c < g.cols(); ++c) ga(r, begin + c) += g(r, c);
    }
  });
}

Var sum(Var a) {
  Tape& tape = tape_of(a);
  double total = 0.0;
  for (double v : a.value().values()) total += v;
  const std::size_t ia = a.id;
  return tape.record(Tensor::scalar(total), {a}, [ia](Tape& t, std::size_t s) {
    if (!t.requires_grad(ia)) return;
    const double g = t.grad(s)[0];
    for (double& v : t.grad_buffer(ia).values()) v += g;
  });
}

Var mean(Var a) {
  const std::size_t n = a.value().size();
  if (n == 0) throw std::invalid_argument("mean of empty tensor");
  return scale(sum(a), 1.0 / static_cast<double>(n));
}

Var sum_blocks(Var a, std::size_t blocks) {
  Tape& tape = tape_of(a);
  const Tensor& av = a.value();
  if (blocks == 0 || av.cols() % blocks != 0) {
    throw std::invalid_argument("sum_blocks: " + std::to_string(av.cols()) +
                                " columns not divisible by " +
                                std::to_string(blocks));
  }
  const std::size_t width = av.cols() / blocks;
  Tensor out(av.rows(), blocks);
  for (std::size_t r = 0; r < av.rows(); ++r) {
    for (std::size_t c = 0; c < av.cols(); ++c) out(r, c / width) += av(r, c);
  }
  const std::size_t ia = a.id;
  return tape.record(std::move(out), {a}, [ia, width](Tape& t, std::size_t s) {
    if (!t.requires_grad(ia)) return;
    const Tensor& g = t.grad(s);
    Tensor& ga = t.grad_buffer(ia);
    for (std::size_t r = 0; r < ga.rows(); ++r) {
      for (std::size_t c = 0; c < ga.cols(); ++c) ga(r, c) += g(r, c / width);
    }
  });
}

Var repeat_cols(Var a, std::size_t times) {
  Tape& tape = tape_of(a);
  const Tensor& av = a.value();
  if (times == 0) throw std::invalid_argument("repeat_cols: times == 0");
  Tensor out(av.rows(), av.cols() * times);
  for (std::size_t r = 0; r < out.rows(); ++r) {
    for (std::size_t c = 0; c < out.cols(); ++c) out(r, c) = av(r, c / times);
  }
  const std::size_t ia = a.id;
  return tape.record(std::move(out), {a}, [ia, times](Tape& t, std::size_t s) {
    if (!t.requires_grad(ia)) return;
    const Tensor& g = t.grad(s);
    Tensor& ga = t.grad_buffer(ia);
    for (std::size_t r = 0; r < g.rows(); ++r) {
      for (std::size_t c = 0; c < g.cols(); ++c) ga(r, c / times) += g(r, c);
    }
  });
}

Var relu(Var a) {
  return unary(
      a, [](double x) { return x < 0.0 ? 0.0 : x; },  // NaN propagates
      [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Var leaky_relu(Var a, double slope) {
  return unary(
      a, [slope](double x) { return x > 0.0 ? x : slope * x; },
      [slope](double x, double) { return x > 0.0 ? 1.0 : slope; });
}

Var sigmoid(Var a) {
  return unary(
      a,
      [](double x) {
        if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Var log(Var a) {
  return unary(
      a, [](double x) { return std::log(x); },
      [](double x, double) { return 1.0 / x; });
}

Var exp(Var a) {
  return unary(
      a, [](double x) { return std::exp(x); },
      [](double, double y) { return y; });
}

Var clamp(Var a, double lo, double hi) {
  return unary(
      a, [lo, hi](double x) { return std::clamp(x, lo, hi); },
      [lo, hi](double x, double) { return (x > lo && x < hi) ? 1.0 : 0.0; });
}

Var softmax(Var a, int axis) {
  Tape& tape = tape_of(a);
  const Tensor& av = a.value();
  if (axis != 0 && axis != 1) throw std::invalid_argument("softmax axis");
  const std::size_t groups = axis == 1 ? av.rows() : av.cols();
  const std::size_t len = axis == 1 ? av.cols() : av.rows();
  if (len == 0) throw std::invalid_argument("softmax over empty axis");
  auto at = [axis](std::size_t g, std::size_t k, std::size_t cols) {
    return axis == 1 ? g * cols + k : k * cols + g;
  };
  const std::size_t cols = av.cols();
  Tensor out(av.rows(), av.cols());
  for (std::size_t g = 0; g < groups; ++g) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < len; ++k) mx = std::max(mx, av[at(g, k, cols)]);
    double z = 0.0;
    for (std::size_t k = 0; k < len; ++k) {
      const double e = std::exp(av[at(g, k, cols)] - mx);
      out[at(g, k, cols)] = e;
      z += e;
    }
    for (std::size_t k = 0; k < len; ++k) out[at(g, k, cols)] /= z;
  }
  const std::size_t ia = a.id;
  return tape.record(std::move(out), {a},
                     [ia, groups, len, cols, at](Tape& t, std::size_t s) {
                       if (!t.requires_grad(ia)) return;
                       const Tensor& g = t.grad(s);
                       const Tensor& y = t.value(s);
                       Tensor& ga = t.grad_buffer(ia);
                       for (std::size_t q = 0; q < groups; ++q) {
                         double dot = 0.0;
                         for (std::size_t k = 0; k < len; ++k) {
                           dot += g[at(q, k, cols)] * y[at(q, k, cols)];
                         }
                         for (std::size_t k = 0; k < len; ++k) {
                           const std::size_t i = at(q, k, cols);
                           ga[i] += y[i] * (g[i] - dot);
                         }
                       }
                     });
}

Var gather_rows(Var a, std::span<const std::size_t> index) {
  Tape& tape = tape_of(a);
  const Tensor& av = a.value();
  const std::size_t cols = av.cols();
  Tensor out(index.size(), cols);
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (index[i] >= av.rows()) {
      throw std::out_of_range("gather_rows: index " + std::to_string(index[i]) +
                              " out of range for " + av.shape_string());
    }
    std::copy_n(av.data() + index[i] * cols, cols, out.data() + i * cols);
  }
  const std::size_t ia = a.id;
  auto idx = copy_index(index);
  return tape.record(std::move(out), {a}, [ia, idx, cols](Tape& t,
                                                          std::size_t s) {
    if (!t.requires_grad(ia)) return;
    const Tensor& g = t.grad(s);
    Tensor& ga = t.grad_buffer(ia);
    for (std::size_t i = 0; i < idx->size(); ++i) {
      double* dst = ga.data() + (*idx)[i] * cols;
      const double* src = g.data() + i * cols;
      for (std::size_t c = 0; c < cols; ++c) dst[c] += src[c];
    }
  });
}

Var scatter_add_rows(Var a, std::span<const std::size_t> index,
                     std::size_t num_rows) {
  Tape& tape = tape_of(a);
  const Tensor& av = a.value();
  if (index.size() != av.rows()) {
    throw std::invalid_argument("scatter_add_rows: " +
                                std::to_string(index.size()) +
                                " indices for " + av.shape_string());
  }
  const std::size_t cols = av.cols();
  Tensor out(num_rows, cols);
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (index[i] >= num_rows) {
      throw std::out_of_range("scatter_add_rows: index " +
                              std::to_string(index[i]) + " >= " +
                              std::to_string(num_rows));
    }
    double* dst = out.data() + index[i] * cols;
    const double* src = av.data() + i * cols;
    for (std::size_t c = 0; c < cols; ++c) dst[c] += src[c];
  }
  const std::size_t ia = a.id;
  auto idx = copy_index(index);
  return tape.record(std::move(out), {a}, [ia, idx, cols](Tape& t,
                                                          std::size_t s) {
    if (!t.requires_grad(ia)) return;
    const Tensor& g = t.grad(s);
    Tensor& ga = t.grad_buffer(ia);
    for (std::size_t i = 0; i < idx->size(); ++i) {
      const double* src = g.data() + (*idx)[i] * cols;
      double* dst = ga.data() + i * cols;
      for (std::size_t c = 0; c < cols; ++c) dst[c] += src[c];
    }
  });
}

Var segment_softmax(Var scores, std::span<const std::size_t> segment,
                    std::size_t num_segments) {
  Tape& tape = tape_of(scores);
  const Tensor& sv = scores.value();
  if (segment.size() != sv.rows()) {
    throw std::invalid_argument("segment_softmax: segment ids do not match " +
                                sv.shape_string());
  }
  const std::size_t cols = sv.cols();
  Tensor mx(num_segments, cols, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < sv.rows(); ++i) {
    if (segment[i] >= num_segments) {
      throw std::out_of_range("segment_softmax: segment id out of range");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      mx(segment[i], c) = std::max(mx(segment[i], c), sv(i, c));
    }
  }
  Tensor out(sv.rows(), cols);
  Tensor z(num_segments, cols);
  for (std::size_t i = 0; i < sv.rows(); ++i) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double e = std::exp(sv(i, c) - mx(segment[i], c));
      out(i, c) = e;
      z(segment[i], c) += e;
    }
  }
  for (std::size_t i = 0; i < sv.rows(); ++i) {
    for (std::size_t c = 0; c < cols; ++c) out(i, c) /= z(segment[i], c);
  }
  const std::size_t ia = scores.id;
  auto seg = copy_index(segment);
  return tape.record(
      std::move(out), {scores},
      [ia, seg, num_segments, cols](Tape& t, std::size_t s) {
        if (!t.requires_grad(ia)) return;
        const Tensor& g = t.grad(s);
        const Tensor& y = t.value(s);
        Tensor dot(num_segments, cols);
        for (std::size_t i = 0; i < seg->size(); ++i) {
          for (std::size_t c = 0; c < cols; ++c) {
            dot((*seg)[i], c) += g(i, c) * y(i, c);
          }
        }
        Tensor& ga = t.grad_buffer(ia);
        for (std::size_t i = 0; i < seg->size(); ++i) {
          for (std::size_t c = 0; c < cols; ++c) {
            ga(i, c) += y(i, c) * (g(i, c) - dot((*seg)[i], c));
          }
        }
      });
}

}  // namespace pcbgnn
