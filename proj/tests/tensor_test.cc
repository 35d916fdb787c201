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

#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "pcbgnn/grad_check.h"
#include "pcbgnn/optim.h"
#include "pcbgnn/random.h"
#include "pcbgnn/tensor.h"

namespace pcbgnn {
namespace {

Tensor random_tensor(std::size_t r, std::size_t c, Rng& rng, double lo = -1.0,
                     double hi = 1.0) {
  Tensor t(r, c);
  for (double& v : t.values()) v = rng.uniform(lo, hi);
  return t;
}

TEST_CASE("forward examples") {
  Tape tape;
  CHECK(sigmoid(tape.constant(Tensor::scalar(0.0))).value().item() == 0.5);

  Var s = softmax(tape.constant(Tensor::from_rows({{1, 1, 1}})), 1);
  for (double v : s.value().values()) CHECK(v == doctest::Approx(1.0 / 3));

  Tensor rows = Tensor::from_rows({{1, 2}, {10, 20}});
  std::vector<std::size_t> targets{0, 0};
  Var out = scatter_add_rows(tape.constant(rows), targets, 2);
  CHECK(out.value() == Tensor::from_rows({{11, 22}, {0, 0}}));

  std::vector<std::size_t> idx{1, 0, 1};
  Var g = gather_rows(tape.constant(rows), idx);
  CHECK(g.value() == Tensor::from_rows({{10, 20}, {1, 2}, {10, 20}}));
}

TEST_CASE("broadcasting binary ops") {
  Tape tape;
  Var a = tape.constant(Tensor::from_rows({{1, 2}, {3, 4}}));
  CHECK(add(a, tape.constant(Tensor::from_rows({{10, 20}}))).value() ==
        Tensor::from_rows({{11, 22}, {13, 24}}));
  CHECK(multiply(a, tape.constant(Tensor::from_rows({{2}, {3}}))).value() ==
        Tensor::from_rows({{2, 4}, {9, 12}}));
  CHECK(subtract(a, tape.constant(Tensor::scalar(1))).value() ==
        Tensor::from_rows({{0, 1}, {2, 3}}));
  CHECK_THROWS_AS(add(a, tape.constant(Tensor(3, 1))), std::invalid_argument);
  CHECK_THROWS_AS(matmul(a, tape.constant(Tensor(3, 1))),
                  std::invalid_argument);
}

TEST_CASE("shape errors") {
  Tape tape;
  CHECK_THROWS_AS(softmax(tape.constant(Tensor(2, 0)), 1),
                  std::invalid_argument);
  Var x = tape.variable(Tensor(1, 3, 1.0));
  CHECK_THROWS_AS(tape.backward(x), std::invalid_argument);
  CHECK_THROWS_AS(Tensor(2, 2, std::vector<double>{1, 2, 3}),
                  std::invalid_argument);
}

TEST_CASE("backward: analytic examples") {
  SUBCASE("sum of squares") {
    Tape tape;
    Var x = tape.variable(Tensor::from_rows({{1, 2, 3}}));
    tape.backward(sum(multiply(x, x)));
    CHECK(x.grad() == Tensor::from_rows({{2, 4, 6}}));
  }
  SUBCASE("shared subexpression") {
    Tape tape;
    Var x = tape.variable(Tensor::scalar(3.0));
    tape.backward(add(x, x));
    CHECK(x.grad().item() == 2.0);
  }
  SUBCASE("softmax cross-entropy at uniform logits") {
    Tape tape;
    Var logits = tape.variable(Tensor::from_rows({{0.5, 0.5, 0.5}}));
    Var p = softmax(logits, 1);
    tape.backward(negate(log(slice_cols(p, 0, 1))));
    CHECK(logits.grad()[0] == doctest::Approx(-2.0 / 3).epsilon(1e-12));
    CHECK(logits.grad()[1] == doctest::Approx(1.0 / 3).epsilon(1e-12));
    CHECK(logits.grad()[2] == doctest::Approx(1.0 / 3).epsilon(1e-12));
  }
  SUBCASE("repeated backward accumulates into leaves") {
    Tape tape;
    Var x = tape.variable(Tensor::from_rows({{1, 2}}));
    Var loss = sum(multiply(x, x));
    tape.backward(loss);
    tape.backward(loss);
    CHECK(x.grad() == Tensor::from_rows({{4, 8}}));
    tape.zero_grad();
    tape.backward(loss);
    CHECK(x.grad() == Tensor::from_rows({{2, 4}}));
  }
}

TEST_CASE("matmul gradient matches plain finite differences") {
  Rng rng(7);
  const Tensor a = random_tensor(3, 4, rng);
  const Tensor b = random_tensor(4, 2, rng);
  Tape tape;
  Var av = tape.variable(a);
  tape.backward(sum(matmul(av, tape.constant(b))));

  // Independent oracle: loops over the definition of sum(A * B).
  auto f = [&](const Tensor& x) {
    double s = 0;
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 2; ++j)
        for (std::size_t k = 0; k < 4; ++k) s += x(i, k) * b(k, j);
    return s;
  };
  const double eps = 1e-6;
  for (std::size_t i = 0; i < a.size(); ++i) {
    Tensor up = a, down = a;
    up[i] += eps;
    down[i] -= eps;
    const double numeric = (f(up) - f(down)) / (2 * eps);
    CHECK(av.grad()[i] == doctest::Approx(numeric).epsilon(1e-7));
    // The pattern is 1 * B^T: row sums of B.
    const std::size_t k = i % 4;
    CHECK(av.grad()[i] == doctest::Approx(b(k, 0) + b(k, 1)));
  }
}

TEST_CASE("grad_check of sum is exact") {
  const Tensor x = Tensor::from_rows({{0.25, -0.5, 0.125}, {2.0, 1.5, -3.0}});
  // A dyadic step keeps every probe exactly representable.
  CHECK(grad_check([](Tape&, Var v) { return sum(v); }, x, 0x1.0p-20) <=
        1e-10);
  Rng rng(1);
  CHECK(grad_check([](Tape&, Var v) { return sum(v); },
                   random_tensor(3, 5, rng), 1e-6) <= 1e-9);
}

TEST_CASE("every differentiable op passes grad_check on 10 seeds") {
  const std::vector<std::size_t> idx{2, 0, 1, 2, 3};
  const std::vector<std::size_t> seg{0, 0, 1, 2, 2};
  struct Case {
    const char* name;
    std::size_t rows, cols;
    ScalarFn fn;
  };
  Rng wrng(99);
  const Tensor w = random_tensor(4, 3, wrng);
  const Tensor row = random_tensor(1, 4, wrng);
  const Tensor col = random_tensor(5, 1, wrng, 0.5, 1.5);
  // Weighted readouts keep the gradients of normalizing ops non-trivial.
  const Tensor weights = random_tensor(5, 4, wrng);
  auto readout = [weights](Tape& t, Var v) {
    Tensor wt(v.rows(), v.cols());
    for (std::size_t i = 0; i < wt.size(); ++i) {
      wt[i] = weights[i % weights.size()];
    }
    return sum(multiply(v, t.constant(wt)));
  };
  std::vector<Case> cases = {
      {"matmul", 5, 4,
       [&](Tape& t, Var x) { return readout(t, matmul(x, t.constant(w))); }},
      {"matmul-rhs", 4, 3,
       [&](Tape& t, Var x) {
         return readout(t, matmul(t.constant(weights), x));
       }},
      {"add-row", 5, 4,
       [&](Tape& t, Var x) { return readout(t, add(x, t.constant(row))); }},
      {"add-as-broadcast-operand", 1, 4,
       [&](Tape& t, Var x) { return readout(t, add(t.constant(weights), x)); }},
      {"subtract", 5, 4,
       [&](Tape& t, Var x) { return readout(t, subtract(t.constant(weights),
                                                       x)); }},
      {"multiply-col", 5, 1,
       [&](Tape& t, Var x) {
         return readout(t, multiply(t.constant(weights), x));
       }},
      {"divide", 5, 1,
       [&](Tape& t, Var x) {
         return readout(t, divide(t.constant(weights), add_scalar(x, 3.0)));
       }},
      {"concat0", 5, 4,
       [&](Tape& t, Var x) {
         return readout(t, slice_rows(concat({x, x}, 0), 3, 8));
       }},
      {"concat1", 5, 2,
       [&](Tape& t, Var x) { return readout(t, concat({x, square(x)}, 1)); }},
      {"slice_cols", 5, 4,
       [&](Tape& t, Var x) { return sum(square(slice_cols(x, 1, 3))); }},
      {"mean", 5, 4, [&](Tape&, Var x) { return mean(square(x)); }},
      {"sum_blocks", 5, 4,
       [&](Tape& t, Var x) {
         return readout(t, repeat_cols(square(sum_blocks(x, 2)), 2));
       }},
      {"transpose", 4, 5,
       [&](Tape& t, Var x) { return readout(t, transpose(x)); }},
      {"relu", 5, 4, [&](Tape& t, Var x) { return readout(t, relu(x)); }},
      {"leaky_relu", 5, 4,
       [&](Tape& t, Var x) { return readout(t, leaky_relu(x, 0.2)); }},
      {"sigmoid", 5, 4,
       [&](Tape& t, Var x) { return readout(t, sigmoid(x)); }},
      {"log-exp", 5, 4,
       [&](Tape& t, Var x) {
         return readout(t, log(add_scalar(exp(x), 1.0)));
       }},
      {"clamp", 5, 4,
       [&](Tape& t, Var x) { return readout(t, clamp(x, -0.5, 0.5)); }},
      {"softmax1", 5, 4,
       [&](Tape& t, Var x) { return readout(t, softmax(x, 1)); }},
      {"softmax0", 5, 4,
       [&](Tape& t, Var x) { return readout(t, softmax(x, 0)); }},
      {"gather", 4, 4,
       [&](Tape& t, Var x) { return readout(t, gather_rows(x, idx)); }},
      {"scatter", 5, 4,
       [&](Tape& t, Var x) {
         return readout(t, scatter_add_rows(x, idx, 5));
       }},
      {"gather-scatter adjoint", 4, 4,
       [&](Tape& t, Var x) {
         return readout(t, square(scatter_add_rows(gather_rows(x, idx), seg,
                                                   5)));
       }},
      {"segment_softmax", 5, 4,
       [&](Tape& t, Var x) { return readout(t, segment_softmax(x, seg, 3)); }},
  };
  for (const Case& c : cases) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      Rng rng(seed * 31 + 5);
      const Tensor x = random_tensor(c.rows, c.cols, rng);
      const double err = grad_check(c.fn, x, 1e-6);
      INFO(c.name, " seed ", seed);
      CHECK(err < 1e-4);
    }
  }
}

TEST_CASE("segment softmax normalizes per segment") {
  Tape tape;
  const std::vector<std::size_t> seg{0, 1, 0, 1, 1};
  Rng rng(3);
  Var y = segment_softmax(tape.constant(random_tensor(5, 2, rng, -5, 5)), seg,
                          2);
  for (std::size_t c = 0; c < 2; ++c) {
    CHECK(y.value()(0, c) + y.value()(2, c) == doctest::Approx(1.0));
    CHECK(y.value()(1, c) + y.value()(3, c) + y.value()(4, c) ==
          doctest::Approx(1.0));
  }
}

TEST_CASE("inference tapes record no backward closures") {
  Tape tape;
  Var a = tape.constant(Tensor(2, 2, 1.0));
  Var b = relu(a);
  CHECK_FALSE(b.requires_grad());
  Var v = tape.variable(Tensor(2, 2, 1.0));
  CHECK(add(b, v).requires_grad());
}

TEST_CASE("AdamW examples") {
  SUBCASE("zero gradient without decay leaves parameters unchanged") {
    ParameterStore ps;
    ps.add("p", Tensor::from_rows({{1.5, -2.0}}));
    AdamW opt({.learning_rate = 0.1, .weight_decay = 0.0});
    std::vector<Tensor> g{Tensor(1, 2)};
    opt.step(ps, g);
    CHECK(ps[0].value == Tensor::from_rows({{1.5, -2.0}}));
  }
  SUBCASE("first step on a scalar") {
    ParameterStore ps;
    ps.add("p", Tensor::scalar(1.0));
    AdamW opt({.learning_rate = 0.1, .weight_decay = 0.0});
    std::vector<Tensor> g{Tensor::scalar(1.0)};
    opt.step(ps, g);
    CHECK(ps[0].value.item() == doctest::Approx(1.0 - 0.1 / (1.0 + 1e-8))
                                    .epsilon(1e-15));
  }
  SUBCASE("decoupled decay with zero gradient") {
    ParameterStore ps;
    ps.add("p", Tensor::scalar(2.0));
    AdamW opt({.learning_rate = 0.1, .weight_decay = 0.01});
    std::vector<Tensor> g{Tensor::scalar(0.0)};
    opt.step(ps, g);
    CHECK(ps[0].value.item() == doctest::Approx(2.0 * (1 - 0.1 * 0.01)));
  }
  SUBCASE("missing gradient") {
    ParameterStore ps;
    ps.add("p", Tensor::scalar(2.0));
    AdamW opt;
    std::vector<Tensor> none;
    CHECK_THROWS_AS(opt.step(ps, none), std::invalid_argument);
    std::vector<Tensor> empty{Tensor()};
    CHECK_THROWS_AS(opt.step(ps, empty), std::invalid_argument);
  }
}

TEST_CASE("AdamW without decay follows a reference Adam trajectory") {
  // f(p) = 0.5 * sum(c * (p - t)^2), gradient c * (p - t).
  const std::vector<double> c{1.0, 3.0, 0.5}, target{2.0, -1.0, 0.25};
  std::vector<double> ref{0.0, 0.0, 0.0}, m(3, 0.0), v(3, 0.0);
  ParameterStore ps;
  ps.add("p", Tensor(1, 3));
  AdamW opt({.learning_rate = 0.05, .weight_decay = 0.0});
  double max_dev = 0;
  for (int step = 1; step <= 100; ++step) {
    std::vector<Tensor> g{Tensor(1, 3)};
    for (std::size_t i = 0; i < 3; ++i) {
      g[0][i] = c[i] * (ps[0].value[i] - target[i]);
      const double gr = c[i] * (ref[i] - target[i]);
      m[i] = 0.9 * m[i] + 0.1 * gr;
      v[i] = 0.999 * v[i] + 0.001 * gr * gr;
      const double mh = m[i] / (1 - std::pow(0.9, step));
      const double vh = v[i] / (1 - std::pow(0.999, step));
      ref[i] -= 0.05 * mh / (std::sqrt(vh) + 1e-8);
    }
    opt.step(ps, g);
    for (std::size_t i = 0; i < 3; ++i) {
      max_dev = std::max(max_dev, std::abs(ps[0].value[i] - ref[i]));
    }
  }
  CHECK(max_dev < 1e-12);
}

}  // namespace
}  // namespace pcbgnn
