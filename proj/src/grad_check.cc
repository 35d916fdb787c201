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

#include "pcbgnn/grad_check.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "pcbgnn/random.h"

namespace pcbgnn {
namespace {

double evaluate(const ScalarFn& f, const Tensor& x) {
  Tape tape;
  return f(tape, tape.constant(x)).value().item();
}

}  // namespace

double grad_check(const ScalarFn& f, const Tensor& x,
                  const GradCheckOptions& options) {
  Tape tape;
  Var xv = tape.variable(x);
  Var y = f(tape, xv);
  tape.backward(y);
  Tensor analytic = xv.grad();
  if (analytic.empty()) analytic = Tensor(x.rows(), x.cols());

  std::vector<std::size_t> coords(x.size());
  std::iota(coords.begin(), coords.end(), 0);
  if (options.max_coords > 0 && options.max_coords < coords.size()) {
    Rng rng(options.seed);
    rng.shuffle(coords);
    coords.resize(options.max_coords);
    std::sort(coords.begin(), coords.end());
  }

  double worst = 0.0;
  Tensor probe = x;
  for (std::size_t i : coords) {
    const double orig = probe[i];
    // Steps are measured after rounding so the divisor matches the probe.
    probe[i] = orig + options.epsilon;
    const double step_up = probe[i] - orig;
    const double up = evaluate(f, probe);
    probe[i] = orig - options.epsilon;
    const double step_down = orig - probe[i];
    const double down = evaluate(f, probe);
    probe[i] = orig;
    const double numeric = (up - down) / (step_up + step_down);
    const double err =
        std::abs(analytic[i] - numeric) / std::max(1.0, std::abs(analytic[i]));
    worst = std::max(worst, err);
  }
  return worst;
}

double grad_check(const ScalarFn& f, const Tensor& x, double epsilon) {
  GradCheckOptions options;
  options.epsilon = epsilon;
  return grad_check(f, x, options);
}

}  // namespace pcbgnn
