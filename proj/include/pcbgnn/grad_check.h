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

#ifndef PCBGNN_GRAD_CHECK_H_
#define PCBGNN_GRAD_CHECK_H_

#include <cstddef>
#include <cstdint>
#include <functional>

#include "pcbgnn/tensor.h"

namespace pcbgnn {

// Builds a scalar from `x` on the given tape.
using ScalarFn = std::function<Var(Tape&, Var x)>;

struct GradCheckOptions {
  double epsilon = 1e-6;
  // When non-zero, only this many coordinates (chosen with `seed`) are
  // compared; useful for large inputs.
  std::size_t max_coords = 0;
  std::uint64_t seed = 0;
};

// Max over coordinates of |analytic - central difference| / max(1, |analytic|).
double grad_check(const ScalarFn& f, const Tensor& x,
                  const GradCheckOptions& options = {});
double grad_check(const ScalarFn& f, const Tensor& x, double epsilon);

}  // namespace pcbgnn

#endif  // PCBGNN_GRAD_CHECK_H_
