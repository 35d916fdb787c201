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

#ifndef PCBGNN_OPTIM_H_
#define PCBGNN_OPTIM_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pcbgnn/random.h"
#include "pcbgnn/tensor.h"

namespace pcbgnn {

struct Parameter {
  std::string name;
  Tensor value;
};

// Ordered, named parameter set. Models own one; each forward pass binds it
// onto a fresh Tape so that several tapes never share gradient buffers.
class ParameterStore {
 public:
  std::size_t add(std::string name, Tensor init);

  std::size_t size() const { return params_.size(); }
  Parameter& operator[](std::size_t i) { return params_[i]; }
  const Parameter& operator[](std::size_t i) const { return params_[i]; }
  std::optional<std::size_t> find(const std::string& name) const;
  std::size_t num_values() const;

  // One tape leaf per parameter; `trainable` makes them gradient variables.
  std::vector<Var> bind(Tape& tape, bool trainable) const;
  // Gradients of the bound leaves (zeros where nothing flowed).
  std::vector<Tensor> gradients(std::span<const Var> bound) const;

  std::vector<Tensor> snapshot() const;
  void restore(std::span<const Tensor> values);

 private:
  std::vector<Parameter> params_;
};

Tensor glorot_uniform(std::size_t fan_in, std::size_t fan_out, Rng& rng);

struct AdamWOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.01;
};

// Adam with decoupled weight decay: parameters shrink by (1 - lr * wd) before
// the bias-corrected moment update, independently of the gradient.
class AdamW {
 public:
  explicit AdamW(AdamWOptions options = {});

  void step(ParameterStore& params, std::span<const Tensor> grads);

  const AdamWOptions& options() const { return options_; }
  std::int64_t steps() const { return step_; }
  const std::vector<Tensor>& first_moments() const { return m_; }
  const std::vector<Tensor>& second_moments() const { return v_; }
  void set_state(std::int64_t step, std::vector<Tensor> m,
                 std::vector<Tensor> v);

 private:
  AdamWOptions options_;
  std::int64_t step_ = 0;
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
};

}  // namespace pcbgnn

#endif  // PCBGNN_OPTIM_H_
