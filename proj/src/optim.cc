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

#include "pcbgnn/optim.h"

#include <cmath>
#include <stdexcept>

namespace pcbgnn {

std::size_t ParameterStore::add(std::string name, Tensor init) {
  if (find(name)) throw std::invalid_argument("duplicate parameter " + name);
  params_.push_back(Parameter{std::move(name), std::move(init)});
  return params_.size() - 1;
}

std::optional<std::size_t> ParameterStore::find(const std::string& name) const {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (params_[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t ParameterStore::num_values() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

std::vector<Var> ParameterStore::bind(Tape& tape, bool trainable) const {
  std::vector<Var> vars;
  vars.reserve(params_.size());
  for (const auto& p : params_) {
    vars.push_back(trainable ? tape.variable(p.value) : tape.constant(p.value));
  }
  return vars;
}

std::vector<Tensor> ParameterStore::gradients(std::span<const Var> bound) const {
  if (bound.size() != params_.size()) {
    throw std::invalid_argument("gradients: binding does not match store");
  }
  std::vector<Tensor> grads;
  grads.reserve(params_.size());
  for (std::size_t i = 0; i < params_.size(); ++i) {
    const Tensor& g = bound[i].grad();
    grads.push_back(g.empty() ? Tensor(params_[i].value.rows(),
                                       params_[i].value.cols())
                              : g);
  }
  return grads;
}

std::vector<Tensor> ParameterStore::snapshot() const {
  std::vector<Tensor> out;
  out.reserve(params_.size());
  for (const auto& p : params_) out.push_back(p.value);
  return out;
}

void ParameterStore::restore(std::span<const Tensor> values) {
  if (values.size() != params_.size()) {
    throw std::invalid_argument("restore: parameter count mismatch");
  }
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (!values[i].same_shape(params_[i].value)) {
      throw std::invalid_argument("restore: shape mismatch for " +
                                  params_[i].name);
    }
    params_[i].value = values[i];
  }
}

Tensor glorot_uniform(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit =
      std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Tensor t(fan_in, fan_out);
  for (double& v : t.values()) v = rng.uniform(-limit, limit);
  return t;
}

AdamW::AdamW(AdamWOptions options) : options_(options) {
  if (!(options_.learning_rate > 0.0) ||
      !std::isfinite(options_.learning_rate)) {
    throw std::invalid_argument("AdamW: learning rate must be positive");
  }
  if (options_.weight_decay < 0.0) {
    throw std::invalid_argument("AdamW: negative weight decay");
  }
}

void AdamW::step(ParameterStore& params, std::span<const Tensor> grads) {
  if (grads.size() != params.size()) {
    throw std::invalid_argument("AdamW: missing gradients (" +
                                std::to_string(grads.size()) + " for " +
                                std::to_string(params.size()) + " params)");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (grads[i].empty() != params[i].value.empty() ||
        !grads[i].same_shape(params[i].value)) {
      throw std::invalid_argument("AdamW: missing gradient for " +
                                  params[i].name);
    }
  }
  if (m_.empty()) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_.emplace_back(params[i].value.rows(), params[i].value.cols());
      v_.emplace_back(params[i].value.rows(), params[i].value.cols());
    }
  }
  ++step_;
  const AdamWOptions& o = options_;
  const double t = static_cast<double>(step_);
  const double bc1 = 1.0 - std::pow(o.beta1, t);
  const double bc2 = 1.0 - std::pow(o.beta2, t);
  const double decay = 1.0 - o.learning_rate * o.weight_decay;
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& p = params[i].value;
    const Tensor& g = grads[i];
    Tensor& m = m_[i];
    Tensor& v = v_[i];
    for (std::size_t k = 0; k < p.size(); ++k) {
      p[k] *= decay;
      m[k] = o.beta1 * m[k] + (1.0 - o.beta1) * g[k];
      v[k] = o.beta2 * v[k] + (1.0 - o.beta2) * g[k] * g[k];
      const double m_hat = m[k] / bc1;
      const double v_hat = v[k] / bc2;
      p[k] -= o.learning_rate * m_hat / (std::sqrt(v_hat) + o.epsilon);
    }
  }
}

void AdamW::set_state(std::int64_t step, std::vector<Tensor> m,
                      std::vector<Tensor> v) {
  if (step < 0 || m.size() != v.size()) {
    throw std::invalid_argument("AdamW: inconsistent state");
  }
  step_ = step;
  m_ = std::move(m);
  v_ = std::move(v);
}

}  // namespace pcbgnn
