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

#include "pcbgnn/pair_model.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace pcbgnn {
namespace {

constexpr double kProbFloor = 1e-12;
// Initial positive rates of the prefilter and the pair head.
constexpr double kNodePrior = 0.05;
constexpr double kPairPrior = 0.01;

double logit(double p) { return std::log(p / (1.0 - p)); }

bool on_theta_grid(double theta) {
  for (int i = 0; i <= 7; ++i) {
    if (std::abs(theta - 0.1 * i) < 1e-9) return true;
  }
  return false;
}

// Mean binary cross-entropy of probabilities `p` (R x 1) against `y`.
Var bce(Var p, const std::vector<double>& y) {
  Tape& tape = *p.tape;
  Tensor yt(y.size(), 1, std::vector<double>(y));
  Tensor one_minus(y.size(), 1);
  for (std::size_t i = 0; i < y.size(); ++i) one_minus[i] = 1.0 - y[i];
  Var pc = clamp(p, kProbFloor, 1.0 - kProbFloor);
  Var ll = add(multiply(log(pc), tape.constant(std::move(yt))),
               multiply(log(add_scalar(negate(pc), 1.0)),
                        tape.constant(std::move(one_minus))));
  return negate(mean(ll));
}

}  // namespace

void validate_model_spec(const ModelSpec& spec) {
  const bool mlp = spec.backbone == LayerKind::kMlpOnly;
  if (spec.num_layers > 3) {
    throw std::invalid_argument("num_layers must be at most 3");
  }
  if (mlp != (spec.num_layers == 0)) {
    throw std::invalid_argument(
        "num_layers must be 0 exactly for the mlp backbone");
  }
  if (spec.hidden_dim == 0) throw std::invalid_argument("hidden_dim must be > 0");
  if (is_attention(spec.backbone)) {
    validate_layer_spec({spec.backbone, spec.hidden_dim, spec.hidden_dim,
                         spec.heads});
  }
  if (!(spec.theta >= 0.0 && spec.theta < 1.0)) {
    throw std::invalid_argument("theta must lie in [0, 1)");
  }
  if (spec.task == Task::kDecouplingCaps) {
    if (!spec.alpha) {
      throw std::invalid_argument("decoupling_caps needs alpha");
    }
    if (!(*spec.alpha >= 0.0) || !std::isfinite(*spec.alpha)) {
      throw std::invalid_argument("alpha must be finite and >= 0");
    }
  } else if (spec.alpha) {
    throw std::invalid_argument("alpha only applies to decoupling_caps");
  }
}

bool on_search_grid(const ModelSpec& spec) {
  const bool mlp = spec.backbone == LayerKind::kMlpOnly;
  const std::size_t h = spec.hidden_dim;
  return (h == 16 || h == 32 || h == 64) &&
         (mlp ? spec.num_layers == 0
              : spec.num_layers >= 1 && spec.num_layers <= 3) &&
         (!is_attention(spec.backbone) || spec.heads == 1 || spec.heads == 4) &&
         on_theta_grid(spec.theta);
}

ModelSpec preset(Task task, LayerKind backbone) {
  // Columns: mlp, gcn, gin, gine, gat, gatv2, gt.
  struct Row {
    std::size_t layers[7];
    std::size_t heads[7];
    double theta[7];
  };
  static const Row kPull{{0, 3, 3, 3, 3, 3, 3},
                         {1, 1, 1, 1, 4, 4, 4},
                         {0.0, 0.0, 0.0, 0.2, 0.1, 0.1, 0.7}};
  static const Row kRc{{0, 3, 3, 2, 1, 1, 3},
                       {1, 1, 1, 1, 4, 4, 1},
                       {0.0, 0.1, 0.1, 0.1, 0.2, 0.1, 0.1}};
  static const Row kDecoupling{{0, 2, 2, 1, 1, 1, 3},
                               {1, 1, 1, 1, 4, 4, 4},
                               {0.1, 0.2, 0.1, 0.3, 0.5, 0.4, 0.1}};
  const Row& row = task == Task::kPullUpDown ? kPull
                   : task == Task::kRcFilter ? kRc
                                             : kDecoupling;
  const auto i = static_cast<std::size_t>(backbone);
  ModelSpec spec;
  spec.backbone = backbone;
  spec.num_layers = row.layers[i];
  spec.hidden_dim = 64;
  spec.heads = row.heads[i];
  spec.theta = row.theta[i];
  spec.task = task;
  if (task == Task::kDecouplingCaps) spec.alpha = 0.1;
  return spec;
}

Sample make_sample(PcbGraph graph) {
  Sample s;
  s.messages = make_message_graph(graph);
  s.graph = std::move(graph);
  return s;
}

std::vector<std::size_t> select_candidates(std::span<const double> probs,
                                           double theta) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] > theta) out.push_back(i);
  }
  return out;
}

void ordered_pairs(std::span<const std::size_t> candidates,
                   std::vector<std::size_t>& first,
                   std::vector<std::size_t>& second) {
  first.clear();
  second.clear();
  const std::size_t k = candidates.size();
  if (k < 2) return;
  first.reserve(k * (k - 1));
  second.reserve(k * (k - 1));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      first.push_back(candidates[i]);
      second.push_back(candidates[j]);
      first.push_back(candidates[j]);
      second.push_back(candidates[i]);
    }
  }
}

Var compose_loss(Task task, Var node_probs, std::span<const int> y_node,
                 const PairForward& f, std::span<const std::int64_t> pair_labels,
                 std::optional<double> alpha, LossParts* parts) {
  if (task == Task::kDecouplingCaps && !alpha) {
    throw std::invalid_argument("compose_loss: decoupling_caps needs alpha");
  }
  if (node_probs.rows() != y_node.size()) {
    throw std::invalid_argument("compose_loss: node label count mismatch");
  }
  if (pair_labels.size() != f.num_pairs()) {
    throw std::invalid_argument("compose_loss: pair label count mismatch");
  }
  Tape& tape = *node_probs.tape;
  Var node_term = bce(node_probs, std::vector<double>(y_node.begin(),
                                                      y_node.end()));
  Var total = node_term;
  double task_value = 0.0;
  const std::size_t p = f.num_pairs();
  if (p > 0) {
    Var task_term;
    switch (task) {
      case Task::kPullUpDown: {
        std::vector<double> y(p);
        for (std::size_t i = 0; i < p; ++i) y[i] = pair_labels[i] != 0;
        task_term = bce(f.primary, y);
        break;
      }
      case Task::kRcFilter: {
        Tensor onehot(p, kNumRcClasses);
        for (std::size_t i = 0; i < p; ++i) {
          onehot(i, static_cast<std::size_t>(pair_labels[i])) = 1.0;
        }
        Var picked = sum_blocks(
            multiply(log(clamp(f.primary, kProbFloor, 1.0)),
                     tape.constant(std::move(onehot))),
            1);
        task_term = negate(mean(picked));
        break;
      }
      case Task::kDecouplingCaps: {
        std::vector<double> z(p);
        Tensor y(p, 1);
        for (std::size_t i = 0; i < p; ++i) {
          z[i] = pair_labels[i] >= 1;
          y[i] = static_cast<double>(pair_labels[i]);
        }
        task_term = bce(f.primary, z);
        if (*alpha != 0.0) {
          Var mse = mean(square(subtract(f.count, tape.constant(std::move(y)))));
          task_term = add(task_term, scale(mse, *alpha));
        }
        break;
      }
    }
    task_value = task_term.value().item();
    total = add(total, task_term);
  }
  if (parts) {
    parts->node = node_term.value().item();
    parts->task = task_value;
  }
  return total;
}

std::size_t prediction_channels(Task task) {
  switch (task) {
    case Task::kPullUpDown:
      return 1;
    case Task::kRcFilter:
      return kNumRcClasses;
    case Task::kDecouplingCaps:
      return 2;
  }
  return 1;
}

std::vector<double> filtered_default(Task task) {
  switch (task) {
    case Task::kPullUpDown:
      return {0.0};
    case Task::kRcFilter:
      return {1.0, 0.0, 0.0};
    case Task::kDecouplingCaps:
      return {0.0, 0.0};
  }
  return {0.0};
}

double PairPrediction::positive_score(std::size_t a, std::size_t b) const {
  return task == Task::kRcFilter ? 1.0 - score(a, b, 0) : score(a, b, 0);
}

PairModel::PairModel(const ModelSpec& spec, std::uint64_t seed) : spec_(spec) {
  validate_model_spec(spec_);
  Rng rng(seed);
  const std::size_t h = spec_.hidden_dim;
  if (spec_.num_layers > 0) {
    backbone_.emplace(spec_.backbone, spec_.num_layers, kFeatureDim, h,
                      spec_.heads, params_, rng);
  }
  const std::size_t d = representation_dim();
  prefilter_.emplace(std::vector<std::size_t>{d, h, h, 1}, "prefilter",
                     params_, rng);
  const std::size_t out = spec_.task == Task::kRcFilter ? kNumRcClasses : 1;
  const char* head_name =
      spec_.task == Task::kDecouplingCaps ? "head_z" : "head";
  head_.emplace(std::vector<std::size_t>{2 * d, h, h, out}, head_name, params_,
                rng);
  if (spec_.task == Task::kDecouplingCaps) {
    count_head_.emplace(std::vector<std::size_t>{2 * d, h, h, 1}, "head_count",
                        params_, rng);
  }
  // Output biases start at the log-odds of rare positives, so the first steps
  // are not spent pushing every score down and the initial candidate sets
  // stay small.
  params_[prefilter_->bias_id(2)].value(0, 0) = logit(kNodePrior);
  Tensor& head_bias = params_[head_->bias_id(2)].value;
  if (spec_.task == Task::kRcFilter) {
    head_bias(0, 0) = std::log(1.0 - 2.0 * kPairPrior);
    head_bias(0, 1) = std::log(kPairPrior);
    head_bias(0, 2) = std::log(kPairPrior);
  } else {
    head_bias(0, 0) = logit(kPairPrior);
  }
}

void PairModel::set_theta(double theta) {
  ModelSpec s = spec_;
  s.theta = theta;
  validate_model_spec(s);
  spec_ = s;
}

std::size_t PairModel::representation_dim() const {
  return backbone_ ? spec_.hidden_dim : kFeatureDim;
}

Var PairModel::represent(std::span<const Var> params, const Sample& s) const {
  if (params.size() != params_.size()) {
    throw std::invalid_argument("PairModel: wrong number of bound parameters");
  }
  Tape& tape = *params.front().tape;
  Var x = tape.constant(s.graph.node_features);
  if (!backbone_) return x;
  return backbone_->forward(params, s.messages, x,
                            tape.constant(s.graph.edge_features));
}

Var PairModel::head_forward(std::span<const Var> params, const Mlp& mlp,
                            Var h, std::span<const std::size_t> first,
                            std::span<const std::size_t> second) const {
  // First layer on [h_a, h_b] split as h_a W_top + h_b W_bottom.
  const std::size_t d = h.cols();
  Var w = params[mlp.weight_id(0)];
  Var top = matmul(h, slice_rows(w, 0, d));
  Var bottom = matmul(h, slice_rows(w, d, 2 * d));
  Var x = add(add(gather_rows(top, first), gather_rows(bottom, second)),
              params[mlp.bias_id(0)]);
  const std::size_t layers = mlp.dims().size() - 1;
  for (std::size_t i = 1; i < layers; ++i) {
    x = linear(relu(x), params[mlp.weight_id(i)], params[mlp.bias_id(i)]);
  }
  return x;
}

std::pair<Var, Var> PairModel::pair_outputs(
    std::span<const Var> params, Var h, std::span<const std::size_t> first,
    std::span<const std::size_t> second) const {
  Var logits = head_forward(params, *head_, h, first, second);
  Var primary = spec_.task == Task::kRcFilter ? softmax(logits, 1)
                                              : sigmoid(logits);
  Var count;
  if (count_head_) count = head_forward(params, *count_head_, h, first, second);
  return {primary, count};
}

PairForward PairModel::forward(std::span<const Var> params,
                               const Sample& s) const {
  PairForward f;
  const std::size_t nets = s.graph.num_nets;
  if (nets == 0) throw std::invalid_argument("graph has no net nodes");
  Var h = slice_rows(represent(params, s), 0, nets);
  f.node_probs = sigmoid(prefilter_->forward(params, h));
  f.candidates = select_candidates(f.node_probs.value().values(), spec_.theta);
  ordered_pairs(f.candidates, f.first, f.second);
  if (!f.first.empty()) {
    std::tie(f.primary, f.count) = pair_outputs(params, h, f.first, f.second);
  }
  return f;
}

namespace {

Var labeled_loss(const ModelSpec& spec, const PcbGraph& g, const PairForward& f,
                 LossParts* parts) {
  if (!g.task || *g.task != spec.task) {
    throw std::invalid_argument("graph \"" + g.name +
                                "\" is not labeled for task " +
                                std::string(task_name(spec.task)));
  }
  std::vector<std::int64_t> labels(f.num_pairs());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    labels[i] = g.pair_label(f.first[i], f.second[i]);
  }
  return compose_loss(spec.task, f.node_probs, g.y_node, f, labels, spec.alpha,
                      parts);
}

}  // namespace

Var PairModel::loss(std::span<const Var> params, const Sample& s,
                    LossParts* parts) const {
  return labeled_loss(spec_, s.graph, forward(params, s), parts);
}

PairPrediction PairModel::predict(const Sample& s, double* loss) const {
  Tape tape;
  std::vector<Var> params = params_.bind(tape, false);
  PairForward f = forward(params, s);
  if (loss) *loss = labeled_loss(spec_, s.graph, f, nullptr).value().item();
  PairPrediction p;
  p.task = spec_.task;
  p.num_nets = s.graph.num_nets;
  p.channels = prediction_channels(spec_.task);
  p.node_probs = f.node_probs.value().values();
  p.is_candidate.assign(p.num_nets, false);
  for (std::size_t c : f.candidates) p.is_candidate[c] = true;
  const std::vector<double> fill = filtered_default(spec_.task);
  const std::size_t n = p.num_nets, ch = p.channels;
  p.scores.resize(n * n * ch);
  for (std::size_t i = 0; i < n * n; ++i) {
    std::copy(fill.begin(), fill.end(), p.scores.begin() + i * ch);
  }
  p.raw = p.scores;
  auto out = [&](std::size_t row, std::size_t c) {
    if (spec_.task == Task::kDecouplingCaps) {
      return c == 0 ? f.primary.value()(row, 0) : f.count.value()(row, 0);
    }
    return f.primary.value()(row, c);
  };
  // Ordered pairs come in (a, b), (b, a) couples.
  for (std::size_t r = 0; r < f.num_pairs(); r += 2) {
    const std::size_t a = f.first[r], b = f.second[r];
    for (std::size_t c = 0; c < ch; ++c) {
      const double ab = out(r, c), ba = out(r + 1, c);
      p.raw[(a * n + b) * ch + c] = ab;
      p.raw[(b * n + a) * ch + c] = ba;
      const double avg = 0.5 * (ab + ba);
      p.scores[(a * n + b) * ch + c] = avg;
      p.scores[(b * n + a) * ch + c] = avg;
    }
  }
  return p;
}

}  // namespace pcbgnn
