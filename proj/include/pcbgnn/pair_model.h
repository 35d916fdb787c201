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

// Node-pair predictor: GNN backbone, per-net pre-filter with threshold theta,
// and a task head applied to both concatenation orders of every pair of
// surviving nets.
//
// Head shapes (pre-filter and pair heads alike): two hidden layers of
// hidden_dim with ReLU, then the output layer. Outputs per ordered pair:
//   pull_up_down     sigmoid probability
//   rc_filter        softmax over {none, resistor, capacitor}
//   decoupling_caps  sigmoid probability z (own MLP) and a raw count (own MLP)

#ifndef PCBGNN_PAIR_MODEL_H_
#define PCBGNN_PAIR_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pcbgnn/gnn.h"
#include "pcbgnn/graph.h"
#include "pcbgnn/optim.h"
#include "pcbgnn/task.h"
#include "pcbgnn/tensor.h"

namespace pcbgnn {

struct ModelSpec {
  LayerKind backbone = LayerKind::kGatv2;
  std::size_t num_layers = 3;
  std::size_t hidden_dim = 64;
  std::size_t heads = 4;  // attention kinds only
  double theta = 0.1;
  Task task = Task::kPullUpDown;
  std::optional<double> alpha;  // decoupling_caps only
  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

// Structural checks: num_layers in [0, 3] and 0 exactly for the MLP-only
// backbone, positive hidden_dim, heads 1 or 4 dividing hidden_dim for
// attention kinds, theta in [0, 1), alpha >= 0 and present exactly for
// decoupling_caps. Throws std::invalid_argument.
void validate_model_spec(const ModelSpec& spec);

// True when every field lies on the hyperparameter grid (hidden 16/32/64,
// 1-3 layers, heads 1/4, theta 0.0..0.7 in steps of 0.1).
bool on_search_grid(const ModelSpec& spec);

// Best published configuration of `backbone` for `task` (decoupling presets
// get alpha 0.1).
ModelSpec preset(Task task, LayerKind backbone);

// Graph plus its message-passing index, built once per graph.
struct Sample {
  PcbGraph graph;
  MessageGraph messages;
};
Sample make_sample(PcbGraph graph);

// Net-node indices whose probability exceeds theta.
std::vector<std::size_t> select_candidates(std::span<const double> probs,
                                           double theta);

// Both orders of every unordered pair of `candidates`: for i < j the pairs
// (c_i, c_j) and (c_j, c_i), in that order.
void ordered_pairs(std::span<const std::size_t> candidates,
                   std::vector<std::size_t>& first,
                   std::vector<std::size_t>& second);

struct PairForward {
  Var node_probs;  // num_nets x 1
  std::vector<std::size_t> candidates;
  std::vector<std::size_t> first;   // ordered pairs, net-node indices
  std::vector<std::size_t> second;
  Var primary;  // P x 1 probability or P x 3 distribution; unset when P == 0
  Var count;    // P x 1, decoupling_caps only
  std::size_t num_pairs() const { return first.size(); }
};

struct LossParts {
  double node = 0;  // BCE over all net nodes
  double task = 0;  // pair term, 0 without surviving pairs
};

// Composite loss: mean node BCE plus the mean task loss over the
// ordered pairs. `pair_labels` holds one raw label per ordered pair.
Var compose_loss(Task task, Var node_probs, std::span<const int> y_node,
                 const PairForward& f, std::span<const std::int64_t> pair_labels,
                 std::optional<double> alpha, LossParts* parts = nullptr);

// Scores for every unordered net pair.
struct PairPrediction {
  Task task = Task::kPullUpDown;
  std::size_t num_nets = 0;
  std::size_t channels = 1;  // 1, 3 or 2 (z, count)
  std::vector<double> node_probs;
  std::vector<bool> is_candidate;
  // num_nets x num_nets x channels, symmetric; order-averaged head outputs
  // on candidate pairs, the filtered default elsewhere (and on the diagonal).
  std::vector<double> scores;
  // Per-order head outputs, raw(a, b) for the pair representation [h_a, h_b];
  // filtered default outside candidate pairs.
  std::vector<double> raw;

  double score(std::size_t a, std::size_t b, std::size_t c = 0) const {
    return scores[(a * num_nets + b) * channels + c];
  }
  double raw_score(std::size_t a, std::size_t b, std::size_t c = 0) const {
    return raw[(a * num_nets + b) * channels + c];
  }
  bool evaluated(std::size_t a, std::size_t b) const {
    return a != b && is_candidate[a] && is_candidate[b];
  }
  // Ranking score of a pair: the probability for pull_up_down and z for
  // decoupling_caps, 1 - P(none) for rc_filter.
  double positive_score(std::size_t a, std::size_t b) const;
};

std::size_t prediction_channels(Task task);
// Output given to pairs the pre-filter removed.
std::vector<double> filtered_default(Task task);

class PairModel {
 public:
  PairModel(const ModelSpec& spec, std::uint64_t seed);

  const ModelSpec& spec() const { return spec_; }
  void set_theta(double theta);
  ParameterStore& parameters() { return params_; }
  const ParameterStore& parameters() const { return params_; }
  std::size_t representation_dim() const;

  // Final node representations (N x d).
  Var represent(std::span<const Var> params, const Sample& s) const;
  PairForward forward(std::span<const Var> params, const Sample& s) const;
  Var loss(std::span<const Var> params, const Sample& s,
           LossParts* parts = nullptr) const;
  // When `loss` is set the composite loss of the same forward pass is
  // stored there (the graph must be labeled for the model's task).
  PairPrediction predict(const Sample& s, double* loss = nullptr) const;

  // Head evaluated on explicit ordered pairs of rows of `h` (testing aid and
  // building block of forward()). Returns {primary, count}.
  std::pair<Var, Var> pair_outputs(std::span<const Var> params, Var h,
                                   std::span<const std::size_t> first,
                                   std::span<const std::size_t> second) const;
  const Mlp& prefilter() const { return *prefilter_; }
  const Mlp& head() const { return *head_; }

 private:
  Var head_forward(std::span<const Var> params, const Mlp& mlp, Var h,
                   std::span<const std::size_t> first,
                   std::span<const std::size_t> second) const;

  ModelSpec spec_;
  ParameterStore params_;
  std::optional<Backbone> backbone_;
  std::optional<Mlp> prefilter_;
  std::optional<Mlp> head_;
  std::optional<Mlp> count_head_;
};

}  // namespace pcbgnn

#endif  // PCBGNN_PAIR_MODEL_H_
