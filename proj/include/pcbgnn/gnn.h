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

// Message-passing layers over the merged bipartite edge list.
//
// Every undirected edge is used in both directions. Layers read parameters
// from a span of tape leaves (ParameterStore::bind) by index, so the same
// layer object serves any number of tapes.
//
// Conventions shared by the layer kinds:
//  * GCN and the attention kinds add one self-loop per node. For attention
//    kinds the self-loop edge feature is the mean of the node's incident
//    edge features (zero for an isolated node).
//  * Attention heads are concatenated; each head has out_dim / heads columns.
//  * Layers are affine in their output (no activation); Backbone places ReLU
//    between consecutive layers.

#ifndef PCBGNN_GNN_H_
#define PCBGNN_GNN_H_

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pcbgnn/graph.h"
#include "pcbgnn/optim.h"
#include "pcbgnn/random.h"
#include "pcbgnn/tensor.h"

namespace pcbgnn {

enum class LayerKind { kMlpOnly, kGcn, kGin, kGine, kGat, kGatv2, kGt };

// "mlp", "gcn", "gin", "gine", "gat", "gatv2", "gt".
std::string_view layer_kind_name(LayerKind kind);
// Case-insensitive; throws std::invalid_argument.
LayerKind parse_layer_kind(std::string_view name);
bool uses_edge_features(LayerKind kind);
bool is_attention(LayerKind kind);

struct LayerSpec {
  LayerKind kind = LayerKind::kGcn;
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  std::size_t heads = 1;
};

// Throws std::invalid_argument for zero dims, heads outside {1, 4} on
// attention kinds, or out_dim not divisible by heads.
void validate_layer_spec(const LayerSpec& spec);

// Index form of a graph's connectivity.
struct MessageGraph {
  std::size_t num_nodes = 0;
  std::size_t num_edges = 0;  // undirected
  // Directed edges (2 per undirected edge) sorted by (dst, src).
  std::vector<std::size_t> src;
  std::vector<std::size_t> dst;
  std::vector<std::size_t> edge;  // undirected edge of each directed edge
  std::vector<double> inv_degree;  // 1/deg, 0 for isolated nodes
  // Symmetric GCN normalization with self-loops.
  Tensor gcn_edge_norm;  // 2E x 1
  Tensor gcn_self_norm;  // N x 1
  // Directed edges followed by one self-loop per node (2E + N entries).
  std::vector<std::size_t> loop_src;
  std::vector<std::size_t> loop_dst;
};

MessageGraph make_message_graph(std::size_t num_nodes,
                                std::span<const GraphEdge> edges);
MessageGraph make_message_graph(const PcbGraph& g);

// Row-wise x W + b.
Var linear(Var x, Var w, Var b);

class GnnLayer {
 public:
  // Registers parameters named "<prefix>.<name>" in `store`.
  GnnLayer(const LayerSpec& spec, const std::string& prefix,
           ParameterStore& store, Rng& rng, std::size_t edge_dim = kFeatureDim);

  const LayerSpec& spec() const { return spec_; }

  // `h` is N x in_dim, `edge_features` E x edge_dim (ignored by edge-blind
  // kinds). When `attention` is set, attention kinds store their weights
  // ((2E + N) x heads, rows in MessageGraph::loop_* order).
  Var forward(std::span<const Var> params, const MessageGraph& g, Var h,
              Var edge_features, Var* attention = nullptr) const;

 private:
  Var p(std::span<const Var> params, const char* name) const;

  LayerSpec spec_;
  std::map<std::string, std::size_t, std::less<>> ids_;
};

// Affine layers with ReLU between them (none after the last).
class Mlp {
 public:
  Mlp(std::vector<std::size_t> dims, const std::string& prefix,
      ParameterStore& store, Rng& rng);
  Var forward(std::span<const Var> params, Var x) const;
  const std::vector<std::size_t>& dims() const { return dims_; }
  // Parameter ids of layer i's weight and bias.
  std::size_t weight_id(std::size_t i) const { return ids_[2 * i]; }
  std::size_t bias_id(std::size_t i) const { return ids_[2 * i + 1]; }

 private:
  std::vector<std::size_t> dims_;
  std::vector<std::size_t> ids_;
};

// `num_layers` layers of one kind: input -> hidden -> ... -> hidden.
class Backbone {
 public:
  Backbone(LayerKind kind, std::size_t num_layers, std::size_t input_dim,
           std::size_t hidden, std::size_t heads, ParameterStore& store,
           Rng& rng);
  Var forward(std::span<const Var> params, const MessageGraph& g, Var x,
              Var edge_features) const;
  std::size_t out_dim() const { return hidden_; }
  const std::vector<GnnLayer>& layers() const { return layers_; }

 private:
  std::size_t hidden_;
  std::vector<GnnLayer> layers_;
};

}  // namespace pcbgnn

#endif  // PCBGNN_GNN_H_
