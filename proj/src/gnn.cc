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

#include "pcbgnn/gnn.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace pcbgnn {
namespace {

constexpr LayerKind kAllKinds[] = {LayerKind::kMlpOnly, LayerKind::kGcn,
                                   LayerKind::kGin,     LayerKind::kGine,
                                   LayerKind::kGat,     LayerKind::kGatv2,
                                   LayerKind::kGt};

Tensor zeros_row(std::size_t n) { return Tensor(1, n); }

// Mean over each node's incident edges of `per_edge` (E x C); zero rows for
// isolated nodes.
Var mean_incident(const MessageGraph& g, Var per_edge) {
  Tape& tape = *per_edge.tape;
  Var sums = scatter_add_rows(gather_rows(per_edge, g.edge), g.dst,
                              g.num_nodes);
  Tensor inv(g.num_nodes, 1);
  for (std::size_t i = 0; i < g.num_nodes; ++i) inv(i, 0) = g.inv_degree[i];
  return multiply(sums, tape.constant(std::move(inv)));
}

// Per-edge rows for the directed edges followed by self-loops.
Var with_loops(const MessageGraph& g, Var per_edge) {
  return concat({gather_rows(per_edge, g.edge), mean_incident(g, per_edge)}, 0);
}

// Row-wise dot products within each of `heads` column blocks.
Var head_dot(Var a, Var b, std::size_t heads) {
  return sum_blocks(multiply(a, b), heads);
}

}  // namespace

std::string_view layer_kind_name(LayerKind kind) {
  switch (kind) {
    case LayerKind::kMlpOnly:
      return "mlp";
    case LayerKind::kGcn:
      return "gcn";
    case LayerKind::kGin:
      return "gin";
    case LayerKind::kGine:
      return "gine";
    case LayerKind::kGat:
      return "gat";
    case LayerKind::kGatv2:
      return "gatv2";
    case LayerKind::kGt:
      return "gt";
  }
  return "?";
}

LayerKind parse_layer_kind(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  for (LayerKind k : kAllKinds) {
    if (layer_kind_name(k) == lower) return k;
  }
  throw std::invalid_argument("unknown layer kind \"" + std::string(name) +
                              "\"");
}

bool uses_edge_features(LayerKind kind) {
  return kind == LayerKind::kGine || is_attention(kind);
}

bool is_attention(LayerKind kind) {
  return kind == LayerKind::kGat || kind == LayerKind::kGatv2 ||
         kind == LayerKind::kGt;
}

void validate_layer_spec(const LayerSpec& spec) {
  if (spec.in_dim == 0 || spec.out_dim == 0) {
    throw std::invalid_argument("layer dims must be positive");
  }
  if (is_attention(spec.kind)) {
    if (spec.heads != 1 && spec.heads != 4) {
      throw std::invalid_argument("attention heads must be 1 or 4, got " +
                                  std::to_string(spec.heads));
    }
    if (spec.out_dim % spec.heads != 0) {
      throw std::invalid_argument("out_dim " + std::to_string(spec.out_dim) +
                                  " is not divisible by " +
                                  std::to_string(spec.heads) + " heads");
    }
  }
}

MessageGraph make_message_graph(std::size_t num_nodes,
                                std::span<const GraphEdge> edges) {
  MessageGraph g;
  g.num_nodes = num_nodes;
  g.num_edges = edges.size();
  struct Directed {
    std::size_t dst, src, edge;
  };
  std::vector<Directed> dir;
  dir.reserve(2 * edges.size());
  std::vector<std::size_t> degree(num_nodes, 0);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto [u, v] = std::pair{edges[e].net, edges[e].symbol};
    if (u >= num_nodes || v >= num_nodes || u == v) {
      throw std::invalid_argument("edge " + std::to_string(e) +
                                  " has invalid endpoints");
    }
    dir.push_back({v, u, e});
    dir.push_back({u, v, e});
    ++degree[u];
    ++degree[v];
  }
  std::sort(dir.begin(), dir.end(), [](const Directed& a, const Directed& b) {
    return a.dst != b.dst ? a.dst < b.dst : a.src < b.src;
  });
  g.gcn_edge_norm = Tensor(dir.size(), 1);
  for (std::size_t i = 0; i < dir.size(); ++i) {
    g.src.push_back(dir[i].src);
    g.dst.push_back(dir[i].dst);
    g.edge.push_back(dir[i].edge);
    g.gcn_edge_norm(i, 0) =
        1.0 / std::sqrt(static_cast<double>((degree[dir[i].src] + 1) *
                                            (degree[dir[i].dst] + 1)));
  }
  g.gcn_self_norm = Tensor(num_nodes, 1);
  g.inv_degree.resize(num_nodes);
  for (std::size_t i = 0; i < num_nodes; ++i) {
    g.gcn_self_norm(i, 0) = 1.0 / static_cast<double>(degree[i] + 1);
    g.inv_degree[i] = degree[i] ? 1.0 / static_cast<double>(degree[i]) : 0.0;
  }
  g.loop_src = g.src;
  g.loop_dst = g.dst;
  for (std::size_t i = 0; i < num_nodes; ++i) {
    g.loop_src.push_back(i);
    g.loop_dst.push_back(i);
  }
  return g;
}

MessageGraph make_message_graph(const PcbGraph& g) {
  return make_message_graph(g.num_nodes(), g.edges);
}

Var linear(Var x, Var w, Var b) { return add(matmul(x, w), b); }

GnnLayer::GnnLayer(const LayerSpec& spec, const std::string& prefix,
                   ParameterStore& store, Rng& rng, std::size_t edge_dim)
    : spec_(spec) {
  validate_layer_spec(spec);
  const std::size_t in = spec.in_dim, out = spec.out_dim;
  auto add = [&](const char* name, Tensor init) {
    ids_[name] = store.add(prefix + "." + name, std::move(init));
  };
  auto weight = [&](const char* name, std::size_t rows, std::size_t cols) {
    add(name, glorot_uniform(rows, cols, rng));
  };
  switch (spec.kind) {
    case LayerKind::kMlpOnly:
    case LayerKind::kGcn:
      weight("W", in, out);
      add("b", zeros_row(out));
      break;
    case LayerKind::kGine:
      weight("W_edge", edge_dim, in);
      add("b_edge", zeros_row(in));
      [[fallthrough]];
    case LayerKind::kGin:
      add("eps", Tensor::scalar(0.0));
      weight("W1", in, out);
      add("b1", zeros_row(out));
      weight("W2", out, out);
      add("b2", zeros_row(out));
      break;
    case LayerKind::kGat:
      weight("W", in, out);
      weight("W_edge", edge_dim, out);
      weight("att_src", 1, out);
      weight("att_dst", 1, out);
      weight("att_edge", 1, out);
      add("b", zeros_row(out));
      break;
    case LayerKind::kGatv2:
      weight("W_l", in, out);
      add("b_l", zeros_row(out));
      weight("W_r", in, out);
      add("b_r", zeros_row(out));
      weight("W_edge", edge_dim, out);
      weight("att", 1, out);
      add("b", zeros_row(out));
      break;
    case LayerKind::kGt:
      weight("W_q", in, out);
      add("b_q", zeros_row(out));
      weight("W_k", in, out);
      add("b_k", zeros_row(out));
      weight("W_v", in, out);
      add("b_v", zeros_row(out));
      weight("W_ek", edge_dim, out);
      weight("W_ev", edge_dim, out);
      weight("W_skip", in, out);
      add("b_skip", zeros_row(out));
      weight("w_beta", 3 * out, 1);
      break;
  }
}

Var GnnLayer::p(std::span<const Var> params, const char* name) const {
  auto it = ids_.find(name);
  if (it == ids_.end() || it->second >= params.size()) {
    throw std::logic_error(std::string("layer parameter ") + name +
                           " is not bound");
  }
  return params[it->second];
}

Var GnnLayer::forward(std::span<const Var> params, const MessageGraph& g,
                      Var h, Var edge_features, Var* attention) const {
  if (h.rows() != g.num_nodes || h.cols() != spec_.in_dim) {
    throw std::invalid_argument("layer input is " + h.value().shape_string() +
                                ", expected " + std::to_string(g.num_nodes) +
                                "x" + std::to_string(spec_.in_dim));
  }
  if (uses_edge_features(spec_.kind) && edge_features.rows() != g.num_edges) {
    throw std::invalid_argument("edge features have " +
                                std::to_string(edge_features.rows()) +
                                " rows for " + std::to_string(g.num_edges) +
                                " edges");
  }
  Tape& tape = *h.tape;
  const std::size_t n = g.num_nodes;
  const std::size_t heads = is_attention(spec_.kind) ? spec_.heads : 1;
  const std::size_t head_dim = spec_.out_dim / heads;

  switch (spec_.kind) {
    case LayerKind::kMlpOnly:
      return linear(h, p(params, "W"), p(params, "b"));

    case LayerKind::kGcn: {
      Var y = matmul(h, p(params, "W"));
      Var msg = multiply(gather_rows(y, g.src),
                         tape.constant(g.gcn_edge_norm));
      Var agg = add(scatter_add_rows(msg, g.dst, n),
                    multiply(y, tape.constant(g.gcn_self_norm)));
      return add(agg, p(params, "b"));
    }

    case LayerKind::kGin:
    case LayerKind::kGine: {
      Var msg = gather_rows(h, g.src);
      if (spec_.kind == LayerKind::kGine) {
        Var e = linear(edge_features, p(params, "W_edge"), p(params, "b_edge"));
        msg = relu(add(msg, gather_rows(e, g.edge)));
      }
      Var z = add(multiply(h, add_scalar(p(params, "eps"), 1.0)),
                  scatter_add_rows(msg, g.dst, n));
      Var hidden = relu(linear(z, p(params, "W1"), p(params, "b1")));
      return linear(hidden, p(params, "W2"), p(params, "b2"));
    }

    case LayerKind::kGat: {
      Var x = matmul(h, p(params, "W"));
      Var e = matmul(edge_features, p(params, "W_edge"));
      Var a_src = head_dot(x, p(params, "att_src"), heads);
      Var a_dst = head_dot(x, p(params, "att_dst"), heads);
      Var a_edge = with_loops(g, head_dot(e, p(params, "att_edge"), heads));
      Var score = leaky_relu(add(add(gather_rows(a_src, g.loop_src),
                                     gather_rows(a_dst, g.loop_dst)),
                                 a_edge));
      Var alpha = segment_softmax(score, g.loop_dst, n);
      if (attention) *attention = alpha;
      Var msg = multiply(gather_rows(x, g.loop_src),
                         repeat_cols(alpha, head_dim));
      return add(scatter_add_rows(msg, g.loop_dst, n), p(params, "b"));
    }

    case LayerKind::kGatv2: {
      Var xl = linear(h, p(params, "W_l"), p(params, "b_l"));
      Var xr = linear(h, p(params, "W_r"), p(params, "b_r"));
      Var e = with_loops(g, matmul(edge_features, p(params, "W_edge")));
      Var xl_j = gather_rows(xl, g.loop_src);
      Var z = leaky_relu(add(add(xl_j, gather_rows(xr, g.loop_dst)), e));
      Var alpha = segment_softmax(head_dot(z, p(params, "att"), heads),
                                  g.loop_dst, n);
      if (attention) *attention = alpha;
      Var msg = multiply(xl_j, repeat_cols(alpha, head_dim));
      return add(scatter_add_rows(msg, g.loop_dst, n), p(params, "b"));
    }

    case LayerKind::kGt: {
      Var q = linear(h, p(params, "W_q"), p(params, "b_q"));
      Var k = linear(h, p(params, "W_k"), p(params, "b_k"));
      Var v = linear(h, p(params, "W_v"), p(params, "b_v"));
      Var ek = with_loops(g, matmul(edge_features, p(params, "W_ek")));
      Var ev = with_loops(g, matmul(edge_features, p(params, "W_ev")));
      Var key = add(gather_rows(k, g.loop_src), ek);
      Var score = scale(head_dot(gather_rows(q, g.loop_dst), key, heads),
                        1.0 / std::sqrt(static_cast<double>(head_dim)));
      Var alpha = segment_softmax(score, g.loop_dst, n);
      if (attention) *attention = alpha;
      Var value = add(gather_rows(v, g.loop_src), ev);
      Var out = scatter_add_rows(multiply(value, repeat_cols(alpha, head_dim)),
                                 g.loop_dst, n);
      Var skip = linear(h, p(params, "W_skip"), p(params, "b_skip"));
      Var beta = sigmoid(matmul(concat({out, skip, subtract(out, skip)}, 1),
                                p(params, "w_beta")));
      // beta * skip + (1 - beta) * out
      return add(out, multiply(subtract(skip, out), beta));
    }
  }
  throw std::logic_error("unhandled layer kind");
}

Mlp::Mlp(std::vector<std::size_t> dims, const std::string& prefix,
         ParameterStore& store, Rng& rng)
    : dims_(std::move(dims)) {
  if (dims_.size() < 2) throw std::invalid_argument("Mlp needs >= 2 dims");
  for (std::size_t i = 0; i + 1 < dims_.size(); ++i) {
    if (dims_[i] == 0 || dims_[i + 1] == 0) {
      throw std::invalid_argument("Mlp dims must be positive");
    }
    const std::string name = prefix + "." + std::to_string(i);
    ids_.push_back(store.add(name + ".W",
                             glorot_uniform(dims_[i], dims_[i + 1], rng)));
    ids_.push_back(store.add(name + ".b", zeros_row(dims_[i + 1])));
  }
}

Var Mlp::forward(std::span<const Var> params, Var x) const {
  if (x.cols() != dims_.front()) {
    throw std::invalid_argument("Mlp input has " + std::to_string(x.cols()) +
                                " columns, expected " +
                                std::to_string(dims_.front()));
  }
  const std::size_t layers = dims_.size() - 1;
  for (std::size_t i = 0; i < layers; ++i) {
    x = linear(x, params[weight_id(i)], params[bias_id(i)]);
    if (i + 1 < layers) x = relu(x);
  }
  return x;
}

Backbone::Backbone(LayerKind kind, std::size_t num_layers,
                   std::size_t input_dim, std::size_t hidden,
                   std::size_t heads, ParameterStore& store, Rng& rng)
    : hidden_(hidden) {
  if (num_layers == 0) throw std::invalid_argument("Backbone needs layers");
  for (std::size_t i = 0; i < num_layers; ++i) {
    LayerSpec spec{kind, i == 0 ? input_dim : hidden, hidden,
                   is_attention(kind) ? heads : 1};
    layers_.emplace_back(spec, "gnn." + std::to_string(i), store, rng);
  }
}

Var Backbone::forward(std::span<const Var> params, const MessageGraph& g,
                      Var x, Var edge_features) const {
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    x = layers_[i].forward(params, g, x, edge_features);
    if (i + 1 < layers_.size()) x = relu(x);
  }
  return x;
}

}  // namespace pcbgnn
