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

// Numeric bipartite graph built from a Schematic.
//
// Node i has features [kind, name embedding] (1 + 384 = 385 columns) with
// kind 0 for nets and 1 for symbols. Nets come first (ascending id), then
// symbols (ascending id), so net nodes occupy [0, num_nets).
//
// Pins between the same symbol and net are merged into one edge whose
// features are [sum of pin-name embeddings, pin count] (384 + 1 columns).
// Embeddings are summed in (pin name, pin position) order, which makes the
// result bit-identical under any permutation of the schematic's pin list.

#ifndef PCBGNN_GRAPH_H_
#define PCBGNN_GRAPH_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pcbgnn/embedding.h"
#include "pcbgnn/netlist.h"
#include "pcbgnn/task.h"
#include "pcbgnn/tensor.h"

namespace pcbgnn {

inline constexpr std::size_t kFeatureDim = kEmbeddingDim + 1;

enum class NodeKind : int { kNet = 0, kSymbol = 1 };

struct NodeOrigin {
  NodeKind kind = NodeKind::kNet;
  std::int64_t id = 0;
  friend bool operator==(const NodeOrigin&, const NodeOrigin&) = default;
};

// Undirected edge; `net` < num_nets <= `symbol`.
struct GraphEdge {
  std::size_t net = 0;
  std::size_t symbol = 0;
  friend bool operator==(const GraphEdge&, const GraphEdge&) = default;
};

// Key of an unordered net-node pair, first < second.
using NodePair = std::pair<std::size_t, std::size_t>;

struct PcbGraph {
  std::string name;
  std::vector<NodeKind> node_kind;
  std::vector<std::string> node_names;
  std::vector<NodeOrigin> provenance;
  Tensor node_features;  // N x 385
  std::vector<GraphEdge> edges;  // sorted by (net, symbol)
  Tensor edge_features;  // E x 385
  std::size_t num_nets = 0;

  std::optional<Task> task;
  std::vector<int> y_node;  // one entry per net node
  std::map<NodePair, std::int64_t> y_pair;  // absent pairs are negative

  std::size_t num_nodes() const { return node_kind.size(); }
  std::size_t num_edges() const { return edges.size(); }
  std::vector<std::size_t> net_node_indices() const;
  // Label of an unordered net pair (0 when not annotated).
  std::int64_t pair_label(std::size_t a, std::size_t b) const;
  std::size_t num_positive_pairs() const;

  friend bool operator==(const PcbGraph&, const PcbGraph&) = default;
};

class GraphError : public std::runtime_error {
 public:
  explicit GraphError(const std::string& what) : std::runtime_error(what) {}
};

PcbGraph build_graph(const Schematic& s, const Embedder& embedder);

// Copies `g` with pair labels from `a` and node labels derived from them.
PcbGraph attach_labels(PcbGraph g, const TaskAnnotations& a);

// build_graph followed by attach_labels when the schematic is annotated.
PcbGraph build_labeled_graph(const Schematic& s, const Embedder& embedder);

struct StatsReport {
  std::size_t samples = 0;
  double avg_nodes = 0;
  std::size_t min_nodes = 0;
  std::size_t max_nodes = 0;
  double avg_edges = 0;
  double avg_added_nodes = 0;  // distinct positive pairs per graph
  double added_percent = 0;    // avg_added_nodes / avg_nodes * 100
};

StatsReport graph_stats(const std::vector<PcbGraph>& graphs);

// Debug view (node table, edge table) as JSON; not a stable format.
std::string dump_graph(const PcbGraph& g);

}  // namespace pcbgnn

#endif  // PCBGNN_GRAPH_H_
