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

#include "pcbgnn/graph.h"

#include <algorithm>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "json.hpp"

namespace pcbgnn {

std::vector<std::size_t> PcbGraph::net_node_indices() const {
  std::vector<std::size_t> out(num_nets);
  std::iota(out.begin(), out.end(), 0);
  return out;
}

std::int64_t PcbGraph::pair_label(std::size_t a, std::size_t b) const {
  if (a > b) std::swap(a, b);
  auto it = y_pair.find({a, b});
  return it == y_pair.end() ? 0 : it->second;
}

std::size_t PcbGraph::num_positive_pairs() const {
  if (!task) return 0;
  std::size_t n = 0;
  for (const auto& [_, label] : y_pair) {
    if (label_is_positive(*task, label)) ++n;
  }
  return n;
}

PcbGraph build_graph(const Schematic& s, const Embedder& embedder) {
  std::vector<const Net*> nets;
  for (const Net& n : s.nets) nets.push_back(&n);
  std::sort(nets.begin(), nets.end(),
            [](const Net* a, const Net* b) { return a->id < b->id; });
  std::vector<const Symbol*> symbols;
  for (const Symbol& n : s.symbols) symbols.push_back(&n);
  std::sort(symbols.begin(), symbols.end(),
            [](const Symbol* a, const Symbol* b) { return a->id < b->id; });

  std::unordered_map<std::string, Embedding> cache;
  auto embed = [&](const std::string& name) -> const Embedding& {
    auto it = cache.find(name);
    if (it == cache.end()) it = cache.emplace(name, embed_name(name, embedder)).first;
    return it->second;
  };

  PcbGraph g;
  g.name = s.name;
  g.num_nets = nets.size();
  const std::size_t n = nets.size() + symbols.size();
  g.node_features = Tensor(n, kFeatureDim);
  std::unordered_map<std::int64_t, std::size_t> net_index, symbol_index;
  auto add_node = [&](NodeKind kind, std::int64_t id, const std::string& name) {
    const std::size_t i = g.node_kind.size();
    g.node_kind.push_back(kind);
    g.node_names.push_back(name);
    g.provenance.push_back(NodeOrigin{kind, id});
    g.node_features(i, 0) = static_cast<double>(kind);
    const Embedding& e = embed(name);
    std::copy(e.begin(), e.end(), g.node_features.row(i).begin() + 1);
    return i;
  };
  for (const Net* net : nets) {
    net_index[net->id] = add_node(NodeKind::kNet, net->id, net->name);
  }
  for (const Symbol* sym : symbols) {
    symbol_index[sym->id] = add_node(NodeKind::kSymbol, sym->id, sym->name);
  }

  // Group pins by endpoint pair; order within a group by (name, position).
  std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>>
      groups;
  for (std::size_t i = 0; i < s.pins.size(); ++i) {
    const Pin& p = s.pins[i];
    auto ni = net_index.find(p.net_id);
    auto si = symbol_index.find(p.symbol_id);
    if (ni == net_index.end() || si == symbol_index.end()) {
      throw GraphError("pin " + std::to_string(i) + " has a dangling reference");
    }
    groups[{ni->second, si->second}].push_back(i);
  }
  g.edge_features = Tensor(groups.size(), kFeatureDim);
  std::size_t e = 0;
  for (auto& [key, members] : groups) {
    std::sort(members.begin(), members.end(),
              [&](std::size_t a, std::size_t b) {
                const auto& na = s.pins[a].pin_name;
                const auto& nb = s.pins[b].pin_name;
                return na != nb ? na < nb : a < b;
              });
    auto row = g.edge_features.row(e);
    for (std::size_t pin : members) {
      const Embedding& v = embed(s.pins[pin].pin_name);
      for (std::size_t k = 0; k < kEmbeddingDim; ++k) row[k] += v[k];
    }
    row[kEmbeddingDim] = static_cast<double>(members.size());
    g.edges.push_back(GraphEdge{key.first, key.second});
    ++e;
  }
  return g;
}

PcbGraph attach_labels(PcbGraph g, const TaskAnnotations& a) {
  std::unordered_map<std::int64_t, std::size_t> net_index;
  std::unordered_map<std::int64_t, bool> symbol_ids;
  for (std::size_t i = 0; i < g.provenance.size(); ++i) {
    if (g.provenance[i].kind == NodeKind::kNet) {
      net_index[g.provenance[i].id] = i;
    } else {
      symbol_ids[g.provenance[i].id] = true;
    }
  }
  auto lookup = [&](std::int64_t id) {
    auto it = net_index.find(id);
    if (it != net_index.end()) return it->second;
    if (symbol_ids.contains(id)) {
      throw GraphError("pair label references symbol id " + std::to_string(id) +
                       "; pairs must join two nets");
    }
    throw GraphError("pair label references unknown id " + std::to_string(id));
  };
  g.task = a.task;
  g.y_pair.clear();
  g.y_node.assign(g.num_nets, 0);
  for (const PairLabel& p : a.pair_labels) {
    std::size_t u = lookup(p.net_a);
    std::size_t v = lookup(p.net_b);
    if (u == v) throw GraphError("pair label joins a net to itself");
    if (u > v) std::swap(u, v);
    if (!label_in_domain(a.task, p.label)) {
      throw GraphError("pair label outside the task domain");
    }
    g.y_pair[{u, v}] = p.label;
    if (label_is_positive(a.task, p.label)) {
      g.y_node[u] = 1;
      g.y_node[v] = 1;
    }
  }
  return g;
}

PcbGraph build_labeled_graph(const Schematic& s, const Embedder& embedder) {
  PcbGraph g = build_graph(s, embedder);
  if (s.annotations) g = attach_labels(std::move(g), *s.annotations);
  return g;
}

StatsReport graph_stats(const std::vector<PcbGraph>& graphs) {
  if (graphs.empty()) throw GraphError("graph_stats of an empty dataset");
  StatsReport r;
  r.samples = graphs.size();
  r.min_nodes = std::numeric_limits<std::size_t>::max();
  double nodes = 0, edges = 0, added = 0;
  for (const PcbGraph& g : graphs) {
    nodes += static_cast<double>(g.num_nodes());
    edges += static_cast<double>(g.num_edges());
    added += static_cast<double>(g.num_positive_pairs());
    r.min_nodes = std::min(r.min_nodes, g.num_nodes());
    r.max_nodes = std::max(r.max_nodes, g.num_nodes());
  }
  const double n = static_cast<double>(graphs.size());
  r.avg_nodes = nodes / n;
  r.avg_edges = edges / n;
  r.avg_added_nodes = added / n;
  r.added_percent = r.avg_nodes > 0 ? 100.0 * r.avg_added_nodes / r.avg_nodes
                                    : 0.0;
  return r;
}

std::string dump_graph(const PcbGraph& g) {
  nlohmann::ordered_json j;
  j["name"] = g.name;
  nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < g.num_nodes(); ++i) {
    nodes.push_back({{"index", i},
                     {"kind", g.node_kind[i] == NodeKind::kNet ? "net" : "symbol"},
                     {"id", g.provenance[i].id},
                     {"name", g.node_names[i]},
                     {"y_node", i < g.y_node.size() ? g.y_node[i] : 0}});
  }
  j["nodes"] = std::move(nodes);
  nlohmann::ordered_json edges = nlohmann::ordered_json::array();
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    edges.push_back({{"net", g.edges[e].net},
                     {"symbol", g.edges[e].symbol},
                     {"pins", g.edge_features(e, kEmbeddingDim)}});
  }
  j["edges"] = std::move(edges);
  nlohmann::ordered_json pairs = nlohmann::ordered_json::array();
  for (const auto& [key, label] : g.y_pair) {
    pairs.push_back({{"a", key.first}, {"b", key.second}, {"label", label}});
  }
  j["pairs"] = std::move(pairs);
  return j.dump(2);
}

}  // namespace pcbgnn
