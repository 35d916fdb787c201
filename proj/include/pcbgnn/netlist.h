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

// Schematics and their line-delimited JSON dataset format.
//
// One schematic per line:
//   {"name": "...",
//    "nets":    [{"id": 1, "name": "GND"}, ...],
//    "symbols": [{"id": 1, "name": "C1"}, ...],
//    "pins":    [{"symbol_id": 1, "net_id": 1, "pin_name": "1"}, ...],
//    "annotations": {"task": "rc_filter",
//                    "node_labels": [{"net_id": 1, "label": 1}, ...],
//                    "pair_labels": [{"net_a": 1, "net_b": 4,
//                                     "label": "resistor"}, ...]}}
// "annotations" is optional. RC filter pair labels are the strings "none",
// "resistor" and "capacitor"; the other tasks use integers. Unknown keys are
// rejected.

#ifndef PCBGNN_NETLIST_H_
#define PCBGNN_NETLIST_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pcbgnn/task.h"

namespace pcbgnn {

struct Net {
  std::int64_t id = 0;
  std::string name;
  friend bool operator==(const Net&, const Net&) = default;
};

struct Symbol {
  std::int64_t id = 0;
  std::string name;
  friend bool operator==(const Symbol&, const Symbol&) = default;
};

// A pin always joins one symbol to one net, so net-net and symbol-symbol
// connections cannot be expressed.
struct Pin {
  std::int64_t symbol_id = 0;
  std::int64_t net_id = 0;
  std::string pin_name;
  friend bool operator==(const Pin&, const Pin&) = default;
};

struct NodeLabel {
  std::int64_t net_id = 0;
  int label = 0;
  friend bool operator==(const NodeLabel&, const NodeLabel&) = default;
};

// Unordered net pair, stored with net_a < net_b.
struct PairLabel {
  std::int64_t net_a = 0;
  std::int64_t net_b = 0;
  std::int64_t label = 0;
  friend bool operator==(const PairLabel&, const PairLabel&) = default;
};

struct TaskAnnotations {
  Task task = Task::kPullUpDown;
  std::vector<NodeLabel> node_labels;
  std::vector<PairLabel> pair_labels;
  friend bool operator==(const TaskAnnotations&,
                         const TaskAnnotations&) = default;
};

struct Schematic {
  std::string name;
  std::vector<Net> nets;
  std::vector<Symbol> symbols;
  std::vector<Pin> pins;
  std::optional<TaskAnnotations> annotations;
  friend bool operator==(const Schematic&, const Schematic&) = default;
};

class NetlistError : public std::runtime_error {
 public:
  explicit NetlistError(const std::string& what) : std::runtime_error(what) {}
};

// Node labels derived from pair labels: every net of a positive pair gets 1,
// every other net 0. Nets are listed in schematic order.
std::vector<NodeLabel> derive_node_labels(const Schematic& s,
                                          const std::vector<PairLabel>& pairs,
                                          Task task);

// Throws NetlistError naming the first violated invariant.
void validate_schematic(const Schematic& s);

Schematic parse_netlist(std::string_view text);
// Compact single-line JSON.
std::string serialize_schematic(const Schematic& s);

std::vector<Schematic> load_dataset(const std::filesystem::path& path);
void store_dataset(const std::vector<Schematic>& schematics,
                   const std::filesystem::path& path);

}  // namespace pcbgnn

#endif  // PCBGNN_NETLIST_H_
