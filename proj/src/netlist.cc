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

#include "pcbgnn/netlist.h"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace pcbgnn {
namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& msg) { throw NetlistError(msg); }

void check_keys(const Json& obj, std::initializer_list<std::string_view> required,
                std::initializer_list<std::string_view> optional,
                const std::string& where) {
  if (!obj.is_object()) fail(where + ": expected an object");
  for (const auto& [key, _] : obj.items()) {
    const bool known =
        std::find(required.begin(), required.end(), key) != required.end() ||
        std::find(optional.begin(), optional.end(), key) != optional.end();
    if (!known) fail(where + ": unknown key \"" + key + "\"");
  }
  for (std::string_view key : required) {
    if (!obj.contains(key)) {
      fail(where + ": missing key \"" + std::string(key) + "\"");
    }
  }
}

std::int64_t get_int(const Json& obj, const char* key, const std::string& where) {
  const Json& v = obj.at(key);
  if (!v.is_number_integer()) {
    fail(where + ": \"" + key + "\" must be an integer");
  }
  return v.get<std::int64_t>();
}

std::string get_string(const Json& obj, const char* key,
                       const std::string& where) {
  const Json& v = obj.at(key);
  if (!v.is_string()) fail(where + ": \"" + key + "\" must be a string");
  return v.get<std::string>();
}

const Json& get_array(const Json& obj, const char* key,
                      const std::string& where) {
  const Json& v = obj.at(key);
  if (!v.is_array()) fail(where + ": \"" + key + "\" must be an array");
  return v;
}

std::string_view rc_label_name(std::int64_t label) {
  switch (static_cast<RcClass>(label)) {
    case RcClass::kNone:
      return "none";
    case RcClass::kResistor:
      return "resistor";
    case RcClass::kCapacitor:
      return "capacitor";
  }
  return "?";
}

std::int64_t parse_pair_label(const Json& v, Task task,
                              const std::string& where) {
  if (task == Task::kRcFilter) {
    if (!v.is_string()) fail(where + ": rc_filter labels must be strings");
    const auto s = v.get<std::string>();
    if (s == "none") return static_cast<std::int64_t>(RcClass::kNone);
    if (s == "resistor") return static_cast<std::int64_t>(RcClass::kResistor);
    if (s == "capacitor") {
      return static_cast<std::int64_t>(RcClass::kCapacitor);
    }
    fail(where + ": unknown rc_filter label \"" + s + "\"");
  }
  if (!v.is_number_integer()) fail(where + ": label must be an integer");
  return v.get<std::int64_t>();
}

TaskAnnotations parse_annotations(const Json& j) {
  const std::string where = "annotations";
  check_keys(j, {"task", "node_labels", "pair_labels"}, {}, where);
  TaskAnnotations a;
  try {
    a.task = parse_task(get_string(j, "task", where));
  } catch (const std::invalid_argument& e) {
    fail(where + ": " + e.what());
  }
  const Json& nodes = get_array(j, "node_labels", where);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string w = "node_labels[" + std::to_string(i) + "]";
    check_keys(nodes[i], {"net_id", "label"}, {}, w);
    const std::int64_t label = get_int(nodes[i], "label", w);
    if (label != 0 && label != 1) fail(w + ": node label must be 0 or 1");
    a.node_labels.push_back(
        NodeLabel{get_int(nodes[i], "net_id", w), static_cast<int>(label)});
  }
  const Json& pairs = get_array(j, "pair_labels", where);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const std::string w = "pair_labels[" + std::to_string(i) + "]";
    check_keys(pairs[i], {"net_a", "net_b", "label"}, {}, w);
    a.pair_labels.push_back(PairLabel{get_int(pairs[i], "net_a", w),
                                      get_int(pairs[i], "net_b", w),
                                      parse_pair_label(pairs[i].at("label"),
                                                       a.task, w)});
  }
  return a;
}

void validate_annotations(const Schematic& s, const TaskAnnotations& a) {
  std::set<std::int64_t> net_ids;
  for (const Net& n : s.nets) net_ids.insert(n.id);

  std::set<std::int64_t> positive;
  std::set<std::pair<std::int64_t, std::int64_t>> seen_pairs;
  for (const PairLabel& p : a.pair_labels) {
    const std::string w = "pair (" + std::to_string(p.net_a) + ", " +
                          std::to_string(p.net_b) + ")";
    if (!(p.net_a < p.net_b)) fail(w + ": net_a must be less than net_b");
    for (std::int64_t id : {p.net_a, p.net_b}) {
      if (!net_ids.contains(id)) {
        fail(w + ": references unknown net id " + std::to_string(id));
      }
    }
    if (!seen_pairs.insert({p.net_a, p.net_b}).second) {
      fail(w + ": duplicate pair label");
    }
    if (!label_in_domain(a.task, p.label)) {
      fail(w + ": label " + std::to_string(p.label) + " outside the " +
           std::string(task_name(a.task)) + " domain");
    }
    if (label_is_positive(a.task, p.label)) {
      positive.insert(p.net_a);
      positive.insert(p.net_b);
    }
  }

  std::set<std::int64_t> labeled;
  for (const NodeLabel& n : a.node_labels) {
    const std::string w = "node label of net " + std::to_string(n.net_id);
    if (!net_ids.contains(n.net_id)) {
      fail(w + ": references unknown net id " + std::to_string(n.net_id));
    }
    if (!labeled.insert(n.net_id).second) fail(w + ": duplicate node label");
    const int expected = positive.contains(n.net_id) ? 1 : 0;
    if (n.label != expected) {
      fail(w + ": is " + std::to_string(n.label) +
           " but positive-pair membership says " + std::to_string(expected));
    }
  }
  for (std::int64_t id : positive) {
    if (!labeled.contains(id)) {
      fail("net " + std::to_string(id) +
           " is in a positive pair but has no node label");
    }
  }
}

Json to_json(const Schematic& s) {
  Json j;
  j["name"] = s.name;
  Json nets = Json::array();
  for (const Net& n : s.nets) nets.push_back({{"id", n.id}, {"name", n.name}});
  j["nets"] = std::move(nets);
  Json symbols = Json::array();
  for (const Symbol& n : s.symbols) {
    symbols.push_back({{"id", n.id}, {"name", n.name}});
  }
  j["symbols"] = std::move(symbols);
  Json pins = Json::array();
  for (const Pin& p : s.pins) {
    pins.push_back({{"symbol_id", p.symbol_id},
                    {"net_id", p.net_id},
                    {"pin_name", p.pin_name}});
  }
  j["pins"] = std::move(pins);
  if (s.annotations) {
    const TaskAnnotations& a = *s.annotations;
    Json aj;
    aj["task"] = std::string(task_name(a.task));
    Json nodes = Json::array();
    for (const NodeLabel& n : a.node_labels) {
      nodes.push_back({{"net_id", n.net_id}, {"label", n.label}});
    }
    aj["node_labels"] = std::move(nodes);
    Json pairs = Json::array();
    for (const PairLabel& p : a.pair_labels) {
      Json pj{{"net_a", p.net_a}, {"net_b", p.net_b}};
      if (a.task == Task::kRcFilter) {
        pj["label"] = std::string(rc_label_name(p.label));
      } else {
        pj["label"] = p.label;
      }
      pairs.push_back(std::move(pj));
    }
    aj["pair_labels"] = std::move(pairs);
    j["annotations"] = std::move(aj);
  }
  return j;
}

}  // namespace

std::vector<NodeLabel> derive_node_labels(const Schematic& s,
                                          const std::vector<PairLabel>& pairs,
                                          Task task) {
  std::set<std::int64_t> positive;
  for (const PairLabel& p : pairs) {
    if (label_is_positive(task, p.label)) {
      positive.insert(p.net_a);
      positive.insert(p.net_b);
    }
  }
  std::vector<NodeLabel> out;
  out.reserve(s.nets.size());
  for (const Net& n : s.nets) {
    out.push_back(NodeLabel{n.id, positive.contains(n.id) ? 1 : 0});
  }
  return out;
}

void validate_schematic(const Schematic& s) {
  if (s.name.empty()) fail("schematic name is empty");
  std::set<std::int64_t> net_ids, symbol_ids;
  for (const Net& n : s.nets) {
    if (!net_ids.insert(n.id).second) {
      fail("duplicate net id " + std::to_string(n.id));
    }
    if (n.name.empty()) fail("net " + std::to_string(n.id) + " has empty name");
  }
  for (const Symbol& n : s.symbols) {
    if (!symbol_ids.insert(n.id).second) {
      fail("duplicate symbol id " + std::to_string(n.id));
    }
    if (n.name.empty()) {
      fail("symbol " + std::to_string(n.id) + " has empty name");
    }
  }
  for (std::size_t i = 0; i < s.pins.size(); ++i) {
    const Pin& p = s.pins[i];
    const std::string w = "pin " + std::to_string(i);
    if (!symbol_ids.contains(p.symbol_id)) {
      fail(w + " references unknown symbol id " + std::to_string(p.symbol_id));
    }
    if (!net_ids.contains(p.net_id)) {
      fail(w + " references unknown net id " + std::to_string(p.net_id));
    }
    if (p.pin_name.empty()) fail(w + " has empty pin_name");
  }
  if (s.annotations) validate_annotations(s, *s.annotations);
}

Schematic parse_netlist(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail("syntax error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  check_keys(j, {"name", "nets", "symbols", "pins"}, {"annotations"},
             "schematic");
  Schematic s;
  s.name = get_string(j, "name", "schematic");
  const Json& nets = get_array(j, "nets", "schematic");
  for (std::size_t i = 0; i < nets.size(); ++i) {
    const std::string w = "nets[" + std::to_string(i) + "]";
    check_keys(nets[i], {"id", "name"}, {}, w);
    s.nets.push_back(Net{get_int(nets[i], "id", w),
                         get_string(nets[i], "name", w)});
  }
  const Json& symbols = get_array(j, "symbols", "schematic");
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    const std::string w = "symbols[" + std::to_string(i) + "]";
    check_keys(symbols[i], {"id", "name"}, {}, w);
    s.symbols.push_back(Symbol{get_int(symbols[i], "id", w),
                               get_string(symbols[i], "name", w)});
  }
  const Json& pins = get_array(j, "pins", "schematic");
  for (std::size_t i = 0; i < pins.size(); ++i) {
    const std::string w = "pins[" + std::to_string(i) + "]";
    check_keys(pins[i], {"symbol_id", "net_id", "pin_name"}, {}, w);
    s.pins.push_back(Pin{get_int(pins[i], "symbol_id", w),
                         get_int(pins[i], "net_id", w),
                         get_string(pins[i], "pin_name", w)});
  }
  if (j.contains("annotations")) {
    s.annotations = parse_annotations(j.at("annotations"));
  }
  validate_schematic(s);
  return s;
}

std::string serialize_schematic(const Schematic& s) { return to_json(s).dump(); }

std::vector<Schematic> load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open dataset " + path.string());
  std::vector<Schematic> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse_netlist(line));
    } catch (const NetlistError& e) {
      fail(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (in.bad()) fail("read error on " + path.string());
  return out;
}

void store_dataset(const std::vector<Schematic>& schematics,
                   const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail("cannot write dataset " + path.string());
  for (const Schematic& s : schematics) out << serialize_schematic(s) << '\n';
  if (!out) fail("write error on " + path.string());
}

}  // namespace pcbgnn
