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

#include "pcbgnn/synthdata.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <utility>

#include "pcbgnn/random.h"

namespace pcbgnn {
namespace {

using Json = nlohmann::ordered_json;

bool in_pool(const std::vector<std::string>& pool, std::string_view name) {
  return std::find(pool.begin(), pool.end(), name) != pool.end();
}

bool is_supply(std::string_view net) { return in_pool(kSupplyNames, net); }
bool is_ground(std::string_view net) { return in_pool(kGroundNames, net); }
bool is_rail(std::string_view net) { return is_supply(net) || is_ground(net); }

// "GPIO12" -> "GPIO", "VDD2" -> "VDD". Purely numeric names stay as they are.
std::string_view base_name(std::string_view pin) {
  std::size_t end = pin.size();
  while (end > 0 && pin[end - 1] >= '0' && pin[end - 1] <= '9') --end;
  return end == 0 ? pin : pin.substr(0, end);
}

bool is_designator(std::string_view name, std::string_view prefix) {
  if (name.size() <= prefix.size() || name.substr(0, prefix.size()) != prefix) {
    return false;
  }
  return std::all_of(name.begin() + static_cast<std::ptrdiff_t>(prefix.size()),
                     name.end(), [](char c) { return c >= '0' && c <= '9'; });
}

bool one_of(std::string_view x, std::initializer_list<std::string_view> set) {
  return std::find(set.begin(), set.end(), x) != set.end();
}

std::int64_t poisson(Rng& rng, double lambda) {
  if (lambda <= 0.0) return 0;
  const double limit = std::exp(-lambda);
  std::int64_t k = 0;
  double p = rng.uniform();
  while (p > limit) {
    ++k;
    p *= rng.uniform();
  }
  return k;
}

// ---------------------------------------------------------------------------
// Label rules.

struct IcInfo {
  std::int64_t supply = 0;
  std::int64_t ground = 0;
  std::int64_t supply_pins = 0;
};

struct NetlistView {
  std::map<std::int64_t, std::string> net_name;
  std::map<std::int64_t, std::string> symbol_name;
  std::map<std::int64_t, std::vector<const Pin*>> by_net;
  std::map<std::int64_t, std::vector<const Pin*>> by_symbol;
  std::map<std::int64_t, IcInfo> ics;
  // Nets joined by a two-terminal resistor, stored as (min, max).
  std::set<std::pair<std::int64_t, std::int64_t>> resistors;

  explicit NetlistView(const Schematic& s) {
    for (const Net& n : s.nets) net_name[n.id] = n.name;
    for (const Symbol& n : s.symbols) symbol_name[n.id] = n.name;
    for (const Pin& p : s.pins) {
      by_net[p.net_id].push_back(&p);
      by_symbol[p.symbol_id].push_back(&p);
    }
    for (const auto& [id, pins] : by_symbol) {
      const std::string& name = symbol_name.at(id);
      if (is_designator(name, "R")) {
        std::set<std::int64_t> nets;
        for (const Pin* p : pins) nets.insert(p->net_id);
        if (nets.size() == 2) resistors.emplace(*nets.begin(), *nets.rbegin());
      }
      std::int64_t supply = -1, ground = -1;
      for (const Pin* p : pins) {
        const std::string_view base = base_name(p->pin_name);
        const std::string& net = net_name.at(p->net_id);
        if ((base == "VDD" || base == "VCC") && is_supply(net)) {
          if (supply < 0 || p->net_id < supply) supply = p->net_id;
        } else if (base == "GND" && is_ground(net)) {
          if (ground < 0 || p->net_id < ground) ground = p->net_id;
        }
      }
      if (supply < 0 || ground < 0) continue;
      IcInfo ic{supply, ground, 0};
      for (const Pin* p : pins) {
        const std::string_view base = base_name(p->pin_name);
        if ((base == "VDD" || base == "VCC") && p->net_id == supply) {
          ++ic.supply_pins;
        }
      }
      ics.emplace(id, ic);
    }
  }

  bool resistor_to(std::int64_t net, bool (*rail)(std::string_view)) const {
    for (const auto& [a, b] : resistors) {
      if (a == net && rail(net_name.at(b))) return true;
      if (b == net && rail(net_name.at(a))) return true;
    }
    return false;
  }
};

using LabelMap = std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t>;

void put(LabelMap& m, std::int64_t a, std::int64_t b, std::int64_t label) {
  m[{std::min(a, b), std::max(a, b)}] = label;
}

void pull_up_rules(const NetlistView& v, LabelMap& out) {
  for (const auto& [net, pins] : v.by_net) {
    if (is_rail(v.net_name.at(net))) continue;
    std::int64_t od_ic = -1;
    bool push_pull = false;
    std::set<std::int64_t> od_symbols, input_symbols;
    std::int64_t gate_fet = -1;
    bool driven = false;
    for (const Pin* p : pins) {
      const std::string_view base = base_name(p->pin_name);
      const bool ic = v.ics.contains(p->symbol_id);
      if (ic) {
        driven = true;
        if (one_of(base, {"OD_OUT", "INT", "SDA", "SCL"})) {
          od_symbols.insert(p->symbol_id);
          if (od_ic < 0 || p->symbol_id < od_ic) od_ic = p->symbol_id;
        }
        if (one_of(base, {"IN", "GPIO", "EN", "SDA", "SCL"})) {
          input_symbols.insert(p->symbol_id);
        }
        if (base == "OUT") push_pull = true;
      } else if (p->pin_name == "G" &&
                 is_designator(v.symbol_name.at(p->symbol_id), "Q")) {
        if (gate_fet < 0 || p->symbol_id < gate_fet) gate_fet = p->symbol_id;
      }
    }
    bool fed = false;
    for (std::int64_t in : input_symbols) {
      for (std::int64_t od : od_symbols) fed = fed || in != od;
    }
    if (od_ic >= 0 && fed && !push_pull && !v.resistor_to(net, is_supply)) {
      put(out, net, v.ics.at(od_ic).supply, 1);
    }
    if (gate_fet >= 0 && driven && !v.resistor_to(net, is_ground)) {
      for (const Pin* p : v.by_symbol.at(gate_fet)) {
        if (p->pin_name == "S" && is_ground(v.net_name.at(p->net_id))) {
          put(out, net, p->net_id, 1);
          break;
        }
      }
    }
  }
}

void rc_rules(const NetlistView& v, LabelMap& out) {
  for (const auto& [id, ic] : v.ics) {
    for (const Pin* p : v.by_symbol.at(id)) {
      const std::string_view base = base_name(p->pin_name);
      if (!one_of(base, {"RST", "nRESET"})) continue;
      if (is_rail(v.net_name.at(p->net_id))) continue;
      put(out, ic.supply, p->net_id,
          static_cast<std::int64_t>(RcClass::kResistor));
      put(out, p->net_id, ic.ground,
          static_cast<std::int64_t>(RcClass::kCapacitor));
    }
  }
}

void decoupling_rules(const NetlistView& v, LabelMap& out) {
  for (const auto& [id, ic] : v.ics) {
    const auto key = std::make_pair(std::min(ic.supply, ic.ground),
                                    std::max(ic.supply, ic.ground));
    out[key] += std::min<std::int64_t>(ic.supply_pins, 4);
  }
}

// ---------------------------------------------------------------------------
// Generator.

struct Ic {
  std::int64_t id = 0;
  std::int64_t supply = 0;
  std::int64_t ground = 0;
  std::int64_t capacity = 0;
  int next_gpio = 0;
  bool has_reset = false;
  std::set<std::string> pin_names;
};

class Builder {
 public:
  Builder(const GenConfig& config, Rng& rng, std::int64_t target)
      : config_(config), rng_(rng), target_(target) {}

  Schematic& schematic() { return s_; }
  std::int64_t nodes() const {
    return static_cast<std::int64_t>(s_.nets.size() + s_.symbols.size());
  }
  std::int64_t remaining() const { return target_ - nodes(); }
  const std::vector<std::int64_t>& supplies() const { return supplies_; }
  const std::vector<std::int64_t>& grounds() const { return grounds_; }
  std::vector<Ic>& ics() { return ics_; }

  std::int64_t add_net(const std::string& name) {
    const std::int64_t id = next_id_++;
    s_.nets.push_back(Net{id, name});
    return id;
  }

  // A signal net with a descriptive name, or "N$k" with probability
  // name_noise.
  std::int64_t signal_net(const std::string& descriptive, bool filler = true) {
    std::string name;
    if (rng_.bernoulli(config_.name_noise)) {
      name = "N$" + std::to_string(++generic_);
    } else {
      const int n = ++descriptive_[descriptive];
      name = n == 1 ? descriptive : descriptive + "_" + std::to_string(n);
    }
    const std::int64_t id = add_net(name);
    if (filler) filler_nets_.push_back(id);
    return id;
  }

  std::int64_t add_symbol(const std::string& prefix) {
    const std::int64_t id = next_id_++;
    s_.symbols.push_back(
        Symbol{id, prefix + std::to_string(++designators_[prefix])});
    return id;
  }

  void pin(std::int64_t symbol, std::int64_t net, std::string name) {
    s_.pins.push_back(Pin{symbol, net, std::move(name)});
  }

  void rails() {
    std::vector<std::string> pool = kSupplyNames;
    rng_.shuffle(pool);
    supplies_.push_back(add_net(pool[0]));
    if (rng_.bernoulli(config_.second_supply)) {
      supplies_.push_back(add_net(pool[1]));
    }
    grounds_.push_back(add_net("GND"));
    if (rng_.bernoulli(config_.analog_ground)) {
      grounds_.push_back(add_net("AGND"));
    }
  }

  Ic& new_ic(std::int64_t supply = -1) {
    Ic ic;
    ic.id = add_symbol("IC");
    ic.supply = supply >= 0 ? supply : rng_.pick(supplies_);
    ic.ground = grounds_.size() > 1 && rng_.bernoulli(0.35) ? grounds_[1]
                                                            : grounds_[0];
    static const std::vector<std::int64_t> kPackages = {8,  14, 16, 20, 28,
                                                        32, 44, 48, 64};
    const std::int64_t package = rng_.pick(kPackages);
    const std::int64_t vdd = power_pins(package);
    const std::int64_t gnd = power_pins(package);
    const std::string vname = rng_.bernoulli(0.5) ? "VDD" : "VCC";
    for (std::int64_t i = 0; i < vdd; ++i) {
      pin(ic.id, ic.supply, unique_pin(ic, vname));
    }
    for (std::int64_t i = 0; i < gnd; ++i) {
      pin(ic.id, ic.ground, unique_pin(ic, "GND"));
    }
    ic.capacity = package - vdd - gnd;
    ics_.push_back(std::move(ic));
    return ics_.back();
  }

  // An IC with at least `pins` free pins, other than `exclude`. New ICs are
  // only created when `grow` is set and the budget allows.
  Ic* pick_ic(std::int64_t pins, bool grow, std::int64_t exclude = -1,
              std::int64_t supply = -1) {
    std::vector<std::size_t> ok;
    for (std::size_t i = 0; i < ics_.size(); ++i) {
      if (ics_[i].capacity >= pins && ics_[i].id != exclude &&
          (supply < 0 || ics_[i].supply == supply)) {
        ok.push_back(i);
      }
    }
    if (!ok.empty()) return &ics_[rng_.pick(ok)];
    if (!grow) return nullptr;
    return &new_ic(supply);
  }

  std::string ic_pin(Ic& ic, const std::string& base) {
    --ic.capacity;
    if (base == "GPIO") {
      std::string name = "GPIO" + std::to_string(ic.next_gpio++);
      ic.pin_names.insert(name);
      return name;
    }
    return unique_pin(ic, base);
  }

  // A free connector pin, opening a new header when the current one is full.
  std::pair<std::int64_t, std::string> connector_pin() {
    if (connector_ < 0 || connector_used_ >= connector_size_) {
      connector_ = add_symbol("J");
      connector_size_ = rng_.uniform_int(2, 10);
      connector_used_ = 0;
    }
    return {connector_, std::to_string(++connector_used_)};
  }

  // One end of a signal: a pin of some IC, or a connector pin when no IC has
  // room left.
  void drive(std::int64_t net, const std::string& base, bool grow) {
    if (Ic* ic = pick_ic(1, grow)) {
      pin(ic->id, net, ic_pin(*ic, base));
    } else {
      auto [j, name] = connector_pin();
      pin(j, net, name);
    }
  }

  std::int64_t random_ground() { return rng_.pick(grounds_); }

  bool has_filler_net() const { return !filler_nets_.empty(); }
  std::int64_t filler_net() { return rng_.pick(filler_nets_); }
  std::int64_t any_net() {
    return s_.nets[static_cast<std::size_t>(rng_.uniform_int(
                       0, static_cast<std::int64_t>(s_.nets.size()) - 1))]
        .id;
  }

  Rng& rng() { return rng_; }
  const GenConfig& config() const { return config_; }

 private:
  std::int64_t power_pins(std::int64_t package) {
    // Larger packages carry more supply pins; one step of jitter either way.
    std::int64_t k = package <= 8 ? 1 : package <= 20 ? 2 : package <= 44 ? 3 : 4;
    if (rng_.bernoulli(0.25)) k += rng_.bernoulli(0.5) ? 1 : -1;
    return std::clamp<std::int64_t>(k, 1, 4);
  }

  static std::string unique_pin(Ic& ic, const std::string& base) {
    std::string name = base;
    for (int n = 2; ic.pin_names.contains(name); ++n) {
      name = base + std::to_string(n);
    }
    ic.pin_names.insert(name);
    return name;
  }

  const GenConfig& config_;
  Rng& rng_;
  std::int64_t target_;
  Schematic s_;
  std::int64_t next_id_ = 1;
  int generic_ = 0;
  std::map<std::string, int> descriptive_;
  std::map<std::string, int> designators_;
  std::vector<std::int64_t> supplies_, grounds_, filler_nets_;
  std::vector<Ic> ics_;
  std::int64_t connector_ = -1;
  std::int64_t connector_size_ = 0;
  std::int64_t connector_used_ = 0;
};

// Decoupling labels follow the IC count, so only the other tasks may add ICs
// on demand.
bool grows(Builder& b) { return b.config().task != Task::kDecouplingCaps; }

const std::vector<std::string> kSignalNames = {"SIG", "DATA", "CLK", "TX",
                                               "RX",  "CS",   "PWM", "ADC"};

// A module adds one circuit fragment. `cost` is its nominal node count.
struct Module {
  std::int64_t cost;
  double weight;
  std::function<void(Builder&)> build;
};

void link(Builder& b) {
  // Push-pull output into an input.
  const std::int64_t net = b.signal_net(b.rng().pick(kSignalNames));
  const bool grow = grows(b);
  Ic* from = b.pick_ic(1, grow);
  if (from) {
    b.pin(from->id, net, b.ic_pin(*from, b.rng().bernoulli(0.5) ? "OUT" : "GPIO"));
  } else {
    auto [j, name] = b.connector_pin();
    b.pin(j, net, name);
  }
  Ic* to = b.pick_ic(1, false, from ? from->id : -1);
  if (to) {
    b.pin(to->id, net, b.ic_pin(*to, b.rng().bernoulli(0.5) ? "IN" : "GPIO"));
  } else {
    auto [j, name] = b.connector_pin();
    b.pin(j, net, name);
  }
}

void series(Builder& b) {
  const bool grow = grows(b);
  const std::int64_t a = b.signal_net(b.rng().pick(kSignalNames));
  b.drive(a, "GPIO", grow);
  const std::int64_t r = b.add_symbol("R");
  const std::int64_t out = b.signal_net("CONN");
  b.pin(r, a, "1");
  b.pin(r, out, "2");
  auto [j, name] = b.connector_pin();
  b.pin(j, out, name);
}

void led(Builder& b) {
  const bool grow = grows(b);
  const std::int64_t a = b.signal_net("LED");
  b.drive(a, "GPIO", grow);
  const std::int64_t r = b.add_symbol("R");
  const std::int64_t k = b.signal_net("LED_K");
  b.pin(r, a, "1");
  b.pin(r, k, "2");
  const std::int64_t d = b.add_symbol("D");
  b.pin(d, k, "A");
  b.pin(d, b.random_ground(), "K");
}

void cap_to_ground(Builder& b) {
  const std::int64_t c = b.add_symbol("C");
  b.pin(c, b.has_filler_net() ? b.filler_net() : b.any_net(), "1");
  b.pin(c, b.random_ground(), "2");
}

void test_point(Builder& b) {
  const std::int64_t tp = b.add_symbol("TP");
  b.pin(tp, b.any_net(), "1");
}

void bridge(Builder& b) {
  if (!b.has_filler_net()) return test_point(b);
  const std::int64_t x = b.filler_net();
  const std::int64_t y = b.filler_net();
  if (x == y) return test_point(b);
  const std::int64_t r = b.add_symbol(b.rng().bernoulli(0.5) ? "R" : "C");
  b.pin(r, x, "1");
  b.pin(r, y, "2");
}

void crystal(Builder& b) {
  Ic* ic = b.pick_ic(2, grows(b));
  if (!ic) return series(b);
  const std::int64_t x1 = b.signal_net("XTAL1");
  const std::int64_t x2 = b.signal_net("XTAL2");
  b.pin(ic->id, x1, b.ic_pin(*ic, "XTAL1"));
  b.pin(ic->id, x2, b.ic_pin(*ic, "XTAL2"));
  const std::int64_t gnd = ic->ground;
  const std::int64_t y = b.add_symbol("Y");
  b.pin(y, x1, "1");
  b.pin(y, x2, "2");
  for (std::int64_t x : {x1, x2}) {
    const std::int64_t c = b.add_symbol("C");
    b.pin(c, x, "1");
    b.pin(c, gnd, "2");
  }
}

void power_header(Builder& b) {
  const std::int64_t j = b.add_symbol("J");
  b.pin(j, b.rng().pick(b.supplies()), "1");
  b.pin(j, b.random_ground(), "2");
}

void regulator(Builder& b) {
  // Not an IC by the rules: no VDD/VCC pin.
  const std::int64_t u = b.add_symbol("U");
  b.pin(u, b.supplies().front(), "VIN");
  b.pin(u, b.supplies().back(), "VOUT");
  b.pin(u, b.grounds().front(), "GND");
}

// MOSFET switch on a GPIO; `pulldown` adds the gate resistor to ground.
void fet_switch(Builder& b, bool pulldown, bool target) {
  Ic* ic = b.pick_ic(1, grows(b));
  const std::int64_t gate = b.signal_net("GATE", !target);
  if (ic) {
    b.pin(ic->id, gate, b.ic_pin(*ic, "GPIO"));
  } else {
    auto [j, name] = b.connector_pin();
    b.pin(j, gate, name);
  }
  const std::int64_t gnd = ic ? ic->ground : b.random_ground();
  const std::int64_t q = b.add_symbol("Q");
  const std::int64_t load = b.signal_net("LOAD");
  b.pin(q, gate, "G");
  b.pin(q, gnd, "S");
  b.pin(q, load, "D");
  auto [j, name] = b.connector_pin();
  b.pin(j, load, name);
  if (pulldown) {
    const std::int64_t r = b.add_symbol("R");
    b.pin(r, gate, "1");
    b.pin(r, gnd, "2");
  }
}

void button(Builder& b, const std::string& base, const std::string& net_name) {
  Ic* ic = b.pick_ic(1, grows(b));
  const std::int64_t net = b.signal_net(net_name);
  std::int64_t gnd = b.random_ground();
  if (ic) {
    b.pin(ic->id, net, b.ic_pin(*ic, base));
    gnd = ic->ground;
  } else {
    auto [j, name] = b.connector_pin();
    b.pin(j, net, name);
  }
  const std::int64_t sw = b.add_symbol("SW");
  b.pin(sw, net, "1");
  b.pin(sw, gnd, "2");
}

// Open-drain line into an input of another IC; `pullup` adds the resistor
// that makes the label unnecessary.
void open_drain(Builder& b, bool pullup) {
  Ic* from = b.pick_ic(1, grows(b));
  if (!from) return link(b);
  const std::int64_t from_id = from->id;
  const std::int64_t supply = from->supply;
  static const std::vector<std::string> kNames = {"INT", "IRQ", "ALERT",
                                                  "nFAULT"};
  const std::int64_t net = b.signal_net(b.rng().pick(kNames), false);
  b.pin(from_id, net, b.ic_pin(*from, b.rng().bernoulli(0.5) ? "OD_OUT" : "INT"));
  static const std::vector<std::string> kInputs = {"IN", "GPIO", "EN"};
  if (Ic* to = b.pick_ic(1, grows(b), from_id)) {
    b.pin(to->id, net, b.ic_pin(*to, b.rng().pick(kInputs)));
  } else {
    auto [j, name] = b.connector_pin();
    b.pin(j, net, name);
  }
  if (pullup) {
    const std::int64_t r = b.add_symbol("R");
    b.pin(r, net, "1");
    b.pin(r, supply, "2");
  }
}

void i2c(Builder& b, bool pullup) {
  Ic* master = b.pick_ic(2, grows(b));
  if (!master) return link(b);
  const std::int64_t master_id = master->id;
  const std::int64_t supply = master->supply;
  const std::int64_t sda = b.signal_net("SDA", false);
  const std::int64_t scl = b.signal_net("SCL", false);
  b.pin(master_id, sda, b.ic_pin(*master, "SDA"));
  b.pin(master_id, scl, b.ic_pin(*master, "SCL"));
  if (Ic* slave = b.pick_ic(2, grows(b), master_id, supply)) {
    b.pin(slave->id, sda, b.ic_pin(*slave, "SDA"));
    b.pin(slave->id, scl, b.ic_pin(*slave, "SCL"));
  } else {
    for (std::int64_t net : {sda, scl}) {
      auto [j, name] = b.connector_pin();
      b.pin(j, net, name);
    }
  }
  if (pullup) {
    for (std::int64_t net : {sda, scl}) {
      const std::int64_t r = b.add_symbol("R");
      b.pin(r, net, "1");
      b.pin(r, supply, "2");
    }
  }
}

// Open-drain pin that only reaches a connector: no input, no label.
void open_drain_to_header(Builder& b) {
  Ic* from = b.pick_ic(1, true);
  const std::int64_t net = b.signal_net("INT");
  b.pin(from->id, net, b.ic_pin(*from, "OD_OUT"));
  auto [j, name] = b.connector_pin();
  b.pin(j, net, name);
}

void reset_line(Builder& b, bool button_prob_applies) {
  Ic* ic = nullptr;
  for (Ic& c : b.ics()) {
    if (!c.has_reset && c.capacity > 0) {
      ic = &c;
      break;
    }
  }
  if (!ic) {
    if (!grows(b)) return test_point(b);
    ic = &b.new_ic();
  }
  ic->has_reset = true;
  static const std::vector<std::string> kNames = {"RESET", "nRST", "RST"};
  const std::int64_t net = b.signal_net(b.rng().pick(kNames), false);
  b.pin(ic->id, net, b.ic_pin(*ic, b.rng().bernoulli(0.5) ? "RST" : "nRESET"));
  const std::int64_t gnd = ic->ground;
  if (!button_prob_applies || b.rng().bernoulli(b.config().reset_button)) {
    const std::int64_t sw = b.add_symbol("SW");
    b.pin(sw, net, "1");
    b.pin(sw, gnd, "2");
  }
  if (b.rng().bernoulli(0.3)) {
    auto [j, name] = b.connector_pin();
    b.pin(j, net, name);
  }
}

// Fillers: fragments that never create a label of the schematic's task.
std::vector<Module> fillers(Task task, bool two_supplies) {
  std::vector<Module> m = {
      {1, 4.0, link},
      {3, 2.0, series},
      {4, 1.5, led},
      {1, 1.0, cap_to_ground},
      {1, 0.5, test_point},
      {1, 1.0, bridge},
      {5, 0.4, crystal},
      {1, 0.3, power_header},
  };
  if (two_supplies) m.push_back({1, 0.2, regulator});
  if (task != Task::kPullUpDown) {
    m.push_back({3, 0.8, [](Builder& b) { fet_switch(b, b.rng().bernoulli(0.5), false); }});
    m.push_back({2, 0.5, [](Builder& b) { i2c(b, b.rng().bernoulli(0.5)); }});
    m.push_back({1, 0.4, [](Builder& b) { open_drain(b, b.rng().bernoulli(0.5)); }});
  }
  if (task != Task::kRcFilter) {
    m.push_back({2, 0.4, [](Builder& b) { reset_line(b, true); }});
  }
  if (task == Task::kRcFilter) {
    // Lines that look like resets without the reset pin.
    m.push_back({2, 0.6, [](Builder& b) { button(b, "GPIO", "BTN"); }});
  }
  if (task != Task::kDecouplingCaps) {
    m.push_back({2, 0.4, [](Builder& b) { button(b, "EN", "EN"); }});
  }
  return m;
}

// Labeled structures of the task (decoupling has none beyond its ICs).
void place_target(Builder& b) {
  const GenConfig& c = b.config();
  switch (c.task) {
    case Task::kPullUpDown:
      if (b.rng().bernoulli(c.gate_share)) {
        fet_switch(b, false, true);
      } else if (b.rng().bernoulli(0.25)) {
        i2c(b, false);
      } else {
        open_drain(b, false);
      }
      return;
    case Task::kRcFilter:
      reset_line(b, true);
      return;
    case Task::kDecouplingCaps:
      return;
  }
}

void place_decoy(Builder& b) {
  const GenConfig& c = b.config();
  Rng& rng = b.rng();
  switch (c.task) {
    case Task::kPullUpDown: {
      const double u = rng.uniform();
      if (u < c.gate_share) {
        fet_switch(b, true, false);
      } else if (u < c.gate_share + 0.15) {
        i2c(b, true);
      } else if (u < c.gate_share + 0.55) {
        open_drain(b, true);
      } else {
        open_drain_to_header(b);
      }
      return;
    }
    case Task::kRcFilter:
      if (rng.bernoulli(0.5)) {
        button(b, "GPIO", "BTN");
      } else {
        button(b, "EN", "EN");
      }
      return;
    case Task::kDecouplingCaps:
      return;
  }
}

std::int64_t draw_node_count(const GenConfig& c, Rng& rng) {
  const double mu = std::log(c.node_mean) - 0.5 * c.node_sigma * c.node_sigma;
  const double x = rng.lognormal(mu, c.node_sigma);
  const double clipped = std::clamp(x, static_cast<double>(c.min_nodes),
                                    static_cast<double>(c.max_nodes));
  return static_cast<std::int64_t>(std::llround(clipped));
}

Schematic build_once(const GenConfig& c, std::size_t index,
                     std::int64_t shrink) {
  Rng rng = Rng::derive(c.seed, index);
  const std::int64_t target = std::max<std::int64_t>(
      draw_node_count(c, rng) - shrink, static_cast<std::int64_t>(c.min_nodes));
  Builder b(c, rng, target);
  b.rails();
  const bool decoupling = c.task == Task::kDecouplingCaps;
  const double n = static_cast<double>(target);
  const std::int64_t ics =
      decoupling ? 1 + poisson(rng, c.ic_rate * n)
                 : 1 + poisson(rng, n / 60.0);
  for (std::int64_t i = 0; i < ics && (i == 0 || b.remaining() > 4); ++i) {
    b.new_ic();
  }

  if (!decoupling) {
    const std::int64_t targets =
        std::max<std::int64_t>(1, poisson(rng, c.target_rate * n));
    const std::int64_t decoys = poisson(rng, c.decoy_rate * n);
    std::vector<bool> order(static_cast<std::size_t>(targets), true);
    order.resize(static_cast<std::size_t>(targets + decoys), false);
    rng.shuffle(order);
    // The first target is placed regardless of budget.
    bool first = true;
    for (bool is_target : order) {
      if (!(is_target && first) && b.remaining() < 3) continue;
      if (is_target) {
        place_target(b);
        first = false;
      } else {
        place_decoy(b);
      }
    }
    if (first) place_target(b);
  }

  const std::vector<Module> pool = fillers(c.task, b.supplies().size() > 1);
  while (b.remaining() > 0) {
    double total = 0.0;
    for (const Module& m : pool) {
      if (m.cost <= b.remaining()) total += m.weight;
    }
    double u = rng.uniform() * total;
    for (const Module& m : pool) {
      if (m.cost > b.remaining()) continue;
      u -= m.weight;
      if (u < 0.0) {
        m.build(b);
        break;
      }
    }
  }

  Schematic s = std::move(b.schematic());
  char name[64];
  std::snprintf(name, sizeof name, "%s-%llu-%06zu",
                std::string(task_name(c.task)).c_str(),
                static_cast<unsigned long long>(c.seed), index);
  s.name = name;
  TaskAnnotations a;
  a.task = c.task;
  a.pair_labels = derive_labels(s, c.task);
  a.node_labels = derive_node_labels(s, a.pair_labels, c.task);
  s.annotations = std::move(a);
  return s;
}

// Modules may overshoot the node target by a few nodes; near max_nodes the
// item is rebuilt from the same stream with a smaller target.
Schematic build_one(const GenConfig& c, std::size_t index) {
  std::int64_t shrink = 0;
  for (;;) {
    Schematic s = build_once(c, index, shrink);
    const auto n = static_cast<std::int64_t>(s.nets.size() + s.symbols.size());
    const auto max = static_cast<std::int64_t>(c.max_nodes);
    if (n <= max) return s;
    shrink += n - max;
  }
}

template <typename T>
void read_field(const Json& j, const char* key, T& field) {
  if (j.contains(key)) field = j.at(key).get<T>();
}

}  // namespace

GenConfig default_gen_config(Task task) {
  GenConfig c;
  c.task = task;
  switch (task) {
    case Task::kPullUpDown:
      c.node_mean = 122.6;
      c.min_nodes = 7;
      c.max_nodes = 702;
      c.target_rate = 0.016;
      c.decoy_rate = 0.016;
      break;
    case Task::kRcFilter:
      c.node_mean = 123.5;
      c.min_nodes = 7;
      c.max_nodes = 637;
      c.target_rate = 0.0032;
      c.decoy_rate = 0.015;
      break;
    case Task::kDecouplingCaps:
      c.node_mean = 100.1;
      c.min_nodes = 6;
      c.max_nodes = 500;
      c.name_noise = 0.5;
      c.target_rate = 0.0;
      c.decoy_rate = 0.0;
      c.ic_rate = 0.006;
      c.second_supply = 0.7;
      c.analog_ground = 0.35;
      break;
  }
  return c;
}

std::size_t min_structure_nodes(Task task) {
  // Supply and ground, then: two ICs and the open-drain net; one IC and its
  // reset net; one IC.
  switch (task) {
    case Task::kPullUpDown:
      return 5;
    case Task::kRcFilter:
      return 4;
    case Task::kDecouplingCaps:
      return 3;
  }
  return 0;
}

void validate_gen_config(const GenConfig& c) {
  auto fail = [](const std::string& m) { throw GenError("GenConfig: " + m); };
  if (c.count < 1) fail("count must be at least 1");
  if (!(c.node_mean > 0.0) || !std::isfinite(c.node_mean)) {
    fail("node_mean must be positive");
  }
  if (!(c.node_sigma >= 0.0) || !std::isfinite(c.node_sigma)) {
    fail("node_sigma must be non-negative");
  }
  if (c.min_nodes > c.max_nodes) fail("min_nodes exceeds max_nodes");
  if (c.min_nodes < min_structure_nodes(c.task)) {
    fail("min_nodes " + std::to_string(c.min_nodes) + " is below the " +
         std::to_string(min_structure_nodes(c.task)) + " nodes a " +
         std::string(task_name(c.task)) + " schematic needs");
  }
  auto unit = [&](double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) fail(std::string(what) + " must lie in [0, 1]");
  };
  unit(c.name_noise, "name_noise");
  unit(c.second_supply, "second_supply");
  unit(c.analog_ground, "analog_ground");
  unit(c.gate_share, "gate_share");
  unit(c.reset_button, "reset_button");
  for (double r : {c.target_rate, c.decoy_rate, c.ic_rate}) {
    if (!(r >= 0.0 && r <= 1.0)) fail("rates must lie in [0, 1]");
  }
}

GenConfig gen_config_from_json(const Json& j) {
  if (!j.is_object()) throw GenError("generator config must be an object");
  static const std::set<std::string> kKeys = {
      "task",          "count",       "seed",         "node_mean",
      "node_sigma",    "min_nodes",   "max_nodes",    "name_noise",
      "second_supply", "analog_ground", "target_rate", "decoy_rate",
      "gate_share",    "reset_button", "ic_rate"};
  for (const auto& [key, value] : j.items()) {
    if (!kKeys.contains(key)) throw GenError("unknown config key \"" + key + "\"");
  }
  if (!j.contains("task")) throw GenError("generator config needs \"task\"");
  GenConfig c;
  try {
    c = default_gen_config(parse_task(j.at("task").get<std::string>()));
    read_field(j, "count", c.count);
    read_field(j, "seed", c.seed);
    read_field(j, "node_mean", c.node_mean);
    read_field(j, "node_sigma", c.node_sigma);
    read_field(j, "min_nodes", c.min_nodes);
    read_field(j, "max_nodes", c.max_nodes);
    read_field(j, "name_noise", c.name_noise);
    read_field(j, "second_supply", c.second_supply);
    read_field(j, "analog_ground", c.analog_ground);
    read_field(j, "target_rate", c.target_rate);
    read_field(j, "decoy_rate", c.decoy_rate);
    read_field(j, "gate_share", c.gate_share);
    read_field(j, "reset_button", c.reset_button);
    read_field(j, "ic_rate", c.ic_rate);
  } catch (const nlohmann::json::exception& e) {
    throw GenError(std::string("generator config: ") + e.what());
  }
  validate_gen_config(c);
  return c;
}

GenConfig load_gen_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw GenError("cannot open generator config " + path.string());
  try {
    return gen_config_from_json(Json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw GenError(path.string() + ": " + e.what());
  }
}

Json gen_config_to_json(const GenConfig& c) {
  Json j;
  j["task"] = std::string(task_name(c.task));
  j["count"] = c.count;
  j["seed"] = c.seed;
  j["node_mean"] = c.node_mean;
  j["node_sigma"] = c.node_sigma;
  j["min_nodes"] = c.min_nodes;
  j["max_nodes"] = c.max_nodes;
  j["name_noise"] = c.name_noise;
  j["second_supply"] = c.second_supply;
  j["analog_ground"] = c.analog_ground;
  j["target_rate"] = c.target_rate;
  j["decoy_rate"] = c.decoy_rate;
  j["gate_share"] = c.gate_share;
  j["reset_button"] = c.reset_button;
  j["ic_rate"] = c.ic_rate;
  return j;
}

Schematic generate_one(const GenConfig& config, std::size_t index) {
  validate_gen_config(config);
  return build_one(config, index);
}

std::vector<Schematic> generate(const GenConfig& config) {
  validate_gen_config(config);
  std::vector<Schematic> out;
  out.reserve(config.count);
  for (std::size_t i = 0; i < config.count; ++i) {
    out.push_back(build_one(config, i));
  }
  return out;
}

std::vector<PairLabel> derive_labels(const Schematic& s, Task task) {
  const NetlistView v(s);
  LabelMap m;
  switch (task) {
    case Task::kPullUpDown:
      pull_up_rules(v, m);
      break;
    case Task::kRcFilter:
      rc_rules(v, m);
      break;
    case Task::kDecouplingCaps:
      decoupling_rules(v, m);
      break;
  }
  std::vector<PairLabel> out;
  out.reserve(m.size());
  for (const auto& [key, label] : m) {
    out.push_back(PairLabel{key.first, key.second, label});
  }
  return out;
}

LabelReport validate_labels(const Schematic& s) {
  if (!s.annotations) {
    throw std::invalid_argument("validate_labels: schematic " + s.name +
                                " has no annotations");
  }
  const Task task = s.annotations->task;
  const NetlistView v(s);
  auto pair_text = [&](std::int64_t a, std::int64_t b) {
    auto name = [&](std::int64_t id) {
      auto it = v.net_name.find(id);
      return it == v.net_name.end() ? "#" + std::to_string(id) : it->second;
    };
    return "(" + name(a) + ", " + name(b) + ")";
  };
  LabelMap expected, actual;
  for (const PairLabel& p : derive_labels(s, task)) {
    expected[{p.net_a, p.net_b}] = p.label;
  }
  for (const PairLabel& p : s.annotations->pair_labels) {
    if (p.label == 0) continue;
    actual[{std::min(p.net_a, p.net_b), std::max(p.net_a, p.net_b)}] = p.label;
  }
  LabelReport r;
  for (const auto& [key, label] : expected) {
    auto it = actual.find(key);
    if (it == actual.end()) {
      r.issues.push_back("missing label " + std::to_string(label) + " on " +
                         pair_text(key.first, key.second));
    } else if (it->second != label) {
      r.issues.push_back("label " + std::to_string(it->second) + " on " +
                         pair_text(key.first, key.second) + ", rules give " +
                         std::to_string(label));
    }
  }
  for (const auto& [key, label] : actual) {
    if (!expected.contains(key)) {
      r.issues.push_back("unexpected label " + std::to_string(label) + " on " +
                         pair_text(key.first, key.second));
    }
  }
  std::map<std::int64_t, int> node_expected;
  for (const NodeLabel& n :
       derive_node_labels(s, s.annotations->pair_labels, task)) {
    node_expected[n.net_id] = n.label;
  }
  for (const NodeLabel& n : s.annotations->node_labels) {
    auto it = node_expected.find(n.net_id);
    if (it != node_expected.end() && it->second != n.label) {
      r.issues.push_back("node label " + std::to_string(n.label) + " on " +
                         v.net_name.at(n.net_id) + " disagrees with its pairs");
    }
  }
  return r;
}

}  // namespace pcbgnn
