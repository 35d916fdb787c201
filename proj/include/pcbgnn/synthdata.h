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

// Rule-based generator of labeled draft schematics.
//
// A schematic is assembled from small circuit modules (ICs on supply rails,
// signal links, LEDs, connectors, MOSFET switches, reset lines...) until it
// reaches a node count drawn from a clipped lognormal. Labels are never
// tracked while building: they are derived afterwards from the finished
// netlist by derive_labels(), the same function validate_labels() checks
// against.
//
// Labeling rules, by pin and symbol names:
//   pull_up_down     a non-rail net with an open-drain pin (OD_OUT, INT, SDA,
//                    SCL) of one IC, a digital input (IN, GPIOk, EN, SDA,
//                    SCL) of another, no push-pull OUT pin and no resistor to
//                    a supply gets (net, supply of the lowest-id open-drain
//                    IC). A net on a MOSFET gate (Qk pin G) that is driven by
//                    an IC and has no resistor to a ground gets (net, the
//                    MOSFET's source net).
//   rc_filter        every IC reset pin (RST, nRESET) on net X gets
//                    resistor on (IC supply, X) and capacitor on (X, IC ground).
//   decoupling_caps  every IC adds its number of supply pins (capped at 4) to
//                    the count of (IC supply, IC ground).
// An IC is a symbol with a VDD or VCC pin on a supply net; trailing digits of
// pin names are ignored when matching.

#ifndef PCBGNN_SYNTHDATA_H_
#define PCBGNN_SYNTHDATA_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "pcbgnn/netlist.h"
#include "pcbgnn/task.h"

namespace pcbgnn {

inline const std::vector<std::string> kSupplyNames = {"+5V", "+3V3", "VCC",
                                                      "VDD"};
inline const std::vector<std::string> kGroundNames = {"GND", "AGND"};

struct GenConfig {
  Task task = Task::kPullUpDown;
  std::size_t count = 500;
  std::uint64_t seed = 42;

  // Node count ~ lognormal with this mean before clipping.
  double node_mean = 122.6;
  double node_sigma = 0.75;
  std::size_t min_nodes = 7;
  std::size_t max_nodes = 702;

  // Probability that a signal net is called "N$k" instead of a descriptive
  // name. Supply and ground nets always keep their names.
  double name_noise = 0.6;
  double second_supply = 0.35;
  double analog_ground = 0.2;

  // Expected labeled structures per node (open-drain nets and gates for
  // pull-ups, reset lines for RC filters). At least one is always placed.
  double target_rate = 0.02;
  // Expected look-alike structures that need no label, per node.
  double decoy_rate = 0.02;
  // pull_up_down: share of labeled structures that are MOSFET gates.
  double gate_share = 0.25;
  // rc_filter: probability a reset line also goes to a push button.
  double reset_button = 0.5;
  // decoupling_caps: expected ICs per node beyond the first.
  double ic_rate = 0.006;
};

class GenError : public std::invalid_argument {
 public:
  explicit GenError(const std::string& what) : std::invalid_argument(what) {}
};

// Defaults calibrated so that the corpus statistics land near the published
// dataset statistics of each task.
GenConfig default_gen_config(Task task);
void validate_gen_config(const GenConfig& config);

// Keys are the GenConfig field names; "task" selects the defaults that the
// other keys override. Unknown keys are rejected.
GenConfig gen_config_from_json(const nlohmann::ordered_json& j);
GenConfig load_gen_config(const std::filesystem::path& path);
nlohmann::ordered_json gen_config_to_json(const GenConfig& config);

// Smallest node count the task's mandatory structure needs.
std::size_t min_structure_nodes(Task task);

std::vector<Schematic> generate(const GenConfig& config);
// Item `index` of generate(config); items are independent.
Schematic generate_one(const GenConfig& config, std::size_t index);

// Pair labels the rules assign to `s`, sorted by (net_a, net_b).
std::vector<PairLabel> derive_labels(const Schematic& s, Task task);

struct LabelReport {
  std::vector<std::string> issues;
  bool ok() const { return issues.empty(); }
};

// Compares the annotations of `s` with the rules. Throws
// std::invalid_argument when `s` carries no annotations.
LabelReport validate_labels(const Schematic& s);

}  // namespace pcbgnn

#endif  // PCBGNN_SYNTHDATA_H_
