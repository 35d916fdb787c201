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

#ifndef PCBGNN_TESTS_FIXTURES_H_
#define PCBGNN_TESTS_FIXTURES_H_

#include <filesystem>
#include <string>

#include "pcbgnn/netlist.h"

namespace pcbgnn::testing {

// Two supply nets, two decoupling caps and an IC with two ground pins:
//
//   +5V ---+--------+--------+ VCC
//          C17      C18      IC1
//   GND ---+--------+--------+ GND, GND2
inline Schematic fig1_circuit() {
  Schematic s;
  s.name = "fig1";
  s.nets = {{1, "GND"}, {2, "+5V"}};
  s.symbols = {{10, "C17"}, {11, "C18"}, {12, "IC1"}};
  s.pins = {{10, 2, "1"},   {10, 1, "2"},   {11, 2, "1"},    {11, 1, "2"},
            {12, 2, "VCC"}, {12, 1, "GND"}, {12, 1, "GND2"}};
  return s;
}

// Three nets and three symbols with labels for `task`.
inline Schematic small_labeled(Task task) {
  Schematic s;
  s.name = "small";
  s.nets = {{1, "GND"}, {2, "+5V"}, {3, "N$1"}};
  s.symbols = {{10, "IC1"}, {11, "Q1"}, {12, "C1"}};
  s.pins = {{10, 1, "GND"}, {10, 2, "VCC"}, {10, 3, "INT"}, {11, 3, "G"},
            {11, 1, "S"},   {12, 2, "1"},   {12, 1, "2"}};
  TaskAnnotations a;
  a.task = task;
  switch (task) {
    case Task::kPullUpDown:
      a.pair_labels = {{2, 3, 1}};
      break;
    case Task::kRcFilter:
      a.pair_labels = {{1, 3, static_cast<std::int64_t>(RcClass::kCapacitor)},
                       {2, 3, static_cast<std::int64_t>(RcClass::kResistor)}};
      break;
    case Task::kDecouplingCaps:
      a.pair_labels = {{1, 2, 2}};
      break;
  }
  a.node_labels = derive_node_labels(s, a.pair_labels, task);
  s.annotations = a;
  return s;
}

inline std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("pcbgnn_test_" + name);
}

}  // namespace pcbgnn::testing

#endif  // PCBGNN_TESTS_FIXTURES_H_
