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

#ifndef PCBGNN_TASK_H_
#define PCBGNN_TASK_H_

#include <cstdint>
#include <string>
#include <string_view>

namespace pcbgnn {

enum class Task { kPullUpDown, kRcFilter, kDecouplingCaps };

// Pair classes of the RC filter task.
enum class RcClass : std::int64_t { kNone = 0, kResistor = 1, kCapacitor = 2 };
inline constexpr int kNumRcClasses = 3;

// "pull_up_down", "rc_filter", "decoupling_caps".
std::string_view task_name(Task task);
// Throws std::invalid_argument on unknown names.
Task parse_task(std::string_view name);

// A pair label is an integer whose domain depends on the task: {0, 1} for
// pull-ups, an RcClass value for RC filters, a capacitor count for decoupling.
bool label_in_domain(Task task, std::int64_t label);
bool label_is_positive(Task task, std::int64_t label);

}  // namespace pcbgnn

#endif  // PCBGNN_TASK_H_
