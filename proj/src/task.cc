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

#include "pcbgnn/task.h"

#include <stdexcept>

namespace pcbgnn {

std::string_view task_name(Task task) {
  switch (task) {
    case Task::kPullUpDown:
      return "pull_up_down";
    case Task::kRcFilter:
      return "rc_filter";
    case Task::kDecouplingCaps:
      return "decoupling_caps";
  }
  return "unknown";
}

Task parse_task(std::string_view name) {
  if (name == "pull_up_down") return Task::kPullUpDown;
  if (name == "rc_filter") return Task::kRcFilter;
  if (name == "decoupling_caps") return Task::kDecouplingCaps;
  throw std::invalid_argument("unknown task '" + std::string(name) + "'");
}

bool label_in_domain(Task task, std::int64_t label) {
  switch (task) {
    case Task::kPullUpDown:
      return label == 0 || label == 1;
    case Task::kRcFilter:
      return label >= 0 && label < kNumRcClasses;
    case Task::kDecouplingCaps:
      return label >= 0;
  }
  return false;
}

bool label_is_positive(Task task, std::int64_t label) {
  return task == Task::kDecouplingCaps ? label >= 1 : label != 0;
}

}  // namespace pcbgnn
