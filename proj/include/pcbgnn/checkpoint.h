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

// Checkpoint files: a JSON document
//   {"format_version": 1,
//    "model_spec": {...},
//    "parameters": {name: {"shape": [rows, cols], "values": [...]}},
//    "training_state": {"step": n, "m": {name: [...]}, "v": {name: [...]}},
//    ...}
// "training_state" is optional. Further top-level keys (training config,
// embedder identity, recorded metrics) are carried in `metadata`. Doubles are
// written in shortest round-trip form, so reloading is bit-exact.

#ifndef PCBGNN_CHECKPOINT_H_
#define PCBGNN_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "pcbgnn/optim.h"
#include "pcbgnn/pair_model.h"

namespace pcbgnn {

inline constexpr int kCheckpointFormatVersion = 1;

struct TrainingState {
  std::int64_t step = 0;
  std::vector<Tensor> m;
  std::vector<Tensor> v;
};

struct Checkpoint {
  ModelSpec spec;
  std::vector<Parameter> parameters;
  std::optional<TrainingState> training_state;
  nlohmann::ordered_json metadata = nlohmann::ordered_json::object();
};

class CheckpointError : public std::runtime_error {
 public:
  explicit CheckpointError(const std::string& what)
      : std::runtime_error(what) {}
};

nlohmann::ordered_json model_spec_to_json(const ModelSpec& spec);
ModelSpec model_spec_from_json(const nlohmann::ordered_json& j);

Checkpoint make_checkpoint(const PairModel& model);
// Rebuilds the model; parameter names and shapes must match the spec.
PairModel restore_model(const Checkpoint& c);

void save_checkpoint(const Checkpoint& c, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace pcbgnn

#endif  // PCBGNN_CHECKPOINT_H_
