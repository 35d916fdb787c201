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

// Hyperparameter grid search over a subset of the published grid.
//
// Space file:
//   {"task": "pull_up_down",
//    "backbones": ["gcn", "gatv2"], "layers": [1, 3], "hidden": [32, 64],
//    "heads": [1, 4], "learning_rates": [0.001], "thetas": [0.0, 0.1],
//    "alpha": 0.1, "folds": [0]}
// "alpha" is required for decoupling_caps only and "folds" defaults to [0].
// The MLP-only backbone ignores layers and heads; non-attention backbones
// ignore heads.

#ifndef PCBGNN_GRID_H_
#define PCBGNN_GRID_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"
#include "pcbgnn/pair_model.h"
#include "pcbgnn/report.h"
#include "pcbgnn/training.h"

namespace pcbgnn {

struct SearchSpace {
  Task task = Task::kPullUpDown;
  std::vector<LayerKind> backbones;
  std::vector<std::size_t> layers;
  std::vector<std::size_t> hidden;
  std::vector<std::size_t> heads;
  std::vector<double> learning_rates;
  std::vector<double> thetas;
  std::optional<double> alpha;
  std::vector<std::size_t> folds = {0};
};

SearchSpace search_space_from_json(const nlohmann::ordered_json& j);
SearchSpace load_search_space(const std::filesystem::path& path);

// The learning rates of the published grid.
bool on_learning_rate_grid(double lr);

struct GridPoint {
  ModelSpec spec;
  double learning_rate = 0;
};

// Distinct configurations in space order (backbone, layers, hidden, heads,
// lr, theta). Throws std::invalid_argument for an empty space or any point
// off the published grid.
std::vector<GridPoint> expand(const SearchSpace& space);

struct GridTrial {
  GridPoint point;
  // Means over the searched folds.
  std::optional<double> val_metric;
  std::optional<double> test_metric;
  std::vector<FoldResult> folds;
};

struct GridResult {
  // Descending validation metric; undefined metrics last, then space order.
  std::vector<GridTrial> ranked;
};

GridResult grid_search(const SearchSpace& space, std::span<const Sample> data,
                       const TrainConfig& base,
                       const std::function<void(const GridTrial&)>& on_trial = nullptr);

// Best configuration per backbone, in backbone order: backbone, layers,
// hidden, heads, lr, theta, val_metric, test_metric.
CsvTable best_config_table(const GridResult& r);

}  // namespace pcbgnn

#endif  // PCBGNN_GRID_H_
