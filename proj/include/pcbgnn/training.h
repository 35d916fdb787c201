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

// Training protocol: graph-level splits, mini-batch AdamW with early
// stopping on the validation task metric, and evaluation helpers.

#ifndef PCBGNN_TRAINING_H_
#define PCBGNN_TRAINING_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pcbgnn/checkpoint.h"
#include "pcbgnn/metrics.h"
#include "pcbgnn/pair_model.h"

namespace pcbgnn {

struct TrainConfig {
  double learning_rate = 1e-3;
  double weight_decay = 0.01;
  std::size_t batch_size = 128;
  std::size_t patience = 20;
  std::size_t max_epochs = 500;
  std::uint64_t seed = 0;
  double train_ratio = 0.8;
  double val_ratio = 0.1;
  double test_ratio = 0.1;
  std::size_t folds = 9;
  Aggregation aggregation = Aggregation::kPooled;
};

// Throws std::invalid_argument (non-positive lr, zero batch/patience/epochs/
// folds, ratios not positive or not summing to 1).
void validate_train_config(const TrainConfig& c);

// {"learning_rate", "weight_decay", "batch_size", "patience", "max_epochs",
//  "seed", "train_ratio", "val_ratio", "test_ratio", "folds", "aggregation"};
// aggregation is "pooled" or "per_graph_mean". Missing keys keep defaults,
// unknown keys are an error.
nlohmann::ordered_json train_config_to_json(const TrainConfig& c);
TrainConfig train_config_from_json(const nlohmann::ordered_json& j);

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
  std::vector<std::size_t> test;
};

// One split per fold over a seeded permutation of the graphs. Test and
// validation sizes are round(ratio * n); fold f tests on slice f of the
// permutation (so test sets never overlap) and validates on the slice after
// it, wrapping around.
std::vector<Split> split_dataset(std::size_t num_graphs, const TrainConfig& c);

class TrainingError : public std::runtime_error {
 public:
  explicit TrainingError(const std::string& what) : std::runtime_error(what) {}
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0;  // mean over training graphs
  double val_loss = 0;
  std::optional<double> val_metric;
};

struct TrainResult {
  Checkpoint checkpoint;  // parameters of the best epoch
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
  std::optional<double> best_val_metric;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Epochs shuffle the training graphs and step once per batch on the loss
// averaged over the batch's graphs. Model selection uses the validation
// metric, or the validation loss when the validation split has no positive
// pair. Throws TrainingError on a non-finite loss or a task mismatch.
TrainResult train(const ModelSpec& spec, const TrainConfig& config,
                  std::span<const Sample* const> train_set,
                  std::span<const Sample* const> val_set,
                  const EpochCallback& on_epoch = nullptr);

struct Evaluation {
  std::optional<double> metric;
  double loss = 0;  // mean composite loss
  std::optional<RegressionReport> regression;  // decoupling_caps only
  std::optional<double> order_correlation;
};

Evaluation evaluate(const PairModel& model,
                    std::span<const Sample* const> samples,
                    Aggregation aggregation = Aggregation::kPooled);

struct SweepPoint {
  double theta = 0;
  std::optional<double> metric;
  std::size_t evaluated_pairs = 0;
};

// Task metric of `model` with its threshold replaced by each value.
std::vector<SweepPoint> theta_sweep(const PairModel& model,
                                    std::span<const Sample* const> samples,
                                    std::span<const double> thetas,
                                    Aggregation aggregation = Aggregation::kPooled);

// 0.0, 0.1, ..., 0.7.
std::vector<double> theta_grid();

// Samples picked out by index.
std::vector<const Sample*> select(std::span<const Sample> all,
                                  std::span<const std::size_t> indices);

}  // namespace pcbgnn

#endif  // PCBGNN_TRAINING_H_
