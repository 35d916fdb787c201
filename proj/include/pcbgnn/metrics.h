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

// Ranking and regression metrics for pair predictions.

#ifndef PCBGNN_METRICS_H_
#define PCBGNN_METRICS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pcbgnn/graph.h"
#include "pcbgnn/pair_model.h"
#include "pcbgnn/task.h"

namespace pcbgnn {

// Step-wise average precision: sum over distinct score thresholds (highest
// first) of precision at the threshold times the recall gained there. Equal
// scores form one group. Empty when there are no positive labels.
std::optional<double> auprc(std::span<const double> scores,
                            std::span<const int> labels);

// Unweighted mean over classes of the one-vs-rest AUPRC of column c of
// `probs` (row-major, rows x classes). Classes without positives are left
// out; empty when no class has a positive.
std::optional<double> macro_auprc(std::span<const double> probs,
                                  std::span<const int> labels,
                                  std::size_t classes);

struct RegressionReport {
  std::size_t count = 0;       // pairs with a non-zero count label
  std::vector<double> cdf;     // cdf[t] = share with |round(pred) - y| <= t
  double auc = 0;              // mean of cdf[0..T]
};

// Absolute errors of round-half-to-even predictions, over non-zero labels.
// Throws std::invalid_argument when no label is non-zero.
RegressionReport regression_eval(std::span<const double> predictions,
                                 std::span<const std::int64_t> labels,
                                 int max_error = 4);

enum class Aggregation { kPooled, kPerGraphMean };

// Task metric over all unordered net pairs of the given graphs:
// AUPRC of the pair probability (pull_up_down) or of z (decoupling_caps),
// macro-AUPRC of the class distribution (rc_filter). Pooled builds one
// curve over every graph; per-graph-mean averages the graphs where the
// metric is defined. Throws std::invalid_argument on an empty set.
std::optional<double> task_metric(std::span<const PairPrediction> predictions,
                                  std::span<const PcbGraph* const> graphs,
                                  Aggregation aggregation = Aggregation::kPooled);

// Count predictions against labels over all net pairs with a non-zero count.
RegressionReport decoupling_regression(
    std::span<const PairPrediction> predictions,
    std::span<const PcbGraph* const> graphs, int max_error = 4);

// Pearson correlation between raw(a, b) and raw(b, a) over evaluated pairs
// a < b, using the ranking channel (empty with fewer than two pairs or zero
// variance).
std::optional<double> order_correlation(
    std::span<const PairPrediction> predictions);

}  // namespace pcbgnn

#endif  // PCBGNN_METRICS_H_
