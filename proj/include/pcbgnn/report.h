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

// Plot-ready CSV tables: evaluation reports, threshold sweeps, error CDFs,
// dataset statistics, similarity matrices and ranked insertion suggestions.
// Numbers are printed with fixed precision so that reruns produce identical
// files.

#ifndef PCBGNN_REPORT_H_
#define PCBGNN_REPORT_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pcbgnn/graph.h"
#include "pcbgnn/metrics.h"
#include "pcbgnn/pair_model.h"
#include "pcbgnn/training.h"

namespace pcbgnn {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_string() const;
  void write(const std::filesystem::path& path) const;
};

// Six decimals, "nan"/"inf" spelled out; empty for an absent value.
std::string csv_number(double x);
std::string csv_number(const std::optional<double>& x);

// "auprc", "macro_auprc" or "auprc_z".
std::string_view metric_name(Task task);

// Mean and sample standard deviation (0 for a single value).
struct MeanStd {
  double mean = 0;
  double std = 0;
  std::size_t n = 0;
};
std::optional<MeanStd> mean_std(std::span<const std::optional<double>> values);

struct FoldResult {
  std::size_t fold = 0;
  ModelSpec spec;
  double learning_rate = 0;
  std::size_t best_epoch = 0;
  Evaluation evaluation;
};

// Columns fold, backbone, layers, hidden, heads, theta, lr, alpha, best_epoch,
// metric, value. One row per fold and metric (the task metric, the
// upper/lower triangle correlation and, for decoupling, the error-CDF AUC),
// then "mean" and "std" rows per metric.
CsvTable eval_report_table(std::span<const FoldResult> folds);

// Columns theta, metric_mean, metric_std, folds, evaluated_pairs; one sweep
// per fold, all over the same thresholds.
CsvTable sweep_table(std::span<const std::vector<SweepPoint>> per_fold);

// Columns max_error, cdf_mean, cdf_std for t = 0..T, then a row "auc".
CsvTable cdf_table(std::span<const RegressionReport> per_fold);

// The six columns of the dataset statistics table; the last cell reads
// "2.80 (2.28%)".
CsvTable stats_table(const StatsReport& r);

CsvTable similarity_table(const std::vector<std::string>& names,
                          const Tensor& similarity);

struct Suggestion {
  std::string net_a;  // net_a < net_b
  std::string net_b;
  std::string output;  // "resistor", "capacitor", or a capacitor count
  double score = 0;
};

// Evaluated pairs with positive_score >= min_score, descending by score,
// ties broken by (net_a, net_b). Pull-up pairs read "resistor"; RC pairs the
// more likely of resistor and capacitor; decoupling pairs the rounded count
// (at least 1).
std::vector<Suggestion> suggest_insertions(const PairPrediction& p,
                                           const PcbGraph& g,
                                           double min_score);
CsvTable suggestions_table(std::span<const Suggestion> s);

}  // namespace pcbgnn

#endif  // PCBGNN_REPORT_H_
