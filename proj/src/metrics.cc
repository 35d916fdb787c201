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

#include "pcbgnn/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pcbgnn {
namespace {

// Scores and labels of every unordered net pair of one graph.
struct PairTable {
  std::vector<double> scores;  // rows x channels
  std::vector<int> labels;     // binary, or class index for rc_filter
  std::vector<std::int64_t> raw_labels;
  std::vector<double> counts;  // decoupling count channel
};

void collect(const PairPrediction& p, const PcbGraph& g, PairTable& t) {
  if (p.num_nets != g.num_nets) {
    throw std::invalid_argument("prediction does not match graph " + g.name);
  }
  if (!g.task || *g.task != p.task) {
    throw std::invalid_argument("graph " + g.name +
                                " is not labeled for the predicted task");
  }
  for (std::size_t a = 0; a < p.num_nets; ++a) {
    for (std::size_t b = a + 1; b < p.num_nets; ++b) {
      const std::int64_t y = g.pair_label(a, b);
      t.raw_labels.push_back(y);
      if (p.task == Task::kRcFilter) {
        for (std::size_t c = 0; c < p.channels; ++c) {
          t.scores.push_back(p.score(a, b, c));
        }
        t.labels.push_back(static_cast<int>(y));
      } else {
        t.scores.push_back(p.score(a, b, 0));
        t.labels.push_back(label_is_positive(p.task, y) ? 1 : 0);
      }
      if (p.task == Task::kDecouplingCaps) t.counts.push_back(p.score(a, b, 1));
    }
  }
}

std::optional<double> table_metric(Task task, const PairTable& t) {
  if (task == Task::kRcFilter) {
    return macro_auprc(t.scores, t.labels, kNumRcClasses);
  }
  return auprc(t.scores, t.labels);
}

}  // namespace

std::optional<double> auprc(std::span<const double> scores,
                            std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw std::invalid_argument("auprc: scores and labels differ in length");
  }
  std::size_t positives = 0;
  for (int y : labels) positives += y != 0;
  if (positives == 0) return std::nullopt;
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  double ap = 0.0;
  std::size_t tp = 0, seen = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i, group_tp = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      group_tp += labels[order[j]] != 0;
      ++j;
    }
    tp += group_tp;
    seen += j - i;
    if (group_tp > 0) {
      ap += static_cast<double>(group_tp) / static_cast<double>(positives) *
            static_cast<double>(tp) / static_cast<double>(seen);
    }
    i = j;
  }
  return ap;
}

std::optional<double> macro_auprc(std::span<const double> probs,
                                  std::span<const int> labels,
                                  std::size_t classes) {
  if (classes == 0 || probs.size() != labels.size() * classes) {
    throw std::invalid_argument("macro_auprc: shape mismatch");
  }
  double total = 0.0;
  std::size_t defined = 0;
  std::vector<double> column(labels.size());
  std::vector<int> is_class(labels.size());
  for (std::size_t c = 0; c < classes; ++c) {
    for (std::size_t i = 0; i < labels.size(); ++i) {
      column[i] = probs[i * classes + c];
      is_class[i] = labels[i] == static_cast<int>(c);
    }
    if (auto v = auprc(column, is_class)) {
      total += *v;
      ++defined;
    }
  }
  if (defined == 0) return std::nullopt;
  return total / static_cast<double>(defined);
}

RegressionReport regression_eval(std::span<const double> predictions,
                                 std::span<const std::int64_t> labels,
                                 int max_error) {
  if (predictions.size() != labels.size()) {
    throw std::invalid_argument("regression_eval: length mismatch");
  }
  if (max_error < 0) throw std::invalid_argument("regression_eval: T < 0");
  RegressionReport r;
  r.cdf.assign(static_cast<std::size_t>(max_error) + 1, 0.0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == 0) continue;
    ++r.count;
    // nearbyint honours the default rounding mode: ties go to even.
    const double err = std::abs(std::nearbyint(predictions[i]) -
                                static_cast<double>(labels[i]));
    for (int t = 0; t <= max_error; ++t) {
      if (err <= t) r.cdf[static_cast<std::size_t>(t)] += 1.0;
    }
  }
  if (r.count == 0) {
    throw std::invalid_argument("regression_eval: no non-zero labels");
  }
  for (double& c : r.cdf) c /= static_cast<double>(r.count);
  r.auc = std::accumulate(r.cdf.begin(), r.cdf.end(), 0.0) /
          static_cast<double>(r.cdf.size());
  return r;
}

std::optional<double> task_metric(std::span<const PairPrediction> predictions,
                                  std::span<const PcbGraph* const> graphs,
                                  Aggregation aggregation) {
  if (predictions.empty()) {
    throw std::invalid_argument("task_metric: empty evaluation set");
  }
  if (predictions.size() != graphs.size()) {
    throw std::invalid_argument("task_metric: predictions and graphs differ");
  }
  const Task task = predictions.front().task;
  if (aggregation == Aggregation::kPooled) {
    PairTable all;
    for (std::size_t i = 0; i < graphs.size(); ++i) {
      collect(predictions[i], *graphs[i], all);
    }
    return table_metric(task, all);
  }
  double total = 0.0;
  std::size_t defined = 0;
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    PairTable one;
    collect(predictions[i], *graphs[i], one);
    if (auto v = table_metric(task, one)) {
      total += *v;
      ++defined;
    }
  }
  if (defined == 0) return std::nullopt;
  return total / static_cast<double>(defined);
}

RegressionReport decoupling_regression(
    std::span<const PairPrediction> predictions,
    std::span<const PcbGraph* const> graphs, int max_error) {
  PairTable all;
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    if (predictions[i].task != Task::kDecouplingCaps) {
      throw std::invalid_argument("regression needs decoupling predictions");
    }
    collect(predictions[i], *graphs[i], all);
  }
  return regression_eval(all.counts, all.raw_labels, max_error);
}

std::optional<double> order_correlation(
    std::span<const PairPrediction> predictions) {
  std::vector<double> upper, lower;
  for (const PairPrediction& p : predictions) {
    const bool rc = p.task == Task::kRcFilter;
    for (std::size_t a = 0; a < p.num_nets; ++a) {
      for (std::size_t b = a + 1; b < p.num_nets; ++b) {
        if (!p.evaluated(a, b)) continue;
        upper.push_back(rc ? 1.0 - p.raw_score(a, b, 0) : p.raw_score(a, b, 0));
        lower.push_back(rc ? 1.0 - p.raw_score(b, a, 0) : p.raw_score(b, a, 0));
      }
    }
  }
  const std::size_t n = upper.size();
  if (n < 2) return std::nullopt;
  const double mu = std::accumulate(upper.begin(), upper.end(), 0.0) / n;
  const double ml = std::accumulate(lower.begin(), lower.end(), 0.0) / n;
  double cov = 0, vu = 0, vl = 0;
  for (std::size_t i = 0; i < n; ++i) {
    cov += (upper[i] - mu) * (lower[i] - ml);
    vu += (upper[i] - mu) * (upper[i] - mu);
    vl += (lower[i] - ml) * (lower[i] - ml);
  }
  if (vu == 0 || vl == 0) return std::nullopt;
  return cov / std::sqrt(vu * vl);
}

}  // namespace pcbgnn
