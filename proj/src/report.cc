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

#include "pcbgnn/report.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pcbgnn {
namespace {

std::string escape(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::vector<std::string> config_cells(const FoldResult& f) {
  return {std::to_string(f.fold),
          std::string(layer_kind_name(f.spec.backbone)),
          std::to_string(f.spec.num_layers),
          std::to_string(f.spec.hidden_dim),
          std::to_string(f.spec.heads),
          fixed(f.spec.theta, 1),
          csv_number(f.learning_rate),
          f.spec.alpha ? csv_number(*f.spec.alpha) : "",
          std::to_string(f.best_epoch)};
}

}  // namespace

std::string CsvTable::to_string() const {
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << escape(cells[i]);
    }
    out << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out.str();
}

void CsvTable::write(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_string();
  if (!out) throw std::runtime_error("error writing " + path.string());
}

std::string csv_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fixed(x, 6);
}

std::string csv_number(const std::optional<double>& x) {
  return x ? csv_number(*x) : "";
}

std::string_view metric_name(Task task) {
  switch (task) {
    case Task::kPullUpDown:
      return "auprc";
    case Task::kRcFilter:
      return "macro_auprc";
    case Task::kDecouplingCaps:
      return "auprc_z";
  }
  return "";
}

std::optional<MeanStd> mean_std(std::span<const std::optional<double>> values) {
  MeanStd r;
  double sum = 0.0;
  for (const auto& v : values) {
    if (!v) continue;
    sum += *v;
    ++r.n;
  }
  if (r.n == 0) return std::nullopt;
  r.mean = sum / static_cast<double>(r.n);
  if (r.n > 1) {
    double ss = 0.0;
    for (const auto& v : values) {
      if (v) ss += (*v - r.mean) * (*v - r.mean);
    }
    r.std = std::sqrt(ss / static_cast<double>(r.n - 1));
  }
  return r;
}

CsvTable eval_report_table(std::span<const FoldResult> folds) {
  CsvTable t;
  t.header = {"fold",  "backbone", "layers",     "hidden", "heads", "theta",
              "lr",    "alpha",    "best_epoch", "metric", "value"};
  if (folds.empty()) return t;
  const Task task = folds.front().spec.task;
  struct Column {
    std::string name;
    std::vector<std::optional<double>> values;
  };
  std::vector<Column> columns = {{std::string(metric_name(task)), {}},
                                 {"order_correlation", {}}};
  if (task == Task::kDecouplingCaps) {
    columns.push_back({"cdf_1", {}});
    columns.push_back({"cdf_auc", {}});
  }
  for (const FoldResult& f : folds) {
    const Evaluation& e = f.evaluation;
    columns[0].values.push_back(e.metric);
    columns[1].values.push_back(e.order_correlation);
    if (task == Task::kDecouplingCaps) {
      const bool has = e.regression && e.regression->cdf.size() > 1;
      columns[2].values.push_back(has ? std::optional(e.regression->cdf[1])
                                      : std::nullopt);
      columns[3].values.push_back(
          e.regression ? std::optional(e.regression->auc) : std::nullopt);
    }
    for (const Column& c : columns) {
      auto row = config_cells(f);
      row.push_back(c.name);
      row.push_back(csv_number(c.values.back()));
      t.rows.push_back(std::move(row));
    }
  }
  // Aggregates share the first fold's configuration cells.
  for (const char* which : {"mean", "std"}) {
    for (const Column& c : columns) {
      auto row = config_cells(folds.front());
      row[0] = which;
      row[8] = "";
      row.push_back(c.name);
      const auto ms = mean_std(c.values);
      row.push_back(!ms ? "" : csv_number(which[0] == 'm' ? ms->mean : ms->std));
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

CsvTable sweep_table(std::span<const std::vector<SweepPoint>> per_fold) {
  CsvTable t;
  t.header = {"theta", "metric_mean", "metric_std", "folds", "evaluated_pairs"};
  if (per_fold.empty()) return t;
  const std::size_t n = per_fold.front().size();
  for (const auto& f : per_fold) {
    if (f.size() != n) throw std::invalid_argument("sweep_table: ragged sweeps");
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::optional<double>> values;
    std::size_t pairs = 0;
    for (const auto& f : per_fold) {
      values.push_back(f[i].metric);
      pairs += f[i].evaluated_pairs;
    }
    const auto ms = mean_std(values);
    t.rows.push_back({fixed(per_fold.front()[i].theta, 1),
                      ms ? csv_number(ms->mean) : "",
                      ms ? csv_number(ms->std) : "",
                      std::to_string(ms ? ms->n : 0), std::to_string(pairs)});
  }
  return t;
}

CsvTable cdf_table(std::span<const RegressionReport> per_fold) {
  CsvTable t;
  t.header = {"max_error", "cdf_mean", "cdf_std"};
  if (per_fold.empty()) return t;
  const std::size_t n = per_fold.front().cdf.size();
  auto row = [&](const std::string& label, auto pick) {
    std::vector<std::optional<double>> v;
    for (const RegressionReport& r : per_fold) v.push_back(pick(r));
    const auto ms = mean_std(v);
    t.rows.push_back({label, csv_number(ms->mean), csv_number(ms->std)});
  };
  for (std::size_t i = 0; i < n; ++i) {
    row(std::to_string(i), [&](const RegressionReport& r) {
      if (r.cdf.size() != n) throw std::invalid_argument("cdf_table: ragged");
      return std::optional(r.cdf[i]);
    });
  }
  row("auc", [](const RegressionReport& r) { return std::optional(r.auc); });
  return t;
}

CsvTable stats_table(const StatsReport& r) {
  CsvTable t;
  t.header = {"No. of Graph Samples", "Avg. No. of Nodes", "Min. No. of Nodes",
              "Max. No. of Nodes",    "Avg. No. of Edges",
              "Avg. No. of Added Nodes"};
  t.rows.push_back({std::to_string(r.samples), fixed(r.avg_nodes, 1),
                    std::to_string(r.min_nodes), std::to_string(r.max_nodes),
                    fixed(r.avg_edges, 1),
                    fixed(r.avg_added_nodes, 2) + " (" +
                        fixed(r.added_percent, 2) + "%)"});
  return t;
}

CsvTable similarity_table(const std::vector<std::string>& names,
                          const Tensor& similarity) {
  if (similarity.rows() != names.size() || similarity.cols() != names.size()) {
    throw std::invalid_argument("similarity_table: shape mismatch");
  }
  CsvTable t;
  t.header.push_back("name");
  for (const auto& n : names) t.header.push_back(n);
  for (std::size_t i = 0; i < names.size(); ++i) {
    std::vector<std::string> row = {names[i]};
    for (std::size_t j = 0; j < names.size(); ++j) {
      row.push_back(csv_number(similarity(i, j)));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<Suggestion> suggest_insertions(const PairPrediction& p,
                                           const PcbGraph& g,
                                           double min_score) {
  if (p.num_nets != g.num_nets) {
    throw std::invalid_argument("suggest_insertions: prediction/graph mismatch");
  }
  std::vector<Suggestion> out;
  for (std::size_t a = 0; a < p.num_nets; ++a) {
    for (std::size_t b = a + 1; b < p.num_nets; ++b) {
      if (!p.evaluated(a, b)) continue;
      const double score = p.positive_score(a, b);
      if (score < min_score) continue;
      Suggestion s;
      s.net_a = g.node_names[a];
      s.net_b = g.node_names[b];
      if (s.net_b < s.net_a) std::swap(s.net_a, s.net_b);
      s.score = score;
      switch (p.task) {
        case Task::kPullUpDown:
          s.output = "resistor";
          break;
        case Task::kRcFilter:
          s.output = p.score(a, b, static_cast<std::size_t>(RcClass::kCapacitor)) >
                             p.score(a, b, static_cast<std::size_t>(RcClass::kResistor))
                         ? "capacitor"
                         : "resistor";
          break;
        case Task::kDecouplingCaps:
          s.output = std::to_string(std::max<long long>(
              1, std::llrint(std::nearbyint(p.score(a, b, 1)))));
          break;
      }
      out.push_back(std::move(s));
    }
  }
  std::sort(out.begin(), out.end(), [](const Suggestion& x, const Suggestion& y) {
    if (x.score != y.score) return x.score > y.score;
    if (x.net_a != y.net_a) return x.net_a < y.net_a;
    return x.net_b < y.net_b;
  });
  return out;
}

CsvTable suggestions_table(std::span<const Suggestion> s) {
  CsvTable t;
  t.header = {"rank", "net_a", "net_b", "insert", "score"};
  for (std::size_t i = 0; i < s.size(); ++i) {
    t.rows.push_back({std::to_string(i + 1), s[i].net_a, s[i].net_b,
                      s[i].output, csv_number(s[i].score)});
  }
  return t;
}

}  // namespace pcbgnn
