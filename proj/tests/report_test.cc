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

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "fixtures.h"

namespace pcbgnn {
namespace {

TEST_CASE("csv cells are quoted only when needed") {
  CsvTable t;
  t.header = {"a", "b"};
  t.rows = {{"x,y", "say \"hi\""}, {"plain", ""}};
  CHECK(t.to_string() == "a,b\n\"x,y\",\"say \"\"hi\"\"\"\nplain,\n");

  const auto path = testing::temp_path("report.csv");
  t.write(path);
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == t.to_string());
  std::filesystem::remove(path);
}

TEST_CASE("numbers print with six decimals") {
  CHECK(csv_number(0.5) == "0.500000");
  CHECK(csv_number(-1.0 / 3.0) == "-0.333333");
  CHECK(csv_number(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(csv_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(csv_number(std::optional<double>{}) == "");
  CHECK(metric_name(Task::kRcFilter) == "macro_auprc");
}

TEST_CASE("mean and sample standard deviation skip absent values") {
  const std::vector<std::optional<double>> v = {2.0, std::nullopt, 4.0, 6.0};
  const auto ms = mean_std(v);
  REQUIRE(ms);
  CHECK(ms->n == 3);
  CHECK(ms->mean == doctest::Approx(4.0));
  CHECK(ms->std == doctest::Approx(2.0));  // sqrt((4 + 0 + 4) / 2)
  const std::vector<std::optional<double>> one = {1.5};
  CHECK(mean_std(one)->std == 0.0);
  const std::vector<std::optional<double>> none = {std::nullopt};
  CHECK_FALSE(mean_std(none));
}

FoldResult fold(std::size_t f, double metric, double corr) {
  FoldResult r;
  r.fold = f;
  r.learning_rate = 1e-3;
  r.best_epoch = 10 + f;
  r.evaluation.metric = metric;
  r.evaluation.order_correlation = corr;
  return r;
}

TEST_CASE("evaluation report lists folds then mean and std") {
  const std::vector<FoldResult> folds = {fold(0, 0.9, 0.99), fold(1, 0.7, 0.97)};
  const CsvTable t = eval_report_table(folds);
  REQUIRE(t.rows.size() == 8);
  CHECK(t.rows[0] == std::vector<std::string>{"0", "gatv2", "3", "64", "4", "0.1",
                                              "0.001000", "", "10", "auprc",
                                              "0.900000"});
  CHECK(t.rows[3][9] == "order_correlation");
  CHECK(t.rows[3][10] == "0.970000");
  CHECK(t.rows[4][0] == "mean");
  CHECK(t.rows[4][8] == "");
  CHECK(t.rows[4][10] == "0.800000");
  CHECK(t.rows[6][0] == "std");
  CHECK(std::stod(t.rows[6][10]) == doctest::Approx(std::sqrt(0.02)).epsilon(1e-6));
  CHECK(eval_report_table({}).rows.empty());
}

TEST_CASE("decoupling report adds the error CDF") {
  FoldResult f = fold(0, 0.8, 0.5);
  f.spec.task = Task::kDecouplingCaps;
  f.spec.alpha = 0.1;
  f.evaluation.regression = RegressionReport{4, {0.5, 0.75, 1.0}, 0.75};
  const std::vector<FoldResult> folds = {f};
  const CsvTable t = eval_report_table(folds);
  REQUIRE(t.rows.size() == 12);
  CHECK(t.rows[0][7] == "0.100000");
  CHECK(t.rows[0][9] == "auprc_z");
  CHECK(t.rows[2][9] == "cdf_1");
  CHECK(t.rows[2][10] == "0.750000");
  CHECK(t.rows[3][10] == "0.750000");

  const std::vector<RegressionReport> per_fold = {{4, {0.5, 0.75, 1.0}, 0.75},
                                                  {2, {0.0, 0.5, 1.0}, 0.5}};
  const CsvTable c = cdf_table(per_fold);
  REQUIRE(c.rows.size() == 4);
  CHECK(c.rows[1] == std::vector<std::string>{"1", "0.625000", "0.176777"});
  CHECK(c.rows[3][0] == "auc");
  CHECK(c.rows[3][1] == "0.625000");
}

TEST_CASE("sweep table averages per threshold") {
  const std::vector<std::vector<SweepPoint>> sweeps = {
      {{0.0, 0.5, 100}, {0.1, 0.6, 40}}, {{0.0, 0.7, 90}, {0.1, std::nullopt, 0}}};
  const CsvTable t = sweep_table(sweeps);
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0] == std::vector<std::string>{"0.0", "0.600000", "0.141421", "2", "190"});
  CHECK(t.rows[1] == std::vector<std::string>{"0.1", "0.600000", "0.000000", "1", "40"});
  const std::vector<std::vector<SweepPoint>> ragged = {{{0.0, 0.5, 1}}, {}};
  CHECK_THROWS_AS(sweep_table(ragged), std::invalid_argument);
}

TEST_CASE("stats table matches the dataset table layout") {
  StatsReport r;
  r.samples = 500;
  r.avg_nodes = 128.04;
  r.min_nodes = 9;
  r.max_nodes = 702;
  r.avg_edges = 192.26;
  r.avg_added_nodes = 2.756;
  r.added_percent = 2.1524;
  const CsvTable t = stats_table(r);
  CHECK(t.header.size() == 6);
  CHECK(t.rows[0] == std::vector<std::string>{"500", "128.0", "9", "702", "192.3",
                                              "2.76 (2.15%)"});
}

TEST_CASE("similarity table is square with names") {
  Tensor m(2, 2);
  m(0, 0) = 1;
  m(0, 1) = 0.25;
  m(1, 0) = 0.25;
  m(1, 1) = 1;
  const CsvTable t = similarity_table({"GND", "VCC"}, m);
  CHECK(t.header == std::vector<std::string>{"name", "GND", "VCC"});
  CHECK(t.rows[1] == std::vector<std::string>{"VCC", "0.250000", "1.000000"});
  CHECK_THROWS_AS(similarity_table({"GND"}, m), std::invalid_argument);
}

PairPrediction prediction(Task task, std::size_t n, std::size_t channels) {
  PairPrediction p;
  p.task = task;
  p.num_nets = n;
  p.channels = channels;
  p.node_probs.assign(n, 1.0);
  p.is_candidate.assign(n, true);
  p.scores.assign(n * n * channels, 0.0);
  p.raw = p.scores;
  return p;
}

void set(PairPrediction& p, std::size_t a, std::size_t b, std::size_t c, double v) {
  p.scores[(a * p.num_nets + b) * p.channels + c] = v;
  p.scores[(b * p.num_nets + a) * p.channels + c] = v;
}

PcbGraph named(std::vector<std::string> nets) {
  PcbGraph g;
  g.num_nets = nets.size();
  g.node_names = std::move(nets);
  return g;
}

TEST_CASE("suggestions rank by score and break ties by name") {
  PairPrediction p = prediction(Task::kPullUpDown, 4, 1);
  p.is_candidate[3] = false;
  set(p, 0, 1, 0, 0.4);
  set(p, 0, 2, 0, 0.9);
  set(p, 1, 2, 0, 0.4);
  set(p, 0, 3, 0, 0.99);  // not evaluated
  const PcbGraph g = named({"SDA", "+3V3", "INT", "GND"});
  const auto s = suggest_insertions(p, g, 0.3);
  REQUIRE(s.size() == 3);
  CHECK(s[0].net_a == "INT");
  CHECK(s[0].net_b == "SDA");
  CHECK(s[0].output == "resistor");
  // Equal scores: (+3V3, INT) sorts before (+3V3, SDA).
  CHECK(s[1].net_b == "INT");
  CHECK(s[2].net_b == "SDA");
  CHECK(suggest_insertions(p, g, 0.5).size() == 1);

  const CsvTable t = suggestions_table(s);
  CHECK(t.rows[0] == std::vector<std::string>{"1", "INT", "SDA", "resistor", "0.900000"});
  CHECK_THROWS_AS(suggest_insertions(p, named({"A"}), 0.0), std::invalid_argument);
}

TEST_CASE("rc and decoupling suggestions name the inserted part") {
  PairPrediction rc = prediction(Task::kRcFilter, 3, 3);
  // Channels none, resistor, capacitor.
  set(rc, 0, 1, 0, 0.1);
  set(rc, 0, 1, 1, 0.2);
  set(rc, 0, 1, 2, 0.7);
  set(rc, 0, 2, 0, 0.3);
  set(rc, 0, 2, 1, 0.6);
  set(rc, 0, 2, 2, 0.1);
  set(rc, 1, 2, 0, 1.0);
  const auto s = suggest_insertions(rc, named({"RST", "GND", "VCC"}), 0.5);
  REQUIRE(s.size() == 2);
  CHECK(s[0].output == "capacitor");
  CHECK(s[0].score == doctest::Approx(0.9));
  CHECK(s[1].output == "resistor");

  PairPrediction dc = prediction(Task::kDecouplingCaps, 2, 2);
  set(dc, 0, 1, 0, 0.8);
  set(dc, 0, 1, 1, 2.6);
  auto d = suggest_insertions(dc, named({"GND", "VCC"}), 0.5);
  REQUIRE(d.size() == 1);
  CHECK(d[0].output == "3");
  set(dc, 0, 1, 1, 0.2);
  CHECK(suggest_insertions(dc, named({"GND", "VCC"}), 0.5)[0].output == "1");
}

}  // namespace
}  // namespace pcbgnn
