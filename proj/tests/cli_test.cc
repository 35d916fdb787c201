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

#include "pcbgnn/cli.h"

#include <fstream>
#include <map>
#include <sstream>

#include "doctest.h"
#include "fixtures.h"
#include "json.hpp"
#include "pcbgnn/checkpoint.h"
#include "pcbgnn/embedding.h"
#include "pcbgnn/netlist.h"
#include "pcbgnn/training.h"

namespace pcbgnn {
namespace {

using Json = nlohmann::ordered_json;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

std::string path(const std::string& name) { return testing::temp_path(name).string(); }

// Small graphs keep training in the test budget.
std::string small_corpus(Task task, std::size_t count, const std::string& name) {
  Json c;
  c["task"] = std::string(task_name(task));
  c["count"] = count;
  c["seed"] = 5;
  c["node_mean"] = 20;
  c["max_nodes"] = 40;
  const std::string config = path(name + ".config.json");
  std::ofstream(config) << c.dump();
  const std::string data = path(name + ".jsonl");
  REQUIRE(cli({"gen-data", "--config", config, "--out", data}).code == 0);
  return data;
}

Json error_json(const Result& r) {
  REQUIRE(!r.err.empty());
  return Json::parse(r.err.substr(0, r.err.find('\n')));
}

TEST_CASE("stats prints the six dataset columns") {
  std::vector<Schematic> three(3, testing::small_labeled(Task::kPullUpDown));
  for (std::size_t i = 0; i < 3; ++i) three[i].name = "s" + std::to_string(i);
  const std::string data = path("stats.jsonl");
  store_dataset(three, data);
  const Result r = cli({"stats", "--data", data});
  REQUIRE(r.code == 0);
  // 3 nets + 3 symbols, 7 distinct net-symbol connections, 1 labeled pair.
  CHECK(r.out ==
        "No. of Graph Samples,Avg. No. of Nodes,Min. No. of Nodes,"
        "Max. No. of Nodes,Avg. No. of Edges,Avg. No. of Added Nodes\n"
        "3,6.0,6,6,7.0,1.00 (16.67%)\n");
  const std::string out = path("stats.csv");
  REQUIRE(cli({"stats", "--data", data, "--out", out}).code == 0);
  CHECK(slurp(out) == r.out);
}

TEST_CASE("gen-data is deterministic and honors flags over the config") {
  const std::string a = path("gen_a.jsonl"), b = path("gen_b.jsonl");
  REQUIRE(cli({"gen-data", "--task", "rc_filter", "--count", "4", "--seed", "9",
               "--out", a}).code == 0);
  REQUIRE(cli({"gen-data", "--task", "rc_filter", "--count", "4", "--seed", "9",
               "--out", b}).code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(load_dataset(a).size() == 4);

  const std::string data = small_corpus(Task::kRcFilter, 3, "gen_cfg");
  CHECK(load_dataset(data).size() == 3);
  const Result bad = cli({"gen-data", "--config", path("gen_cfg.config.json"),
                          "--task", "pull_up_down", "--out", a});
  CHECK(bad.code == kExitUsage);
  CHECK(cli({"gen-data", "--out", a}).code == kExitUsage);
  CHECK(cli({"gen-data", "--task", "rc_filter", "--count", "0", "--out", a}).code ==
        kExitUsage);
}

TEST_CASE("usage errors exit 2 with a JSON error line") {
  Result r = cli({"train", "--bogus"});
  CHECK(r.code == kExitUsage);
  Json e = error_json(r);
  CHECK(e["error"] == "usage");
  CHECK(e["command"] == "train");
  CHECK(cli({}).code == kExitUsage);
  CHECK(cli({"frobnicate"}).code == kExitUsage);
  CHECK(cli({"--help"}).code == 0);

  const std::string data = small_corpus(Task::kPullUpDown, 3, "usage");
  const std::string ck = path("usage_ck.json");
  r = cli({"train", "--data", data, "--task", "pull_up_down", "--alpha", "0.1",
           "--out-checkpoint", ck});
  CHECK(r.code == kExitUsage);
  CHECK(error_json(r)["message"] == "--alpha applies to decoupling_caps only");
  CHECK(cli({"train", "--data", data, "--task", "pull_up_down", "--lr", "0",
             "--out-checkpoint", ck}).code == kExitUsage);
  CHECK(cli({"train", "--data", data, "--task", "pull_up_down", "--theta", "1",
             "--out-checkpoint", ck}).code == kExitUsage);
  CHECK(cli({"train", "--data", data, "--task", "pull_up_down", "--backbone", "rnn",
             "--out-checkpoint", ck}).code == kExitUsage);
  CHECK(cli({"train", "--data", data, "--task", "pull_up_down", "--fold", "9",
             "--out-checkpoint", ck}).code == kExitUsage);
  CHECK_FALSE(std::filesystem::exists(ck));

  r = cli({"train", "--data", data, "--task", "rc_filter", "--out-checkpoint", ck});
  CHECK(r.code == kExitFailure);
  CHECK(error_json(r)["error"] == "incompatible");

  const std::string broken = path("broken.jsonl");
  std::ofstream(broken) << "{\"name\": 3}\n";
  r = cli({"stats", "--data", broken});
  CHECK(r.code == kExitFailure);
  CHECK(error_json(r)["error"] == "netlist");
}

TEST_CASE("predict with a near-one threshold suggests nothing") {
  ModelSpec spec = preset(Task::kPullUpDown, LayerKind::kGcn);
  spec.theta = 0.999;
  const std::string ck = path("predict_ck.json");
  save_checkpoint(make_checkpoint(PairModel(spec, 1)), ck);
  const std::string net = path("fig1.json");
  std::ofstream(net) << serialize_schematic(testing::fig1_circuit());
  const std::string out = path("predict.csv");
  const Result r = cli({"predict", "--checkpoint", ck, "--netlist", net, "--out", out});
  REQUIRE(r.code == 0);
  CHECK(slurp(out) == "rank,net_a,net_b,insert,score\n");

  // With every net a candidate and no score floor all pairs are listed in
  // descending order.
  spec.theta = 0.0;
  save_checkpoint(make_checkpoint(PairModel(spec, 1)), ck);
  REQUIRE(cli({"predict", "--checkpoint", ck, "--netlist", net, "--out", out,
               "--min-score", "0"}).code == 0);
  const auto rows = read_csv(out);
  REQUIRE(rows.size() == 2);  // header + the one net pair (GND, +5V)
  CHECK(rows[1][1] == "+5V");
  CHECK(rows[1][2] == "GND");
  CHECK(rows[1][3] == "resistor");
}

TEST_CASE("embed-sim writes a symmetric similarity matrix") {
  const std::string net = path("sim.json");
  std::ofstream(net) << serialize_schematic(testing::fig1_circuit());
  const std::string out = path("sim.csv");
  REQUIRE(cli({"embed-sim", "--netlist", net, "--out", out}).code == 0);
  const auto rows = read_csv(out);
  REQUIRE(rows.size() == 6);  // header + GND, +5V, C17, C18, IC1
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 1; i < rows[0].size(); ++i) col[rows[0][i]] = i;
  REQUIRE(col.size() == 5);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    CHECK(rows[r][col[rows[r][0]]] == "1.000000");
    if (rows[r][0] == "C17") {
      CHECK(std::stod(rows[r][col["C18"]]) > std::stod(rows[r][col["+5V"]]));
    }
  }
}

TEST_CASE("train then eval reproduces the recorded test metric") {
  const std::string data = small_corpus(Task::kPullUpDown, 30, "e2e");
  const std::string ck = path("e2e_ck.json"), metrics = path("e2e_metrics.json");
  Result r = cli({"train", "--data", data, "--task", "pull_up_down", "--backbone",
                  "gine", "--layers", "1", "--hidden", "16", "--theta", "0.0",
                  "--seed", "4", "--max-epochs", "3", "--batch-size", "8",
                  "--out-checkpoint", ck, "--metrics-out", metrics});
  REQUIRE(r.code == 0);
  const Json m = Json::parse(slurp(metrics));
  CHECK(m["split"]["test"] == 3);
  CHECK(m["split"]["val"] == 3);
  CHECK(m["split"]["train"] == 24);
  CHECK(m["history"].size() <= 3);
  const Json meta = Json::parse(slurp(ck));
  CHECK(meta["embedder"] == "hash-ngram-v1");
  CHECK(meta["fold"] == 0);
  CHECK(meta["test"] == m["test"]);

  const std::string report = path("e2e_report.csv");
  r = cli({"eval", "--checkpoint", ck, "--data", data, "--report", report,
           "--sweep-theta"});
  REQUIRE(r.code == 0);
  const auto rows = read_csv(report);
  REQUIRE(rows.size() == 1 + 2 + 4);
  CHECK(rows[1][9] == "auprc");
  const Json& recorded = m["test"]["metric"];
  if (recorded.is_null()) {
    CHECK(rows[1][10] == "");
  } else {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", recorded.get<double>());
    CHECK(rows[1][10] == buf);
  }

  // Sweep: theta 0.0 .. 0.7, nested candidate sets, theta 0 scores every
  // net pair of the test graphs.
  const auto sweep = read_csv(path("e2e_report.theta_sweep.csv"));
  REQUIRE(sweep.size() == 9);
  CHECK(sweep[0] == std::vector<std::string>{"theta", "metric_mean", "metric_std",
                                             "folds", "evaluated_pairs"});
  const auto all = load_dataset(data);
  std::size_t pairs = 0;
  TrainConfig c = train_config_from_json(meta["train_config"]);
  const auto splits = split_dataset(all.size(), c);
  for (std::size_t idx : splits[0].test) {
    const std::size_t n = all[idx].nets.size();
    pairs += n * (n - 1) / 2;
  }
  CHECK(std::stoul(sweep[1][4]) == pairs);
  for (std::size_t i = 2; i < sweep.size(); ++i) {
    CHECK(std::stoul(sweep[i][4]) <= std::stoul(sweep[i - 1][4]));
  }

  // Same flags, same bytes.
  const std::string ck2 = path("e2e_ck2.json");
  REQUIRE(cli({"train", "--data", data, "--task", "pull_up_down", "--backbone",
               "gine", "--layers", "1", "--hidden", "16", "--theta", "0.0",
               "--seed", "4", "--max-epochs", "3", "--batch-size", "8",
               "--out-checkpoint", ck2}).code == 0);
  CHECK(slurp(ck) == slurp(ck2));

  // Two checkpoints aggregate into mean and std rows.
  r = cli({"eval", "--checkpoint", ck, "--checkpoint", ck2, "--data", data, "--report",
           report, "--split", "all"});
  REQUIRE(r.code == 0);
  CHECK(read_csv(report).size() == 1 + 4 + 4);
  CHECK(cli({"eval", "--checkpoint", ck, "--data", data, "--report", report, "--split",
             "val"}).code == kExitUsage);

  const std::string rc = small_corpus(Task::kRcFilter, 3, "e2e_rc");
  r = cli({"eval", "--checkpoint", ck, "--data", rc, "--report", report});
  CHECK(r.code == kExitFailure);
  CHECK(error_json(r)["error"] == "incompatible");
}

TEST_CASE("decoupling eval also writes the error CDF") {
  const std::string data = small_corpus(Task::kDecouplingCaps, 20, "dec");
  const std::string ck = path("dec_ck.json");
  REQUIRE(cli({"train", "--data", data, "--task", "decoupling_caps", "--backbone",
               "gcn", "--layers", "1", "--hidden", "16", "--max-epochs", "2",
               "--out-checkpoint", ck}).code == 0);
  CHECK(Json::parse(slurp(ck))["model_spec"]["alpha"] == 0.1);
  const std::string report = path("dec_report.csv");
  REQUIRE(cli({"eval", "--checkpoint", ck, "--data", data, "--report", report}).code ==
          0);
  const auto rows = read_csv(report);
  CHECK(rows[1][9] == "auprc_z");
  CHECK(rows[3][9] == "cdf_1");
  const auto cdf = read_csv(path("dec_report.cdf.csv"));
  REQUIRE(cdf.size() == 1 + 5 + 1);
  CHECK(cdf[6][0] == "auc");
}

TEST_CASE("an embedding table replaces the hash embedder end to end") {
  const std::string data = small_corpus(Task::kPullUpDown, 20, "table");
  EmbeddingTable t;
  t.source = "unit-test-table";
  const HashNgramEmbedder hash;
  for (const char* name : {"GND", "+5V", "VCC"}) t.entries[name] = hash.embed(name);
  const std::string table = path("table.json");
  store_table(t, table);

  const std::string ck = path("table_ck.json");
  REQUIRE(cli({"train", "--data", data, "--task", "pull_up_down", "--backbone", "mlp",
               "--max-epochs", "1", "--embedding-table", table, "--out-checkpoint",
               ck}).code == 0);
  CHECK(Json::parse(slurp(ck))["embedder"] == "unit-test-table");
  const std::string report = path("table_report.csv");
  CHECK(cli({"eval", "--checkpoint", ck, "--data", data, "--report", report,
             "--embedding-table", table}).code == 0);
  const Result r = cli({"eval", "--checkpoint", ck, "--data", data, "--report", report});
  CHECK(r.code == kExitFailure);
  CHECK(error_json(r)["error"] == "incompatible");
}

TEST_CASE("grid writes the best configuration per backbone") {
  const std::string data = small_corpus(Task::kPullUpDown, 20, "grid");
  Json space = {{"task", "pull_up_down"},
                {"backbones", {"mlp", "gcn"}},
                {"layers", {1}},
                {"hidden", {16}},
                {"heads", {1}},
                {"learning_rates", {0.001}},
                {"thetas", {0.0, 0.1}}};
  const std::string sp = path("space.json");
  std::ofstream(sp) << space.dump();
  const std::string report = path("grid.csv");
  const Result r = cli({"grid", "--space", sp, "--data", data, "--task", "pull_up_down",
                        "--report", report, "--max-epochs", "1"});
  REQUIRE(r.code == 0);
  const auto rows = read_csv(report);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0][0] == "backbone");
  CHECK(rows[1][0] == "mlp");
  CHECK(rows[2][0] == "gcn");
  CHECK(cli({"grid", "--space", sp, "--data", data, "--task", "rc_filter", "--report",
             report}).code == kExitUsage);
  space["learning_rates"] = {0.01};
  std::ofstream(sp) << space.dump();
  CHECK(cli({"grid", "--space", sp, "--data", data, "--task", "pull_up_down",
             "--report", report}).code == kExitUsage);
}

}  // namespace
}  // namespace pcbgnn
