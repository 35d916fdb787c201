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

// Acceptance run: one PASS/FAIL line per criterion on stdout, progress on
// stderr. Exit code 0 when every selected criterion passes.
//
//   pcbgnn_acceptance [--criterion N]... [--workdir DIR]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "pcbgnn/checkpoint.h"
#include "pcbgnn/cli.h"
#include "pcbgnn/embedding.h"
#include "pcbgnn/gnn.h"
#include "pcbgnn/grad_check.h"
#include "pcbgnn/graph.h"
#include "pcbgnn/metrics.h"
#include "pcbgnn/netlist.h"
#include "pcbgnn/pair_model.h"
#include "pcbgnn/random.h"
#include "pcbgnn/synthdata.h"
#include "pcbgnn/training.h"

namespace pcbgnn {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

constexpr LayerKind kAllKinds[] = {LayerKind::kMlpOnly, LayerKind::kGcn,
                                   LayerKind::kGin,     LayerKind::kGine,
                                   LayerKind::kGat,     LayerKind::kGatv2,
                                   LayerKind::kGt};
constexpr Task kTasks[] = {Task::kPullUpDown, Task::kRcFilter,
                           Task::kDecouplingCaps};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::string fmt_opt(const std::optional<double>& x) {
  return x ? fmt("%.4f", *x) : "undefined";
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

// ------------------------------------------------------------ trained runs

struct RunKey {
  Task task;
  LayerKind kind;
  std::uint64_t seed;
  double name_noise;  // < 0: task default
  auto operator<=>(const RunKey&) const = default;
};

struct Run {
  Evaluation test;
  std::size_t best_epoch = 0;
  double seconds = 0;
};

class Lab {
 public:
  const Run& run(const RunKey& k) {
    if (auto it = runs_.find(k); it != runs_.end()) return it->second;
    const std::vector<Sample>& data = corpus(k.task, k.seed, k.name_noise);
    TrainConfig c;
    c.seed = k.seed;
    const Split split = split_dataset(data.size(), c)[0];
    const auto tr = select(data, split.train);
    const auto va = select(data, split.val);
    const auto te = select(data, split.test);
    const ModelSpec spec = preset(k.task, k.kind);
    spdlog::info("training {} {} seed {} noise {}", task_name(k.task),
                 layer_kind_name(k.kind), k.seed, k.name_noise);
    const auto t0 = Clock::now();
    const TrainResult r = train(spec, c, tr, va);
    Run out;
    out.seconds = seconds_since(t0);
    out.best_epoch = r.best_epoch;
    out.test = evaluate(restore_model(r.checkpoint), te);
    spdlog::info("  {} {} after {:.0f} s (best epoch {}), order corr {}",
                 k.task == Task::kRcFilter ? "macro auprc" : "auprc", fmt_opt(out.test.metric), out.seconds,
                 r.best_epoch, fmt_opt(out.test.order_correlation));
    return runs_.emplace(k, std::move(out)).first->second;
  }

  const std::map<RunKey, Run>& runs() const { return runs_; }

 private:
  const std::vector<Sample>& corpus(Task task, std::uint64_t seed, double noise) {
    const auto key = std::make_tuple(task, seed, noise);
    if (auto it = data_.find(key); it != data_.end()) return it->second;
    GenConfig g = default_gen_config(task);
    g.count = 500;
    g.seed = seed;
    if (noise >= 0) g.name_noise = noise;
    const HashNgramEmbedder embedder;
    std::vector<Sample> samples;
    for (const Schematic& s : generate(g)) {
      samples.push_back(make_sample(build_labeled_graph(s, embedder)));
    }
    return data_.emplace(key, std::move(samples)).first->second;
  }

  std::map<std::tuple<Task, std::uint64_t, double>, std::vector<Sample>> data_;
  std::map<RunKey, Run> runs_;
};

// ------------------------------------------------------------- criterion 1

Var readout(Var out) {
  Tape& t = *out.tape;
  Tensor w(out.rows(), out.cols());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::cos(0.5 + 0.7 * i);
  return add(sum(square(out)), sum(multiply(out, t.constant(w))));
}

Tensor random_tensor(std::size_t r, std::size_t c, Rng& rng) {
  Tensor t(r, c);
  for (double& v : t.values()) v = rng.uniform(-1, 1);
  return t;
}

// Random bipartite schematic with 4-8 nodes, labeled for `task`.
Schematic random_schematic(Task task, Rng& rng) {
  static const char* kPinNames[] = {"VDD", "GND", "RST", "SDA", "OUT", "1", "2"};
  Schematic s;
  s.name = "rand";
  const auto n = rng.uniform_int(4, 8);
  const auto nets = rng.uniform_int(2, std::min<std::int64_t>(4, n - 1));
  for (std::int64_t i = 0; i < nets; ++i) s.nets.push_back({i + 1, "N$" + std::to_string(i + 1)});
  s.nets[0].name = "GND";
  s.nets[1].name = "+5V";
  for (std::int64_t i = nets; i < n; ++i) s.symbols.push_back({100 + i, "U" + std::to_string(i)});
  std::int64_t k = 0;
  for (const Symbol& sym : s.symbols) {
    const auto pins = rng.uniform_int(1, 3);
    for (std::int64_t p = 0; p < pins; ++p) {
      // The first pins cover every net once.
      const std::int64_t net =
          k < nets ? k + 1 : rng.uniform_int(1, nets);
      ++k;
      s.pins.push_back({sym.id, net, kPinNames[rng.uniform_int(0, 6)]});
    }
  }
  for (std::int64_t net = k; net < nets; ++net) {
    s.pins.push_back({s.symbols.front().id, net + 1, "1"});
  }
  TaskAnnotations a;
  a.task = task;
  std::set<std::pair<std::int64_t, std::int64_t>> used;
  const auto labels = rng.uniform_int(1, 2);
  for (std::int64_t i = 0; i < labels; ++i) {
    std::int64_t x = rng.uniform_int(1, nets), y = rng.uniform_int(1, nets);
    if (x == y) y = x % nets + 1;
    if (x > y) std::swap(x, y);
    if (!used.insert({x, y}).second) continue;
    const std::int64_t label = task == Task::kPullUpDown ? 1
                               : task == Task::kRcFilter ? rng.uniform_int(1, 2)
                                                         : rng.uniform_int(1, 4);
    a.pair_labels.push_back({x, y, label});
  }
  std::sort(a.pair_labels.begin(), a.pair_labels.end(),
            [](const PairLabel& p, const PairLabel& q) {
              return std::tie(p.net_a, p.net_b) < std::tie(q.net_a, q.net_b);
            });
  a.node_labels = derive_node_labels(s, a.pair_labels, task);
  s.annotations = a;
  return s;
}

Verdict criterion_1() {
  const auto t0 = Clock::now();
  double worst_layer = 0, worst_model = 0;
  std::size_t checks = 0;
  // Message-passing layers: gradients of inputs, edge features, parameters.
  for (LayerKind kind : kAllKinds) {
    if (kind == LayerKind::kMlpOnly) continue;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      Rng rng = Rng::derive(1001, seed * 16 + static_cast<std::uint64_t>(kind));
      const auto n = static_cast<std::size_t>(rng.uniform_int(4, 8));
      const std::size_t nets = 2 + seed % 2;
      std::set<std::pair<std::size_t, std::size_t>> seen;
      std::vector<GraphEdge> edges;
      for (std::size_t sym = nets; sym < n; ++sym) {
        for (int i = 0; i < 2; ++i) {
          const auto net = static_cast<std::size_t>(
              rng.uniform_int(0, static_cast<std::int64_t>(nets) - 1));
          if (seen.insert({net, sym}).second) edges.push_back({net, sym});
        }
      }
      const MessageGraph g = make_message_graph(n, edges);
      ParameterStore store;
      const std::size_t heads = is_attention(kind) && seed % 2 ? 4 : 1;
      GnnLayer layer({kind, 3, 4, heads}, "l", store, rng, 2);
      for (std::size_t i = 0; i < store.size(); ++i) {
        for (double& v : store[i].value.values()) v += rng.uniform(-0.05, 0.05);
      }
      const Tensor h = random_tensor(n, 3, rng);
      const Tensor e = random_tensor(edges.size(), 2, rng);
      auto through = [&](int which, std::size_t param) -> ScalarFn {
        return [&, which, param](Tape& tape, Var x) {
          std::vector<Var> params = store.bind(tape, false);
          Var hv = tape.constant(h), ev = tape.constant(e);
          if (which == 0) hv = x;
          if (which == 1) ev = x;
          if (which == 2) params[param] = x;
          return readout(layer.forward(params, g, hv, ev));
        };
      };
      worst_layer = std::max(worst_layer, grad_check(through(0, 0), h, 1e-6));
      if (uses_edge_features(kind)) {
        worst_layer = std::max(worst_layer, grad_check(through(1, 0), e, 1e-6));
      }
      for (std::size_t p = 0; p < store.size(); ++p) {
        worst_layer = std::max(worst_layer, grad_check(through(2, p), store[p].value, 1e-6));
      }
      ++checks;
    }
  }
  // Full pair-model loss, every backbone, tasks in rotation.
  const HashNgramEmbedder embedder;
  for (LayerKind kind : kAllKinds) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const Task task = kTasks[seed % 3];
      Rng rng = Rng::derive(2002, seed * 16 + static_cast<std::uint64_t>(kind));
      const Sample s = make_sample(build_labeled_graph(random_schematic(task, rng), embedder));
      ModelSpec spec;
      spec.task = task;
      spec.backbone = kind;
      spec.num_layers = kind == LayerKind::kMlpOnly ? 0 : 2;
      spec.hidden_dim = 8;
      spec.heads = is_attention(kind) ? 4 : 1;
      spec.theta = 0.0;
      if (task == Task::kDecouplingCaps) spec.alpha = 0.1;
      PairModel m(spec, seed + 7);
      for (std::size_t i = 0; i < m.parameters().size(); ++i) {
        for (double& v : m.parameters()[i].value.values()) v += rng.uniform(-0.05, 0.05);
      }
      const ParameterStore& p = m.parameters();
      for (std::size_t i = 0; i < p.size(); ++i) {
        auto f = [&, i](Tape& tape, Var x) {
          std::vector<Var> params = p.bind(tape, false);
          params[i] = x;
          return m.loss(params, s);
        };
        worst_model = std::max(
            worst_model, grad_check(f, p[i].value, GradCheckOptions{1e-6, 24, seed * 100 + i}));
      }
      ++checks;
    }
  }
  const double secs = seconds_since(t0);
  const bool pass = worst_layer < 1e-4 && worst_model < 1e-4 && secs < 120;
  return {pass, std::to_string(checks) + " graphs; max rel error layers " +
                    fmt("%.2e", worst_layer) + ", full loss " + fmt("%.2e", worst_model) +
                    " (< 1e-4); " + fmt("%.0f", secs) + " s (< 120 s)"};
}

// ------------------------------------------------------------- criterion 2

std::optional<double> enumerate_ap(const std::vector<double>& scores,
                                   const std::vector<int>& labels) {
  double positives = 0;
  for (int y : labels) positives += y != 0;
  if (positives == 0) return std::nullopt;
  std::set<double, std::greater<>> thresholds(scores.begin(), scores.end());
  double ap = 0, prev_recall = 0;
  for (double t : thresholds) {
    double tp = 0, predicted = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (scores[i] >= t) {
        ++predicted;
        tp += labels[i] != 0;
      }
    }
    ap += (tp / positives - prev_recall) * (tp / predicted);
    prev_recall = tp / positives;
  }
  return ap;
}

Verdict criterion_2() {
  double worst = 0, worst_macro = 0;
  std::size_t ties = 0;
  for (std::uint64_t c = 0; c < 100; ++c) {
    Rng rng = Rng::derive(3003, c);
    const auto n = static_cast<std::size_t>(rng.uniform_int(1, 50));
    const int levels = c % 3 == 0 ? 4 : c % 3 == 1 ? 20 : 1000000;
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = std::round(rng.uniform() * levels) / levels;
      labels[i] = rng.bernoulli(0.3);
    }
    labels[rng.uniform_int(0, static_cast<std::int64_t>(n) - 1)] = 1;
    if (std::set<double>(scores.begin(), scores.end()).size() < n) ++ties;
    worst = std::max(worst, std::abs(*auprc(scores, labels) - *enumerate_ap(scores, labels)));

    std::vector<double> flat;
    std::vector<std::vector<double>> rows(n);
    std::vector<int> cls(n);
    for (std::size_t i = 0; i < n; ++i) {
      double total = 0;
      for (int k = 0; k < 3; ++k) {
        rows[i].push_back(std::round(rng.uniform() * levels) / levels + 1e-3);
        total += rows[i].back();
      }
      for (double& v : rows[i]) v /= total;
      flat.insert(flat.end(), rows[i].begin(), rows[i].end());
      cls[i] = static_cast<int>(rng.uniform_int(0, 2));
    }
    double sum = 0;
    int defined = 0;
    for (int k = 0; k < 3; ++k) {
      std::vector<double> col;
      std::vector<int> hit;
      for (std::size_t i = 0; i < n; ++i) {
        col.push_back(rows[i][k]);
        hit.push_back(cls[i] == k);
      }
      if (auto v = enumerate_ap(col, hit)) {
        sum += *v;
        ++defined;
      }
    }
    worst_macro = std::max(worst_macro, std::abs(*macro_auprc(flat, cls, 3) - sum / defined));
  }
  return {worst <= 1e-12 && worst_macro <= 1e-12,
          "100 cases (" + std::to_string(ties) + " with ties); max |auprc - brute force| " +
              fmt("%.1e", worst) + ", macro " + fmt("%.1e", worst_macro) + " (<= 1e-12)"};
}

// ---------------------------------------------------- criteria 3, 4, 5, 6, 8

Verdict criterion_3(Lab& lab) {
  const Run& r = lab.run({Task::kPullUpDown, LayerKind::kGatv2, 42, -1});
  const bool pass = r.test.metric && *r.test.metric >= 0.90 && r.seconds < 900;
  return {pass, "GATv2 fold-0 test AUPRC " + fmt_opt(r.test.metric) + " (>= 0.90); trained in " +
                    fmt("%.0f", r.seconds) + " s (< 900 s), best epoch " +
                    std::to_string(r.best_epoch)};
}

Verdict criterion_4(Lab& lab) {
  bool pass = true;
  std::string detail;
  for (std::uint64_t seed : {42, 43, 44}) {
    std::map<LayerKind, double> m;
    for (LayerKind kind : kAllKinds) {
      m[kind] = lab.run({Task::kRcFilter, kind, seed, 1.0}).test.metric.value_or(0.0);
    }
    const double gap = m[LayerKind::kGine] - m[LayerKind::kGin];
    bool mlp_worst = true;
    for (const auto& [kind, v] : m) {
      if (kind != LayerKind::kMlpOnly && v <= m[LayerKind::kMlpOnly]) mlp_worst = false;
    }
    pass = pass && gap >= 0.10 && mlp_worst;
    if (!detail.empty()) detail += "; ";
    detail += "seed " + std::to_string(seed) + ": GINe-GIN " + fmt("%+.3f", gap) + ", MLP " +
              fmt("%.3f", m[LayerKind::kMlpOnly]) + (mlp_worst ? " worst" : " NOT worst");
  }
  return {pass, detail + " (need GINe-GIN >= 0.10 and MLP worst)"};
}

Verdict criterion_5(Lab& lab) {
  double best = 0;
  LayerKind best_kind = LayerKind::kGcn;
  for (LayerKind kind : kAllKinds) {
    if (kind == LayerKind::kMlpOnly) continue;
    const double v = lab.run({Task::kDecouplingCaps, kind, 42, -1}).test.metric.value_or(0.0);
    if (v > best) {
      best = v;
      best_kind = kind;
    }
  }
  const double mlp =
      lab.run({Task::kDecouplingCaps, LayerKind::kMlpOnly, 42, -1}).test.metric.value_or(0.0);
  return {best > 0 && mlp >= 0.7 * best,
          "MLP-only AUPRC " + fmt("%.4f", mlp) + " vs best " +
              std::string(layer_kind_name(best_kind)) + " " + fmt("%.4f", best) + " (ratio " +
              fmt("%.3f", best > 0 ? mlp / best : 0.0) + ", need >= 0.7)"};
}

Verdict criterion_6(Lab& lab) {
  // One trained model per task: the reference backbone of each experiment.
  lab.run({Task::kPullUpDown, LayerKind::kGatv2, 42, -1});
  lab.run({Task::kRcFilter, LayerKind::kGine, 42, 1.0});
  lab.run({Task::kDecouplingCaps, LayerKind::kGatv2, 42, -1});
  double lowest = 1;
  std::size_t above = 0, total = 0;
  std::string lowest_name;
  for (const auto& [k, r] : lab.runs()) {
    ++total;
    const double c = r.test.order_correlation.value_or(0.0);
    if (c > 0.999) ++above;
    if (c < lowest) {
      lowest = c;
      lowest_name = std::string(task_name(k.task)) + "/" + std::string(layer_kind_name(k.kind)) +
                    "/seed " + std::to_string(k.seed);
    }
  }
  return {above == total,
          std::to_string(above) + " of " + std::to_string(total) +
              " trained models have order correlation > 0.999; lowest " + fmt("%.5f", lowest) +
              " (" + lowest_name + ")"};
}

Verdict criterion_8(Lab& lab) {
  const Run& r = lab.run({Task::kDecouplingCaps, LayerKind::kGatv2, 42, -1});
  if (!r.test.regression) return {false, "no regression report"};
  const double cdf1 = r.test.regression->cdf[1];
  return {cdf1 >= 0.70, "GATv2 alpha 0.1: CDF(0) " + fmt("%.3f", r.test.regression->cdf[0]) +
                            ", CDF(1) " + fmt("%.3f", cdf1) + " (>= 0.70), AUC (T=4) " +
                            fmt("%.3f", r.test.regression->auc) + " over " +
                            std::to_string(r.test.regression->count) + " labeled pairs"};
}

// ------------------------------------------------------------- criterion 7

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  if (code != 0) spdlog::error("pcbgnn {} failed: {}", args.front(), err.str());
  return code;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

// gen-data, train and eval through the command line in `dir`.
bool pipeline(const fs::path& dir, Task task, std::size_t count, std::size_t epochs) {
  fs::create_directories(dir);
  const std::string data = (dir / "data.jsonl").string();
  const std::string ck = (dir / "model.json").string();
  const std::string t(task_name(task));
  return cli({"gen-data", "--task", t, "--count", std::to_string(count), "--seed", "11",
              "--out", data}) == 0 &&
         cli({"train", "--data", data, "--task", t, "--backbone", "gatv2", "--seed", "11",
              "--max-epochs", std::to_string(epochs), "--out-checkpoint", ck,
              "--metrics-out", (dir / "metrics.json").string()}) == 0 &&
         cli({"eval", "--checkpoint", ck, "--data", data, "--report",
              (dir / "report.csv").string(), "--sweep-theta"}) == 0;
}

Verdict criterion_7(const fs::path& work) {
  const fs::path dir = work / "theta";
  if (!pipeline(dir, Task::kPullUpDown, 60, 40)) return {false, "pipeline failed"};
  const auto table = read_csv(dir / "report.theta_sweep.csv");
  const std::vector<double> grid = theta_grid();

  // Library view of the same test graphs.
  const Checkpoint ck = load_checkpoint(dir / "model.json");
  PairModel model = restore_model(ck);
  const TrainConfig c = train_config_from_json(ck.metadata.at("train_config"));
  const HashNgramEmbedder embedder;
  std::vector<Sample> samples;
  for (const Schematic& s : load_dataset(dir / "data.jsonl")) {
    samples.push_back(make_sample(build_labeled_graph(s, embedder)));
  }
  const auto test = select(samples, split_dataset(samples.size(), c)[0].test);
  std::size_t all_pairs = 0;
  for (const Sample* s : test) all_pairs += s->graph.num_nets * (s->graph.num_nets - 1) / 2;

  bool nested = true, full = true;
  std::vector<std::vector<bool>> previous;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    model.set_theta(grid[i]);
    std::vector<std::vector<bool>> current;
    for (std::size_t g = 0; g < test.size(); ++g) {
      const PairPrediction p = model.predict(*test[g]);
      current.push_back(p.is_candidate);
      if (i == 0) {
        for (std::size_t a = 0; a < p.num_nets; ++a) {
          for (std::size_t b = 0; b < p.num_nets; ++b) {
            if (a != b && !p.evaluated(a, b)) full = false;
          }
        }
      } else {
        for (std::size_t n = 0; n < p.num_nets; ++n) {
          if (current[g][n] && !previous[g][n]) nested = false;
        }
      }
    }
    previous = std::move(current);
  }

  bool table_ok = table.size() == grid.size() + 1 && table[0].size() == 5 &&
                  table[0][0] == "theta" && table[0][4] == "evaluated_pairs";
  std::string counts;
  for (std::size_t i = 1; table_ok && i < table.size(); ++i) {
    table_ok = table[i][0] == fmt("%.1f", grid[i - 1]) &&
               (i == 1 || std::stoul(table[i][4]) <= std::stoul(table[i - 1][4]));
    counts += (i > 1 ? "/" : "") + table[i][4];
  }
  const bool theta0 = table_ok && std::stoul(table[1][4]) == all_pairs;
  return {nested && full && table_ok && theta0,
          std::string("candidate sets ") + (nested ? "nested" : "NOT nested") +
              "; theta 0 scores " + (full && theta0 ? "all " : "NOT all ") +
              std::to_string(all_pairs) + " net pairs; sweep table " +
              (table_ok ? "emitted" : "MALFORMED") + " (evaluated pairs " + counts + ")"};
}

// ------------------------------------------------------------- criterion 9

Verdict criterion_9(const fs::path& work) {
  std::size_t compared = 0;
  std::string bad;
  for (Task task : kTasks) {
    const std::string t(task_name(task));
    const fs::path a = work / "determinism" / (t + "_1");
    const fs::path b = work / "determinism" / (t + "_2");
    if (!pipeline(a, task, 40, 4) || !pipeline(b, task, 40, 4)) {
      return {false, t + " pipeline failed"};
    }
    for (const char* f : {"data.jsonl", "model.json", "report.csv",
                          "report.theta_sweep.csv", "report.cdf.csv"}) {
      if (!fs::exists(a / f) && !fs::exists(b / f)) continue;
      ++compared;
      if (slurp(a / f) != slurp(b / f)) bad += " " + t + "/" + f;
    }
  }
  return {bad.empty(), std::to_string(compared) + " files compared over two runs of three " +
                           "task pipelines; " + (bad.empty() ? "all identical" : "differ:" + bad)};
}

// ------------------------------------------------------------ criterion 10

Verdict criterion_10() {
  std::size_t graphs = 0;
  std::map<std::string, std::size_t> failures;
  const HashNgramEmbedder embedder;
  for (Task task : kTasks) {
    GenConfig g = default_gen_config(task);
    g.count = 500;
    g.seed = 42;
    for (const Schematic& s : generate(g)) {
      ++graphs;
      if (!(parse_netlist(serialize_schematic(s)) == s)) ++failures["round trip"];
      const PcbGraph pg = build_labeled_graph(s, embedder);
      bool bipartite = true;
      for (const GraphEdge& e : pg.edges) {
        bipartite = bipartite && e.net < pg.num_nets && e.symbol >= pg.num_nets &&
                    e.symbol < pg.num_nodes() && pg.node_kind[e.net] == NodeKind::kNet &&
                    pg.node_kind[e.symbol] == NodeKind::kSymbol;
      }
      if (!bipartite) ++failures["bipartite"];
      if (pg.node_features.cols() != 385 || pg.node_features.rows() != pg.num_nodes() ||
          pg.edge_features.cols() != 385 || pg.edge_features.rows() != pg.num_edges()) {
        ++failures["385-dim features"];
      }
      Schematic shuffled = s;
      Rng rng = Rng::derive(4004, graphs);
      rng.shuffle(shuffled.pins);
      if (!(build_labeled_graph(shuffled, embedder) == pg)) ++failures["pin permutation"];

      // y_node: a net is positive exactly when some positive pair touches it.
      std::set<std::int64_t> touched;
      for (const PairLabel& p : s.annotations->pair_labels) {
        if (label_is_positive(task, p.label)) {
          touched.insert(p.net_a);
          touched.insert(p.net_b);
        }
      }
      bool y_ok = pg.y_node.size() == pg.num_nets;
      for (std::size_t i = 0; y_ok && i < pg.num_nets; ++i) {
        y_ok = pg.y_node[i] == (touched.count(pg.provenance[i].id) ? 1 : 0);
      }
      for (const NodeLabel& l : s.annotations->node_labels) {
        y_ok = y_ok && l.label == (touched.count(l.net_id) ? 1 : 0);
      }
      if (!y_ok) ++failures["y_node"];
    }
  }
  std::string detail = std::to_string(graphs) + " schematics (500 per task): ";
  if (failures.empty()) {
    detail += "round trip, bipartiteness, 385-dim features, pin-permutation equality and "
              "y_node all hold";
  } else {
    for (const auto& [what, n] : failures) detail += what + " failed " + std::to_string(n) + "x ";
  }
  return {failures.empty(), detail};
}

}  // namespace
}  // namespace pcbgnn

int main(int argc, char** argv) {
  using namespace pcbgnn;
  CLI::App app{"pcbgnn acceptance criteria"};
  std::vector<int> selected;
  std::string workdir = "acceptance_work";
  app.add_option("--criterion", selected, "Criterion number 1-10 (repeatable)")
      ->check(CLI::Range(1, 10));
  app.add_option("--workdir", workdir, "Scratch directory")->capture_default_str();
  CLI11_PARSE(app, argc, argv);
  if (selected.empty()) selected = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};

  spdlog::set_level(spdlog::level::info);
  const fs::path work = fs::absolute(workdir);
  fs::create_directories(work);
  Lab lab;
  const std::map<int, std::function<Verdict()>> criteria = {
      {1, criterion_1},
      {2, criterion_2},
      {3, [&] { return criterion_3(lab); }},
      {4, [&] { return criterion_4(lab); }},
      {5, [&] { return criterion_5(lab); }},
      {6, [&] { return criterion_6(lab); }},
      {7, [&] { return criterion_7(work); }},
      {8, [&] { return criterion_8(lab); }},
      {9, [&] { return criterion_9(work); }},
      {10, criterion_10},
  };
  bool all = true;
  for (int n : selected) {
    Verdict v;
    try {
      v = criteria.at(n)();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    all = all && v.pass;
    std::printf("criterion %d: %s %s\n", n, v.pass ? "PASS" : "FAIL", v.detail.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
