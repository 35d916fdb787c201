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

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "pcbgnn/checkpoint.h"
#include "pcbgnn/embedding.h"
#include "pcbgnn/graph.h"
#include "pcbgnn/grid.h"
#include "pcbgnn/netlist.h"
#include "pcbgnn/report.h"
#include "pcbgnn/synthdata.h"
#include "pcbgnn/training.h"

namespace pcbgnn {
namespace {

using Json = nlohmann::ordered_json;

// Bad flags or flag combinations; exit code 2.
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

// Checkpoint, data and flags disagree about the task or the embedder.
class IncompatibleError : public std::runtime_error {
 public:
  explicit IncompatibleError(const std::string& what)
      : std::runtime_error(what) {}
};

template <typename F>
auto flag_check(F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

void setup_logging() {
  static bool done = false;
  if (!done) {
    auto logger = spdlog::stderr_color_mt("pcbgnn");
    logger->set_pattern("[%l] %v");
    spdlog::set_default_logger(logger);
    done = true;
  }
  spdlog::level::level_enum level = spdlog::level::warn;
  if (const char* env = std::getenv("PCBGNN_LOG"); env && *env) {
    const std::string name = env;
    if (name == "trace") level = spdlog::level::trace;
    else if (name == "debug") level = spdlog::level::debug;
    else if (name == "info") level = spdlog::level::info;
    else if (name == "warn") level = spdlog::level::warn;
    else if (name == "error") level = spdlog::level::err;
    else if (name == "off") level = spdlog::level::off;
    else spdlog::warn("ignoring unknown PCBGNN_LOG level \"{}\"", name);
  }
  spdlog::set_level(level);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::unique_ptr<Embedder> make_embedder(const std::string& table_path) {
  if (table_path.empty()) return std::make_unique<HashNgramEmbedder>();
  return std::make_unique<TableEmbedder>(load_table(table_path));
}

// Stable identity of a dataset's content.
std::string fingerprint(const std::vector<Schematic>& schematics) {
  std::string all;
  for (const Schematic& s : schematics) {
    all += serialize_schematic(s);
    all += '\n';
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(all)));
  return buf;
}

struct Dataset {
  std::vector<Sample> samples;
  std::string fingerprint;
};

Dataset load_samples(const std::string& path, Task task, const Embedder& embedder) {
  const std::vector<Schematic> schematics = load_dataset(path);
  Dataset d;
  d.fingerprint = fingerprint(schematics);
  for (const Schematic& s : schematics) {
    if (!s.annotations) {
      throw IncompatibleError("schematic \"" + s.name + "\" has no annotations");
    }
    if (s.annotations->task != task) {
      throw IncompatibleError("schematic \"" + s.name + "\" is labeled for " +
                              std::string(task_name(s.annotations->task)) +
                              ", expected " + std::string(task_name(task)));
    }
    d.samples.push_back(make_sample(build_labeled_graph(s, embedder)));
  }
  if (d.samples.empty()) throw std::runtime_error(path + " holds no schematics");
  return d;
}

Schematic load_single(const std::string& path) {
  const std::string text = read_file(path);
  std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) throw NetlistError(path + " is empty");
  // A one-line dataset file is accepted too.
  try {
    return parse_netlist(text);
  } catch (const NetlistError&) {
    const std::vector<Schematic> all = load_dataset(path);
    if (all.size() != 1) {
      throw NetlistError(path + " holds " + std::to_string(all.size()) +
                         " schematics, expected one");
    }
    return all.front();
  }
}

void check_embedder(const Checkpoint& c, const Embedder& embedder,
                    const std::string& path) {
  if (!c.metadata.contains("embedder")) return;
  const std::string want = c.metadata.at("embedder").get<std::string>();
  if (want != embedder.source()) {
    throw IncompatibleError(path + " was trained with embedder \"" + want +
                            "\" but \"" + embedder.source() +
                            "\" is in use (see --embedding-table)");
  }
}

Json history_json(const std::vector<EpochRecord>& history) {
  Json h = Json::array();
  for (const EpochRecord& r : history) {
    Json e;
    e["epoch"] = r.epoch;
    e["train_loss"] = r.train_loss;
    e["val_loss"] = r.val_loss;
    e["val_metric"] = r.val_metric ? Json(*r.val_metric) : Json(nullptr);
    h.push_back(std::move(e));
  }
  return h;
}

Json optional_json(const std::optional<double>& x) {
  return x ? Json(*x) : Json(nullptr);
}

Json evaluation_json(const Evaluation& e) {
  Json j;
  j["metric"] = optional_json(e.metric);
  j["loss"] = e.loss;
  j["order_correlation"] = optional_json(e.order_correlation);
  if (e.regression) {
    j["cdf"] = e.regression->cdf;
    j["cdf_auc"] = e.regression->auc;
  }
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("error writing " + path);
}

// ---------------------------------------------------------------- commands

struct GenArgs {
  std::optional<std::string> task;
  std::optional<std::size_t> count;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string config;
};

int gen_data(const GenArgs& a, std::ostream& out) {
  GenConfig c = flag_check([&] {
    if (!a.task && a.config.empty()) {
      throw std::invalid_argument("gen-data needs --task or --config");
    }
    GenConfig g = a.config.empty() ? default_gen_config(parse_task(*a.task))
                                   : load_gen_config(a.config);
    if (a.task && parse_task(*a.task) != g.task) {
      throw std::invalid_argument("--task disagrees with the config file");
    }
    if (a.count) g.count = *a.count;
    if (a.seed) g.seed = *a.seed;
    validate_gen_config(g);
    return g;
  });
  const std::vector<Schematic> data = generate(c);
  store_dataset(data, a.out);
  out << "wrote " << data.size() << " " << task_name(c.task) << " schematics to "
      << a.out << '\n';
  return kExitOk;
}

struct TrainArgs {
  std::string data;
  std::string task;
  std::string backbone = "gatv2";
  std::optional<std::size_t> layers;
  std::optional<std::size_t> hidden;
  std::optional<std::size_t> heads;
  double lr = 1e-3;
  std::optional<double> theta;
  std::optional<double> alpha;
  std::uint64_t seed = 0;
  std::size_t fold = 0;
  std::size_t folds = 9;
  std::size_t max_epochs = 500;
  std::size_t patience = 20;
  std::size_t batch_size = 128;
  double weight_decay = 0.01;
  bool per_graph = false;
  std::string checkpoint;
  std::string metrics_out;
  std::string embedding_table;
};

int train_cmd(const TrainArgs& a, std::ostream& out) {
  const auto [spec, config] = flag_check([&] {
    const Task task = parse_task(a.task);
    ModelSpec s = preset(task, parse_layer_kind(a.backbone));
    if (a.layers) s.num_layers = *a.layers;
    if (a.hidden) s.hidden_dim = *a.hidden;
    if (a.heads) s.heads = *a.heads;
    if (a.theta) s.theta = *a.theta;
    if (a.alpha) {
      if (task != Task::kDecouplingCaps) {
        throw std::invalid_argument("--alpha applies to decoupling_caps only");
      }
      s.alpha = *a.alpha;
    }
    validate_model_spec(s);
    TrainConfig c;
    c.learning_rate = a.lr;
    c.seed = a.seed;
    c.folds = a.folds;
    c.max_epochs = a.max_epochs;
    c.patience = a.patience;
    c.batch_size = a.batch_size;
    c.weight_decay = a.weight_decay;
    c.aggregation = a.per_graph ? Aggregation::kPerGraphMean : Aggregation::kPooled;
    validate_train_config(c);
    if (a.fold >= c.folds) {
      throw std::invalid_argument("--fold must be below --folds");
    }
    return std::pair{s, c};
  });
  const auto embedder = make_embedder(a.embedding_table);
  const Dataset d = load_samples(a.data, spec.task, *embedder);
  const std::vector<Split> splits = split_dataset(d.samples.size(), config);
  const Split& split = splits[a.fold];
  const auto train_set = select(d.samples, split.train);
  const auto val_set = select(d.samples, split.val);
  const auto test_set = select(d.samples, split.test);

  TrainResult r = train(spec, config, train_set, val_set, [](const EpochRecord& e) {
    spdlog::info("epoch {} train_loss {:.6f} val_loss {:.6f} val_metric {}", e.epoch,
                 e.train_loss, e.val_loss, csv_number(e.val_metric));
  });
  const PairModel model = restore_model(r.checkpoint);
  const Evaluation test = evaluate(model, test_set, config.aggregation);

  Checkpoint& c = r.checkpoint;
  c.metadata["embedder"] = embedder->source();
  c.metadata["train_config"] = train_config_to_json(config);
  c.metadata["fold"] = a.fold;
  c.metadata["data"] = {{"graphs", d.samples.size()}, {"fingerprint", d.fingerprint}};
  c.metadata["best_epoch"] = r.best_epoch;
  c.metadata["best_val_metric"] = optional_json(r.best_val_metric);
  c.metadata["test"] = evaluation_json(test);
  save_checkpoint(c, a.checkpoint);

  if (!a.metrics_out.empty()) {
    Json m;
    m["task"] = task_name(spec.task);
    m["model_spec"] = model_spec_to_json(spec);
    m["train_config"] = train_config_to_json(config);
    m["fold"] = a.fold;
    m["split"] = {{"train", split.train.size()},
                  {"val", split.val.size()},
                  {"test", split.test.size()}};
    m["best_epoch"] = r.best_epoch;
    m["best_val_metric"] = optional_json(r.best_val_metric);
    m["test"] = evaluation_json(test);
    m["history"] = history_json(r.history);
    write_text(a.metrics_out, m.dump(2) + "\n");
  }
  out << metric_name(spec.task) << " " << csv_number(test.metric) << " (best epoch "
      << r.best_epoch << ")\n";
  return kExitOk;
}

struct EvalArgs {
  std::vector<std::string> checkpoints;
  std::string data;
  std::string report;
  bool sweep = false;
  std::string split = "test";
  std::string embedding_table;
};

int eval_cmd(const EvalArgs& a, std::ostream& out) {
  if (a.split != "test" && a.split != "all") {
    throw UsageError("--split must be \"test\" or \"all\"");
  }
  std::vector<Checkpoint> checkpoints;
  for (const std::string& p : a.checkpoints) checkpoints.push_back(load_checkpoint(p));
  const ModelSpec& spec = checkpoints.front().spec;
  for (std::size_t i = 1; i < checkpoints.size(); ++i) {
    if (!(checkpoints[i].spec == spec)) {
      throw IncompatibleError(a.checkpoints[i] + " has a different model spec than " +
                              a.checkpoints.front());
    }
  }
  const auto embedder = make_embedder(a.embedding_table);
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    check_embedder(checkpoints[i], *embedder, a.checkpoints[i]);
  }
  const Dataset d = load_samples(a.data, spec.task, *embedder);

  std::vector<FoldResult> folds;
  std::vector<std::vector<SweepPoint>> sweeps;
  std::vector<RegressionReport> cdfs;
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    const Checkpoint& c = checkpoints[i];
    TrainConfig config;
    if (c.metadata.contains("train_config")) {
      config = train_config_from_json(c.metadata.at("train_config"));
    }
    const std::size_t fold =
        c.metadata.contains("fold") ? c.metadata.at("fold").get<std::size_t>() : 0;
    std::vector<const Sample*> set;
    if (a.split == "all") {
      for (const Sample& s : d.samples) set.push_back(&s);
    } else {
      if (c.metadata.contains("data") &&
          c.metadata.at("data").value("fingerprint", "") != d.fingerprint) {
        spdlog::warn("{} was trained on different data; its split is reused by index",
                     a.checkpoints[i]);
      }
      const auto splits = split_dataset(d.samples.size(), config);
      if (fold >= splits.size()) {
        throw IncompatibleError(a.checkpoints[i] + " names fold " +
                                std::to_string(fold) + " of " +
                                std::to_string(splits.size()));
      }
      set = select(d.samples, splits[fold].test);
    }
    const PairModel model = restore_model(c);
    FoldResult f;
    f.fold = fold;
    f.spec = c.spec;
    f.learning_rate = config.learning_rate;
    f.best_epoch =
        c.metadata.contains("best_epoch") ? c.metadata.at("best_epoch").get<std::size_t>() : 0;
    f.evaluation = evaluate(model, set, config.aggregation);
    if (f.evaluation.regression) cdfs.push_back(*f.evaluation.regression);
    if (a.sweep) {
      const std::vector<double> grid = theta_grid();
      sweeps.push_back(theta_sweep(model, set, grid, config.aggregation));
    }
    folds.push_back(std::move(f));
  }

  eval_report_table(folds).write(a.report);
  std::filesystem::path base(a.report);
  if (a.sweep) {
    auto p = base;
    p.replace_extension(".theta_sweep.csv");
    sweep_table(sweeps).write(p);
    out << "wrote " << p.string() << '\n';
  }
  if (!cdfs.empty()) {
    auto p = base;
    p.replace_extension(".cdf.csv");
    cdf_table(cdfs).write(p);
    out << "wrote " << p.string() << '\n';
  }
  std::vector<std::optional<double>> metrics;
  for (const FoldResult& f : folds) metrics.push_back(f.evaluation.metric);
  const auto ms = mean_std(metrics);
  out << metric_name(spec.task) << " " << (ms ? csv_number(ms->mean) : "undefined");
  if (ms && ms->n > 1) out << " +- " << csv_number(ms->std);
  out << '\n';
  return kExitOk;
}

struct PredictArgs {
  std::string checkpoint;
  std::string netlist;
  std::string out;
  double min_score = 0.5;
  std::string embedding_table;
};

int predict_cmd(const PredictArgs& a, std::ostream& out) {
  if (!(a.min_score >= 0.0)) throw UsageError("--min-score must be >= 0");
  const Checkpoint c = load_checkpoint(a.checkpoint);
  const auto embedder = make_embedder(a.embedding_table);
  check_embedder(c, *embedder, a.checkpoint);
  const Schematic s = load_single(a.netlist);
  const PairModel model = restore_model(c);
  const Sample sample = make_sample(build_graph(s, *embedder));
  const PairPrediction p = model.predict(sample);
  const auto suggestions = suggest_insertions(p, sample.graph, a.min_score);
  suggestions_table(suggestions).write(a.out);
  out << suggestions.size() << " suggestions written to " << a.out << '\n';
  return kExitOk;
}

struct GridArgs {
  std::string space;
  std::string data;
  std::string task;
  std::string report;
  std::uint64_t seed = 0;
  std::size_t max_epochs = 500;
  std::size_t patience = 20;
  std::string embedding_table;
};

int grid_cmd(const GridArgs& a, std::ostream& out) {
  const auto [space, base] = flag_check([&] {
    SearchSpace s = load_search_space(a.space);
    if (parse_task(a.task) != s.task) {
      throw std::invalid_argument("--task disagrees with the search space");
    }
    expand(s);
    TrainConfig c;
    c.seed = a.seed;
    c.max_epochs = a.max_epochs;
    c.patience = a.patience;
    validate_train_config(c);
    return std::pair{s, c};
  });
  const auto embedder = make_embedder(a.embedding_table);
  const Dataset d = load_samples(a.data, space.task, *embedder);
  const GridResult r = grid_search(space, d.samples, base);
  best_config_table(r).write(a.report);
  out << r.ranked.size() << " configurations searched; best per backbone in "
      << a.report << '\n';
  return kExitOk;
}

int stats_cmd(const std::string& data, const std::string& path, std::ostream& out) {
  const HashNgramEmbedder embedder;
  std::vector<PcbGraph> graphs;
  for (const Schematic& s : load_dataset(data)) {
    graphs.push_back(build_labeled_graph(s, embedder));
  }
  if (graphs.empty()) throw std::runtime_error(data + " holds no schematics");
  const CsvTable t = stats_table(graph_stats(graphs));
  if (path.empty()) {
    out << t.to_string();
  } else {
    t.write(path);
  }
  return kExitOk;
}

int embed_sim_cmd(const std::string& netlist, const std::string& path,
                  const std::string& table) {
  const auto embedder = make_embedder(table);
  const PcbGraph g = build_graph(load_single(netlist), *embedder);
  std::vector<std::string> names;
  for (const std::string& n : g.node_names) {
    if (std::find(names.begin(), names.end(), n) == names.end()) names.push_back(n);
  }
  similarity_table(names, similarity_matrix(names, *embedder)).write(path);
  return kExitOk;
}

void error_line(std::ostream& err, const std::string& kind, const std::string& command,
                const std::string& message) {
  Json j;
  j["error"] = kind;
  j["command"] = command;
  j["message"] = message;
  err << j.dump() << '\n';
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  setup_logging();
  CLI::App app{"PCB schematic node-pair prediction with graph neural networks", "pcbgnn"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every command");

  auto existing = CLI::ExistingFile;

  GenArgs gen;
  auto* g = app.add_subcommand("gen-data", "Generate a labeled synthetic dataset");
  g->add_option("--task", gen.task, "pull_up_down, rc_filter or decoupling_caps");
  g->add_option("--count", gen.count, "Number of schematics");
  g->add_option("--seed", gen.seed, "Generator seed");
  g->add_option("--out", gen.out, "Dataset file to write")->required();
  g->add_option("--config", gen.config, "Generator config file (JSON)")->check(existing);

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "Train on one fold and save a checkpoint");
  t->add_option("--data", tr.data, "Labeled dataset file")->required()->check(existing);
  t->add_option("--task", tr.task, "Task of the dataset labels")->required();
  t->add_option("--backbone", tr.backbone,
                "mlp, gcn, gin, gine, gat, gatv2 or gt")->capture_default_str();
  t->add_option("--layers", tr.layers, "Message-passing layers (preset default)");
  t->add_option("--hidden", tr.hidden, "Hidden width (default 64)");
  t->add_option("--heads", tr.heads, "Attention heads (preset default)");
  t->add_option("--lr", tr.lr, "Learning rate")->capture_default_str();
  t->add_option("--theta", tr.theta, "Pre-filter threshold (preset default)");
  t->add_option("--alpha", tr.alpha, "Regression loss weight (decoupling_caps)");
  t->add_option("--seed", tr.seed, "Split and initialization seed")->capture_default_str();
  t->add_option("--fold", tr.fold, "Cross-validation fold")->capture_default_str();
  t->add_option("--folds", tr.folds, "Number of folds")->capture_default_str();
  t->add_option("--max-epochs", tr.max_epochs)->capture_default_str();
  t->add_option("--patience", tr.patience)->capture_default_str();
  t->add_option("--batch-size", tr.batch_size)->capture_default_str();
  t->add_option("--weight-decay", tr.weight_decay)->capture_default_str();
  t->add_flag("--per-graph", tr.per_graph, "Average the metric over graphs instead of pooling");
  t->add_option("--out-checkpoint", tr.checkpoint, "Checkpoint file to write")->required();
  t->add_option("--metrics-out", tr.metrics_out, "Training metrics JSON file");
  t->add_option("--embedding-table", tr.embedding_table, "Name embedding table file")
      ->check(existing);

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "Evaluate checkpoints and write CSV reports");
  e->add_option("--checkpoint", ev.checkpoints, "Checkpoint file (repeatable)")
      ->required()
      ->check(existing);
  e->add_option("--data", ev.data, "Labeled dataset file")->required()->check(existing);
  e->add_option("--report", ev.report, "Report CSV to write")->required();
  e->add_flag("--sweep-theta", ev.sweep,
              "Also write <report>.theta_sweep.csv over theta 0.0..0.7");
  e->add_option("--split", ev.split, "test (each checkpoint's test fold) or all")
      ->capture_default_str();
  e->add_option("--embedding-table", ev.embedding_table, "Name embedding table file")
      ->check(existing);

  PredictArgs pr;
  auto* p = app.add_subcommand("predict", "Rank suggested component insertions");
  p->add_option("--checkpoint", pr.checkpoint)->required()->check(existing);
  p->add_option("--netlist", pr.netlist, "Schematic file")->required()->check(existing);
  p->add_option("--out", pr.out, "Suggestions CSV to write")->required();
  p->add_option("--min-score", pr.min_score, "Smallest score listed")->capture_default_str();
  p->add_option("--embedding-table", pr.embedding_table)->check(existing);

  GridArgs gr;
  auto* gs = app.add_subcommand("grid", "Grid search over a hyperparameter space");
  gs->add_option("--space", gr.space, "Search space file (JSON)")->required()->check(existing);
  gs->add_option("--data", gr.data, "Labeled dataset file")->required()->check(existing);
  gs->add_option("--task", gr.task)->required();
  gs->add_option("--report", gr.report, "Best-configuration CSV to write")->required();
  gs->add_option("--seed", gr.seed)->capture_default_str();
  gs->add_option("--max-epochs", gr.max_epochs)->capture_default_str();
  gs->add_option("--patience", gr.patience)->capture_default_str();
  gs->add_option("--embedding-table", gr.embedding_table)->check(existing);

  std::string stats_data, stats_out;
  auto* st = app.add_subcommand("stats", "Dataset statistics");
  st->add_option("--data", stats_data)->required()->check(existing);
  st->add_option("--out", stats_out, "CSV file (default stdout)");

  std::string sim_netlist, sim_out, sim_table;
  auto* es = app.add_subcommand("embed-sim", "Cosine similarity of a schematic's names");
  es->add_option("--netlist", sim_netlist)->required()->check(existing);
  es->add_option("--out", sim_out)->required();
  es->add_option("--embedding-table", sim_table)->check(existing);

  std::string command = args.empty() ? "" : args.front();
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& ex) {
    error_line(err, "usage", command, ex.what());
    return kExitUsage;
  }

  try {
    if (g->parsed()) return gen_data(gen, out);
    if (t->parsed()) return train_cmd(tr, out);
    if (e->parsed()) return eval_cmd(ev, out);
    if (p->parsed()) return predict_cmd(pr, out);
    if (gs->parsed()) return grid_cmd(gr, out);
    if (st->parsed()) return stats_cmd(stats_data, stats_out, out);
    if (es->parsed()) return embed_sim_cmd(sim_netlist, sim_out, sim_table);
  } catch (const UsageError& ex) {
    error_line(err, "usage", command, ex.what());
    return kExitUsage;
  } catch (const IncompatibleError& ex) {
    error_line(err, "incompatible", command, ex.what());
    return kExitFailure;
  } catch (const NetlistError& ex) {
    error_line(err, "netlist", command, ex.what());
    return kExitFailure;
  } catch (const CheckpointError& ex) {
    error_line(err, "checkpoint", command, ex.what());
    return kExitFailure;
  } catch (const EmbeddingError& ex) {
    error_line(err, "embedding", command, ex.what());
    return kExitFailure;
  } catch (const TrainingError& ex) {
    error_line(err, "training", command, ex.what());
    return kExitFailure;
  } catch (const std::exception& ex) {
    error_line(err, "runtime", command, ex.what());
    return kExitFailure;
  }
  error_line(err, "usage", command, "no command");
  return kExitUsage;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace pcbgnn
