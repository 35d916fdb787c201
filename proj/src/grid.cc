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

#include "pcbgnn/grid.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "pcbgnn/checkpoint.h"

namespace pcbgnn {
namespace {

using Json = nlohmann::ordered_json;

template <typename T>
std::vector<T> list(const Json& j, const char* key) {
  if (!j.contains(key)) {
    throw std::invalid_argument(std::string("search space needs \"") + key +
                                "\"");
  }
  return j.at(key).get<std::vector<T>>();
}

}  // namespace

bool on_learning_rate_grid(double lr) {
  return lr == 0.001 || lr == 0.0005 || lr == 0.0001;
}

SearchSpace search_space_from_json(const Json& j) {
  static const std::set<std::string> kKeys = {
      "task",           "backbones", "layers", "hidden", "heads",
      "learning_rates", "thetas",    "alpha",  "folds"};
  if (!j.is_object()) throw std::invalid_argument("search space must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!kKeys.contains(key)) {
      throw std::invalid_argument("unknown search space key \"" + key + "\"");
    }
  }
  SearchSpace s;
  try {
    if (!j.contains("task")) throw std::invalid_argument("search space needs \"task\"");
    s.task = parse_task(j.at("task").get<std::string>());
    for (const auto& name : list<std::string>(j, "backbones")) {
      s.backbones.push_back(parse_layer_kind(name));
    }
    s.layers = list<std::size_t>(j, "layers");
    s.hidden = list<std::size_t>(j, "hidden");
    s.heads = list<std::size_t>(j, "heads");
    s.learning_rates = list<double>(j, "learning_rates");
    s.thetas = list<double>(j, "thetas");
    if (j.contains("alpha")) s.alpha = j.at("alpha").get<double>();
    if (j.contains("folds")) s.folds = j.at("folds").get<std::vector<std::size_t>>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("search space: ") + e.what());
  }
  return s;
}

SearchSpace load_search_space(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open search space " + path.string());
  try {
    return search_space_from_json(Json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

std::vector<GridPoint> expand(const SearchSpace& space) {
  if (space.backbones.empty() || space.hidden.empty() ||
      space.learning_rates.empty() || space.thetas.empty() ||
      space.folds.empty()) {
    throw std::invalid_argument("search space is empty");
  }
  std::vector<GridPoint> out;
  for (LayerKind kind : space.backbones) {
    const bool mlp = kind == LayerKind::kMlpOnly;
    const std::vector<std::size_t> layers =
        mlp ? std::vector<std::size_t>{0} : space.layers;
    const std::vector<std::size_t> heads =
        is_attention(kind) ? space.heads : std::vector<std::size_t>{1};
    if (layers.empty() || heads.empty()) {
      throw std::invalid_argument("search space is empty");
    }
    for (std::size_t l : layers) {
      for (std::size_t h : space.hidden) {
        for (std::size_t k : heads) {
          for (double lr : space.learning_rates) {
            for (double theta : space.thetas) {
              GridPoint p;
              p.spec.backbone = kind;
              p.spec.num_layers = l;
              p.spec.hidden_dim = h;
              p.spec.heads = k;
              p.spec.theta = theta;
              p.spec.task = space.task;
              if (space.task == Task::kDecouplingCaps) p.spec.alpha = space.alpha;
              p.learning_rate = lr;
              if (!(lr > 0.0)) {
                throw std::invalid_argument("learning rate must be positive");
              }
              if (!on_learning_rate_grid(lr)) {
                throw std::invalid_argument("learning rate " + std::to_string(lr) +
                                            " is off the search grid");
              }
              validate_model_spec(p.spec);
              if (!on_search_grid(p.spec)) {
                throw std::invalid_argument(
                    "configuration off the search grid: " +
                    model_spec_to_json(p.spec).dump());
              }
              const bool seen = std::any_of(out.begin(), out.end(), [&](const GridPoint& q) {
                return q.spec == p.spec && q.learning_rate == p.learning_rate;
              });
              if (!seen) out.push_back(std::move(p));
            }
          }
        }
      }
    }
  }
  return out;
}

GridResult grid_search(const SearchSpace& space, std::span<const Sample> data,
                       const TrainConfig& base,
                       const std::function<void(const GridTrial&)>& on_trial) {
  const std::vector<GridPoint> points = expand(space);
  validate_train_config(base);
  const std::vector<Split> splits = split_dataset(data.size(), base);
  for (std::size_t f : space.folds) {
    if (f >= splits.size()) {
      throw std::invalid_argument("fold " + std::to_string(f) + " out of range");
    }
  }
  GridResult r;
  for (const GridPoint& p : points) {
    GridTrial trial;
    trial.point = p;
    std::vector<std::optional<double>> vals, tests;
    for (std::size_t f : space.folds) {
      TrainConfig c = base;
      c.learning_rate = p.learning_rate;
      const auto train_set = select(data, splits[f].train);
      const auto val_set = select(data, splits[f].val);
      const auto test_set = select(data, splits[f].test);
      const TrainResult t = train(p.spec, c, train_set, val_set);
      const PairModel model = restore_model(t.checkpoint);
      FoldResult fr;
      fr.fold = f;
      fr.spec = p.spec;
      fr.learning_rate = p.learning_rate;
      fr.best_epoch = t.best_epoch;
      fr.evaluation = evaluate(model, test_set, base.aggregation);
      vals.push_back(t.best_val_metric);
      tests.push_back(fr.evaluation.metric);
      trial.folds.push_back(std::move(fr));
    }
    if (auto m = mean_std(vals)) trial.val_metric = m->mean;
    if (auto m = mean_std(tests)) trial.test_metric = m->mean;
    spdlog::info("grid: {} val {} test {}", model_spec_to_json(p.spec).dump(),
                 csv_number(trial.val_metric), csv_number(trial.test_metric));
    if (on_trial) on_trial(trial);
    r.ranked.push_back(std::move(trial));
  }
  std::stable_sort(r.ranked.begin(), r.ranked.end(),
                   [](const GridTrial& a, const GridTrial& b) {
                     if (a.val_metric.has_value() != b.val_metric.has_value()) {
                       return a.val_metric.has_value();
                     }
                     return a.val_metric && *a.val_metric > *b.val_metric;
                   });
  return r;
}

CsvTable best_config_table(const GridResult& r) {
  CsvTable t;
  t.header = {"backbone", "layers", "hidden",     "heads",
              "lr",       "theta",  "val_metric", "test_metric"};
  for (int k = 0; k <= static_cast<int>(LayerKind::kGt); ++k) {
    const auto kind = static_cast<LayerKind>(k);
    for (const GridTrial& g : r.ranked) {
      if (g.point.spec.backbone != kind) continue;
      const ModelSpec& s = g.point.spec;
      char theta[16];
      std::snprintf(theta, sizeof theta, "%.1f", s.theta);
      t.rows.push_back({std::string(layer_kind_name(kind)),
                        std::to_string(s.num_layers), std::to_string(s.hidden_dim),
                        std::to_string(s.heads), csv_number(g.point.learning_rate),
                        theta, csv_number(g.val_metric), csv_number(g.test_metric)});
      break;  // ranked order: the first hit is the best
    }
  }
  return t;
}

}  // namespace pcbgnn
