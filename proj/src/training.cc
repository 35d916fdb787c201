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

#include "pcbgnn/training.h"

#include <cmath>
#include <limits>
#include <numeric>

#include "pcbgnn/random.h"
#include "spdlog/spdlog.h"

namespace pcbgnn {
namespace {

// Stream id for the epoch shuffles, distinct from parameter init.
constexpr std::uint64_t kShuffleStream = 0x5eed;

double validation_score(const Evaluation& e) {
  return e.metric ? *e.metric : -e.loss;
}

}  // namespace

void validate_train_config(const TrainConfig& c) {
  if (!(c.learning_rate > 0.0) || !std::isfinite(c.learning_rate)) {
    throw std::invalid_argument("learning rate must be positive");
  }
  if (!(c.weight_decay >= 0.0)) {
    throw std::invalid_argument("weight decay must be >= 0");
  }
  if (c.batch_size == 0) throw std::invalid_argument("batch size must be >= 1");
  if (c.patience == 0) throw std::invalid_argument("patience must be >= 1");
  if (c.max_epochs == 0) throw std::invalid_argument("max_epochs must be >= 1");
  if (c.folds == 0) throw std::invalid_argument("folds must be >= 1");
  if (!(c.train_ratio > 0 && c.val_ratio > 0 && c.test_ratio > 0) ||
      std::abs(c.train_ratio + c.val_ratio + c.test_ratio - 1.0) > 1e-9) {
    throw std::invalid_argument("split ratios must be positive and sum to 1");
  }
}

nlohmann::ordered_json train_config_to_json(const TrainConfig& c) {
  nlohmann::ordered_json j;
  j["learning_rate"] = c.learning_rate;
  j["weight_decay"] = c.weight_decay;
  j["batch_size"] = c.batch_size;
  j["patience"] = c.patience;
  j["max_epochs"] = c.max_epochs;
  j["seed"] = c.seed;
  j["train_ratio"] = c.train_ratio;
  j["val_ratio"] = c.val_ratio;
  j["test_ratio"] = c.test_ratio;
  j["folds"] = c.folds;
  j["aggregation"] =
      c.aggregation == Aggregation::kPooled ? "pooled" : "per_graph_mean";
  return j;
}

TrainConfig train_config_from_json(const nlohmann::ordered_json& j) {
  if (!j.is_object()) throw std::invalid_argument("train config must be an object");
  TrainConfig c;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "learning_rate") c.learning_rate = v.get<double>();
      else if (key == "weight_decay") c.weight_decay = v.get<double>();
      else if (key == "batch_size") c.batch_size = v.get<std::size_t>();
      else if (key == "patience") c.patience = v.get<std::size_t>();
      else if (key == "max_epochs") c.max_epochs = v.get<std::size_t>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "train_ratio") c.train_ratio = v.get<double>();
      else if (key == "val_ratio") c.val_ratio = v.get<double>();
      else if (key == "test_ratio") c.test_ratio = v.get<double>();
      else if (key == "folds") c.folds = v.get<std::size_t>();
      else if (key == "aggregation") {
        const auto name = v.get<std::string>();
        if (name == "pooled") c.aggregation = Aggregation::kPooled;
        else if (name == "per_graph_mean") c.aggregation = Aggregation::kPerGraphMean;
        else throw std::invalid_argument("unknown aggregation \"" + name + "\"");
      } else {
        throw std::invalid_argument("unknown train config key \"" + key + "\"");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("train config: ") + e.what());
  }
  validate_train_config(c);
  return c;
}

std::vector<Split> split_dataset(std::size_t n, const TrainConfig& c) {
  validate_train_config(c);
  const auto test = static_cast<std::size_t>(
      std::llround(c.test_ratio * static_cast<double>(n)));
  const auto val = static_cast<std::size_t>(
      std::llround(c.val_ratio * static_cast<double>(n)));
  if (n < c.folds || test == 0 || val == 0 || c.folds * test > n ||
      test + val >= n) {
    throw std::invalid_argument(
        "too few graphs (" + std::to_string(n) + ") for " +
        std::to_string(c.folds) + " folds with the given split ratios");
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng = Rng::derive(c.seed, 0x5b117);
  rng.shuffle(perm);
  std::vector<Split> out(c.folds);
  for (std::size_t f = 0; f < c.folds; ++f) {
    std::vector<bool> used(n, false);
    for (std::size_t i = 0; i < test; ++i) {
      const std::size_t k = f * test + i;
      out[f].test.push_back(perm[k]);
      used[k] = true;
    }
    for (std::size_t i = 0; i < val; ++i) {
      const std::size_t k = ((f + 1) * test + i) % n;
      out[f].val.push_back(perm[k]);
      used[k] = true;
    }
    for (std::size_t k = 0; k < n; ++k) {
      if (!used[k]) out[f].train.push_back(perm[k]);
    }
  }
  return out;
}

Evaluation evaluate(const PairModel& model,
                    std::span<const Sample* const> samples,
                    Aggregation aggregation) {
  if (samples.empty()) throw std::invalid_argument("evaluate: no graphs");
  Evaluation e;
  std::vector<PairPrediction> preds;
  std::vector<const PcbGraph*> graphs;
  double loss = 0.0;
  for (const Sample* s : samples) {
    double l = 0.0;
    preds.push_back(model.predict(*s, &l));
    loss += l;
    graphs.push_back(&s->graph);
  }
  e.loss = loss / static_cast<double>(samples.size());
  e.metric = task_metric(preds, graphs, aggregation);
  e.order_correlation = order_correlation(preds);
  if (model.spec().task == Task::kDecouplingCaps) {
    bool any = false;
    for (const PcbGraph* g : graphs) {
      for (const auto& [_, y] : g->y_pair) any = any || y != 0;
    }
    if (any) e.regression = decoupling_regression(preds, graphs);
  }
  return e;
}

TrainResult train(const ModelSpec& spec, const TrainConfig& config,
                  std::span<const Sample* const> train_set,
                  std::span<const Sample* const> val_set,
                  const EpochCallback& on_epoch) {
  validate_model_spec(spec);
  validate_train_config(config);
  if (train_set.empty() || val_set.empty()) {
    throw std::invalid_argument("train: empty training or validation set");
  }
  for (auto set : {train_set, val_set}) {
    for (const Sample* s : set) {
      if (!s->graph.task || *s->graph.task != spec.task) {
        throw TrainingError("graph \"" + s->graph.name +
                            "\" is not labeled for task " +
                            std::string(task_name(spec.task)));
      }
    }
  }
  PairModel model(spec, config.seed);
  AdamWOptions opt;
  opt.learning_rate = config.learning_rate;
  opt.weight_decay = config.weight_decay;
  AdamW adam(opt);
  Rng shuffle = Rng::derive(config.seed, kShuffleStream);

  TrainResult result;
  std::vector<Tensor> best = model.parameters().snapshot();
  double best_score = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    shuffle.shuffle(order);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size();
         start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      std::vector<Tensor> grads;
      for (std::size_t i = start; i < end; ++i) {
        Tape tape;
        std::vector<Var> params = model.parameters().bind(tape, true);
        Var loss = model.loss(params, *train_set[order[i]]);
        const double value = loss.value().item();
        if (!std::isfinite(value)) {
          throw TrainingError("non-finite loss at epoch " +
                              std::to_string(epoch) + " on graph \"" +
                              train_set[order[i]]->graph.name + "\"");
        }
        epoch_loss += value;
        tape.backward(loss);
        std::vector<Tensor> g = model.parameters().gradients(params);
        if (grads.empty()) {
          grads = std::move(g);
        } else {
          for (std::size_t k = 0; k < grads.size(); ++k) grads[k].add_inplace(g[k]);
        }
      }
      const double inv = 1.0 / static_cast<double>(end - start);
      for (Tensor& g : grads) {
        g.scale_inplace(inv);
        for (double v : g.values()) {
          if (!std::isfinite(v)) {
            throw TrainingError("non-finite gradient at epoch " +
                                std::to_string(epoch));
          }
        }
      }
      adam.step(model.parameters(), grads);
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = epoch_loss / static_cast<double>(order.size());
    const Evaluation val = evaluate(model, val_set, config.aggregation);
    rec.val_loss = val.loss;
    rec.val_metric = val.metric;
    if (!std::isfinite(rec.val_loss)) {
      throw TrainingError("non-finite validation loss at epoch " +
                          std::to_string(epoch));
    }
    result.history.push_back(rec);
    if (on_epoch) on_epoch(rec);
    spdlog::debug("epoch {} train_loss {:.6f} val_loss {:.6f} val_metric {}",
                  epoch, rec.train_loss, rec.val_loss,
                  rec.val_metric ? *rec.val_metric : -1.0);
    const double score = validation_score(val);
    if (score > best_score) {
      best_score = score;
      best = model.parameters().snapshot();
      result.best_epoch = epoch;
      result.best_val_metric = val.metric;
    } else if (epoch - result.best_epoch >= config.patience) {
      break;
    }
  }
  model.parameters().restore(best);
  result.checkpoint = make_checkpoint(model);
  result.checkpoint.training_state =
      TrainingState{adam.steps(), adam.first_moments(), adam.second_moments()};
  return result;
}

std::vector<SweepPoint> theta_sweep(const PairModel& model,
                                    std::span<const Sample* const> samples,
                                    std::span<const double> thetas,
                                    Aggregation aggregation) {
  if (samples.empty()) throw std::invalid_argument("theta_sweep: no graphs");
  std::vector<SweepPoint> out;
  PairModel copy = restore_model(make_checkpoint(model));
  for (double theta : thetas) {
    copy.set_theta(theta);
    std::vector<PairPrediction> preds;
    std::vector<const PcbGraph*> graphs;
    SweepPoint p;
    p.theta = theta;
    for (const Sample* s : samples) {
      preds.push_back(copy.predict(*s));
      graphs.push_back(&s->graph);
      const PairPrediction& q = preds.back();
      for (std::size_t a = 0; a < q.num_nets; ++a) {
        for (std::size_t b = a + 1; b < q.num_nets; ++b) {
          p.evaluated_pairs += q.evaluated(a, b);
        }
      }
    }
    p.metric = task_metric(preds, graphs, aggregation);
    out.push_back(p);
  }
  return out;
}

std::vector<double> theta_grid() {
  std::vector<double> out;
  for (int i = 0; i <= 7; ++i) out.push_back(i / 10.0);
  return out;
}

std::vector<const Sample*> select(std::span<const Sample> all,
                                  std::span<const std::size_t> indices) {
  std::vector<const Sample*> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) {
    if (i >= all.size()) throw std::out_of_range("sample index out of range");
    out.push_back(&all[i]);
  }
  return out;
}

}  // namespace pcbgnn
