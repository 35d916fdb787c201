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

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "doctest.h"
#include "fixtures.h"

namespace pcbgnn {
namespace {

const HashNgramEmbedder kHash;

ModelSpec tiny_spec(Task task, LayerKind kind = LayerKind::kGcn) {
  ModelSpec s;
  s.task = task;
  s.backbone = kind;
  s.num_layers = kind == LayerKind::kMlpOnly ? 0 : 1;
  s.hidden_dim = 8;
  s.heads = is_attention(kind) ? 4 : 1;
  s.theta = 0.0;
  if (task == Task::kDecouplingCaps) s.alpha = 0.1;
  return s;
}

TEST_CASE("train config validation") {
  TrainConfig c;
  CHECK_NOTHROW(validate_train_config(c));
  c.learning_rate = 0.0;
  CHECK_THROWS_AS(validate_train_config(c), std::invalid_argument);
  c = TrainConfig{};
  c.patience = 0;
  CHECK_THROWS_AS(validate_train_config(c), std::invalid_argument);
  c = TrainConfig{};
  c.val_ratio = 0.2;
  CHECK_THROWS_AS(validate_train_config(c), std::invalid_argument);
}

TEST_CASE("splits") {
  TrainConfig c;
  c.folds = 1;
  auto one = split_dataset(10, c);
  REQUIRE(one.size() == 1);
  CHECK(one[0].train.size() == 8);
  CHECK(one[0].val.size() == 1);
  CHECK(one[0].test.size() == 1);

  c.folds = 9;
  c.seed = 5;
  auto nine = split_dataset(90, c);
  REQUIRE(nine.size() == 9);
  std::set<std::size_t> tested;
  for (const Split& s : nine) {
    CHECK(s.test.size() == 9);
    CHECK(s.val.size() == 9);
    CHECK(s.train.size() == 72);
    for (std::size_t i : s.test) CHECK(tested.insert(i).second);
    std::set<std::size_t> all(s.train.begin(), s.train.end());
    all.insert(s.val.begin(), s.val.end());
    all.insert(s.test.begin(), s.test.end());
    CHECK(all.size() == 90);
  }
  CHECK(tested.size() == 81);

  auto again = split_dataset(90, c);
  for (std::size_t f = 0; f < 9; ++f) {
    CHECK(again[f].train == nine[f].train);
    CHECK(again[f].test == nine[f].test);
  }
  c.seed = 6;
  CHECK(split_dataset(90, c)[0].test != nine[0].test);
  CHECK_THROWS_AS(split_dataset(5, c), std::invalid_argument);
}

std::vector<Sample> variants(Task task, std::size_t count) {
  std::vector<Sample> out;
  for (std::size_t i = 0; i < count; ++i) {
    Schematic s = testing::small_labeled(task);
    s.name = "v" + std::to_string(i);
    // Extra unlabeled nets make pair ranking non-trivial.
    for (std::size_t k = 0; k < i % 3; ++k) {
      const auto id = static_cast<std::int64_t>(20 + k);
      s.nets.push_back({id, "N$" + std::to_string(id)});
      s.pins.push_back({12, id, "3"});
    }
    s.annotations->node_labels =
        derive_node_labels(s, s.annotations->pair_labels, task);
    out.push_back(make_sample(build_labeled_graph(s, kHash)));
  }
  return out;
}

TEST_CASE("training reduces the loss on a separable graph") {
  for (Task task : {Task::kPullUpDown, Task::kRcFilter, Task::kDecouplingCaps}) {
    std::vector<Sample> data = variants(task, 1);
    std::vector<const Sample*> set{&data[0]};
    TrainConfig c;
    c.max_epochs = 50;
    c.patience = 50;
    c.learning_rate = 0.01;
    TrainResult r = train(tiny_spec(task), c, set, set);
    REQUIRE(r.history.size() == 50);
    CHECK(r.history.back().train_loss < r.history.front().train_loss);
  }
}

TEST_CASE("early stopping returns the best epoch") {
  std::vector<Sample> data = variants(Task::kPullUpDown, 6);
  std::vector<const Sample*> tr{&data[0], &data[1], &data[2], &data[3]};
  std::vector<const Sample*> va{&data[4], &data[5]};
  TrainConfig c;
  c.max_epochs = 200;
  c.patience = 5;
  c.learning_rate = 0.01;
  c.batch_size = 2;
  TrainResult r = train(tiny_spec(Task::kPullUpDown), c, tr, va);
  CHECK(r.history.size() <= r.best_epoch + c.patience);
  auto score = [](const EpochRecord& e) {
    return e.val_metric ? *e.val_metric : -e.val_loss;
  };
  const double best = score(r.history[r.best_epoch - 1]);
  for (std::size_t e = 0; e < r.best_epoch; ++e) {
    CHECK(score(r.history[e]) <= best);
  }
  if (r.history.size() < c.max_epochs) {
    CHECK(r.history.size() == r.best_epoch + c.patience);
  }
  // The checkpoint reproduces the best epoch's validation numbers.
  PairModel m = restore_model(r.checkpoint);
  Evaluation e = evaluate(m, va);
  CHECK(e.metric == r.history[r.best_epoch - 1].val_metric);
  CHECK(e.loss == r.history[r.best_epoch - 1].val_loss);
}

TEST_CASE("training is deterministic") {
  std::vector<Sample> data = variants(Task::kRcFilter, 5);
  std::vector<const Sample*> tr{&data[0], &data[1], &data[2]};
  std::vector<const Sample*> va{&data[3], &data[4]};
  TrainConfig c;
  c.max_epochs = 8;
  c.seed = 3;
  c.batch_size = 2;
  auto run = [&] {
    return train(tiny_spec(Task::kRcFilter, LayerKind::kGatv2), c, tr, va);
  };
  TrainResult a = run(), b = run();
  REQUIRE(a.history.size() == b.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    CHECK(a.history[i].train_loss == b.history[i].train_loss);
    CHECK(a.history[i].val_metric == b.history[i].val_metric);
  }
  for (std::size_t i = 0; i < a.checkpoint.parameters.size(); ++i) {
    CHECK(a.checkpoint.parameters[i].value == b.checkpoint.parameters[i].value);
  }
}

TEST_CASE("training errors") {
  std::vector<Sample> data = variants(Task::kPullUpDown, 2);
  std::vector<const Sample*> set{&data[0]};
  std::vector<const Sample*> other{&data[1]};
  TrainConfig c;
  c.max_epochs = 3;
  CHECK_THROWS_AS(train(tiny_spec(Task::kRcFilter), c, set, other),
                  TrainingError);
  data[0].graph.node_features(0, 1) = std::numeric_limits<double>::quiet_NaN();
  try {
    train(tiny_spec(Task::kPullUpDown), c, set, other);
    FAIL("expected a TrainingError");
  } catch (const TrainingError& e) {
    CHECK(std::string(e.what()).find("epoch 1") != std::string::npos);
  }
}

TEST_CASE("theta sweep") {
  std::vector<Sample> data = variants(Task::kPullUpDown, 3);
  std::vector<const Sample*> set{&data[0], &data[1], &data[2]};
  PairModel m(tiny_spec(Task::kPullUpDown), 4);
  const std::vector<double> grid = theta_grid();
  CHECK(grid.size() == 8);
  CHECK(grid[3] == 0.3);
  auto points = theta_sweep(m, set, grid);
  std::size_t all_pairs = 0;
  for (const Sample* s : set) {
    all_pairs += s->graph.num_nets * (s->graph.num_nets - 1) / 2;
  }
  CHECK(points[0].evaluated_pairs == all_pairs);
  for (std::size_t i = 1; i < points.size(); ++i) {
    CHECK(points[i].evaluated_pairs <= points[i - 1].evaluated_pairs);
  }
  CHECK(m.spec().theta == 0.0);
}

}  // namespace
}  // namespace pcbgnn
