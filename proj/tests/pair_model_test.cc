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

#include "pcbgnn/pair_model.h"

#include <cmath>

#include "doctest.h"
#include "fixtures.h"
#include "pcbgnn/checkpoint.h"
#include "pcbgnn/grad_check.h"

namespace pcbgnn {
namespace {

const HashNgramEmbedder kHash;

constexpr LayerKind kKinds[] = {LayerKind::kMlpOnly, LayerKind::kGcn,
                                LayerKind::kGin,     LayerKind::kGine,
                                LayerKind::kGat,     LayerKind::kGatv2,
                                LayerKind::kGt};
constexpr Task kTasks[] = {Task::kPullUpDown, Task::kRcFilter,
                           Task::kDecouplingCaps};

Sample small_sample(Task task) {
  return make_sample(build_labeled_graph(testing::small_labeled(task), kHash));
}

ModelSpec small_spec(Task task, LayerKind kind, double theta = 0.0) {
  ModelSpec s;
  s.task = task;
  s.backbone = kind;
  s.num_layers = kind == LayerKind::kMlpOnly ? 0 : 2;
  s.hidden_dim = 8;
  s.heads = is_attention(kind) ? 4 : 1;
  s.theta = theta;
  if (task == Task::kDecouplingCaps) s.alpha = 0.1;
  return s;
}

void zero_prefix(ParameterStore& p, const std::string& prefix) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i].name.rfind(prefix, 0) == 0) p[i].value.fill(0.0);
  }
}

TEST_CASE("model spec validation") {
  ModelSpec s = small_spec(Task::kPullUpDown, LayerKind::kGcn);
  CHECK_NOTHROW(validate_model_spec(s));
  ModelSpec bad = s;
  bad.num_layers = 0;
  CHECK_THROWS_AS(validate_model_spec(bad), std::invalid_argument);
  bad = s;
  bad.backbone = LayerKind::kMlpOnly;
  CHECK_THROWS_AS(validate_model_spec(bad), std::invalid_argument);
  bad = s;
  bad.theta = 1.0;
  CHECK_THROWS_AS(validate_model_spec(bad), std::invalid_argument);
  bad = s;
  bad.alpha = 0.1;
  CHECK_THROWS_AS(validate_model_spec(bad), std::invalid_argument);
  bad = small_spec(Task::kDecouplingCaps, LayerKind::kGcn);
  bad.alpha.reset();
  CHECK_THROWS_AS(validate_model_spec(bad), std::invalid_argument);
  bad = small_spec(Task::kPullUpDown, LayerKind::kGat);
  bad.heads = 2;
  CHECK_THROWS_AS(validate_model_spec(bad), std::invalid_argument);

  CHECK(on_search_grid(preset(Task::kRcFilter, LayerKind::kGin)));
  CHECK_FALSE(on_search_grid(s));  // hidden 8
  s.hidden_dim = 16;
  s.theta = 0.3;
  CHECK(on_search_grid(s));
  s.theta = 0.8;
  CHECK_FALSE(on_search_grid(s));
}

TEST_CASE("presets") {
  ModelSpec p = preset(Task::kPullUpDown, LayerKind::kGatv2);
  CHECK(p.num_layers == 3);
  CHECK(p.hidden_dim == 64);
  CHECK(p.heads == 4);
  CHECK(p.theta == 0.1);
  CHECK(preset(Task::kRcFilter, LayerKind::kGt).heads == 1);
  CHECK(preset(Task::kDecouplingCaps, LayerKind::kGat).theta == 0.5);
  CHECK(preset(Task::kDecouplingCaps, LayerKind::kGine).num_layers == 1);
  CHECK(preset(Task::kDecouplingCaps, LayerKind::kMlpOnly).alpha == 0.1);
  for (Task t : kTasks) {
    for (LayerKind k : kKinds) CHECK_NOTHROW(validate_model_spec(preset(t, k)));
  }
}

TEST_CASE("candidate selection") {
  const std::vector<double> probs{0.2, 0.9, 0.71};
  CHECK(select_candidates(probs, 0.0) == std::vector<std::size_t>{0, 1, 2});
  CHECK(select_candidates(probs, 0.7) == std::vector<std::size_t>{1, 2});
  Rng rng(5);
  std::vector<double> r(40);
  for (double& x : r) x = rng.uniform();
  for (int i = 0; i < 7; ++i) {
    auto lo = select_candidates(r, 0.1 * i);
    auto hi = select_candidates(r, 0.1 * (i + 1));
    CHECK(std::includes(lo.begin(), lo.end(), hi.begin(), hi.end()));
  }
}

TEST_CASE("ordered pairs") {
  std::vector<std::size_t> a, b;
  const std::vector<std::size_t> two{3, 7};
  ordered_pairs(two, a, b);
  CHECK(a == std::vector<std::size_t>{3, 7});
  CHECK(b == std::vector<std::size_t>{7, 3});
  const std::vector<std::size_t> five{0, 1, 2, 3, 4};
  ordered_pairs(five, a, b);
  CHECK(a.size() == 20);
  ordered_pairs(std::vector<std::size_t>{4}, a, b);
  CHECK(a.empty());
  ordered_pairs(std::vector<std::size_t>{}, a, b);
  CHECK(a.empty());
}

TEST_CASE("zero-weight heads") {
  const Sample s = small_sample(Task::kPullUpDown);
  PairModel m(small_spec(Task::kPullUpDown, LayerKind::kGcn), 1);
  zero_prefix(m.parameters(), "prefilter");
  zero_prefix(m.parameters(), "head");
  PairPrediction p = m.predict(s);
  for (double x : p.node_probs) CHECK(x == 0.5);
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t b = 0; b < 3; ++b) {
      if (a != b) CHECK(p.score(a, b) == 0.5);
    }
  }
}

TEST_CASE("prefilter only reads net rows") {
  Schematic sch = testing::small_labeled(Task::kPullUpDown);
  PairModel m(small_spec(Task::kPullUpDown, LayerKind::kGcn), 2);
  const PairPrediction ref = m.predict(make_sample(build_labeled_graph(sch, kHash)));
  // Renumber symbols so they are built in reverse order.
  for (Symbol& sym : sch.symbols) sym.id = 100 - sym.id;
  for (Pin& pin : sch.pins) pin.symbol_id = 100 - pin.symbol_id;
  const PairPrediction moved =
      m.predict(make_sample(build_labeled_graph(sch, kHash)));
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(std::abs(ref.node_probs[i] - moved.node_probs[i]) < 1e-12);
  }
}

TEST_CASE("prefilter gradient through BCE") {
  const Sample s = small_sample(Task::kPullUpDown);
  PairModel m(small_spec(Task::kPullUpDown, LayerKind::kMlpOnly), 3);
  const ParameterStore& p = m.parameters();
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i].name.rfind("prefilter", 0) != 0) continue;
    auto f = [&, i](Tape& tape, Var x) {
      std::vector<Var> params = p.bind(tape, false);
      params[i] = x;
      Var h = slice_rows(m.represent(params, s), 0, s.graph.num_nets);
      Var probs = sigmoid(m.prefilter().forward(params, h));
      PairForward none;
      return compose_loss(Task::kPullUpDown, probs, s.graph.y_node, none, {},
                          std::nullopt);
    };
    CHECK(grad_check(f, p[i].value, GradCheckOptions{1e-6, 300, 1}) < 1e-4);
  }
}

TEST_CASE("decomposed first layer equals explicit concatenation") {
  for (Task task : kTasks) {
    PairModel m(small_spec(task, LayerKind::kGin), 4);
    const Sample s = small_sample(task);
    Tape tape;
    std::vector<Var> params = m.parameters().bind(tape, false);
    Var h = slice_rows(m.represent(params, s), 0, 3);
    const std::vector<std::size_t> first{0, 1, 2, 0}, second{1, 0, 0, 2};
    auto [primary, count] = m.pair_outputs(params, h, first, second);
    std::vector<Var> rows;
    for (std::size_t i = 0; i < first.size(); ++i) {
      rows.push_back(concat({slice_rows(h, first[i], first[i] + 1),
                             slice_rows(h, second[i], second[i] + 1)},
                            1));
    }
    Var logits = m.head().forward(params, concat(rows, 0));
    Var expected = task == Task::kRcFilter ? softmax(logits, 1) : sigmoid(logits);
    for (std::size_t i = 0; i < expected.value().size(); ++i) {
      CHECK(std::abs(primary.value()[i] - expected.value()[i]) < 1e-12);
    }
    if (task == Task::kRcFilter) {
      for (std::size_t r = 0; r < first.size(); ++r) {
        double total = 0;
        for (std::size_t c = 0; c < 3; ++c) total += primary.value()(r, c);
        CHECK(std::abs(total - 1.0) < 1e-12);
      }
    }
  }
}

PairForward manual_forward(Tape& tape, Tensor primary, Tensor count,
                           std::size_t pairs) {
  PairForward f;
  f.first.assign(pairs, 0);
  f.second.assign(pairs, 1);
  f.primary = tape.constant(std::move(primary));
  if (!count.empty()) f.count = tape.constant(std::move(count));
  return f;
}

TEST_CASE("composite loss") {
  Tape tape;
  const double hi = 1 - 1e-12, lo = 1e-12;
  Var probs = tape.constant(Tensor::from_rows({{hi}, {lo}, {hi}}));
  const std::vector<int> y_node{1, 0, 1};

  // Perfect predictions.
  PairForward perfect = manual_forward(
      tape, Tensor::from_rows({{hi}, {hi}, {lo}}), Tensor(), 3);
  const std::vector<std::int64_t> labels{1, 1, 0};
  LossParts parts;
  Var l = compose_loss(Task::kPullUpDown, probs, y_node, perfect, labels,
                       std::nullopt, &parts);
  CHECK(l.value().item() < 1e-10);
  CHECK(l.value().item() == parts.node + parts.task);

  // Regression arithmetic: label 3, prediction 1, alpha 0.1.
  PairForward dec = manual_forward(tape, Tensor::from_rows({{hi}, {hi}}),
                                   Tensor::from_rows({{1.0}, {1.0}}), 2);
  const std::vector<std::int64_t> three{3, 3};
  Var with = compose_loss(Task::kDecouplingCaps, probs, y_node, dec, three, 0.1,
                          &parts);
  Var without = compose_loss(Task::kDecouplingCaps, probs, y_node, dec, three,
                             0.0);
  CHECK(std::abs(with.value().item() - without.value().item() - 0.4) < 1e-12);

  // alpha = 0 leaves node BCE + pair BCE.
  PairForward bin = manual_forward(tape, Tensor::from_rows({{0.3}, {0.6}}),
                                   Tensor(), 2);
  Var pull = compose_loss(Task::kPullUpDown, probs, y_node, bin,
                          std::vector<std::int64_t>{1, 0}, std::nullopt);
  dec = manual_forward(tape, Tensor::from_rows({{0.3}, {0.6}}),
                       Tensor::from_rows({{5.0}, {-2.0}}), 2);
  Var dec0 = compose_loss(Task::kDecouplingCaps, probs, y_node, dec,
                          std::vector<std::int64_t>{4, 0}, 0.0);
  CHECK(dec0.value().item() == pull.value().item());
  const double expected_pair = -(std::log(0.3) + std::log(0.4)) / 2;
  const double expected_node = -(3 * std::log(hi) - 0 + std::log(1 - lo)) / 3;
  CHECK(std::abs(pull.value().item() - expected_node - expected_pair) < 1e-12);

  // RC cross-entropy.
  PairForward rc = manual_forward(
      tape, Tensor::from_rows({{0.2, 0.5, 0.3}, {0.1, 0.1, 0.8}}), Tensor(), 2);
  compose_loss(Task::kRcFilter, probs, y_node, rc,
               std::vector<std::int64_t>{1, 2}, std::nullopt, &parts);
  CHECK(std::abs(parts.task + (std::log(0.5) + std::log(0.8)) / 2) < 1e-12);

  // No surviving pairs: the task term vanishes.
  PairForward none;
  compose_loss(Task::kRcFilter, probs, y_node, none, {}, std::nullopt, &parts);
  CHECK(parts.task == 0.0);
  CHECK_THROWS_AS(compose_loss(Task::kDecouplingCaps, probs, y_node, none, {},
                               std::nullopt),
                  std::invalid_argument);
}

// Independent re-evaluation of every net pair from the node representations.
void check_against_brute_force(const PairModel& m, const Sample& s) {
  const PairPrediction p = m.predict(s);
  Tape tape;
  std::vector<Var> params = m.parameters().bind(tape, false);
  Var h = slice_rows(m.represent(params, s), 0, s.graph.num_nets);
  Var probs = sigmoid(m.prefilter().forward(params, h));
  const std::size_t n = s.graph.num_nets;
  const std::vector<double> fill = filtered_default(m.spec().task);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      const bool kept = probs.value()(a, 0) > m.spec().theta &&
                        probs.value()(b, 0) > m.spec().theta;
      CHECK(p.evaluated(a, b) == kept);
      std::vector<double> expect = fill;
      if (kept) {
        Var ab = concat({slice_rows(h, a, a + 1), slice_rows(h, b, b + 1)}, 1);
        Var ba = concat({slice_rows(h, b, b + 1), slice_rows(h, a, a + 1)}, 1);
        Var both = concat({ab, ba}, 0);
        Var logits = m.head().forward(params, both);
        Var out = m.spec().task == Task::kRcFilter ? softmax(logits, 1)
                                                   : sigmoid(logits);
        for (std::size_t c = 0; c < out.cols(); ++c) {
          expect[c] = 0.5 * (out.value()(0, c) + out.value()(1, c));
        }
      }
      for (std::size_t c = 0; c < p.channels; ++c) {
        if (m.spec().task == Task::kDecouplingCaps && c == 1) continue;
        CHECK(std::abs(p.score(a, b, c) - expect[c]) < 1e-12);
        CHECK(p.score(a, b, c) == p.score(b, a, c));
      }
    }
  }
}

TEST_CASE("full matrix prediction matches brute force") {
  for (Task task : kTasks) {
    for (double theta : {0.0, 0.45, 0.5, 0.55}) {
      PairModel m(small_spec(task, LayerKind::kGat, theta), 21);
      check_against_brute_force(m, small_sample(task));
    }
  }
}

TEST_CASE("threshold limits") {
  const Sample s = small_sample(Task::kRcFilter);
  PairModel m(small_spec(Task::kRcFilter, LayerKind::kGcn, 0.0), 6);
  PairPrediction all = m.predict(s);
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t b = 0; b < 3; ++b) {
      if (a != b) CHECK(all.evaluated(a, b));
    }
  }
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t b = 0; b < 3; ++b) {
      if (a == b) continue;
      CHECK(all.score(a, b, 0) ==
            doctest::Approx(0.5 * (all.raw_score(a, b, 0) +
                                   all.raw_score(b, a, 0)))
                .epsilon(1e-15));
    }
  }
  m.set_theta(0.999999);
  PairPrediction none = m.predict(s);
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t b = 0; b < 3; ++b) {
      CHECK_FALSE(none.evaluated(a, b));
      CHECK(none.score(a, b, 0) == 1.0);
      CHECK(none.positive_score(a, b) == 0.0);
    }
  }
}

TEST_CASE("mlp backbone sees only the endpoints") {
  Sample s = small_sample(Task::kPullUpDown);
  PairModel m(small_spec(Task::kPullUpDown, LayerKind::kMlpOnly, 0.0), 7);
  const PairPrediction ref = m.predict(s);
  // Swap the features of every node other than nets 0 and 1.
  Rng rng(1);
  for (std::size_t i = 2; i < s.graph.num_nodes(); ++i) {
    for (double& v : s.graph.node_features.row(i)) v = rng.uniform(-1, 1);
  }
  const PairPrediction moved = m.predict(s);
  CHECK(moved.score(0, 1) == ref.score(0, 1));
  CHECK(moved.raw_score(1, 0) == ref.raw_score(1, 0));
}

TEST_CASE("full loss passes gradient checks") {
  for (Task task : kTasks) {
    for (LayerKind kind : kKinds) {
      CAPTURE(task_name(task));
      CAPTURE(layer_kind_name(kind));
      PairModel m(small_spec(task, kind, 0.1), 30);
      const Sample s = small_sample(task);
      // Zero biases put ReLU inputs exactly on the kink; move off it.
      Rng jitter(31);
      for (std::size_t i = 0; i < m.parameters().size(); ++i) {
        for (double& v : m.parameters()[i].value.values()) {
          v += jitter.uniform(-0.05, 0.05);
        }
      }
      const ParameterStore& p = m.parameters();
      for (std::size_t i = 0; i < p.size(); ++i) {
        CAPTURE(p[i].name);
        auto f = [&, i](Tape& tape, Var x) {
          std::vector<Var> params = p.bind(tape, false);
          params[i] = x;
          return m.loss(params, s);
        };
        CHECK(grad_check(f, p[i].value, GradCheckOptions{1e-6, 40, i}) < 1e-4);
      }
    }
  }
}

TEST_CASE("loss rejects graphs labeled for another task") {
  PairModel m(small_spec(Task::kRcFilter, LayerKind::kGcn), 1);
  Tape tape;
  CHECK_THROWS_AS(m.loss(m.parameters().bind(tape, false),
                         small_sample(Task::kPullUpDown)),
                  std::invalid_argument);
}

TEST_CASE("checkpoint round trip") {
  const auto path = testing::temp_path("ckpt.json");
  for (Task task : kTasks) {
    PairModel m(small_spec(task, LayerKind::kGatv2, 0.2), 8);
    Checkpoint c = make_checkpoint(m);
    TrainingState state;
    state.step = 12;
    for (const Parameter& p : c.parameters) {
      Tensor t = p.value;
      t.scale_inplace(1.0 / 3.0);
      state.m.push_back(t);
      state.v.push_back(p.value);
    }
    c.training_state = state;
    c.metadata["seed"] = 8;
    save_checkpoint(c, path);
    Checkpoint back = load_checkpoint(path);
    CHECK(back.spec == m.spec());
    CHECK(back.metadata["seed"] == 8);
    REQUIRE(back.training_state.has_value());
    CHECK(back.training_state->step == 12);
    CHECK(back.training_state->m == state.m);
    PairModel restored = restore_model(back);
    for (std::size_t i = 0; i < m.parameters().size(); ++i) {
      CHECK(restored.parameters()[i].value == m.parameters()[i].value);
    }
    const Sample s = small_sample(task);
    CHECK(restored.predict(s).scores == m.predict(s).scores);
  }
  Checkpoint c = make_checkpoint(PairModel(small_spec(Task::kPullUpDown,
                                                      LayerKind::kGcn), 1));
  c.parameters[0].value = Tensor(2, 2);
  CHECK_THROWS_AS(restore_model(c), CheckpointError);
  c.metadata["parameters"] = 1;
  CHECK_THROWS_AS(save_checkpoint(c, path), CheckpointError);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace pcbgnn
