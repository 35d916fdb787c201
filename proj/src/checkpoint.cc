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

#include "pcbgnn/checkpoint.h"

#include <fstream>
#include <set>
#include <utility>

namespace pcbgnn {
namespace {

using Json = nlohmann::ordered_json;

Json tensor_values(const Tensor& t) { return Json(t.values()); }

Tensor tensor_from(const Json& shape, const Json& values,
                   const std::string& where) {
  if (!shape.is_array() || shape.size() != 2) {
    throw CheckpointError(where + ": shape must be [rows, cols]");
  }
  const auto rows = shape[0].get<std::size_t>();
  const auto cols = shape[1].get<std::size_t>();
  auto data = values.get<std::vector<double>>();
  if (data.size() != rows * cols) {
    throw CheckpointError(where + ": " + std::to_string(data.size()) +
                          " values for shape " + std::to_string(rows) + "x" +
                          std::to_string(cols));
  }
  return Tensor(rows, cols, std::move(data));
}

}  // namespace

Json model_spec_to_json(const ModelSpec& spec) {
  Json j;
  j["task"] = task_name(spec.task);
  j["backbone"] = layer_kind_name(spec.backbone);
  j["num_layers"] = spec.num_layers;
  j["hidden_dim"] = spec.hidden_dim;
  j["heads"] = spec.heads;
  j["theta"] = spec.theta;
  if (spec.alpha) j["alpha"] = *spec.alpha;
  return j;
}

ModelSpec model_spec_from_json(const Json& j) {
  static const std::set<std::string> kKeys{"task",       "backbone", "num_layers",
                                           "hidden_dim", "heads",    "theta",
                                           "alpha"};
  ModelSpec spec;
  try {
    for (const auto& [key, _] : j.items()) {
      if (!kKeys.contains(key)) {
        throw CheckpointError("model_spec: unknown key \"" + key + "\"");
      }
    }
    spec.task = parse_task(j.at("task").get<std::string>());
    spec.backbone = parse_layer_kind(j.at("backbone").get<std::string>());
    spec.num_layers = j.at("num_layers").get<std::size_t>();
    spec.hidden_dim = j.at("hidden_dim").get<std::size_t>();
    spec.heads = j.at("heads").get<std::size_t>();
    spec.theta = j.at("theta").get<double>();
    if (j.contains("alpha")) spec.alpha = j.at("alpha").get<double>();
    validate_model_spec(spec);
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("model_spec: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw CheckpointError(std::string("model_spec: ") + e.what());
  }
  return spec;
}

Checkpoint make_checkpoint(const PairModel& model) {
  Checkpoint c;
  c.spec = model.spec();
  const ParameterStore& p = model.parameters();
  for (std::size_t i = 0; i < p.size(); ++i) c.parameters.push_back(p[i]);
  return c;
}

PairModel restore_model(const Checkpoint& c) {
  PairModel model(c.spec, 0);
  ParameterStore& p = model.parameters();
  if (p.size() != c.parameters.size()) {
    throw CheckpointError("checkpoint has " +
                          std::to_string(c.parameters.size()) +
                          " parameters, model expects " +
                          std::to_string(p.size()));
  }
  for (const Parameter& saved : c.parameters) {
    auto i = p.find(saved.name);
    if (!i) throw CheckpointError("unexpected parameter " + saved.name);
    if (!p[*i].value.same_shape(saved.value)) {
      throw CheckpointError("parameter " + saved.name + " has shape " +
                            saved.value.shape_string() + ", expected " +
                            p[*i].value.shape_string());
    }
    p[*i].value = saved.value;
  }
  return model;
}

void save_checkpoint(const Checkpoint& c, const std::filesystem::path& path) {
  Json j;
  j["format_version"] = kCheckpointFormatVersion;
  j["model_spec"] = model_spec_to_json(c.spec);
  Json params = Json::object();
  for (const Parameter& p : c.parameters) {
    params[p.name] = {{"shape", {p.value.rows(), p.value.cols()}},
                      {"values", tensor_values(p.value)}};
  }
  j["parameters"] = std::move(params);
  if (c.training_state) {
    const TrainingState& s = *c.training_state;
    if (s.m.size() != c.parameters.size() || s.v.size() != c.parameters.size()) {
      throw CheckpointError("training state does not match the parameters");
    }
    Json m = Json::object(), v = Json::object();
    for (std::size_t i = 0; i < c.parameters.size(); ++i) {
      m[c.parameters[i].name] = tensor_values(s.m[i]);
      v[c.parameters[i].name] = tensor_values(s.v[i]);
    }
    j["training_state"] = {{"step", s.step}, {"m", std::move(m)},
                           {"v", std::move(v)}};
  }
  for (const auto& [key, value] : c.metadata.items()) {
    if (j.contains(key)) {
      throw CheckpointError("metadata key \"" + key + "\" is reserved");
    }
    j[key] = value;
  }
  std::ofstream out(path);
  if (!out) throw CheckpointError("cannot write " + path.string());
  out << j.dump() << '\n';
  if (!out) throw CheckpointError("write error on " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw CheckpointError(path.string() + ": " + e.what());
  }
  Checkpoint c;
  try {
    const int version = j.at("format_version").get<int>();
    if (version != kCheckpointFormatVersion) {
      throw CheckpointError(path.string() + ": unsupported format_version " +
                            std::to_string(version));
    }
    c.spec = model_spec_from_json(j.at("model_spec"));
    for (const auto& [name, p] : j.at("parameters").items()) {
      c.parameters.push_back(
          {name, tensor_from(p.at("shape"), p.at("values"), name)});
    }
    if (j.contains("training_state")) {
      const Json& s = j["training_state"];
      TrainingState state;
      state.step = s.at("step").get<std::int64_t>();
      for (const Parameter& p : c.parameters) {
        const Json shape = {p.value.rows(), p.value.cols()};
        state.m.push_back(tensor_from(shape, s.at("m").at(p.name), p.name));
        state.v.push_back(tensor_from(shape, s.at("v").at(p.name), p.name));
      }
      c.training_state = std::move(state);
    }
    for (const auto& [key, value] : j.items()) {
      if (key != "format_version" && key != "model_spec" &&
          key != "parameters" && key != "training_state") {
        c.metadata[key] = value;
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(path.string() + ": malformed checkpoint: " +
                          e.what());
  }
  return c;
}

}  // namespace pcbgnn
