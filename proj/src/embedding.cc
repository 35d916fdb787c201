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

#include "pcbgnn/embedding.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <fstream>

#include "json.hpp"

namespace pcbgnn {
namespace {

constexpr char kStart = '\x02';
constexpr char kEnd = '\x03';

double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Embedding HashNgramEmbedder::embed(std::string_view name) const {
  std::string wrapped;
  wrapped.reserve(name.size() + 2);
  wrapped += kStart;
  wrapped += name;
  wrapped += kEnd;
  Embedding v(kEmbeddingDim, 0.0);
  const std::string_view w(wrapped);
  for (std::size_t n = 1; n <= 3; ++n) {
    for (std::size_t i = 0; i + n <= w.size(); ++i) {
      const std::string_view gram = w.substr(i, n);
      if (n == 1 && (gram[0] == kStart || gram[0] == kEnd)) continue;
      const std::uint64_t h = fnv1a64(gram);
      v[h % kEmbeddingDim] += (h >> 63) ? -1.0 : 1.0;
    }
  }
  double norm = l2_norm(v);
  if (norm == 0.0) {
    // Every n-gram cancelled out; fall back to the whole name's bin.
    const std::uint64_t h = fnv1a64(w);
    v[h % kEmbeddingDim] = 1.0;
    norm = 1.0;
  }
  for (double& x : v) x /= norm;
  return v;
}

TableEmbedder::TableEmbedder(EmbeddingTable table, bool fallback)
    : table_(std::move(table)), fallback_(fallback) {
  if (table_.dim != kEmbeddingDim) {
    throw EmbeddingError("embedding table has dim " +
                         std::to_string(table_.dim) + ", expected " +
                         std::to_string(kEmbeddingDim));
  }
}

Embedding TableEmbedder::embed(std::string_view name) const {
  auto it = table_.entries.find(std::string(name));
  if (it != table_.entries.end()) return it->second;
  if (!fallback_) {
    throw EmbeddingError("name \"" + std::string(name) +
                         "\" not in embedding table");
  }
  spdlog::debug("embedding table miss for \"{}\", using {}", name,
                kHashNgramSource);
  return hash_.embed(name);
}

Embedding embed_name(std::string_view name, const Embedder& embedder) {
  if (name.empty()) throw EmbeddingError("cannot embed an empty name");
  return embedder.embed(name);
}

double cosine_similarity(std::span<const double> u,
                         std::span<const double> v) {
  if (u.size() != v.size()) {
    throw std::invalid_argument("cosine_similarity: length mismatch " +
                                std::to_string(u.size()) + " vs " +
                                std::to_string(v.size()));
  }
  const double nu = l2_norm(u);
  const double nv = l2_norm(v);
  if (nu == 0.0 || nv == 0.0) {
    throw std::invalid_argument("cosine_similarity: zero vector");
  }
  double dot = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) dot += u[i] * v[i];
  return std::clamp(dot / (nu * nv), -1.0, 1.0);
}

Tensor similarity_matrix(const std::vector<std::string>& names,
                         const Embedder& embedder) {
  if (names.empty()) {
    throw std::invalid_argument("similarity_matrix needs at least one name");
  }
  std::vector<Embedding> vecs;
  vecs.reserve(names.size());
  for (const auto& n : names) vecs.push_back(embed_name(n, embedder));
  const std::size_t n = names.size();
  Tensor m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      m(i, j) = m(j, i) = cosine_similarity(vecs[i], vecs[j]);
    }
  }
  return m;
}

EmbeddingTable load_table(const std::filesystem::path& path,
                          std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw EmbeddingError("cannot open embedding table " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw EmbeddingError(path.string() + ": " + e.what());
  }
  EmbeddingTable t;
  try {
    t.dim = j.at("dim").get<std::size_t>();
    t.source = j.at("source").get<std::string>();
    for (const auto& [name, values] : j.at("entries").items()) {
      Embedding v = values.get<Embedding>();
      if (v.size() != t.dim) {
        throw EmbeddingError("entry \"" + name + "\" has length " +
                             std::to_string(v.size()) + ", table dim is " +
                             std::to_string(t.dim));
      }
      const double norm = l2_norm(v);
      if (norm == 0.0) {
        throw EmbeddingError("entry \"" + name + "\" is the zero vector");
      }
      if (std::abs(norm - 1.0) > 1e-6) {
        const std::string msg = "entry \"" + name + "\" has norm " +
                                std::to_string(norm) + "; renormalized";
        spdlog::warn("{}: {}", path.string(), msg);
        if (warnings) warnings->push_back(msg);
      }
      // Vectors already unit to 1e-12 are kept bit-exact.
      if (std::abs(norm - 1.0) > 1e-12) {
        for (double& x : v) x /= norm;
      }
      t.entries.emplace(name, std::move(v));
    }
  } catch (const nlohmann::json::exception& e) {
    throw EmbeddingError(path.string() + ": malformed table: " + e.what());
  }
  if (t.dim != kEmbeddingDim) {
    throw EmbeddingError(path.string() + ": dim " + std::to_string(t.dim) +
                         " is not " + std::to_string(kEmbeddingDim));
  }
  return t;
}

void store_table(const EmbeddingTable& table,
                 const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["dim"] = table.dim;
  j["source"] = table.source;
  nlohmann::ordered_json entries = nlohmann::ordered_json::object();
  for (const auto& [name, v] : table.entries) entries[name] = v;
  j["entries"] = std::move(entries);
  std::ofstream out(path);
  if (!out) throw EmbeddingError("cannot write " + path.string());
  out << j.dump() << '\n';
}

}  // namespace pcbgnn
