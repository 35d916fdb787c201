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

// Name embeddings: strings -> unit vectors of length 384.
//
// The default embedder ("hash-ngram-v1") is a signed feature-hashing bag of
// character n-grams:
//   * the name is wrapped in the boundary bytes 0x02 (start) and 0x03 (end);
//   * every substring of length 1, 2 and 3 of the wrapped name is taken,
//     except the two single boundary bytes;
//   * each n-gram is hashed with 64-bit FNV-1a (offset basis
//     0xcbf29ce484222325, prime 0x100000001b3) over its raw bytes;
//   * the n-gram adds +1 to bin (hash % 384) when bit 63 of the hash is 0,
//     and -1 otherwise;
//   * the bin vector is L2-normalized.
// Names are used verbatim (no case folding or splitting).

#ifndef PCBGNN_EMBEDDING_H_
#define PCBGNN_EMBEDDING_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pcbgnn/tensor.h"

namespace pcbgnn {

inline constexpr std::size_t kEmbeddingDim = 384;
inline constexpr std::string_view kHashNgramSource = "hash-ngram-v1";

using Embedding = std::vector<double>;

std::uint64_t fnv1a64(std::string_view bytes);

class Embedder {
 public:
  virtual ~Embedder() = default;
  // `name` is non-empty; result has unit L2 norm.
  virtual Embedding embed(std::string_view name) const = 0;
  virtual std::string source() const = 0;
};

class HashNgramEmbedder final : public Embedder {
 public:
  Embedding embed(std::string_view name) const override;
  std::string source() const override { return std::string(kHashNgramSource); }
};

struct EmbeddingTable {
  std::size_t dim = kEmbeddingDim;
  std::string source;
  std::map<std::string, Embedding> entries;
  friend bool operator==(const EmbeddingTable&,
                         const EmbeddingTable&) = default;
};

// Looks names up in a table. Unknown names fall back to hash-ngram-v1 (and
// are logged) when `fallback` is set, otherwise they are an error.
class TableEmbedder final : public Embedder {
 public:
  explicit TableEmbedder(EmbeddingTable table, bool fallback = true);
  Embedding embed(std::string_view name) const override;
  std::string source() const override { return table_.source; }
  const EmbeddingTable& table() const { return table_; }

 private:
  EmbeddingTable table_;
  bool fallback_;
  HashNgramEmbedder hash_;
};

class EmbeddingError : public std::runtime_error {
 public:
  explicit EmbeddingError(const std::string& what) : std::runtime_error(what) {}
};

// Rejects empty names; otherwise delegates to `embedder`.
Embedding embed_name(std::string_view name, const Embedder& embedder);

double cosine_similarity(std::span<const double> u, std::span<const double> v);

// Symmetric matrix of pairwise cosine similarities with unit diagonal.
Tensor similarity_matrix(const std::vector<std::string>& names,
                         const Embedder& embedder);

// Vectors off unit norm by more than 1e-6 are renormalized and reported in
// `warnings` (and the log); smaller deviations above 1e-12 are renormalized
// silently.
EmbeddingTable load_table(const std::filesystem::path& path,
                          std::vector<std::string>* warnings = nullptr);
void store_table(const EmbeddingTable& table,
                 const std::filesystem::path& path);

}  // namespace pcbgnn

#endif  // PCBGNN_EMBEDDING_H_
