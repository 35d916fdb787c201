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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "doctest.h"
#include "fixtures.h"

namespace pcbgnn {
namespace {

double norm(const Embedding& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

TEST_CASE("fnv1a64 reference values") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("hash embeddings are deterministic unit vectors") {
  HashNgramEmbedder e;
  CHECK(embed_name("GND", e) == embed_name("GND", e));
  Embedding r = embed_name("RESET", e);
  CHECK(r.size() == kEmbeddingDim);
  CHECK(std::abs(norm(r) - 1.0) <= 1e-9);
  CHECK_THROWS_AS(embed_name("", e), EmbeddingError);
}

TEST_CASE("similar names have similar embeddings") {
  HashNgramEmbedder e;
  const Embedding c17 = embed_name("C17", e);
  const Embedding c18 = embed_name("C18", e);
  const Embedding p5v = embed_name("+5V", e);
  CHECK(cosine_similarity(c17, c18) > cosine_similarity(c17, p5v));
  CHECK(cosine_similarity(embed_name("C1", e), c17) >
        cosine_similarity(embed_name("C1", e), p5v));
}

TEST_CASE("cosine similarity") {
  const std::vector<double> e1{1, 0, 0}, e2{0, 1, 0};
  const double r = 1 / std::sqrt(2.0);
  const std::vector<double> u{r, r, 0};
  CHECK(cosine_similarity(e1, e1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(cosine_similarity(e1, e2) == 0.0);
  // Hand value: (1/sqrt2 * 1) / (1 * 1).
  CHECK(std::abs(cosine_similarity(u, e1) - 0.70710678118654752) < 1e-12);
  CHECK(cosine_similarity(u, e1) == cosine_similarity(e1, u));
  CHECK_THROWS_AS(cosine_similarity(e1, std::vector<double>{1, 0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(cosine_similarity(e1, std::vector<double>{0, 0, 0}),
                  std::invalid_argument);
}

TEST_CASE("similarity matrix") {
  HashNgramEmbedder e;
  Tensor one = similarity_matrix({"GND"}, e);
  CHECK(one.rows() == 1);
  CHECK(one(0, 0) == 1.0);

  Tensor m = similarity_matrix({"A", "A", "B"}, e);
  for (std::size_t c = 0; c < 3; ++c) CHECK(m(0, c) == m(1, c));

  const std::vector<std::string> names{"GND", "+5V", "C17", "C18", "IC1", "C1"};
  Tensor f = similarity_matrix(names, e);
  for (std::size_t i = 0; i < names.size(); ++i) {
    CHECK(f(i, i) == 1.0);
    for (std::size_t j = 0; j < names.size(); ++j) {
      CHECK(f(i, j) == f(j, i));
      CHECK(f(i, j) >= -1.0);
      CHECK(f(i, j) <= 1.0);
    }
  }
  // Capacitor names (indices 2, 3, 5) are closer to each other than to +5V.
  for (std::size_t a : {2, 3, 5}) {
    for (std::size_t b : {2, 3, 5}) {
      if (a != b) CHECK(f(a, b) > f(a, 1));
    }
  }
}

TEST_CASE("tables round-trip and fall back") {
  HashNgramEmbedder hash;
  EmbeddingTable t;
  t.source = "minilm-l6-v2";
  t.entries["GND"] = embed_name("GND", hash);
  const auto path = testing::temp_path("table.json");
  store_table(t, path);
  EmbeddingTable back = load_table(path);
  CHECK(back == t);

  TableEmbedder with_fallback(back, true);
  CHECK(with_fallback.embed("GND") == t.entries["GND"]);
  CHECK(with_fallback.embed("VCC") == hash.embed("VCC"));
  TableEmbedder strict(back, false);
  CHECK_THROWS_AS(embed_name("VCC", strict), EmbeddingError);
  std::filesystem::remove(path);
}

TEST_CASE("table loading validates vectors") {
  const auto path = testing::temp_path("bad_table.json");
  {
    std::ofstream out(path);
    out << R"({"dim": 384, "source": "x", "entries": {"A": [)";
    for (int i = 0; i < 383; ++i) out << (i ? "," : "") << (i == 0 ? 1 : 0);
    out << "]}}";
  }
  try {
    load_table(path);
    FAIL("expected an error");
  } catch (const EmbeddingError& e) {
    CHECK(std::string(e.what()).find("383") != std::string::npos);
  }

  {
    std::ofstream out(path);
    out << R"({"dim": 384, "source": "x", "entries": {"A": [2)";
    for (int i = 1; i < 384; ++i) out << ",0";
    out << "]}}";
  }
  std::vector<std::string> warnings;
  EmbeddingTable t = load_table(path, &warnings);
  CHECK(warnings.size() == 1);
  CHECK(t.entries["A"][0] == 1.0);

  {
    std::ofstream out(path);
    out << R"({"dim": 3, "source": "x", "entries": {}})";
  }
  CHECK_THROWS_AS(load_table(path), EmbeddingError);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace pcbgnn
