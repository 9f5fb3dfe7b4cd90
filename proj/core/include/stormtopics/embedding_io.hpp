// Copyright 2026 The stormtopics Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stormtopics/corpus.hpp"
#include "stormtopics/error.hpp"
#include "stormtopics/matrix.hpp"

namespace stormtopics {

// Bundle layout, one directory:
//   manifest.json   {"version":1, "n_tweets", "dim", "tweet_ids":[...],
//                    "sha256": hex digest of vectors.f32, "source_tag":
//                    "finetuned"|"pretrained"}
//   vectors.f32     n_tweets * dim little-endian IEEE-754 binary32 values,
//                   row-major, no header
//   attention.jsonl one {"id", "tokens":[...], "attn":[...]} per tweet in
//                   manifest order; attention is already averaged over heads
//                   and over the subwords of each surface token
inline constexpr int kBundleVersion = 1;

enum class SourceTag { finetuned, pretrained };

std::string_view to_string(SourceTag tag);
SourceTag source_tag_from_string(std::string_view name);

struct BundleManifest {
  int version = kBundleVersion;
  std::size_t n_tweets = 0;
  std::size_t dim = 0;
  std::vector<std::string> tweet_ids;
  std::string sha256;
  SourceTag source_tag = SourceTag::finetuned;
};

struct TokenAttention {
  std::string token;
  double score = 0.0;

  friend bool operator==(const TokenAttention&, const TokenAttention&) = default;
};

struct EmbeddingBundle {
  BundleManifest manifest;
  Matrix vectors;  // n_tweets x dim, values exactly representable as float
  std::vector<std::vector<TokenAttention>> attention;
};

enum class BundleErrorKind {
  missing_file,
  malformed_manifest,
  unknown_version,
  length_mismatch,
  checksum_mismatch,
  non_finite_vector,
  invalid_attention,
};

std::string_view to_string(BundleErrorKind kind);

class BundleError : public InputError {
 public:
  BundleError(BundleErrorKind kind, const std::string& detail);
  BundleErrorKind kind() const { return kind_; }

 private:
  BundleErrorKind kind_;
};

// Reads and validates every invariant of the bundle; violations raise a
// BundleError whose kind names the failed check.
EmbeddingBundle read_bundle(const std::filesystem::path& dir);

// Writes the three bundle files exactly as the exporter does. vectors are
// narrowed to float32 and the manifest checksum is recomputed.
void write_bundle(const std::filesystem::path& dir, const EmbeddingBundle& bundle);

// Little-endian float32 codec shared with model sidecars.
std::string encode_f32(std::span<const double> values);
std::vector<double> decode_f32(std::string_view bytes);

// Corpus-to-bundle row correspondence, by id.
struct Alignment {
  std::vector<std::size_t> doc_index;  // positions in the corpus
  std::vector<std::size_t> row;        // matching bundle rows
  std::vector<std::string> missing_from_bundle;
  std::vector<std::string> missing_from_corpus;

  std::size_t size() const { return row.size(); }
};

// Throws InputError when no id is shared.
Alignment align(const EmbeddingBundle& bundle, std::span<const Document> corpus);

}  // namespace stormtopics
