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
#include "stormtopics/embedding_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <nlohmann/json.hpp>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "stormtopics/io.hpp"

namespace stormtopics {

namespace {

std::string read_member(const std::filesystem::path& dir, const char* name) {
  const auto path = dir / name;
  if (!std::filesystem::is_regular_file(path)) {
    throw BundleError(BundleErrorKind::missing_file, path.string());
  }
  return read_file(path);
}

BundleManifest parse_manifest(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw BundleError(BundleErrorKind::malformed_manifest, e.what());
  }
  BundleManifest m;
  try {
    m.version = j.at("version").get<int>();
    if (m.version != kBundleVersion) {
      throw BundleError(BundleErrorKind::unknown_version, "manifest version " + std::to_string(m.version));
    }
    m.n_tweets = j.at("n_tweets").get<std::size_t>();
    m.dim = j.at("dim").get<std::size_t>();
    m.tweet_ids = j.at("tweet_ids").get<std::vector<std::string>>();
    m.sha256 = j.at("sha256").get<std::string>();
    m.source_tag = source_tag_from_string(j.at("source_tag").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw BundleError(BundleErrorKind::malformed_manifest, e.what());
  } catch (const BundleError&) {
    throw;
  } catch (const InputError& e) {
    throw BundleError(BundleErrorKind::malformed_manifest, e.what());
  }
  if (m.dim == 0) throw BundleError(BundleErrorKind::malformed_manifest, "dim must be positive");
  if (m.tweet_ids.size() != m.n_tweets) {
    throw BundleError(BundleErrorKind::length_mismatch,
                      "manifest lists " + std::to_string(m.tweet_ids.size()) + " ids for n_tweets=" +
                          std::to_string(m.n_tweets));
  }
  std::unordered_set<std::string> seen;
  for (const auto& id : m.tweet_ids) {
    if (!seen.insert(id).second) {
      throw BundleError(BundleErrorKind::malformed_manifest, "duplicate tweet id \"" + id + "\"");
    }
  }
  return m;
}

std::vector<std::vector<TokenAttention>> parse_attention(std::string_view text, const BundleManifest& m) {
  std::vector<std::vector<TokenAttention>> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::string where = "attention.jsonl line " + std::to_string(line_no) + ": ";
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw BundleError(BundleErrorKind::invalid_attention, where + e.what());
    }
    if (out.size() >= m.n_tweets) {
      throw BundleError(BundleErrorKind::length_mismatch, where + "more records than n_tweets");
    }
    std::vector<std::string> tokens;
    std::vector<double> attn;
    std::string id;
    try {
      id = j.at("id").get<std::string>();
      tokens = j.at("tokens").get<std::vector<std::string>>();
      attn = j.at("attn").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
      throw BundleError(BundleErrorKind::invalid_attention, where + e.what());
    }
    if (id != m.tweet_ids[out.size()]) {
      throw BundleError(BundleErrorKind::invalid_attention,
                        where + "id \"" + id + "\" out of manifest order (expected \"" +
                            m.tweet_ids[out.size()] + "\")");
    }
    if (tokens.size() != attn.size()) {
      throw BundleError(BundleErrorKind::invalid_attention, where + "tokens and attn differ in length");
    }
    std::vector<TokenAttention> row;
    row.reserve(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (!std::isfinite(attn[i]) || attn[i] < 0.0) {
        throw BundleError(BundleErrorKind::invalid_attention,
                          where + "attention score for \"" + tokens[i] + "\" is negative or non-finite");
      }
      row.push_back({std::move(tokens[i]), attn[i]});
    }
    out.push_back(std::move(row));
  }
  if (out.size() != m.n_tweets) {
    throw BundleError(BundleErrorKind::length_mismatch,
                      "attention.jsonl has " + std::to_string(out.size()) + " records for n_tweets=" +
                          std::to_string(m.n_tweets));
  }
  return out;
}

}  // namespace

std::string_view to_string(SourceTag tag) { return tag == SourceTag::pretrained ? "pretrained" : "finetuned"; }

SourceTag source_tag_from_string(std::string_view name) {
  if (name == "finetuned") return SourceTag::finetuned;
  if (name == "pretrained") return SourceTag::pretrained;
  throw InputError("unknown source_tag \"" + std::string(name) + "\"");
}

std::string_view to_string(BundleErrorKind kind) {
  switch (kind) {
    case BundleErrorKind::missing_file: return "missing-file";
    case BundleErrorKind::malformed_manifest: return "malformed-manifest";
    case BundleErrorKind::unknown_version: return "unknown-version";
    case BundleErrorKind::length_mismatch: return "length-mismatch";
    case BundleErrorKind::checksum_mismatch: return "checksum-mismatch";
    case BundleErrorKind::non_finite_vector: return "non-finite-vector";
    case BundleErrorKind::invalid_attention: return "invalid-attention";
  }
  return "unknown";
}

BundleError::BundleError(BundleErrorKind kind, const std::string& detail)
    : InputError("bundle " + std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

std::string encode_f32(std::span<const double> values) {
  std::string out(values.size() * 4, '\0');
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(values[i]));
    for (int b = 0; b < 4; ++b) out[4 * i + b] = static_cast<char>((bits >> (8 * b)) & 0xFF);
  }
  return out;
}

std::vector<double> decode_f32(std::string_view bytes) {
  if (bytes.size() % 4 != 0) {
    throw BundleError(BundleErrorKind::length_mismatch,
                      std::to_string(bytes.size()) + " bytes is not a whole number of float32 values");
  }
  std::vector<double> out(bytes.size() / 4);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) {
      bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[4 * i + b])) << (8 * b);
    }
    out[i] = static_cast<double>(std::bit_cast<float>(bits));
  }
  return out;
}

EmbeddingBundle read_bundle(const std::filesystem::path& dir) {
  EmbeddingBundle bundle;
  bundle.manifest = parse_manifest(read_member(dir, "manifest.json"));
  const auto& m = bundle.manifest;

  const std::string raw = read_member(dir, "vectors.f32");
  const std::size_t expected = m.n_tweets * m.dim * 4;
  if (raw.size() != expected) {
    throw BundleError(BundleErrorKind::length_mismatch,
                      "vectors.f32 holds " + std::to_string(raw.size()) + " bytes, expected " +
                          std::to_string(expected));
  }
  if (const auto digest = sha256_hex(raw); digest != m.sha256) {
    throw BundleError(BundleErrorKind::checksum_mismatch, "vectors.f32 sha256 " + digest +
                                                              " does not match manifest " + m.sha256);
  }
  auto values = decode_f32(raw);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw BundleError(BundleErrorKind::non_finite_vector,
                        "row " + std::to_string(i / m.dim) + " column " + std::to_string(i % m.dim));
    }
  }
  bundle.vectors = Matrix(m.n_tweets, m.dim, std::move(values));
  bundle.attention = parse_attention(read_member(dir, "attention.jsonl"), m);
  return bundle;
}

void write_bundle(const std::filesystem::path& dir, const EmbeddingBundle& bundle) {
  const auto& m = bundle.manifest;
  if (bundle.vectors.rows() != m.tweet_ids.size() || bundle.attention.size() != m.tweet_ids.size()) {
    throw InputError("bundle rows, attention records and tweet ids differ in count");
  }
  const std::string raw = encode_f32(bundle.vectors.values());
  nlohmann::json manifest = {
      {"version", kBundleVersion},
      {"n_tweets", m.tweet_ids.size()},
      {"dim", bundle.vectors.cols()},
      {"tweet_ids", m.tweet_ids},
      {"sha256", sha256_hex(raw)},
      {"source_tag", std::string(to_string(m.source_tag))},
  };
  std::string attention;
  for (std::size_t i = 0; i < m.tweet_ids.size(); ++i) {
    nlohmann::json tokens = nlohmann::json::array();
    nlohmann::json attn = nlohmann::json::array();
    for (const auto& ta : bundle.attention[i]) {
      tokens.push_back(ta.token);
      attn.push_back(ta.score);
    }
    attention += nlohmann::json{{"id", m.tweet_ids[i]}, {"tokens", tokens}, {"attn", attn}}.dump();
    attention += '\n';
  }
  std::filesystem::create_directories(dir);
  write_file_atomic(dir / "vectors.f32", raw);
  write_file_atomic(dir / "attention.jsonl", attention);
  write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
}

Alignment align(const EmbeddingBundle& bundle, std::span<const Document> corpus) {
  std::unordered_map<std::string, std::size_t> rows;
  for (std::size_t r = 0; r < bundle.manifest.tweet_ids.size(); ++r) rows.emplace(bundle.manifest.tweet_ids[r], r);
  Alignment a;
  std::unordered_set<std::string> in_corpus;
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    in_corpus.insert(corpus[d].id);
    if (const auto it = rows.find(corpus[d].id); it != rows.end()) {
      a.doc_index.push_back(d);
      a.row.push_back(it->second);
    } else {
      a.missing_from_bundle.push_back(corpus[d].id);
    }
  }
  for (const auto& id : bundle.manifest.tweet_ids) {
    if (!in_corpus.contains(id)) a.missing_from_corpus.push_back(id);
  }
  if (a.size() == 0) throw InputError("corpus and embedding bundle share no tweet ids");
  return a;
}

}  // namespace stormtopics
