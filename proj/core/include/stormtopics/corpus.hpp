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

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace stormtopics {

struct RawTweet {
  std::string id;
  std::string text;
  std::optional<std::string> author;
  std::optional<std::string> timestamp;
};

enum class TweetFormat { jsonl, csv };

// Picks the format from the file extension (.csv is CSV, anything else JSONL).
TweetFormat tweet_format_for(const std::filesystem::path& path);

// Reads tweets in file order. JSONL records carry `id`, `text` and optional
// `author` / `created_at`; CSV needs a header row naming the same columns.
// Throws InputError naming the line for malformed records and naming the id
// for duplicates.
std::vector<RawTweet> load_tweets(const std::filesystem::path& path, TweetFormat format);
std::vector<RawTweet> parse_tweets_jsonl(std::string_view content);
std::vector<RawTweet> parse_tweets_csv(std::string_view content);

enum class TokenPolicy { strip_symbol_keep_body, drop_token };

std::string_view to_string(TokenPolicy policy);
TokenPolicy token_policy_from_string(std::string_view name);

// Named, immutable stopword set. Copies share storage.
class StopwordList {
 public:
  // The bundled English list, "en-v1".
  StopwordList();

  static StopwordList bundled(std::string_view id);
  static StopwordList custom(std::string name, std::span<const std::string> words);

  const std::string& id() const { return data_->id; }
  bool contains(std::string_view term) const;
  std::size_t size() const { return data_->words.size(); }
  const std::set<std::string, std::less<>>& words() const { return data_->words; }

 private:
  struct Data {
    std::string id;
    std::set<std::string, std::less<>> words;
  };
  explicit StopwordList(std::shared_ptr<const Data> data) : data_(std::move(data)) {}
  std::shared_ptr<const Data> data_;
};

struct PreprocessConfig {
  TokenPolicy hashtag_policy = TokenPolicy::strip_symbol_keep_body;
  TokenPolicy mention_policy = TokenPolicy::strip_symbol_keep_body;
  StopwordList stopwords;
  std::size_t min_token_len = 2;
};

enum class DropReason { url, hashtag, mention, symbol, stopword, too_short };

std::string_view to_string(DropReason reason);
DropReason drop_reason_from_string(std::string_view name);

struct DroppedToken {
  std::string token;
  DropReason reason;

  friend bool operator==(const DroppedToken&, const DroppedToken&) = default;
};

struct Document {
  std::string id;
  std::vector<std::string> tokens;
  std::vector<DroppedToken> dropped;

  friend bool operator==(const Document&, const Document&) = default;
};

// NFKC normalization followed by case folding (the NFKC_Casefold mapping).
std::string normalize_text(std::string_view text);

// True when the whitespace-free chunk starts with a URL: "http://",
// "https://" or "t.co/".
bool is_url(std::string_view chunk);

// Tokenizer pipeline, applied in this order:
//   1. normalize_text, then split on Unicode white space into chunks;
//   2. inside a chunk, the first "http://", "https://" or "t.co/" (the latter
//      not preceded by a letter or digit) starts a URL running to the end of
//      the chunk; it is dropped whole;
//   3. the remainder is scanned for words: maximal runs of letters, digits
//      and combining marks, with apostrophes between word characters deleted;
//      a '#' or '@' directly before a run marks a hashtag or mention whose
//      body also absorbs '_' and is split on '_' after the policy is applied;
//   4. every other character is dropped as a symbol;
//   5. words shorter than min_token_len code points, then stopwords, are
//      dropped.
Document tokenize(const RawTweet& tweet, const PreprocessConfig& cfg);
std::vector<Document> tokenize_all(std::span<const RawTweet> tweets, const PreprocessConfig& cfg);

// Applies steps 1-5 to a single surface token (as found in attention
// exports) and returns the surviving word pieces.
std::vector<std::string> clean_surface_token(std::string_view token, const PreprocessConfig& cfg);

class Vocabulary {
 public:
  struct Entry {
    std::uint32_t id = 0;
    std::uint64_t document_frequency = 0;
    std::uint64_t collection_frequency = 0;
  };

  // Throws InputError on an empty document list. Ids follow first occurrence.
  static Vocabulary build(std::span<const Document> docs);

  const Entry* find(const std::string& term) const;
  const std::string& term(std::uint32_t id) const { return terms_.at(id); }
  const std::vector<std::string>& terms() const { return terms_; }
  const Entry& entry(std::uint32_t id) const { return entries_.at(id); }
  std::size_t size() const { return terms_.size(); }
  std::size_t n_documents() const { return n_documents_; }

  // Maps tokens to ids, skipping terms outside the vocabulary.
  std::vector<std::uint32_t> encode(std::span<const std::string> tokens) const;

 private:
  std::unordered_map<std::string, std::uint32_t> index_;
  std::vector<std::string> terms_;
  std::vector<Entry> entries_;
  std::size_t n_documents_ = 0;
};

inline Vocabulary build_vocabulary(std::span<const Document> docs) { return Vocabulary::build(docs); }

// Bigram phrasing. Adjacent (a, b) becomes "a_b" when
//   count(a,b) >= min_count and
//   (count(a,b) - min_count) * N / (count(a) * count(b)) >= threshold,
// where N is the total number of tokens. One left-to-right pass per
// document; merged pairs do not overlap.
struct PhraseConfig {
  std::size_t min_count = 5;
  double threshold = 10.0;
};

std::vector<Document> detect_phrases(std::span<const Document> docs, std::size_t min_count,
                                     double threshold);
inline std::vector<Document> detect_phrases(std::span<const Document> docs, const PhraseConfig& cfg) {
  return detect_phrases(docs, cfg.min_count, cfg.threshold);
}

nlohmann::json to_json(const Document& doc);
Document document_from_json(const nlohmann::json& j);

void write_documents(const std::filesystem::path& path, std::span<const Document> docs);
std::vector<Document> read_documents(const std::filesystem::path& path);

}  // namespace stormtopics
