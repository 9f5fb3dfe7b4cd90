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
#include "stormtopics/corpus.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>

#include "stormtopics/error.hpp"
#include "stormtopics/io.hpp"

namespace stormtopics {

namespace detail {
extern const char kStopwordsEnV1[];
}

namespace {

std::string line_prefix(std::size_t line) { return "line " + std::to_string(line) + ": "; }

void check_unique(std::vector<RawTweet>& tweets, std::vector<std::size_t>& lines) {
  std::unordered_map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < tweets.size(); ++i) {
    auto [it, inserted] = seen.emplace(tweets[i].id, lines[i]);
    if (!inserted) {
      throw InputError("duplicate tweet id \"" + tweets[i].id + "\" on lines " +
                       std::to_string(it->second) + " and " + std::to_string(lines[i]));
    }
  }
}

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return c == ' ' || c == '\t' || c == '\r'; });
}

// RFC 4180 records: quoted fields may contain separators, doubled quotes and
// line breaks. Each record remembers the line it started on.
struct CsvRecord {
  std::size_t line;
  std::vector<std::string> fields;
};

std::vector<CsvRecord> split_csv(std::string_view content) {
  std::vector<CsvRecord> records;
  std::size_t line = 1;
  std::size_t i = 0;
  while (i < content.size()) {
    CsvRecord rec{line, {}};
    std::string field;
    bool in_quotes = false;
    bool done = false;
    while (!done) {
      if (i >= content.size()) {
        if (in_quotes) throw InputError(line_prefix(rec.line) + "unterminated quoted field");
        rec.fields.push_back(std::move(field));
        break;
      }
      const char c = content[i++];
      if (in_quotes) {
        if (c == '"') {
          if (i < content.size() && content[i] == '"') {
            field.push_back('"');
            ++i;
          } else {
            in_quotes = false;
          }
        } else {
          if (c == '\n') ++line;
          field.push_back(c);
        }
        continue;
      }
      switch (c) {
        case '"':
          if (!field.empty()) throw InputError(line_prefix(line) + "stray quote inside field");
          in_quotes = true;
          break;
        case ',':
          rec.fields.push_back(std::move(field));
          field.clear();
          break;
        case '\r':
          break;
        case '\n':
          rec.fields.push_back(std::move(field));
          ++line;
          done = true;
          break;
        default:
          field.push_back(c);
      }
    }
    if (rec.fields.size() == 1 && blank(rec.fields[0])) continue;
    records.push_back(std::move(rec));
  }
  return records;
}

// Word characters: letters, decimal digits and combining marks.
bool is_word_char(UChar32 c) {
  if (u_hasBinaryProperty(c, UCHAR_ALPHABETIC)) return true;
  const auto mask = U_GET_GC_MASK(c);
  return (mask & (U_GC_ND_MASK | U_GC_M_MASK)) != 0;
}

bool is_apostrophe(UChar32 c) { return c == 0x27 || c == 0x2019; }

struct CodePoint {
  UChar32 value;
  std::size_t begin;
  std::size_t end;
};

std::vector<CodePoint> decode(std::string_view s) {
  std::vector<CodePoint> out;
  const auto* p = reinterpret_cast<const uint8_t*>(s.data());
  const auto n = static_cast<int32_t>(s.size());
  int32_t i = 0;
  while (i < n) {
    const int32_t start = i;
    UChar32 c;
    U8_NEXT(p, i, n, c);
    if (c < 0) c = 0xFFFD;
    out.push_back({c, static_cast<std::size_t>(start), static_cast<std::size_t>(i)});
  }
  return out;
}

std::size_t codepoint_length(std::string_view s) {
  std::size_t n = 0;
  for (unsigned char c : s) n += (c & 0xC0) != 0x80;
  return n;
}

std::size_t find_url_start(std::string_view chunk) {
  std::size_t best = std::string_view::npos;
  for (std::string_view scheme : {"http://", "https://"}) {
    best = std::min(best, chunk.find(scheme));
  }
  for (std::size_t pos = chunk.find("t.co/"); pos != std::string_view::npos;
       pos = chunk.find("t.co/", pos + 1)) {
    if (pos >= best) break;
    bool preceded_by_word = false;
    if (pos > 0) {
      const auto cps = decode(chunk.substr(0, pos));
      preceded_by_word = !cps.empty() && is_word_char(cps.back().value);
    }
    if (!preceded_by_word) {
      best = pos;
      break;
    }
  }
  return best;
}

class ChunkTokenizer {
 public:
  ChunkTokenizer(const PreprocessConfig& cfg, Document& doc) : cfg_(cfg), doc_(doc) {}

  void run(std::string_view chunk) {
    if (const auto url = find_url_start(chunk); url != std::string_view::npos) {
      scan(chunk.substr(0, url));
      drop(std::string(chunk.substr(url)), DropReason::url);
    } else {
      scan(chunk);
    }
    flush_symbols();
  }

 private:
  void scan(std::string_view text) {
    const auto cps = decode(text);
    std::size_t i = 0;
    while (i < cps.size()) {
      const UChar32 c = cps[i].value;
      const bool marker = c == '#' || c == '@';
      if (marker && i + 1 < cps.size() && (is_word_char(cps[i + 1].value) || cps[i + 1].value == '_')) {
        flush_symbols();
        std::string body;
        i = read_word(text, cps, i + 1, /*allow_underscore=*/true, body);
        handle_tagged(c == '#', body);
        continue;
      }
      if (is_word_char(c)) {
        flush_symbols();
        std::string word;
        i = read_word(text, cps, i, /*allow_underscore=*/false, word);
        accept(word);
        continue;
      }
      symbols_.append(text.substr(cps[i].begin, cps[i].end - cps[i].begin));
      ++i;
    }
  }

  // Consumes a maximal word run starting at i; apostrophes between word
  // characters are deleted. Returns the index after the run.
  std::size_t read_word(std::string_view text, const std::vector<CodePoint>& cps, std::size_t i,
                        bool allow_underscore, std::string& out) {
    while (i < cps.size()) {
      const UChar32 c = cps[i].value;
      if (is_word_char(c) || (allow_underscore && c == '_')) {
        out.append(text.substr(cps[i].begin, cps[i].end - cps[i].begin));
        ++i;
      } else if (is_apostrophe(c) && !out.empty() && i + 1 < cps.size() &&
                 is_word_char(cps[i + 1].value)) {
        ++i;
      } else {
        break;
      }
    }
    return i;
  }

  void handle_tagged(bool hashtag, const std::string& body) {
    const TokenPolicy policy = hashtag ? cfg_.hashtag_policy : cfg_.mention_policy;
    const DropReason reason = hashtag ? DropReason::hashtag : DropReason::mention;
    const char marker = hashtag ? '#' : '@';
    if (policy == TokenPolicy::drop_token) {
      drop(marker + body, reason);
      return;
    }
    drop(std::string(1, marker), DropReason::symbol);
    std::size_t start = 0;
    while (start <= body.size()) {
      const std::size_t end = std::min(body.find('_', start), body.size());
      if (end > start) accept(body.substr(start, end - start));
      if (end < body.size()) drop("_", DropReason::symbol);
      start = end + 1;
    }
  }

  void accept(const std::string& word) {
    if (codepoint_length(word) < cfg_.min_token_len) {
      drop(word, DropReason::too_short);
    } else if (cfg_.stopwords.contains(word)) {
      drop(word, DropReason::stopword);
    } else {
      doc_.tokens.push_back(word);
    }
  }

  void flush_symbols() {
    if (!symbols_.empty()) {
      drop(std::move(symbols_), DropReason::symbol);
      symbols_.clear();
    }
  }

  void drop(std::string token, DropReason reason) { doc_.dropped.push_back({std::move(token), reason}); }

  const PreprocessConfig& cfg_;
  Document& doc_;
  std::string symbols_;
};

void tokenize_into(std::string_view raw, const PreprocessConfig& cfg, Document& doc) {
  const std::string text = normalize_text(raw);
  const auto cps = decode(text);
  ChunkTokenizer tokenizer(cfg, doc);
  std::size_t start = std::string::npos;
  for (const auto& cp : cps) {
    if (u_isUWhiteSpace(cp.value)) {
      if (start != std::string::npos) {
        tokenizer.run(std::string_view(text).substr(start, cp.begin - start));
        start = std::string::npos;
      }
    } else if (start == std::string::npos) {
      start = cp.begin;
    }
  }
  if (start != std::string::npos) tokenizer.run(std::string_view(text).substr(start));
}

std::set<std::string, std::less<>> parse_stopword_lines(std::string_view content) {
  std::set<std::string, std::less<>> words;
  std::istringstream in{std::string(content)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    words.insert(line);
  }
  return words;
}

}  // namespace

TweetFormat tweet_format_for(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? TweetFormat::csv : TweetFormat::jsonl;
}

std::vector<RawTweet> parse_tweets_jsonl(std::string_view content) {
  std::vector<RawTweet> tweets;
  std::vector<std::size_t> lines;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    const std::size_t end = std::min(content.find('\n', pos), content.size());
    const std::string_view line = content.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;
    if (blank(line)) {
      if (end == content.size()) break;
      continue;
    }
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw InputError(line_prefix(line_no) + "malformed JSON: " + e.what());
    }
    if (!j.is_object()) throw InputError(line_prefix(line_no) + "record is not an object");
    RawTweet t;
    const auto id = j.find("id");
    if (id == j.end()) throw InputError(line_prefix(line_no) + "missing field \"id\"");
    if (id->is_string()) {
      t.id = id->get<std::string>();
    } else if (id->is_number_integer()) {
      t.id = id->dump();
    } else {
      throw InputError(line_prefix(line_no) + "field \"id\" must be a string or integer");
    }
    const auto text = j.find("text");
    if (text == j.end() || !text->is_string()) {
      throw InputError(line_prefix(line_no) + "missing string field \"text\"");
    }
    t.text = text->get<std::string>();
    if (normalize_text(t.text).empty()) throw InputError(line_prefix(line_no) + "empty text");
    if (auto a = j.find("author"); a != j.end() && a->is_string()) t.author = a->get<std::string>();
    if (auto c = j.find("created_at"); c != j.end() && c->is_string()) {
      t.timestamp = c->get<std::string>();
    }
    tweets.push_back(std::move(t));
    lines.push_back(line_no);
    if (end == content.size()) break;
  }
  check_unique(tweets, lines);
  return tweets;
}

std::vector<RawTweet> parse_tweets_csv(std::string_view content) {
  auto records = split_csv(content);
  if (records.empty()) throw InputError("line 1: missing CSV header");
  const auto& header = records.front().fields;
  auto column = [&](std::string_view name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    return std::nullopt;
  };
  const auto id_col = column("id");
  const auto text_col = column("text");
  if (!id_col || !text_col) throw InputError("line 1: CSV header must name \"id\" and \"text\"");
  const auto author_col = column("author");
  const auto created_col = column("created_at");

  std::vector<RawTweet> tweets;
  std::vector<std::size_t> lines;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != header.size()) {
      throw InputError(line_prefix(rec.line) + "expected " + std::to_string(header.size()) +
                       " fields, found " + std::to_string(rec.fields.size()));
    }
    RawTweet t;
    t.id = rec.fields[*id_col];
    t.text = rec.fields[*text_col];
    if (t.id.empty()) throw InputError(line_prefix(rec.line) + "empty id");
    if (normalize_text(t.text).empty()) throw InputError(line_prefix(rec.line) + "empty text");
    if (author_col && !rec.fields[*author_col].empty()) t.author = rec.fields[*author_col];
    if (created_col && !rec.fields[*created_col].empty()) t.timestamp = rec.fields[*created_col];
    tweets.push_back(std::move(t));
    lines.push_back(rec.line);
  }
  check_unique(tweets, lines);
  return tweets;
}

std::vector<RawTweet> load_tweets(const std::filesystem::path& path, TweetFormat format) {
  const std::string content = read_file(path);
  try {
    return format == TweetFormat::csv ? parse_tweets_csv(content) : parse_tweets_jsonl(content);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

std::string_view to_string(TokenPolicy policy) {
  return policy == TokenPolicy::drop_token ? "drop-token" : "strip-symbol-keep-body";
}

TokenPolicy token_policy_from_string(std::string_view name) {
  if (name == "strip-symbol-keep-body") return TokenPolicy::strip_symbol_keep_body;
  if (name == "drop-token") return TokenPolicy::drop_token;
  throw InputError("unknown token policy \"" + std::string(name) + "\"");
}

StopwordList::StopwordList() : StopwordList(bundled("en-v1")) {}

StopwordList StopwordList::bundled(std::string_view id) {
  if (id != "en-v1") throw InputError("unknown stopword list \"" + std::string(id) + "\"");
  static const auto data =
      std::make_shared<const Data>(Data{"en-v1", parse_stopword_lines(detail::kStopwordsEnV1)});
  return StopwordList(data);
}

StopwordList StopwordList::custom(std::string name, std::span<const std::string> words) {
  Data data{std::move(name), {}};
  for (const auto& w : words) data.words.insert(normalize_text(w));
  return StopwordList(std::make_shared<const Data>(std::move(data)));
}

bool StopwordList::contains(std::string_view term) const { return data_->words.contains(term); }

std::string_view to_string(DropReason reason) {
  switch (reason) {
    case DropReason::url: return "url";
    case DropReason::hashtag: return "hashtag";
    case DropReason::mention: return "mention";
    case DropReason::symbol: return "symbol";
    case DropReason::stopword: return "stopword";
    case DropReason::too_short: return "too-short";
  }
  return "symbol";
}

DropReason drop_reason_from_string(std::string_view name) {
  for (auto r : {DropReason::url, DropReason::hashtag, DropReason::mention, DropReason::symbol,
                 DropReason::stopword, DropReason::too_short}) {
    if (to_string(r) == name) return r;
  }
  throw InputError("unknown drop reason \"" + std::string(name) + "\"");
}

std::string normalize_text(std::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfkc_cf = icu::Normalizer2::getNFKCCasefoldInstance(status);
  if (U_FAILURE(status)) throw Error(std::string("ICU normalizer unavailable: ") + u_errorName(status));
  const auto src = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  const icu::UnicodeString normalized = nfkc_cf->normalize(src, status);
  if (U_FAILURE(status)) throw Error(std::string("normalization failed: ") + u_errorName(status));
  std::string out;
  normalized.toUTF8String(out);
  return out;
}

bool is_url(std::string_view chunk) {
  return chunk.starts_with("http://") || chunk.starts_with("https://") || chunk.starts_with("t.co/");
}

Document tokenize(const RawTweet& tweet, const PreprocessConfig& cfg) {
  Document doc;
  doc.id = tweet.id;
  tokenize_into(tweet.text, cfg, doc);
  return doc;
}

std::vector<Document> tokenize_all(std::span<const RawTweet> tweets, const PreprocessConfig& cfg) {
  std::vector<Document> docs;
  docs.reserve(tweets.size());
  for (const auto& t : tweets) docs.push_back(tokenize(t, cfg));
  return docs;
}

std::vector<std::string> clean_surface_token(std::string_view token, const PreprocessConfig& cfg) {
  Document scratch;
  tokenize_into(token, cfg, scratch);
  return std::move(scratch.tokens);
}

Vocabulary Vocabulary::build(std::span<const Document> docs) {
  if (docs.empty()) throw InputError("cannot build a vocabulary from an empty document list");
  Vocabulary v;
  v.n_documents_ = docs.size();
  std::vector<std::size_t> last_doc;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (const auto& tok : docs[d].tokens) {
      auto [it, inserted] = v.index_.try_emplace(tok, static_cast<std::uint32_t>(v.terms_.size()));
      if (inserted) {
        v.terms_.push_back(tok);
        v.entries_.push_back({it->second, 0, 0});
        last_doc.push_back(SIZE_MAX);
      }
      auto& e = v.entries_[it->second];
      ++e.collection_frequency;
      if (last_doc[it->second] != d) {
        ++e.document_frequency;
        last_doc[it->second] = d;
      }
    }
  }
  return v;
}

const Vocabulary::Entry* Vocabulary::find(const std::string& term) const {
  const auto it = index_.find(term);
  return it == index_.end() ? nullptr : &entries_[it->second];
}

std::vector<std::uint32_t> Vocabulary::encode(std::span<const std::string> tokens) const {
  std::vector<std::uint32_t> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (const auto it = index_.find(t); it != index_.end()) ids.push_back(it->second);
  }
  return ids;
}

std::vector<Document> detect_phrases(std::span<const Document> docs, std::size_t min_count,
                                     double threshold) {
  if (min_count < 1) throw InputError("phrase min_count must be at least 1");
  std::unordered_map<std::string, std::uint64_t> unigram;
  std::map<std::pair<std::string, std::string>, std::uint64_t> bigram;
  std::uint64_t total = 0;
  for (const auto& doc : docs) {
    for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
      ++unigram[doc.tokens[i]];
      ++total;
      if (i + 1 < doc.tokens.size()) ++bigram[{doc.tokens[i], doc.tokens[i + 1]}];
    }
  }
  auto merges = [&](const std::string& a, const std::string& b) {
    const auto it = bigram.find({a, b});
    if (it == bigram.end() || it->second < min_count) return false;
    const double score = (static_cast<double>(it->second) - static_cast<double>(min_count)) *
                         static_cast<double>(total) /
                         (static_cast<double>(unigram[a]) * static_cast<double>(unigram[b]));
    return score >= threshold;
  };
  std::vector<Document> out;
  out.reserve(docs.size());
  for (const auto& doc : docs) {
    Document merged{doc.id, {}, doc.dropped};
    const auto& t = doc.tokens;
    for (std::size_t i = 0; i < t.size();) {
      if (i + 1 < t.size() && merges(t[i], t[i + 1])) {
        merged.tokens.push_back(t[i] + "_" + t[i + 1]);
        i += 2;
      } else {
        merged.tokens.push_back(t[i]);
        ++i;
      }
    }
    out.push_back(std::move(merged));
  }
  return out;
}

nlohmann::json to_json(const Document& doc) {
  nlohmann::json dropped = nlohmann::json::array();
  for (const auto& d : doc.dropped) {
    dropped.push_back({{"token", d.token}, {"reason", std::string(to_string(d.reason))}});
  }
  return {{"id", doc.id}, {"tokens", doc.tokens}, {"dropped", std::move(dropped)}};
}

Document document_from_json(const nlohmann::json& j) {
  Document doc;
  doc.id = j.at("id").get<std::string>();
  doc.tokens = j.at("tokens").get<std::vector<std::string>>();
  if (const auto it = j.find("dropped"); it != j.end()) {
    for (const auto& d : *it) {
      doc.dropped.push_back({d.at("token").get<std::string>(),
                             drop_reason_from_string(d.at("reason").get<std::string>())});
    }
  }
  return doc;
}

void write_documents(const std::filesystem::path& path, std::span<const Document> docs) {
  std::string out;
  for (const auto& d : docs) {
    out += to_json(d).dump();
    out += '\n';
  }
  write_file_atomic(path, out);
}

std::vector<Document> read_documents(const std::filesystem::path& path) {
  const std::string content = read_file(path);
  std::vector<Document> docs;
  std::istringstream in(content);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    try {
      docs.push_back(document_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw InputError(path.string() + ": " + line_prefix(line_no) + e.what());
    }
  }
  return docs;
}

}  // namespace stormtopics
