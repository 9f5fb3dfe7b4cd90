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
#include "stormtopics_cli/config.hpp"

#include <charconv>
#include <cstdlib>
#include <initializer_list>

#include "stormtopics/error.hpp"
#include "stormtopics/io.hpp"

namespace stormtopics::cli {

namespace {

void check_keys(const nlohmann::json& j, std::string_view section, std::initializer_list<std::string_view> keys) {
  if (!j.is_object()) throw InputError("config: \"" + std::string(section) + "\" must be an object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (auto k : keys) known = known || k == key;
    if (!known) throw InputError("config: unknown key \"" + key + "\" in " + std::string(section));
  }
}

template <typename T>
void get_if(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

std::size_t parse_size(std::string_view s) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw InputError("invalid number \"" + std::string(s) + "\"");
  }
  return v;
}

std::string_view to_string(KMeansAlgorithm a) { return a == KMeansAlgorithm::elkan ? "elkan" : "lloyd"; }

KMeansAlgorithm algorithm_from_string(std::string_view s) {
  if (s == "elkan") return KMeansAlgorithm::elkan;
  if (s == "lloyd") return KMeansAlgorithm::lloyd;
  throw InputError("unknown k-means algorithm \"" + std::string(s) + "\"");
}

std::string_view to_string(ContextScope s) { return s == ContextScope::topic_union ? "topic-union" : "full-vocabulary"; }

ContextScope scope_from_string(std::string_view s) {
  if (s == "topic-union") return ContextScope::topic_union;
  if (s == "full-vocabulary") return ContextScope::full_vocabulary;
  throw InputError("unknown context scope \"" + std::string(s) + "\"");
}

std::string_view to_string(CvSegmentation s) { return s == CvSegmentation::pairwise ? "pairwise" : "one-set"; }

CvSegmentation segmentation_from_string(std::string_view s) {
  if (s == "pairwise") return CvSegmentation::pairwise;
  if (s == "one-set") return CvSegmentation::one_set;
  throw InputError("unknown segmentation \"" + std::string(s) + "\"");
}

}  // namespace

std::string_view validate_keyword_mode(std::string_view mode) {
  for (std::string_view m : {"tfidf", "attention", "combined", "grid"}) {
    if (m == mode) return mode;
  }
  throw InputError("unknown keyword strategy \"" + std::string(mode) + "\"");
}

std::vector<std::size_t> KRange::values() const {
  std::vector<std::size_t> out;
  for (std::size_t k = lo; k <= hi; ++k) out.push_back(k);
  return out;
}

std::string KRange::str() const {
  return lo == hi ? std::to_string(lo) : std::to_string(lo) + ".." + std::to_string(hi);
}

KRange parse_k_range(std::string_view text) {
  KRange r;
  const auto dots = text.find("..");
  if (dots == std::string_view::npos) {
    r.lo = r.hi = parse_size(text);
  } else {
    r.lo = parse_size(text.substr(0, dots));
    r.hi = parse_size(text.substr(dots + 2));
  }
  if (r.lo < 1 || r.lo > r.hi) throw InputError("invalid k range \"" + std::string(text) + "\"");
  return r;
}

PreprocessConfig PreprocessSettings::resolve() const {
  PreprocessConfig cfg;
  cfg.hashtag_policy = hashtag_policy;
  cfg.mention_policy = mention_policy;
  cfg.min_token_len = min_token_len;
  if (stopwords == "en-v1") {
    cfg.stopwords = StopwordList::bundled(stopwords);
  } else {
    const std::string content = read_file(stopwords);
    std::vector<std::string> words;
    std::size_t pos = 0;
    while (pos <= content.size()) {
      const auto nl = content.find('\n', pos);
      std::string line = content.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
      pos = nl == std::string::npos ? content.size() + 1 : nl + 1;
      while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.pop_back();
      if (line.empty() || line.front() == '#') continue;
      words.push_back(normalize_text(line));
    }
    cfg.stopwords = StopwordList::custom("file:" + std::filesystem::path(stopwords).filename().string() + "@" +
                                             sha256_hex(content).substr(0, 12),
                                         words);
  }
  return cfg;
}

PipelineConfig config_from_json(const nlohmann::json& j) {
  PipelineConfig c;
  try {
    check_keys(j, "config",
               {"seed", "k_sweep", "select_k", "preprocess", "kmeans", "lda", "btm", "keywords", "coherence",
                "sets_per_topic"});
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("k_sweep")) c.k_sweep = parse_k_range(j.at("k_sweep").get<std::string>());
    get_if(j, "select_k", c.select_k);
    get_if(j, "sets_per_topic", c.sets_per_topic);

    if (j.contains("preprocess")) {
      const auto& p = j.at("preprocess");
      check_keys(p, "preprocess", {"hashtag_policy", "mention_policy", "stopwords", "min_token_len"});
      if (p.contains("hashtag_policy")) {
        c.preprocess.hashtag_policy = token_policy_from_string(p.at("hashtag_policy").get<std::string>());
      }
      if (p.contains("mention_policy")) {
        c.preprocess.mention_policy = token_policy_from_string(p.at("mention_policy").get<std::string>());
      }
      get_if(p, "stopwords", c.preprocess.stopwords);
      get_if(p, "min_token_len", c.preprocess.min_token_len);
    }
    if (j.contains("kmeans")) {
      const auto& k = j.at("kmeans");
      check_keys(k, "kmeans", {"n_init", "max_iter", "tol", "normalize", "algorithm"});
      get_if(k, "n_init", c.kmeans.n_init);
      get_if(k, "max_iter", c.kmeans.max_iter);
      get_if(k, "tol", c.kmeans.tol);
      get_if(k, "normalize", c.kmeans.normalize);
      if (k.contains("algorithm")) c.kmeans.algorithm = algorithm_from_string(k.at("algorithm").get<std::string>());
    }
    if (j.contains("lda")) {
      const auto& l = j.at("lda");
      check_keys(l, "lda", {"alpha", "beta", "passes", "iterations"});
      if (l.contains("alpha") && !l.at("alpha").is_null()) c.lda.alpha = l.at("alpha").get<double>();
      get_if(l, "beta", c.lda.beta);
      get_if(l, "passes", c.lda.passes);
      get_if(l, "iterations", c.lda.iterations);
    }
    if (j.contains("btm")) {
      const auto& b = j.at("btm");
      check_keys(b, "btm", {"alpha", "beta", "window", "passes", "iterations"});
      if (b.contains("alpha") && !b.at("alpha").is_null()) c.btm.alpha = b.at("alpha").get<double>();
      get_if(b, "beta", c.btm.beta);
      get_if(b, "window", c.btm.window);
      get_if(b, "passes", c.btm.passes);
      get_if(b, "iterations", c.btm.iterations);
    }
    if (j.contains("keywords")) {
      const auto& k = j.at("keywords");
      check_keys(k, "keywords",
                 {"strategy", "mdf", "sublinear", "phrases", "phrase_min_count", "phrase_threshold",
                  "normalize_attention", "topn"});
      if (k.contains("strategy")) c.keywords.mode = validate_keyword_mode(k.at("strategy").get<std::string>());
      get_if(k, "mdf", c.keywords.tfidf.max_document_frequency);
      get_if(k, "sublinear", c.keywords.tfidf.sublinear_tf);
      get_if(k, "phrases", c.keywords.tfidf.use_phrases);
      get_if(k, "phrase_min_count", c.keywords.tfidf.phrases.min_count);
      get_if(k, "phrase_threshold", c.keywords.tfidf.phrases.threshold);
      get_if(k, "normalize_attention", c.keywords.normalize_attention);
      get_if(k, "topn", c.keywords.topn);
    }
    if (j.contains("coherence")) {
      const auto& h = j.at("coherence");
      check_keys(h, "coherence",
                 {"window", "epsilon", "gamma", "topn", "context_scope", "segmentation", "truncated_tail"});
      get_if(h, "window", c.coherence.window);
      get_if(h, "epsilon", c.coherence.epsilon);
      get_if(h, "gamma", c.coherence.gamma);
      get_if(h, "topn", c.coherence.topn);
      if (h.contains("context_scope")) {
        c.coherence.context_scope = scope_from_string(h.at("context_scope").get<std::string>());
      }
      if (h.contains("segmentation")) {
        c.coherence.segmentation = segmentation_from_string(h.at("segmentation").get<std::string>());
      }
      get_if(h, "truncated_tail", c.coherence.truncated_tail);
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("config: ") + e.what());
  }
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  const std::string content = read_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(content);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

nlohmann::json to_json(const PreprocessSettings& p) {
  return {{"hashtag_policy", to_string(p.hashtag_policy)},
          {"mention_policy", to_string(p.mention_policy)},
          {"stopwords", p.resolve().stopwords.id()},
          {"min_token_len", p.min_token_len}};
}

nlohmann::json to_json(const KMeansConfig& k) {
  return {{"n_init", k.n_init},
          {"max_iter", k.max_iter},
          {"tol", k.tol},
          {"normalize", k.normalize},
          {"algorithm", to_string(k.algorithm)}};
}

nlohmann::json to_json(const LdaConfig& c) {
  nlohmann::json j = {{"beta", c.beta}, {"passes", c.passes}, {"iterations", c.iterations}};
  j["alpha"] = c.alpha ? nlohmann::json(*c.alpha) : nlohmann::json("50/k");
  return j;
}

nlohmann::json to_json(const BtmConfig& c) {
  nlohmann::json j = {{"beta", c.beta}, {"window", c.window}, {"passes", c.passes}, {"iterations", c.iterations}};
  j["alpha"] = c.alpha ? nlohmann::json(*c.alpha) : nlohmann::json("50/k");
  return j;
}

nlohmann::json to_json(const KeywordSettings& k) {
  return {{"strategy", k.mode},
          {"mdf", k.tfidf.max_document_frequency},
          {"sublinear", k.tfidf.sublinear_tf},
          {"phrases", k.tfidf.use_phrases},
          {"phrase_min_count", k.tfidf.phrases.min_count},
          {"phrase_threshold", k.tfidf.phrases.threshold},
          {"normalize_attention", k.normalize_attention},
          {"topn", k.topn}};
}

nlohmann::json to_json(const CoherenceConfig& c) {
  return {{"window", c.window},
          {"epsilon", c.epsilon},
          {"gamma", c.gamma},
          {"topn", c.topn},
          {"context_scope", to_string(c.context_scope)},
          {"segmentation", to_string(c.segmentation)},
          {"truncated_tail", c.truncated_tail}};
}

nlohmann::json to_json(const PipelineConfig& c) {
  nlohmann::json j = {{"k_sweep", c.k_sweep.str()},
                      {"select_k", c.select_k},
                      {"preprocess", to_json(c.preprocess)},
                      {"kmeans", to_json(c.kmeans)},
                      {"lda", to_json(c.lda)},
                      {"btm", to_json(c.btm)},
                      {"keywords", to_json(c.keywords)},
                      {"coherence", to_json(c.coherence)},
                      {"sets_per_topic", c.sets_per_topic}};
  if (c.seed) j["seed"] = *c.seed;
  return j;
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, const PipelineConfig& cfg) {
  if (flag) return *flag;
  if (cfg.seed) return *cfg.seed;
  if (const char* env = std::getenv("STORMTOPICS_SEED"); env != nullptr && *env != '\0') {
    std::uint64_t v = 0;
    const std::string_view s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw InputError("STORMTOPICS_SEED is not an unsigned integer: \"" + std::string(s) + "\"");
    }
    return v;
  }
  return 0;
}

}  // namespace stormtopics::cli
