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
#include "stormtopics/evalkit.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "stormtopics/error.hpp"
#include "stormtopics/io.hpp"
#include "stormtopics/random.hpp"

namespace stormtopics {

namespace {

std::string hex_id(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

bool blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

template <typename T, typename Parse>
std::vector<T> read_jsonl(const std::filesystem::path& path, Parse parse) {
  const std::string content = read_file(path);
  std::vector<T> out;
  std::istringstream in(content);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    try {
      out.push_back(parse(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw InputError(path.string() + ": line " + std::to_string(line_no) + ": " + e.what());
    } catch (const InputError& e) {
      throw InputError(path.string() + ": line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::string_view to_string(Interpretability v) {
  switch (v) {
    case Interpretability::good: return "good";
    case Interpretability::neutral: return "neutral";
    case Interpretability::bad: return "bad";
  }
  return "?";
}

std::string_view to_string(Usefulness v) {
  switch (v) {
    case Usefulness::useful: return "useful";
    case Usefulness::average: return "average";
    case Usefulness::useless: return "useless";
  }
  return "?";
}

Interpretability interpretability_from_string(std::string_view s) {
  for (auto v : {Interpretability::good, Interpretability::neutral, Interpretability::bad}) {
    if (to_string(v) == s) return v;
  }
  throw InputError("unknown interpretability \"" + std::string(s) + "\"");
}

Usefulness usefulness_from_string(std::string_view s, EvalTask task) {
  for (auto v : {Usefulness::useful, Usefulness::average, Usefulness::useless}) {
    if (to_string(v) != s) continue;
    if (task == EvalTask::cluster && v == Usefulness::average) break;
    return v;
  }
  throw InputError("invalid usefulness \"" + std::string(s) + "\" for the " + std::string(to_string(task)) +
                   " task");
}

const char* usefulness_key(EvalTask task) {
  return task == EvalTask::cluster ? "usefulness_cluster" : "usefulness_keyword";
}

}  // namespace

// ------------------------------------------------------------ agreement

double directed_agreement(const Clustering& a, const Clustering& b) {
  std::unordered_map<std::string_view, std::size_t> b_label;
  b_label.reserve(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) b_label.emplace(b.ids[i], b.labels[i]);

  double total = 0.0;
  std::size_t clusters = 0;
  for (const auto& members : a.members()) {
    if (members.empty()) continue;
    std::unordered_map<std::size_t, std::size_t> overlap;
    std::size_t best = 0;
    for (std::size_t m : members) best = std::max(best, ++overlap[b_label.at(a.ids[m])]);
    total += static_cast<double>(best) / static_cast<double>(members.size());
    ++clusters;
  }
  if (clusters == 0) throw InputError("agreement needs at least one document");
  return total / static_cast<double>(clusters);
}

AgreementReport agreement(const Clustering& a, const Clustering& b) {
  a.validate();
  b.validate();
  const std::set<std::string_view> ia(a.ids.begin(), a.ids.end());
  const std::set<std::string_view> ib(b.ids.begin(), b.ids.end());
  if (ia != ib) {
    std::vector<std::string_view> diff;
    std::set_symmetric_difference(ia.begin(), ia.end(), ib.begin(), ib.end(), std::back_inserter(diff));
    std::string msg = "clusterings cover different documents; " + std::to_string(diff.size()) +
                      " ids differ:";
    const std::size_t shown = std::min<std::size_t>(diff.size(), 20);
    for (std::size_t i = 0; i < shown; ++i) msg += " " + std::string(diff[i]);
    if (shown < diff.size()) msg += " ...";
    throw InputError(msg);
  }
  AgreementReport r;
  r.agr_a_given_b = directed_agreement(a, b);
  r.agr_b_given_a = directed_agreement(b, a);
  r.symmetric = 0.5 * (r.agr_a_given_b + r.agr_b_given_a);
  return r;
}

// ------------------------------------------------------------ samples

std::string_view to_string(EvalTask task) { return task == EvalTask::cluster ? "cluster" : "keyword"; }

EvalTask eval_task_from_string(std::string_view name) {
  if (name == "cluster") return EvalTask::cluster;
  if (name == "keyword") return EvalTask::keyword;
  throw InputError("unknown task \"" + std::string(name) + "\"");
}

std::size_t EvalSample::intruder_position() const {
  const auto it = std::find(presented_order.begin(), presented_order.end(), intruder_doc_id);
  if (it == presented_order.end()) throw InputError("sample " + sample_id + ": intruder not presented");
  return static_cast<std::size_t>(it - presented_order.begin());
}

void EvalSample::validate(const Clustering& clustering) const {
  const auto fail = [&](const std::string& what) { throw InputError("sample " + sample_id + ": " + what); };
  if (member_doc_ids.size() != kMembersPerSample) fail("expected 4 member documents");
  if (presented_order.size() != kMembersPerSample + 1) fail("expected 5 presented documents");
  if (topic >= clustering.k) fail("topic out of range");

  std::unordered_map<std::string_view, std::size_t> label;
  for (std::size_t i = 0; i < clustering.size(); ++i) label.emplace(clustering.ids[i], clustering.labels[i]);
  const auto topic_of = [&](const std::string& id) {
    const auto it = label.find(id);
    if (it == label.end()) fail("unknown document " + id);
    return it->second;
  };
  for (const auto& id : member_doc_ids) {
    if (topic_of(id) != topic) fail("member " + id + " is not in topic " + std::to_string(topic));
  }
  if (topic_of(intruder_doc_id) == topic) fail("intruder " + intruder_doc_id + " is inside the topic");

  std::vector<std::string> expected = member_doc_ids;
  expected.push_back(intruder_doc_id);
  std::vector<std::string> shown = presented_order;
  std::sort(expected.begin(), expected.end());
  std::sort(shown.begin(), shown.end());
  if (std::adjacent_find(expected.begin(), expected.end()) != expected.end()) fail("duplicate documents");
  if (expected != shown) fail("presented order is not a permutation of members and intruder");
}

SamplingResult sample_intruder_sets(const Clustering& clustering, std::size_t sets_per_topic, std::uint64_t seed) {
  clustering.validate();
  if (clustering.size() < kMembersPerSample + 1) {
    throw InputError("intruder sampling needs at least 5 documents, got " + std::to_string(clustering.size()));
  }
  Rng rng(seed);
  SamplingResult out;
  const auto members = clustering.members();
  for (std::size_t t = 0; t < members.size(); ++t) {
    std::vector<std::size_t> inside = members[t];
    const std::size_t outside_count = clustering.size() - inside.size();
    if (inside.size() < kMembersPerSample || outside_count == 0) {
      out.skipped_topics.push_back(t);
      out.warnings.push_back("topic " + std::to_string(t) + " has " + std::to_string(inside.size()) +
                             " documents; skipped");
      continue;
    }
    std::vector<std::size_t> outside;
    outside.reserve(outside_count);
    for (std::size_t i = 0; i < clustering.size(); ++i) {
      if (clustering.labels[i] != t) outside.push_back(i);
    }
    for (std::size_t s = 0; s < sets_per_topic; ++s) {
      EvalSample sample;
      sample.model_tag = clustering.model_tag;
      sample.topic = t;
      // Partial Fisher-Yates over the topic's members.
      for (std::size_t m = 0; m < kMembersPerSample; ++m) {
        const std::size_t j = m + rng.index(inside.size() - m);
        std::swap(inside[m], inside[j]);
        sample.member_doc_ids.push_back(clustering.ids[inside[m]]);
      }
      sample.intruder_doc_id = clustering.ids[outside[rng.index(outside.size())]];
      sample.presented_order = sample.member_doc_ids;
      sample.presented_order.push_back(sample.intruder_doc_id);
      rng.shuffle(std::span<std::string>(sample.presented_order));
      sample.sample_id = hex_id(rng.next());
      out.samples.push_back(std::move(sample));
    }
  }
  return out;
}

std::vector<KeywordSample> keyword_samples(const KeywordTable& table, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<KeywordSample> out;
  for (const auto& topic : table.topics) {
    if (topic.ranked.empty()) continue;
    KeywordSample s;
    s.model_tag = table.model_tag;
    s.topic = topic.topic;
    s.keywords = topic.terms(kEvaluationKeywords);
    s.sample_id = hex_id(rng.next());
    out.push_back(std::move(s));
  }
  return out;
}

AnswerKey answer_for(const EvalSample& sample) {
  AnswerKey a;
  a.sample_id = sample.sample_id;
  a.task = EvalTask::cluster;
  a.model_tag = sample.model_tag;
  a.topic = sample.topic;
  a.intruder_position = sample.intruder_position();
  a.member_doc_ids = sample.member_doc_ids;
  a.intruder_doc_id = sample.intruder_doc_id;
  a.presented_order = sample.presented_order;
  return a;
}

AnswerKey answer_for(const KeywordSample& sample) {
  AnswerKey a;
  a.sample_id = sample.sample_id;
  a.task = EvalTask::keyword;
  a.model_tag = sample.model_tag;
  a.topic = sample.topic;
  return a;
}

nlohmann::json to_json(const AnswerKey& answer) {
  nlohmann::json j = {{"sample_id", answer.sample_id},
                      {"task", to_string(answer.task)},
                      {"model_tag", to_string(answer.model_tag)},
                      {"topic", answer.topic}};
  if (answer.task == EvalTask::cluster) {
    j["intruder_position"] = answer.intruder_position.value_or(0);
    j["intruder_doc_id"] = answer.intruder_doc_id;
    j["member_doc_ids"] = answer.member_doc_ids;
    j["presented_order"] = answer.presented_order;
  }
  return j;
}

namespace {

AnswerKey parse_answer(const nlohmann::json& j) {
  AnswerKey a;
  a.sample_id = j.at("sample_id").get<std::string>();
  a.task = eval_task_from_string(j.at("task").get<std::string>());
  a.model_tag = model_tag_from_string(j.at("model_tag").get<std::string>());
  a.topic = j.at("topic").get<std::size_t>();
  if (a.task == EvalTask::cluster) {
    a.intruder_position = j.at("intruder_position").get<std::size_t>();
    a.intruder_doc_id = j.at("intruder_doc_id").get<std::string>();
    a.member_doc_ids = j.at("member_doc_ids").get<std::vector<std::string>>();
    a.presented_order = j.at("presented_order").get<std::vector<std::string>>();
    if (a.member_doc_ids.size() != kMembersPerSample || a.presented_order.size() != kMembersPerSample + 1 ||
        *a.intruder_position > kMembersPerSample || a.presented_order[*a.intruder_position] != a.intruder_doc_id) {
      throw InputError("answer " + a.sample_id + " does not have a consistent 4+1 structure");
    }
  }
  return a;
}

}  // namespace

AnswerKey answer_from_json(const nlohmann::json& j) {
  try {
    return parse_answer(j);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("answer: ") + e.what());
  }
}

nlohmann::json cluster_payload(const EvalSample& sample, const std::map<std::string, std::string>& texts) {
  nlohmann::json docs = nlohmann::json::array();
  for (std::size_t p = 0; p < sample.presented_order.size(); ++p) {
    const auto it = texts.find(sample.presented_order[p]);
    if (it == texts.end()) throw InputError("no text for document " + sample.presented_order[p]);
    docs.push_back({{"position", p}, {"text", it->second}});
  }
  return {{"sample_id", sample.sample_id}, {"task", "cluster"}, {"documents", std::move(docs)}};
}

nlohmann::json keyword_payload(const KeywordSample& sample) {
  return {{"sample_id", sample.sample_id}, {"task", "keyword"}, {"keywords", sample.keywords}};
}

// ------------------------------------------------------------ annotations

nlohmann::json to_json(const AnnotationRecord& r) {
  nlohmann::json j = {{"sample_id", r.sample_id},
                      {"annotator_id", r.annotator_id},
                      {"task", to_string(r.task)},
                      {"interpretability", to_string(r.interpretability)}};
  j[std::string(usefulness_key(r.task))] = to_string(r.usefulness);
  if (r.task == EvalTask::cluster) {
    if (r.intruder_pick) {
      j["intruder_pick"] = *r.intruder_pick;
    } else {
      j["intruder_pick"] = "unsure";
    }
  }
  return j;
}

namespace {

AnnotationRecord parse_annotation(const nlohmann::json& j) {
  AnnotationRecord r;
  r.sample_id = j.at("sample_id").get<std::string>();
  r.annotator_id = j.at("annotator_id").get<std::string>();
  r.task = eval_task_from_string(j.at("task").get<std::string>());
  r.interpretability = interpretability_from_string(j.at("interpretability").get<std::string>());
  const EvalTask other = r.task == EvalTask::cluster ? EvalTask::keyword : EvalTask::cluster;
  if (j.contains(usefulness_key(other))) {
    throw InputError("record for sample " + r.sample_id + " carries " + std::string(usefulness_key(other)));
  }
  r.usefulness = usefulness_from_string(j.at(usefulness_key(r.task)).get<std::string>(), r.task);
  if (r.task == EvalTask::cluster) {
    const auto& pick = j.at("intruder_pick");
    if (pick.is_string()) {
      if (pick.get<std::string>() != "unsure") throw InputError("intruder_pick must be 0..4 or \"unsure\"");
    } else {
      const auto p = pick.get<std::int64_t>();
      if (p < 0 || p > static_cast<std::int64_t>(kMembersPerSample)) {
        throw InputError("intruder_pick " + std::to_string(p) + " is not a presented position");
      }
      r.intruder_pick = static_cast<std::size_t>(p);
    }
  } else if (j.contains("intruder_pick")) {
    throw InputError("keyword record for sample " + r.sample_id + " carries intruder_pick");
  }
  return r;
}

}  // namespace

AnnotationRecord annotation_from_json(const nlohmann::json& j) {
  try {
    return parse_annotation(j);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("annotation: ") + e.what());
  }
}

double scale(Interpretability v) {
  switch (v) {
    case Interpretability::good: return 1.0;
    case Interpretability::neutral: return 0.5;
    case Interpretability::bad: return 0.0;
  }
  return 0.0;
}

double scale(Usefulness v) {
  switch (v) {
    case Usefulness::useful: return 1.0;
    case Usefulness::average: return 0.5;
    case Usefulness::useless: return 0.0;
  }
  return 0.0;
}

std::vector<AnnotationRecord> read_annotations(const std::filesystem::path& path) {
  return read_jsonl<AnnotationRecord>(path, annotation_from_json);
}

std::vector<AnswerKey> read_answers(const std::filesystem::path& path) {
  return read_jsonl<AnswerKey>(path, answer_from_json);
}

// ------------------------------------------------------------ kappa

double fleiss_kappa(std::span<const std::vector<std::size_t>> ratings, std::size_t n_categories) {
  if (ratings.empty()) throw InputError("Fleiss' kappa needs at least one item");
  if (n_categories == 0) throw InputError("Fleiss' kappa needs at least one category");
  const std::size_t r = ratings.front().size();
  if (r < 2) throw InputError("Fleiss' kappa needs at least two ratings per item");

  std::vector<double> totals(n_categories, 0.0);
  double p_bar = 0.0;
  for (std::size_t i = 0; i < ratings.size(); ++i) {
    if (ratings[i].size() != r) {
      throw InputError("Fleiss' kappa needs the same number of ratings for every item (item " + std::to_string(i) +
                       " has " + std::to_string(ratings[i].size()) + ", expected " + std::to_string(r) + ")");
    }
    std::vector<double> counts(n_categories, 0.0);
    for (std::size_t c : ratings[i]) {
      if (c >= n_categories) throw InputError("rating category out of range");
      counts[c] += 1.0;
    }
    double agree = 0.0;
    for (std::size_t c = 0; c < n_categories; ++c) {
      agree += counts[c] * (counts[c] - 1.0);
      totals[c] += counts[c];
    }
    p_bar += agree / (static_cast<double>(r) * static_cast<double>(r - 1));
  }
  p_bar /= static_cast<double>(ratings.size());

  const double all = static_cast<double>(ratings.size() * r);
  double p_e = 0.0;
  for (double t : totals) p_e += (t / all) * (t / all);

  if (p_e >= 1.0) {
    if (p_bar >= 1.0) return 1.0;
    throw InputError("Fleiss' kappa is undefined: chance agreement is 1 but observed agreement is not");
  }
  return (p_bar - p_e) / (1.0 - p_e);
}

// ------------------------------------------------------------ aggregation

namespace {

constexpr std::size_t kUnsureCategory = kMembersPerSample + 1;

struct Accum {
  std::size_t n = 0;
  double interpretability = 0.0;
  double usefulness = 0.0;
  std::size_t correct = 0;
  std::size_t unsure = 0;
};

std::optional<double> kappa_or_empty(const std::map<std::string, std::vector<std::size_t>>& by_sample,
                                     std::size_t categories) {
  std::vector<std::vector<std::size_t>> items;
  items.reserve(by_sample.size());
  for (const auto& [id, list] : by_sample) items.push_back(list);
  if (items.empty()) return std::nullopt;
  try {
    return fleiss_kappa(items, categories);
  } catch (const InputError&) {
    return std::nullopt;
  }
}

}  // namespace

EvalSummary aggregate_scores(std::span<const AnnotationRecord> records, std::span<const AnswerKey> answers,
                             EvalTask task) {
  std::unordered_map<std::string_view, const AnswerKey*> by_id;
  for (const auto& a : answers) {
    if (!by_id.emplace(a.sample_id, &a).second) throw InputError("duplicate answer for sample " + a.sample_id);
  }

  using Key = std::pair<ModelTag, std::size_t>;
  std::map<Key, Accum> topics;
  // Per model, per metric, sample id -> categories chosen by each rater.
  struct ModelRatings {
    std::map<std::string, std::vector<std::size_t>> interpretability, usefulness, pick;
  };
  std::map<ModelTag, ModelRatings> ratings;
  std::set<std::pair<std::string_view, std::string_view>> seen;

  for (const auto& r : records) {
    const auto it = by_id.find(r.sample_id);
    if (it == by_id.end()) throw InputError("annotation references unknown sample " + r.sample_id);
    const AnswerKey& ans = *it->second;
    if (ans.task != r.task) {
      throw InputError("annotation for sample " + r.sample_id + " is a " + std::string(to_string(r.task)) +
                       " record but the sample belongs to the " + std::string(to_string(ans.task)) + " task");
    }
    if (r.task != task) continue;
    if (!seen.emplace(r.sample_id, r.annotator_id).second) {
      throw InputError("annotator " + r.annotator_id + " rated sample " + r.sample_id + " more than once");
    }
    Accum& acc = topics[{ans.model_tag, ans.topic}];
    ++acc.n;
    acc.interpretability += scale(r.interpretability);
    acc.usefulness += scale(r.usefulness);
    auto& mr = ratings[ans.model_tag];
    mr.interpretability[r.sample_id].push_back(static_cast<std::size_t>(r.interpretability));
    mr.usefulness[r.sample_id].push_back(static_cast<std::size_t>(r.usefulness));
    if (task == EvalTask::cluster) {
      if (!r.intruder_pick) {
        ++acc.unsure;
      } else if (*r.intruder_pick == ans.intruder_position) {
        ++acc.correct;
      }
      mr.pick[r.sample_id].push_back(r.intruder_pick.value_or(kUnsureCategory));
    }
  }

  EvalSummary out;
  out.task = task;
  for (const auto& [key, acc] : topics) {
    TopicScores ts;
    ts.model = key.first;
    ts.topic = key.second;
    ts.n_records = acc.n;
    const double n = static_cast<double>(acc.n);
    ts.interpretability = acc.interpretability / n;
    ts.usefulness = acc.usefulness / n;
    if (task == EvalTask::cluster) {
      ts.correct_intruders = static_cast<double>(acc.correct) / n;
      ts.unsure_intruders = static_cast<double>(acc.unsure) / n;
    }
    out.topics.push_back(ts);
  }

  for (const auto& [model, mr] : ratings) {
    std::vector<const TopicScores*> rows;
    for (const auto& t : out.topics) {
      if (t.model == model) rows.push_back(&t);
    }
    const auto summarise = [&](const std::string& metric, auto value, std::optional<double> kappa) {
      MetricSummary m;
      m.model = model;
      m.metric = metric;
      double sum = 0.0;
      for (const auto* t : rows) {
        const double v = value(*t);
        sum += v;
        if (v > 0.5) ++m.topics_above_half;
      }
      m.average = sum / static_cast<double>(rows.size());
      m.kappa = kappa;
      out.metrics.push_back(m);
    };
    summarise("interpretability", [](const TopicScores& t) { return t.interpretability; },
              kappa_or_empty(mr.interpretability, 3));
    summarise("usefulness", [](const TopicScores& t) { return t.usefulness; },
              kappa_or_empty(mr.usefulness, 3));
    if (task == EvalTask::cluster) {
      summarise("correct_intruders", [](const TopicScores& t) { return *t.correct_intruders; },
                kappa_or_empty(mr.pick, kUnsureCategory + 1));
      summarise("unsure_intruders", [](const TopicScores& t) { return *t.unsure_intruders; }, std::nullopt);
    }
  }
  return out;
}

std::string topic_scores_csv(const EvalSummary* keyword, const EvalSummary* cluster) {
  using Key = std::pair<ModelTag, std::size_t>;
  std::map<Key, std::pair<const TopicScores*, const TopicScores*>> rows;
  if (keyword) {
    for (const auto& t : keyword->topics) rows[{t.model, t.topic}].first = &t;
  }
  if (cluster) {
    for (const auto& t : cluster->topics) rows[{t.model, t.topic}].second = &t;
  }
  const auto opt = [](std::optional<double> v) { return v ? format_double(*v) : std::string(); };
  std::string out =
      "model,topic,keyword_interpretability,keyword_usefulness,cluster_interpretability,cluster_usefulness,"
      "correct_intruders,unsure_intruders\n";
  for (const auto& [key, pair] : rows) {
    const auto [kw, cl] = pair;
    out += std::string(to_string(key.first)) + "," + std::to_string(key.second) + ",";
    out += (kw ? format_double(kw->interpretability) : "") + "," + (kw ? format_double(kw->usefulness) : "") + ",";
    out += (cl ? format_double(cl->interpretability) : "") + "," + (cl ? format_double(cl->usefulness) : "") + ",";
    out += (cl ? opt(cl->correct_intruders) : "") + "," + (cl ? opt(cl->unsure_intruders) : "") + "\n";
  }
  return out;
}

std::string summary_table_csv(std::span<const EvalSummary> summaries) {
  std::string out = "task,metric,model,average_score,topic_count,fleiss_kappa\n";
  for (const auto& s : summaries) {
    for (const auto& m : s.metrics) {
      out += std::string(to_string(s.task)) + "," + m.metric + "," + std::string(to_string(m.model)) + "," +
             format_double(m.average) + "," + std::to_string(m.topics_above_half) + "," +
             (m.kappa ? format_double(*m.kappa) : "") + "\n";
    }
  }
  return out;
}

}  // namespace stormtopics
