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
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "stormtopics/evalkit.hpp"
#include "stormtopics/io.hpp"
#include "stormtopics_cli/cli.hpp"
#include "stormtopics_cli/config.hpp"
#include "temp_dir.hpp"

using namespace stormtopics;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "stormtopics");
  std::ostringstream out, err;
  const int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string fx(const std::string& name) { return testing::fixture(name).string(); }

// Relative path -> contents for every regular file below root.
std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).generic_string()] = read_file(e.path());
  }
  return out;
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

struct Prepared {
  testing::TempDir dir;
  fs::path docs;

  Prepared() {
    const auto r = run({"preprocess", "--corpus", fx("tweets.jsonl"), "--out", (dir / "pre").string()});
    REQUIRE(r.code == 0);
    docs = dir / "pre" / "documents.jsonl";
  }

  fs::path cluster(const std::string& k, const std::string& seed = "3") {
    const auto out = dir / ("cluster-" + k + "-" + seed);
    const auto r = run({"--seed", seed, "cluster", "--bundle", fx("bundle_fte"), "--documents", docs.string(), "--k", k,
                        "--out", out.string()});
    REQUIRE(r.code == 0);
    return out;
  }
};

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("version and usage errors") {
    const auto v = run({"--version"});
    CHECK(v.code == 0);
    CHECK(v.out.find(STORMTOPICS_VERSION) != std::string::npos);
    CHECK(run({}).code == cli::kExitInvalid);
    CHECK(run({"frobnicate"}).code == cli::kExitInvalid);
    CHECK(run({"cluster", "--bundle", "x"}).code == cli::kExitInvalid);
  }

  TEST_CASE("missing input is an input error") {
    testing::TempDir dir;
    const auto r = run({"preprocess", "--corpus", (dir / "absent.jsonl").string(), "--out", (dir / "o").string()});
    CHECK(r.code == cli::kExitInvalid);
    CHECK_FALSE(r.err.empty());
  }

  TEST_CASE("preprocess writes documents and a run record") {
    Prepared p;
    CHECK(fs::exists(p.docs));
    CHECK(lines(read_file(p.docs)) == 200);
    const auto run_json = nlohmann::json::parse(read_file(p.dir / "pre" / "run.json"));
    CHECK(run_json.at("command") == "preprocess");
    CHECK(run_json.at("inputs").at(0).at("sha256").get<std::string>().size() == 64);
    CHECK(run_json.dump().find(p.dir.path().string()) == std::string::npos);
    for (const auto& e : fs::recursive_directory_iterator(p.dir.path())) {
      CHECK(e.path().string().find(".partial") == std::string::npos);
    }
  }

  TEST_CASE("agree on identical clusterings is one") {
    Prepared p;
    const auto c = p.cluster("5") / "clustering-k05.json";
    const auto r = run({"agree", c.string(), c.string()});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("symmetric") == 1.0);
    CHECK(j.at("agr_a_given_b") == 1.0);
  }

  TEST_CASE("seed flag, config and environment") {
    Prepared p;
    const auto a = read_file(p.cluster("4", "11") / "clustering-k04.json");
    const auto b = read_file(p.cluster("4", "11") / "clustering-k04.json");
    CHECK(a == b);

    const auto cfg = p.dir / "cfg.json";
    write_file_atomic(cfg, R"({"seed": 11})");
    const auto via_config = p.dir / "via-config";
    REQUIRE(run({"--config", cfg.string(), "cluster", "--bundle", fx("bundle_fte"), "--documents", p.docs.string(),
                 "--k", "4", "--out", via_config.string()})
                .code == 0);
    CHECK(read_file(via_config / "clustering-k04.json") == a);

    ::setenv("STORMTOPICS_SEED", "11", 1);
    const auto via_env = p.dir / "via-env";
    const auto r = run({"cluster", "--bundle", fx("bundle_fte"), "--documents", p.docs.string(), "--k", "4", "--out",
                        via_env.string()});
    ::unsetenv("STORMTOPICS_SEED");
    REQUIRE(r.code == 0);
    CHECK(read_file(via_env / "clustering-k04.json") == a);

    cli::PipelineConfig empty;
    CHECK(cli::resolve_seed(std::nullopt, empty) == 0);
    CHECK(cli::resolve_seed(5, empty) == 5);
    ::setenv("STORMTOPICS_SEED", "not-a-number", 1);
    CHECK_THROWS_AS(cli::resolve_seed(std::nullopt, empty), InputError);
    ::unsetenv("STORMTOPICS_SEED");
  }

  TEST_CASE("unknown config keys are rejected") {
    testing::TempDir dir;
    const auto cfg = dir / "cfg.json";
    write_file_atomic(cfg, R"({"kmeans": {"n_init": 3, "n_inits": 4}})");
    const auto r = run({"--config", cfg.string(), "preprocess", "--corpus", fx("tweets.jsonl"), "--out",
                        (dir / "o").string()});
    CHECK(r.code == cli::kExitInvalid);
    CHECK(r.err.find("n_inits") != std::string::npos);
    write_file_atomic(cfg, R"({"bogus": 1})");
    CHECK(run({"--config", cfg.string(), "preprocess", "--corpus", fx("tweets.jsonl"), "--out", (dir / "p").string()})
              .code == cli::kExitInvalid);
  }

  TEST_CASE("k ranges") {
    CHECK(cli::parse_k_range("5..15").values().size() == 11);
    CHECK(cli::parse_k_range("9").values() == std::vector<std::size_t>{9});
    CHECK_THROWS_AS(cli::parse_k_range("7..3"), InputError);
    CHECK_THROWS_AS(cli::parse_k_range("a..b"), InputError);
  }

  TEST_CASE("coherence sweep requires every k") {
    Prepared p;
    const auto clu = p.cluster("5");
    const auto kw = p.dir / "kw";
    REQUIRE(run({"keywords", "--strategy", "tfidf", "--clustering", (clu / "clustering-k05.json").string(),
                 "--documents", p.docs.string(), "--out", kw.string()})
                .code == 0);
    const auto ok = run({"coherence", "--metric", "cv", "--metric", "cnpmi", "--reference", p.docs.string(),
                         "--keywords", (kw / "keywords-k05.json").string(), "--out", (p.dir / "coh").string()});
    REQUIRE(ok.code == 0);
    CHECK(read_file(p.dir / "coh" / "coherence.csv").rfind("model,k,metric,topic,score\n", 0) == 0);
    CHECK(lines(read_file(p.dir / "coh" / "curves.csv")) == 3);
    const auto missing = run({"coherence", "--reference", p.docs.string(), "--keywords",
                              (kw / "keywords-k05.json").string(), "--k-sweep", "5..6", "--out",
                              (p.dir / "coh2").string()});
    CHECK(missing.code == cli::kExitInvalid);
    CHECK(missing.err.find("6") != std::string::npos);
  }

  TEST_CASE("pipeline is reproducible and feeds score-eval") {
    testing::TempDir dir;
    const auto pipeline = [&](const fs::path& out) {
      return run({"--seed", "7", "pipeline", "--corpus", fx("tweets.jsonl"), "--bundle", fx("bundle_fte"), "--bundle",
                  fx("bundle_bert"), "--k-sweep", "5..6", "--select-k", "5", "--out", out.string()});
    };
    const auto r1 = pipeline(dir / "a");
    INFO(r1.err);
    REQUIRE(r1.code == 0);
    REQUIRE(pipeline(dir / "b").code == 0);
    CHECK(snapshot(dir / "a") == snapshot(dir / "b"));

    for (const char* sub : {"preprocess", "cluster-fte", "cluster-bert", "keywords-fte", "topics-lda", "topics-btm",
                            "coherence", "agree", "sample-eval", "report"}) {
      CHECK_MESSAGE(fs::is_directory(dir / "a" / sub), sub);
      CHECK_MESSAGE(fs::exists(dir / "a" / sub / "run.json"), sub);
    }
    // 4 models x 2 metrics x 2 k plus the header.
    CHECK(lines(read_file(dir / "a" / "coherence" / "curves.csv")) == 17);

    const auto answers = read_answers(dir / "a" / "sample-eval" / "answers.jsonl");
    CHECK_FALSE(answers.empty());
    std::string jsonl;
    for (const auto& rec : oracle::synthetic_records(answers, 3, 5)) jsonl += to_json(rec).dump() + "\n";
    write_file_atomic(dir / "records.jsonl", jsonl);
    const auto score = [&](const fs::path& out) {
      return run({"score-eval", "--annotations", (dir / "records.jsonl").string(), "--answers",
                  (dir / "a" / "sample-eval" / "answers.jsonl").string(), "--out", out.string()});
    };
    REQUIRE(score(dir / "s1").code == 0);
    REQUIRE(score(dir / "s2").code == 0);
    CHECK(snapshot(dir / "s1") == snapshot(dir / "s2"));
    CHECK(read_file(dir / "s1" / "summary.csv").rfind("task,metric,model,average_score,topic_count,fleiss_kappa\n", 0) ==
          0);

    const auto skipped = run({"--seed", "7", "pipeline", "--corpus", fx("tweets.jsonl"), "--bundle", fx("bundle_fte"),
                              "--k-sweep", "5..5", "--select-k", "5", "--skip-eval", "--out",
                              (dir / "c").string()});
    REQUIRE(skipped.code == 0);
    CHECK_FALSE(fs::exists(dir / "c" / "sample-eval"));
  }
}
