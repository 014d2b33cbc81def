#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kTmp = fs::path(CICT_TEST_TMP) / "cli";

int cict(const std::string& args) {
  const std::string cmd = std::string(CICT_CLI) + " " + args + " >>" + (kTmp / "log.txt").string() + " 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json manifest(const fs::path& dir) { return json::parse(slurp(dir / "manifest.json")); }

std::string d(const std::string& name) { return (kTmp / name).string(); }

struct Pipeline {
  Pipeline() {
    fs::remove_all(kTmp);
    fs::create_directories(kTmp);
    REQUIRE(cict("synth --spec desk --out " + d("synth")) == 0);
    REQUIRE(cict("ingest --in " + d("synth/events.csv") + " --out " + d("ingest")) == 0);
    REQUIRE(cict("build --transitions " + d("ingest/transitions.csv") + " --frequencies " + d("ingest/frequencies.csv") +
                 " --out " + d("build")) == 0);
    REQUIRE(cict("featurize --network " + d("build/network.json") + " --out " + d("feat")) == 0);
  }
};

Pipeline& pipeline() {
  static Pipeline p;
  return p;
}

}  // namespace

TEST_CASE("stage by stage pipeline") {
  pipeline();
  for (const char* dir : {"synth", "ingest", "build", "feat"}) {
    const auto m = manifest(kTmp / dir);
    CHECK(m.contains("command"));
    CHECK(m["seed"] == 0);
    CHECK(m["feature_schema"] == "cict-features-v1");
    CHECK(m.contains("tool_version"));
    CHECK(m.contains("timings_seconds"));
    for (const auto& o : m["outputs"]) CHECK(fs::exists(kTmp / dir / o["path"].get<std::string>()));
  }
  const auto summary = json::parse(slurp(kTmp / "ingest/summary.json"));
  for (const char* k : {"entities", "records", "transitions", "distinct_codes"}) CHECK_MESSAGE(summary.contains(k), k);

  REQUIRE(cict("train --features " + d("feat/features.csv") + " --labels " + d("synth/truth.csv") +
               " --positive causal --negative random --trees 3 --depth 5 --cv-repeats 2 --out " + d("train")) == 0);
  REQUIRE(cict("predict --model " + d("train/model.json") + " --features " + d("feat/features.csv") + " --out " +
               d("pred")) == 0);
  REQUIRE(cict("evaluate --predictions " + d("pred/predictions.csv") + " --labels " + d("synth/truth.csv") +
               " --positive causal --negative random --out " + d("eval")) == 0);
  const auto report = json::parse(slurp(kTmp / "eval/report.json"));
  CHECK(report["auc"].get<double>() > 0.8);
  CHECK(fs::exists(kTmp / "eval/roc.csv"));

  REQUIRE(cict("importance --model " + d("train/model.json") + " --features " + d("feat/features.csv") + " --labels " +
               d("synth/truth.csv") + " --positive causal --negative random --out " + d("imp")) == 0);
  std::ifstream imp(kTmp / "imp/importance.csv");
  std::string header, first;
  std::getline(imp, header);
  std::getline(imp, first);
  CHECK(header == "rank,feature,importance");
  CHECK(first.substr(first.rfind(',') + 1) == "1");
  CHECK(fs::exists(kTmp / "imp/histograms.csv"));
  CHECK(fs::exists(kTmp / "imp/ks.csv"));
}

TEST_CASE("reruns reproduce outputs bit for bit") {
  pipeline();
  REQUIRE(cict("featurize --network " + d("build/network.json") + " --threads 3 --out " + d("feat2")) == 0);
  CHECK(slurp(kTmp / "feat/features.csv") == slurp(kTmp / "feat2/features.csv"));
  REQUIRE(cict("synth --spec desk --threads 2 --out " + d("synth2")) == 0);
  CHECK(manifest(kTmp / "synth")["outputs"] == manifest(kTmp / "synth2")["outputs"]);

  for (int run = 0; run < 2; ++run)
    REQUIRE(cict("experiment --preset exp1 --spec desk --repeats 3 --seed 4 --threads " + std::to_string(1 + 2 * run) +
                 " --out " + d("exp_" + std::to_string(run))) == 0);
  for (const char* f : {"report.json", "model.json", "features.csv", "labels.csv", "roc.csv", "clusters.csv"})
    CHECK_MESSAGE(slurp(kTmp / "exp_0" / f) == slurp(kTmp / "exp_1" / f), f);
  CHECK(manifest(kTmp / "exp_0")["outputs"] == manifest(kTmp / "exp_1")["outputs"]);
}

TEST_CASE("preset features equal the stage-by-stage features") {
  pipeline();
  REQUIRE(cict("experiment --preset exp1 --spec desk --repeats 1 --out " + d("exp_iso")) == 0);
  REQUIRE(cict("featurize --network " + d("build/network.json") + " --edges " + d("exp_iso/labels.csv") + " --out " +
               d("feat_iso")) == 0);
  CHECK(slurp(kTmp / "exp_iso/features.csv") == slurp(kTmp / "feat_iso/features.csv"));
}

TEST_CASE("exit codes") {
  pipeline();
  CHECK(cict("ingest --in " + d("does_not_exist.csv") + " --out " + d("bad1")) == 2);
  CHECK(cict("experiment --preset exp9 --spec desk --out " + d("bad2")) == 3);
  CHECK(cict("experiment --preset exp1 --out " + d("bad3")) == 3);
  CHECK(cict("train --features " + d("feat/features.csv") + " --out " + d("bad4")) == 3);
  CHECK(cict("train --features " + d("feat/features.csv") + " --labels " + d("synth/truth.csv") +
             " --positive causal --negative random --trees 0 --out " + d("bad5")) == 3);
  {
    std::ofstream junk(kTmp / "junk_model.json");
    junk << "{not json";
  }
  CHECK(cict("predict --model " + d("junk_model.json") + " --features " + d("feat/features.csv") + " --out " + d("bad6")) ==
        1);
  CHECK(cict("bogus") == 3);
}
