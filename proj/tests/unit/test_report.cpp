#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "cict/report.hpp"
#include "cict/rng.hpp"

using namespace cict;
using nlohmann::json;

namespace {
void scored(std::size_t n, std::vector<double>& s, std::vector<int>& y) {
  Rng rng(n);
  s.resize(n);
  y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = static_cast<int>(i % 2);
    s[i] = std::min(1.0, std::max(0.0, 0.3 + 0.4 * y[i] + 0.25 * rng.normal()));
  }
}
}  // namespace

TEST_CASE("minimal report has every field") {
  std::vector<double> s;
  std::vector<int> y;
  scored(20, s, y);
  const auto r = assemble_report(std::nullopt, s, y);
  const auto doc = json::parse(r.to_json());
  for (const char* key : {"auc", "mse", "r2", "hosmer_lemeshow", "youden", "roc_points", "score_distribution", "metrics", "info"})
    CHECK_MESSAGE(doc.contains(key), key);
  CHECK(doc["hosmer_lemeshow"]["groups"].size() == 10);
  CHECK(doc["hosmer_lemeshow"].contains("chi_square"));
  CHECK(doc["hosmer_lemeshow"].contains("p_value"));
  CHECK(doc["youden"].contains("sensitivity"));
  CHECK(!doc.contains("clustering"));
  CHECK(!doc.contains("cv"));
}

TEST_CASE("report round trip is bit-identical") {
  std::vector<double> s;
  std::vector<int> y;
  scored(60, s, y);
  Matrix feats(60, 3);
  Rng rng(3);
  for (std::size_t r = 0; r < 60; ++r)
    for (std::size_t c = 0; c < 3; ++c) feats(r, c) = rng.normal() + 3.0 * y[r];
  auto clustering = cluster_edges(feats, y, 2);
  CHECK(clustering.pca_coords.rows() == 60);
  CHECK(clustering.pca_coords.cols() == 2);
  CHECK(clustering.ari > 0.5);
  CvSummary cv;
  cv.repeats = 3;
  cv.folds = 10;
  cv.auc = {0.91234567890123, 0.0123};
  auto r = assemble_report(cv, s, y, clustering);
  r.metrics["heldout_auc_mean"] = 1.0 / 3.0;
  r.info["preset"] = "exp1";
  const auto text = r.to_json();
  const auto back = EvaluationReport::from_json(text);
  CHECK(back.to_json() == text);
  CHECK(back.metrics.at("heldout_auc_mean") == 1.0 / 3.0);
  REQUIRE(back.clustering.has_value());
  CHECK(back.clustering->assignment == clustering.assignment);
  CHECK(back.cv->auc.mean == cv.auc.mean);
}

TEST_CASE("plot series files") {
  std::vector<double> s;
  std::vector<int> y;
  scored(40, s, y);
  const auto r = assemble_report(std::nullopt, s, y);
  const std::filesystem::path dir = std::filesystem::path(CICT_TEST_TMP) / "report_series";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  write_plot_series(dir, r);
  for (const char* f : {"roc.csv", "calibration.csv", "score_dist.csv"}) CHECK(std::filesystem::exists(dir / f));
  CHECK(!std::filesystem::exists(dir / "clusters.csv"));
  std::ifstream in(dir / "roc.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header.find("fpr") != std::string::npos);
}
