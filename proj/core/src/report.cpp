#include "cict/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "cict/csv.hpp"
#include "cict/error.hpp"
#include "cict/stats.hpp"

namespace cict {
namespace {

using nlohmann::json;

json quartiles_json(const eval::Quartiles& q) {
  return {{"n", q.n}, {"min", q.min}, {"q1", q.q1}, {"median", q.median}, {"q3", q.q3}, {"max", q.max}, {"mean", q.mean}};
}

eval::Quartiles quartiles_from(const json& j) {
  eval::Quartiles q;
  q.n = j.at("n").get<std::size_t>();
  q.min = j.at("min").get<double>();
  q.q1 = j.at("q1").get<double>();
  q.median = j.at("median").get<double>();
  q.q3 = j.at("q3").get<double>();
  q.max = j.at("max").get<double>();
  q.mean = j.at("mean").get<double>();
  return q;
}

json summary_json(const MetricSummary& m) { return {{"mean", m.mean}, {"sd", m.sd}}; }
MetricSummary summary_from(const json& j) { return {j.at("mean").get<double>(), j.at("sd").get<double>()}; }

// JSON has no infinity; the first ROC threshold is written as null.
json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
double number_from(const json& j) { return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>(); }

}  // namespace

std::string EvaluationReport::to_json() const {
  json doc;
  doc["format"] = "cict.report";
  doc["version"] = kReportVersion;
  doc["auc"] = auc;
  doc["mse"] = mse;
  doc["r2"] = r2;
  auto& hl = doc["hosmer_lemeshow"];
  hl["chi_square"] = hosmer_lemeshow.chi_square;
  hl["p_value"] = hosmer_lemeshow.p_value;
  hl["df"] = hosmer_lemeshow.df;
  hl["groups"] = json::array();
  for (const auto& g : hosmer_lemeshow.groups)
    hl["groups"].push_back({{"n", g.n},
                            {"observed", g.observed},
                            {"expected", g.expected},
                            {"mean_score", g.mean_score},
                            {"event_rate", g.event_rate},
                            {"degenerate", g.degenerate}});
  doc["youden"] = {{"threshold", youden.threshold},
                   {"j", youden.j},
                   {"sensitivity", youden.sensitivity},
                   {"specificity", youden.specificity}};
  doc["roc_points"] = json::array();
  for (const auto& p : roc_points) doc["roc_points"].push_back({number_or_null(p.threshold), p.fpr, p.tpr});
  doc["score_distribution"] = {{"negative", quartiles_json(negative_scores)},
                               {"positive", quartiles_json(positive_scores)}};
  if (cv)
    doc["cv"] = {{"auc", summary_json(cv->auc)},
                 {"mse", summary_json(cv->mse)},
                 {"r2", summary_json(cv->r2)},
                 {"oob_auc", summary_json(cv->oob_auc)},
                 {"repeats", cv->repeats},
                 {"folds", cv->folds}};
  if (clustering) {
    json c;
    c["k"] = clustering->k;
    c["ari"] = clustering->ari;
    c["medoids"] = clustering->medoids;
    c["assignment"] = clustering->assignment;
    c["truth"] = clustering->truth;
    c["explained"] = clustering->explained;
    c["pca_coords"] = json::array();
    for (std::size_t r = 0; r < clustering->pca_coords.rows(); ++r) {
      auto row = clustering->pca_coords.row(r);
      c["pca_coords"].push_back(std::vector<double>(row.begin(), row.end()));
    }
    doc["clustering"] = std::move(c);
  }
  doc["metrics"] = metrics;
  doc["info"] = info;
  return doc.dump(1);
}

EvaluationReport EvaluationReport::from_json(std::string_view text) {
  auto doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || doc.value("format", "") != "cict.report")
    throw Error(ErrorKind::Format, "not a cict.report document");
  if (doc.value("version", 0) != kReportVersion) throw Error(ErrorKind::Format, "unsupported report version");
  try {
    EvaluationReport r;
    r.auc = doc.at("auc").get<double>();
    r.mse = doc.at("mse").get<double>();
    r.r2 = doc.at("r2").get<double>();
    const auto& hl = doc.at("hosmer_lemeshow");
    r.hosmer_lemeshow.chi_square = hl.at("chi_square").get<double>();
    r.hosmer_lemeshow.p_value = hl.at("p_value").get<double>();
    r.hosmer_lemeshow.df = hl.at("df").get<int>();
    for (const auto& g : hl.at("groups")) {
      eval::CalibrationGroup grp;
      grp.n = g.at("n").get<std::size_t>();
      grp.observed = g.at("observed").get<double>();
      grp.expected = g.at("expected").get<double>();
      grp.mean_score = g.at("mean_score").get<double>();
      grp.event_rate = g.at("event_rate").get<double>();
      grp.degenerate = g.at("degenerate").get<bool>();
      r.hosmer_lemeshow.groups.push_back(grp);
    }
    const auto& y = doc.at("youden");
    r.youden = {y.at("threshold").get<double>(), y.at("j").get<double>(), y.at("sensitivity").get<double>(),
                y.at("specificity").get<double>()};
    for (const auto& p : doc.at("roc_points"))
      r.roc_points.push_back({number_from(p.at(0)), p.at(1).get<double>(), p.at(2).get<double>()});
    r.negative_scores = quartiles_from(doc.at("score_distribution").at("negative"));
    r.positive_scores = quartiles_from(doc.at("score_distribution").at("positive"));
    if (doc.contains("cv")) {
      const auto& c = doc.at("cv");
      CvSummary s;
      s.auc = summary_from(c.at("auc"));
      s.mse = summary_from(c.at("mse"));
      s.r2 = summary_from(c.at("r2"));
      s.oob_auc = summary_from(c.at("oob_auc"));
      s.repeats = c.at("repeats").get<std::size_t>();
      s.folds = c.at("folds").get<std::size_t>();
      r.cv = s;
    }
    if (doc.contains("clustering")) {
      const auto& c = doc.at("clustering");
      ClusteringResult cl;
      cl.k = c.at("k").get<std::size_t>();
      cl.ari = c.at("ari").get<double>();
      cl.medoids = c.at("medoids").get<std::vector<std::size_t>>();
      cl.assignment = c.at("assignment").get<std::vector<std::size_t>>();
      cl.truth = c.at("truth").get<std::vector<int>>();
      cl.explained = c.at("explained").get<std::vector<double>>();
      for (const auto& row : c.at("pca_coords")) cl.pca_coords.append_row(row.get<std::vector<double>>());
      r.clustering = std::move(cl);
    }
    r.metrics = doc.at("metrics").get<std::map<std::string, double>>();
    r.info = doc.at("info").get<std::map<std::string, std::string>>();
    return r;
  } catch (const json::exception& ex) {
    throw Error(ErrorKind::Format, std::string("malformed report: ") + ex.what());
  }
}

CvSummary summarize_cv(const CvReport& cv, std::size_t folds) {
  CvSummary s;
  s.auc = cv.auc;
  s.mse = cv.mse;
  s.r2 = cv.r2;
  s.oob_auc = cv.oob_auc_summary;
  s.repeats = cv.repeats.size();
  s.folds = folds;
  return s;
}

EvaluationReport assemble_report(const std::optional<CvSummary>& cv, std::span<const double> scores,
                                 std::span<const int> labels, const std::optional<ClusteringResult>& clustering) {
  EvaluationReport r;
  const auto roc = eval::roc_auc(scores, labels);
  r.auc = roc.auc;
  r.roc_points = roc.points;
  r.mse = eval::mean_squared_error(scores, labels);
  r.r2 = eval::r_squared(scores, labels);
  r.hosmer_lemeshow = eval::hosmer_lemeshow(scores, labels, std::min<std::size_t>(10, scores.size()));
  r.youden = eval::youden_threshold(scores, labels);
  std::vector<double> neg, pos;
  for (std::size_t i = 0; i < scores.size(); ++i) (labels[i] == 1 ? pos : neg).push_back(scores[i]);
  r.negative_scores = eval::quartiles(neg);
  r.positive_scores = eval::quartiles(pos);
  r.cv = cv;
  r.clustering = clustering;
  return r;
}

ClusteringResult cluster_edges(const Matrix& features, std::span<const int> truth, std::size_t k) {
  ClusteringResult c;
  c.k = k;
  const auto pam = eval::pam_cluster(features, k);
  c.medoids = pam.medoids;
  c.assignment = pam.assignment;
  c.truth.assign(truth.begin(), truth.end());
  if (!truth.empty()) {
    std::vector<std::size_t> t(truth.begin(), truth.end());
    c.ari = eval::adjusted_rand_index(c.assignment, t);
  }
  const auto p = stats::pca(features, 2);
  c.explained = p.explained_ratio;
  c.pca_coords = Matrix(features.rows(), 2);
  for (std::size_t r = 0; r < features.rows(); ++r)
    for (std::size_t a = 0; a < p.projected.cols(); ++a) c.pca_coords(r, a) = p.projected(r, a);
  return c;
}

void write_plot_series(const std::filesystem::path& dir, const EvaluationReport& report,
                       const std::vector<EdgeKey>* cluster_keys) {
  {
    auto out = csv::open_output(dir / "roc.csv");
    out << "threshold,fpr,tpr\n";
    for (const auto& p : report.roc_points)
      csv::write_row(out, {std::isfinite(p.threshold) ? csv::format_double(p.threshold) : "inf",
                           csv::format_double(p.fpr), csv::format_double(p.tpr)});
  }
  {
    auto out = csv::open_output(dir / "calibration.csv");
    out << "decile,n,mean_score,event_rate,observed,expected,degenerate\n";
    for (std::size_t g = 0; g < report.hosmer_lemeshow.groups.size(); ++g) {
      const auto& grp = report.hosmer_lemeshow.groups[g];
      csv::write_row(out, {std::to_string(g + 1), std::to_string(grp.n), csv::format_double(grp.mean_score),
                           csv::format_double(grp.event_rate), csv::format_double(grp.observed),
                           csv::format_double(grp.expected), grp.degenerate ? "1" : "0"});
    }
  }
  {
    auto out = csv::open_output(dir / "score_dist.csv");
    out << "class,n,min,q1,median,q3,max,mean\n";
    auto row = [&](const char* name, const eval::Quartiles& q) {
      csv::write_row(out, {name, std::to_string(q.n), csv::format_double(q.min), csv::format_double(q.q1),
                           csv::format_double(q.median), csv::format_double(q.q3), csv::format_double(q.max),
                           csv::format_double(q.mean)});
    };
    row("0", report.negative_scores);
    row("1", report.positive_scores);
  }
  if (report.clustering) write_cluster_series(dir / "clusters.csv", *report.clustering, cluster_keys);
}

void write_cluster_series(const std::filesystem::path& path, const ClusteringResult& c,
                          const std::vector<EdgeKey>* cluster_keys) {
  {
    auto out = csv::open_output(path);
    out << "source,target,cluster,is_medoid,pc1,pc2,label\n";
    for (std::size_t r = 0; r < c.assignment.size(); ++r) {
      const bool medoid = std::find(c.medoids.begin(), c.medoids.end(), r) != c.medoids.end();
      csv::write_row(out, {cluster_keys ? (*cluster_keys)[r].source : std::to_string(r),
                           cluster_keys ? (*cluster_keys)[r].target : "", std::to_string(c.assignment[r]),
                           medoid ? "1" : "0", csv::format_double(c.pca_coords(r, 0)),
                           csv::format_double(c.pca_coords.cols() > 1 ? c.pca_coords(r, 1) : 0.0),
                           r < c.truth.size() ? std::to_string(c.truth[r]) : ""});
    }
  }
}

}  // namespace cict
