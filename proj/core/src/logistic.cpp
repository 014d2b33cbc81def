#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "cict/error.hpp"
#include "cict/model.hpp"
#include "cict/stats.hpp"

namespace cict {
namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

LogisticProblem::LogisticProblem(const Matrix& standardized, std::span<const int> y, double l2)
    : x_(standardized), y_(y.begin(), y.end()), l2_(l2), cols_(standardized.cols()) {
  if (y_.size() != x_.rows()) throw Error(ErrorKind::Argument, "label count does not match row count");
}

double LogisticProblem::objective(std::span<const double> params) const {
  const std::size_t n = x_.rows();
  double loss = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    double z = params[0];
    auto row = x_.row(r);
    for (std::size_t c = 0; c < cols_; ++c) z += params[c + 1] * row[c];
    // -[y log s(z) + (1-y) log(1 - s(z))] = softplus(z) - y z
    loss += softplus(z) - (y_[r] == 1 ? z : 0.0);
  }
  double penalty = 0.0;
  for (std::size_t c = 0; c < cols_; ++c) penalty += params[c + 1] * params[c + 1];
  return loss / static_cast<double>(n) + 0.5 * l2_ * penalty;
}

std::vector<double> LogisticProblem::gradient(std::span<const double> params) const {
  const std::size_t n = x_.rows();
  std::vector<double> g(cols_ + 1, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    double z = params[0];
    auto row = x_.row(r);
    for (std::size_t c = 0; c < cols_; ++c) z += params[c + 1] * row[c];
    const double resid = sigmoid(z) - (y_[r] == 1 ? 1.0 : 0.0);
    g[0] += resid;
    for (std::size_t c = 0; c < cols_; ++c) g[c + 1] += resid * row[c];
  }
  for (auto& v : g) v /= static_cast<double>(n);
  for (std::size_t c = 0; c < cols_; ++c) g[c + 1] += l2_ * params[c + 1];
  return g;
}

std::vector<double> LogisticModel::params() const {
  std::vector<double> p{intercept};
  p.insert(p.end(), weights.begin(), weights.end());
  return p;
}

LogisticModel train_logistic(const FeatureMatrix& x, std::span<const int> y, const LogisticConfig& cfg) {
  const std::size_t n = x.rows();
  if (y.size() != n) throw Error(ErrorKind::Argument, "label count does not match row count");
  std::size_t positives = 0;
  for (int v : y) {
    if (v != 0 && v != 1) throw Error(ErrorKind::Argument, "logistic regression needs 0/1 labels");
    positives += static_cast<std::size_t>(v);
  }
  if (positives == 0 || positives == n) throw Error(ErrorKind::Training, "training data contains a single class");

  LogisticModel model;
  model.feature_names = x.names;
  model.schema_hash = x.schema_hash();
  const Matrix z = stats::standardize_columns(x.values, &model.kept_columns);
  for (auto c : model.kept_columns) {
    const auto col = x.values.column(c);
    model.means.push_back(stats::mean(col));
    model.scales.push_back(stats::population_sd(col));
  }

  const LogisticProblem problem(z, y, cfg.l2);
  const std::size_t d = problem.dimension();
  std::vector<double> params(d, 0.0);
  const double prevalence = static_cast<double>(positives) / static_cast<double>(n);
  params[0] = std::log(prevalence / (1.0 - prevalence));

  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> zm(
      z.data().data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(z.cols()));

  double f = problem.objective(params);
  auto g = problem.gradient(params);
  std::size_t iter = 0;
  while (norm(g) >= cfg.gradient_tolerance && iter < cfg.max_iterations) {
    ++iter;
    // Hessian of the mean loss: [1 X]^T W [1 X] / n + l2 on the weight block.
    Eigen::VectorXd w(static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < n; ++r) {
      double lin = params[0];
      for (std::size_t c = 0; c + 1 < d; ++c) lin += params[c + 1] * z(r, c);
      const double s = sigmoid(lin);
      w(static_cast<Eigen::Index>(r)) = s * (1.0 - s);
    }
    Eigen::MatrixXd design(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    design.col(0).setOnes();
    if (d > 1) design.rightCols(static_cast<Eigen::Index>(d - 1)) = zm;
    Eigen::MatrixXd h = design.transpose() * w.asDiagonal() * design / static_cast<double>(n);
    for (Eigen::Index c = 1; c < static_cast<Eigen::Index>(d); ++c) h(c, c) += cfg.l2;
    h(0, 0) += 1e-12;
    Eigen::VectorXd grad = Eigen::Map<const Eigen::VectorXd>(g.data(), static_cast<Eigen::Index>(d));
    Eigen::VectorXd step = h.ldlt().solve(grad);

    double t = 1.0;
    std::vector<double> trial(d);
    double f_trial = f;
    for (int ls = 0; ls < 50; ++ls) {
      for (std::size_t k = 0; k < d; ++k) trial[k] = params[k] - t * step(static_cast<Eigen::Index>(k));
      f_trial = problem.objective(trial);
      if (f_trial <= f - 1e-4 * t * grad.dot(step) || f_trial <= f) break;
      t *= 0.5;
    }
    if (f_trial > f) break;
    params = trial;
    f = f_trial;
    g = problem.gradient(params);
  }
  model.iterations = iter;
  model.gradient_norm = norm(g);
  if (model.gradient_norm >= cfg.gradient_tolerance)
    throw Error(ErrorKind::Convergence,
                "logistic regression did not converge; gradient norm " + std::to_string(model.gradient_norm));
  model.intercept = params[0];
  model.weights.assign(params.begin() + 1, params.end());
  return model;
}

double predict(const LogisticModel& model, std::span<const double> row) {
  if (row.size() != model.feature_names.size()) throw Error(ErrorKind::Schema, "row width does not match model");
  double z = model.intercept;
  for (std::size_t k = 0; k < model.kept_columns.size(); ++k)
    z += model.weights[k] * (row[model.kept_columns[k]] - model.means[k]) / model.scales[k];
  return sigmoid(z);
}

std::vector<double> predict(const LogisticModel& model, const FeatureMatrix& x) {
  if (x.schema_hash() != model.schema_hash) throw Error(ErrorKind::Schema, "feature schema does not match model");
  std::vector<double> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) out[r] = predict(model, x.values.row(r));
  return out;
}

}  // namespace cict
