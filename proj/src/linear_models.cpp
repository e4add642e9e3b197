#include "ice/csv.hpp"
#include "ice/errors.hpp"
#include "ice/rng.hpp"
#include "ice/stat_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <unordered_map>

namespace ice {

namespace {

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

Eigen::MatrixXd rows_of(const Eigen::MatrixXd& m, std::span<const std::size_t> idx) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), m.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(idx[i]));
  return out;
}

Eigen::VectorXd rows_of(const Eigen::VectorXd& v, std::span<const std::size_t> idx) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out(static_cast<Eigen::Index>(i)) = v(static_cast<Eigen::Index>(idx[i]));
  return out;
}

std::size_t distinct_groups(const GroupedDataset& data, std::span<const std::size_t> rows) {
  std::vector<std::string> g;
  g.reserve(rows.size());
  for (std::size_t r : rows) g.push_back(data.group_ids[r]);
  std::sort(g.begin(), g.end());
  return static_cast<std::size_t>(std::unique(g.begin(), g.end()) - g.begin());
}

LinearModel make_model(const GroupedDataset& data, const Standardizer& s, const Eigen::VectorXd& w, double bias,
                       Regularization reg, double lambda) {
  LinearModel m;
  m.feature_names = data.feature_names;
  m.weights.assign(w.data(), w.data() + w.size());
  m.bias = bias;
  m.regularization = reg;
  m.lambda = lambda;
  m.feature_means.assign(s.means.data(), s.means.data() + s.means.size());
  m.feature_stds.assign(s.stds.data(), s.stds.data() + s.stds.size());
  return m;
}

}  // namespace

// ---------------------------------------------------------------------------

std::size_t GroupedDataset::groups() const {
  std::vector<std::string> g = group_ids;
  std::sort(g.begin(), g.end());
  return static_cast<std::size_t>(std::unique(g.begin(), g.end()) - g.begin());
}

GroupedDataset GroupedDataset::subset(std::span<const std::size_t> row_indices) const {
  GroupedDataset out;
  out.features = rows_of(features, row_indices);
  out.target = rows_of(target, row_indices);
  out.feature_names = feature_names;
  for (std::size_t r : row_indices) out.group_ids.push_back(group_ids.at(r));
  return out;
}

GroupedDataset parse_feature_csv(const std::string& text) {
  const detail::CsvTable table = detail::parse_csv(text);
  const std::size_t c_group = table.require_column("group_id", "group");
  const std::size_t c_label = table.require_column("label", "label");
  std::vector<std::size_t> feat_cols;
  GroupedDataset out;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (c == c_group || c == c_label) continue;
    feat_cols.push_back(c);
    out.feature_names.push_back(table.header[c]);
  }
  if (feat_cols.empty()) throw Error(ErrorKind::MissingColumn, "feature CSV has no feature columns");
  if (table.rows.empty()) throw Error(ErrorKind::EmptyTrace, "feature CSV has no rows");

  const auto n = static_cast<Eigen::Index>(table.rows.size());
  out.features.resize(n, static_cast<Eigen::Index>(feat_cols.size()));
  out.target.resize(n);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row.size() != table.header.size()) {
      throw Error(ErrorKind::InvalidArgument, "feature CSV row " + std::to_string(r + 1) + " has wrong width");
    }
    if (row[c_group].empty()) {
      throw Error(ErrorKind::InvalidArgument, "feature CSV row " + std::to_string(r + 1) + " has no group_id");
    }
    out.group_ids.push_back(row[c_group]);
    const auto label = detail::parse_double(row[c_label]);
    if (!label || !std::isfinite(*label)) {
      throw Error(ErrorKind::InvalidArgument, "bad label '" + row[c_label] + "'");
    }
    out.target(static_cast<Eigen::Index>(r)) = *label;
    for (std::size_t j = 0; j < feat_cols.size(); ++j) {
      const auto v = detail::parse_double(row[feat_cols[j]]);
      if (!v || !std::isfinite(*v)) {
        throw Error(ErrorKind::InvalidArgument, "bad feature value '" + row[feat_cols[j]] + "'");
      }
      out.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = *v;
    }
  }
  return out;
}

GroupedDataset load_feature_csv(const std::filesystem::path& path) {
  return parse_feature_csv(detail::read_text_file(path));
}

std::vector<GroupSplit> group_k_fold(const GroupedDataset& data, std::size_t k, std::uint64_t seed) {
  if (k < 3) {
    throw Error(ErrorKind::InvalidArgument, "group_k_fold needs k >= 3 so train, dev and test are all non-empty");
  }
  std::vector<std::string> groups;
  std::unordered_map<std::string, std::size_t> seen;
  for (const auto& g : data.group_ids) {
    if (seen.emplace(g, groups.size()).second) groups.push_back(g);
  }
  if (groups.size() < k) {
    throw Error(ErrorKind::TooFewGroups,
                std::to_string(groups.size()) + " group(s) cannot fill " + std::to_string(k) + " folds");
  }
  Rng rng(seed);
  rng.shuffle(groups);
  std::unordered_map<std::string, std::size_t> fold_of;
  for (std::size_t i = 0; i < groups.size(); ++i) fold_of[groups[i]] = i % k;

  std::vector<GroupSplit> splits(k);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t dev_fold = (i + 1) % k;
    for (std::size_t r = 0; r < data.group_ids.size(); ++r) {
      const std::size_t f = fold_of[data.group_ids[r]];
      if (f == i) splits[i].test.push_back(r);
      else if (f == dev_fold) splits[i].dev.push_back(r);
      else splits[i].train.push_back(r);
    }
  }
  return splits;
}

// ---------------------------------------------------------------------------

Standardizer Standardizer::fit(const Eigen::MatrixXd& x) {
  Standardizer s;
  const auto n = static_cast<double>(x.rows());
  s.means = x.colwise().mean().transpose();
  s.stds.resize(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double var = (x.col(j).array() - s.means(j)).square().sum() / n;
    const double sd = std::sqrt(var);
    s.stds(j) = sd > 1e-12 * std::max(1.0, std::abs(s.means(j))) ? sd : 1.0;
  }
  return s;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd out = x;
  for (Eigen::Index j = 0; j < x.cols(); ++j) out.col(j) = (x.col(j).array() - means(j)) / stds(j);
  return out;
}

std::vector<double> LinearModel::raw_weights() const {
  std::vector<double> out(weights.size());
  for (std::size_t j = 0; j < weights.size(); ++j) out[j] = weights[j] / feature_stds[j];
  return out;
}

double LinearModel::raw_bias() const {
  double b = bias;
  for (std::size_t j = 0; j < weights.size(); ++j) b -= weights[j] * feature_means[j] / feature_stds[j];
  return b;
}

Eigen::VectorXd LinearModel::decision(const Eigen::MatrixXd& raw_rows) const {
  if (static_cast<std::size_t>(raw_rows.cols()) != weights.size()) {
    throw Error(ErrorKind::InvalidArgument, "row width does not match the model");
  }
  const std::vector<double> w = raw_weights();
  const Eigen::Map<const Eigen::VectorXd> wv(w.data(), static_cast<Eigen::Index>(w.size()));
  return (raw_rows * wv).array() + raw_bias();
}

// ---------------------------------------------------------------------------

double logistic_objective(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                          double bias, double l2) {
  const Eigen::VectorXd z = (x * w).array() + bias;
  double loss = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) loss += softplus(z(i)) - y(i) * z(i);
  return loss / static_cast<double>(z.size()) + 0.5 * l2 * w.squaredNorm();
}

Eigen::VectorXd logistic_objective_gradient(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                            const Eigen::VectorXd& w, double bias, double l2) {
  const auto n = static_cast<double>(x.rows());
  const Eigen::VectorXd z = (x * w).array() + bias;
  Eigen::VectorXd resid(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) resid(i) = sigmoid(z(i)) - y(i);
  Eigen::VectorXd g(w.size() + 1);
  g.head(w.size()) = x.transpose() * resid / n + l2 * w;
  g(w.size()) = resid.sum() / n;
  return g;
}

LogisticSolution solve_logistic(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, Regularization reg,
                                double lambda, const SolverOptions& options) {
  if (!(lambda >= 0.0)) throw Error(ErrorKind::InvalidArgument, "lambda must be non-negative");
  const Eigen::Index p = x.cols();
  const double l2 = reg == Regularization::L2 ? lambda : 0.0;
  const double l1 = reg == Regularization::L1 ? lambda : 0.0;

  LogisticSolution sol;
  sol.weights = Eigen::VectorXd::Zero(p);
  sol.bias = 0.0;
  double f = logistic_objective(x, y, sol.weights, sol.bias, l2);
  Eigen::VectorXd g = logistic_objective_gradient(x, y, sol.weights, sol.bias, l2);
  double lipschitz = 1.0;

  for (std::size_t it = 1; it <= options.max_iterations; ++it) {
    Eigen::VectorXd w_new;
    double b_new = 0.0;
    double f_new = 0.0;
    for (;;) {
      w_new = sol.weights - g.head(p) / lipschitz;
      if (l1 > 0.0) {
        for (Eigen::Index j = 0; j < p; ++j) w_new(j) = soft_threshold(w_new(j), l1 / lipschitz);
      }
      b_new = sol.bias - g(p) / lipschitz;
      f_new = logistic_objective(x, y, w_new, b_new, l2);
      const Eigen::VectorXd dw = w_new - sol.weights;
      const double db = b_new - sol.bias;
      const double model = f + g.head(p).dot(dw) + g(p) * db + 0.5 * lipschitz * (dw.squaredNorm() + db * db);
      if (f_new <= model || lipschitz > 1e20) break;
      lipschitz *= 2.0;
    }
    double change = std::abs(b_new - sol.bias);
    if (p > 0) change = std::max(change, (w_new - sol.weights).cwiseAbs().maxCoeff());
    sol.weights = std::move(w_new);
    sol.bias = b_new;
    f = f_new;
    sol.objective_history.push_back(f + l1 * sol.weights.lpNorm<1>());
    sol.iterations = it;
    if (change < options.tolerance) {
      sol.converged = true;
      break;
    }
    g = logistic_objective_gradient(x, y, sol.weights, sol.bias, l2);
  }
  return sol;
}

LogisticReport fit_logistic(const GroupedDataset& data, Regularization reg, std::span<const double> lambda_grid,
                            const GroupSplit& split, const SolverOptions& options) {
  for (Eigen::Index i = 0; i < data.target.size(); ++i) {
    if (data.target(i) != 0.0 && data.target(i) != 1.0) {
      throw Error(ErrorKind::NonBinaryLabels, "logistic labels must be 0 or 1");
    }
  }
  if (data.groups() < 2) throw Error(ErrorKind::SingleGroup, "logistic fitting needs several groups");
  for (const auto* part : {&split.train, &split.dev, &split.test}) {
    if (distinct_groups(data, *part) < 2) {
      throw Error(ErrorKind::SingleGroup, "every split partition needs at least two groups");
    }
  }
  if (lambda_grid.empty()) throw Error(ErrorKind::InvalidArgument, "lambda grid is empty");

  const Standardizer s = Standardizer::fit(rows_of(data.features, split.train));
  const Eigen::MatrixXd x_train = s.apply(rows_of(data.features, split.train));
  const Eigen::MatrixXd x_dev = s.apply(rows_of(data.features, split.dev));
  const Eigen::MatrixXd x_test = s.apply(rows_of(data.features, split.test));
  const Eigen::VectorXd y_train = rows_of(data.target, split.train);
  const Eigen::VectorXd y_dev = rows_of(data.target, split.dev);
  const Eigen::VectorXd y_test = rows_of(data.target, split.test);

  LogisticReport report;
  report.lambda_grid.assign(lambda_grid.begin(), lambda_grid.end());
  double best = std::numeric_limits<double>::infinity();
  LogisticSolution best_sol;
  double best_lambda = 0.0;
  for (double lambda : lambda_grid) {
    LogisticSolution sol = solve_logistic(x_train, y_train, reg, lambda, options);
    const double dev_ce = logistic_objective(x_dev, y_dev, sol.weights, sol.bias);
    report.dev_curve.push_back(dev_ce);
    if (dev_ce < best) {
      best = dev_ce;
      best_sol = std::move(sol);
      best_lambda = lambda;
    }
  }
  report.model = make_model(data, s, best_sol.weights, best_sol.bias, reg, best_lambda);
  report.dev_cross_entropy = best;
  report.test_log_loss = logistic_objective(x_test, y_test, best_sol.weights, best_sol.bias);
  const Eigen::VectorXd z = (x_test * best_sol.weights).array() + best_sol.bias;
  std::size_t correct = 0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double predicted = z(i) >= 0.0 ? 1.0 : 0.0;
    if (predicted == y_test(i)) ++correct;
  }
  report.test_accuracy = static_cast<double>(correct) / static_cast<double>(z.size());
  return report;
}

// ---------------------------------------------------------------------------

LassoSolution solve_lasso(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda,
                          const SolverOptions& options, const Eigen::VectorXd& warm_start) {
  if (!(lambda >= 0.0)) throw Error(ErrorKind::InvalidArgument, "lambda must be non-negative");
  if (x.rows() != y.size() || x.rows() == 0) {
    throw Error(ErrorKind::InvalidArgument, "lasso needs matching, non-empty x and y");
  }
  const auto n = static_cast<double>(x.rows());
  const Eigen::Index p = x.cols();
  const Eigen::VectorXd col_sq = x.colwise().squaredNorm().transpose() / n;

  LassoSolution sol;
  sol.beta = warm_start.size() == p ? warm_start : Eigen::VectorXd::Zero(p);
  Eigen::VectorXd r = y - x * sol.beta;
  sol.intercept = r.mean();
  r.array() -= sol.intercept;

  for (std::size_t it = 1; it <= options.max_iterations; ++it) {
    double max_change = 0.0;
    const double shift = r.mean();
    sol.intercept += shift;
    r.array() -= shift;
    max_change = std::abs(shift);
    for (Eigen::Index j = 0; j < p; ++j) {
      if (col_sq(j) <= 0.0) {
        sol.beta(j) = 0.0;
        continue;
      }
      const double rho = x.col(j).dot(r) / n + col_sq(j) * sol.beta(j);
      const double updated = soft_threshold(rho, lambda) / col_sq(j);
      const double delta = updated - sol.beta(j);
      if (delta != 0.0) {
        r -= delta * x.col(j);
        sol.beta(j) = updated;
        max_change = std::max(max_change, std::abs(delta));
      }
    }
    sol.iterations = it;
    if (max_change < options.tolerance) return sol;
  }
  throw Error(ErrorKind::NoConvergence,
              "coordinate descent hit " + std::to_string(options.max_iterations) + " iterations");
}

double lasso_kkt_residual(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const LassoSolution& sol,
                          double lambda) {
  const auto n = static_cast<double>(x.rows());
  const Eigen::VectorXd r = (y - x * sol.beta).array() - sol.intercept;
  double worst = std::abs(r.mean());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double grad = -x.col(j).dot(r) / n;
    const double b = sol.beta(j);
    const double v = b == 0.0 ? std::max(0.0, std::abs(grad) - lambda)
                              : std::abs(grad + lambda * (b > 0.0 ? 1.0 : -1.0));
    worst = std::max(worst, v);
  }
  return worst;
}

LassoReport fit_lasso(const GroupedDataset& data, std::span<const double> lambda_grid, std::size_t folds,
                      std::uint64_t seed, const SolverOptions& options) {
  if (data.groups() < 2) throw Error(ErrorKind::SingleGroup, "lasso cross-validation needs several groups");
  if (lambda_grid.empty()) throw Error(ErrorKind::InvalidArgument, "lambda grid is empty");
  const std::vector<GroupSplit> splits = group_k_fold(data, folds, seed);

  // Descending lambdas let each fit warm-start from the previous one.
  std::vector<std::size_t> order(lambda_grid.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return lambda_grid[a] > lambda_grid[b]; });

  LassoReport report;
  std::vector<double> mean_dev(lambda_grid.size(), 0.0);
  for (const GroupSplit& split : splits) {
    const Standardizer s = Standardizer::fit(rows_of(data.features, split.train));
    const Eigen::MatrixXd x_train = s.apply(rows_of(data.features, split.train));
    const Eigen::MatrixXd x_dev = s.apply(rows_of(data.features, split.dev));
    const Eigen::MatrixXd x_test = s.apply(rows_of(data.features, split.test));
    const Eigen::VectorXd y_train = rows_of(data.target, split.train);
    const Eigen::VectorXd y_dev = rows_of(data.target, split.dev);
    const Eigen::VectorXd y_test = rows_of(data.target, split.test);

    Eigen::VectorXd warm;
    double best_dev = std::numeric_limits<double>::infinity();
    LassoSolution best_sol;
    double best_lambda = 0.0;
    for (std::size_t idx : order) {
      LassoSolution sol = solve_lasso(x_train, y_train, lambda_grid[idx], options, warm);
      warm = sol.beta;
      const Eigen::VectorXd pred = (x_dev * sol.beta).array() + sol.intercept;
      const double dev_mse = (pred - y_dev).squaredNorm() / static_cast<double>(y_dev.size());
      mean_dev[idx] += dev_mse / static_cast<double>(splits.size());
      if (dev_mse < best_dev) {
        best_dev = dev_mse;
        best_sol = sol;
        best_lambda = lambda_grid[idx];
      }
    }
    const Eigen::VectorXd pred = (x_test * best_sol.beta).array() + best_sol.intercept;
    report.fold_test_mse.push_back((pred - y_test).squaredNorm() / static_cast<double>(y_test.size()));
    report.fold_lambda.push_back(best_lambda);
  }
  report.test_mse = std::accumulate(report.fold_test_mse.begin(), report.fold_test_mse.end(), 0.0) /
                    static_cast<double>(report.fold_test_mse.size());

  std::size_t final_idx = order.front();
  for (std::size_t idx : order) {
    if (mean_dev[idx] < mean_dev[final_idx]) final_idx = idx;
  }
  const double final_lambda = lambda_grid[final_idx];
  const Standardizer s = Standardizer::fit(data.features);
  const Eigen::MatrixXd x_all = s.apply(data.features);
  Eigen::VectorXd warm;
  LassoSolution final_sol;
  for (std::size_t idx : order) {
    if (lambda_grid[idx] < final_lambda) break;
    final_sol = solve_lasso(x_all, data.target, lambda_grid[idx], options, warm);
    warm = final_sol.beta;
  }
  report.model = make_model(data, s, final_sol.beta, final_sol.intercept, Regularization::L1, final_lambda);
  for (std::size_t j = 0; j < data.feature_names.size(); ++j) {
    report.weight_report.push_back({data.feature_names[j], final_sol.beta(static_cast<Eigen::Index>(j))});
  }
  std::stable_sort(report.weight_report.begin(), report.weight_report.end(),
                   [](const WeightEntry& a, const WeightEntry& b) { return std::abs(a.beta) > std::abs(b.beta); });
  return report;
}

std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0) || !(hi >= lo) || count == 0) {
    throw Error(ErrorKind::InvalidArgument, "log_spaced needs 0 < lo <= hi and count > 0");
  }
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<double> default_lambda_grid() { return log_spaced(1e-4, 10.0, 20); }

}  // namespace ice
