#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace ice {

// ---------------------------------------------------------------------------
// Two-sample tests

struct TTestOptions {
  double alpha = 0.05;
  std::size_t num_comparisons = 9;
  bool welch = false;  // unequal-variance t and Welch-Satterthwaite df
};

struct TTestResult {
  double t_stat = 0.0;
  double df = 0.0;
  double p_two_tailed = 1.0;
  double cohens_d = 0.0;  // always on the pooled standard deviation
  double bonferroni_threshold = 0.0;
  bool significant_bonferroni = false;
  double mean_a = 0.0;
  double mean_b = 0.0;
  double sd_a = 0.0;
  double sd_b = 0.0;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
};

/// Independent two-sample t-test of a against b with Cohen's d.
TTestResult t_test_cohens_d(std::span<const double> sample_a, std::span<const double> sample_b,
                            const TTestOptions& options = {});

/// Regularized incomplete beta I_x(a, b).
double regularized_incomplete_beta(double a, double b, double x);

/// Two-tailed Student-t tail probability P(|T| >= |t|) with df degrees of freedom.
double student_t_two_tailed_p(double t, double df);

// ---------------------------------------------------------------------------
// Datasets and splits

struct GroupedDataset {
  Eigen::MatrixXd features;  // rows x features
  Eigen::VectorXd target;    // binary label or real response
  std::vector<std::string> group_ids;
  std::vector<std::string> feature_names;

  [[nodiscard]] std::size_t rows() const noexcept { return static_cast<std::size_t>(features.rows()); }
  [[nodiscard]] std::size_t groups() const;
  [[nodiscard]] GroupedDataset subset(std::span<const std::size_t> row_indices) const;
};

/// Reads `group_id,label,feat1,...`.
GroupedDataset parse_feature_csv(const std::string& text);
GroupedDataset load_feature_csv(const std::filesystem::path& path);

/// Row indices of one train/dev/test split.
struct GroupSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> dev;
  std::vector<std::size_t> test;
};

/// Groups are shuffled with a seeded Rng and dealt round-robin into k folds.
/// Split i tests on fold i, tunes on fold (i+1) mod k and trains on the rest.
/// Requires k >= 3 and at least k groups.
std::vector<GroupSplit> group_k_fold(const GroupedDataset& data, std::size_t k, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Linear models

enum class Regularization { L1, L2 };

struct Standardizer {
  Eigen::VectorXd means;
  Eigen::VectorXd stds;  // population sd; 1 for constant columns

  static Standardizer fit(const Eigen::MatrixXd& x);
  [[nodiscard]] Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
};

/// Weights live on standardized features; raw_weights()/raw_bias() map them
/// back to input units.
struct LinearModel {
  std::vector<std::string> feature_names;
  std::vector<double> weights;
  double bias = 0.0;
  Regularization regularization = Regularization::L1;
  double lambda = 0.0;
  std::vector<double> feature_means;
  std::vector<double> feature_stds;

  [[nodiscard]] std::vector<double> raw_weights() const;
  [[nodiscard]] double raw_bias() const;
  /// Linear predictor for rows in input units.
  [[nodiscard]] Eigen::VectorXd decision(const Eigen::MatrixXd& raw_rows) const;
};

struct SolverOptions {
  std::size_t max_iterations = 10000;
  double tolerance = 1e-8;  // on the largest coordinate change per iteration
};

/// Mean cross-entropy plus (l2/2)||w||^2, on standardized inputs.
double logistic_objective(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                          double bias, double l2 = 0.0);

/// Gradient of logistic_objective; the last entry is the bias component.
Eigen::VectorXd logistic_objective_gradient(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                            const Eigen::VectorXd& w, double bias, double l2 = 0.0);

struct LogisticSolution {
  Eigen::VectorXd weights;
  double bias = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> objective_history;  // penalized objective after each accepted step
};

/// Proximal gradient with backtracking. L1 applies soft-thresholding to the
/// weights; L2 folds the ridge term into the smooth part. The bias is never
/// penalized. Each accepted step satisfies the sufficient-decrease test, so
/// the objective never increases.
LogisticSolution solve_logistic(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, Regularization reg,
                                double lambda, const SolverOptions& options = {});

struct LogisticReport {
  LinearModel model;
  double dev_cross_entropy = 0.0;
  double test_accuracy = 0.0;
  double test_log_loss = 0.0;
  std::vector<double> lambda_grid;
  std::vector<double> dev_curve;  // dev cross-entropy per grid value
};

/// Each partition of the split must hold at least two groups.
/// Standardizes on train, fits every lambda, keeps the one with the lowest
/// dev cross-entropy, and scores the held-out test rows.
LogisticReport fit_logistic(const GroupedDataset& data, Regularization reg,
                            std::span<const double> lambda_grid, const GroupSplit& split,
                            const SolverOptions& options = {});

struct LassoSolution {
  Eigen::VectorXd beta;
  double intercept = 0.0;
  std::size_t iterations = 0;
};

/// Cyclic coordinate descent on (1/2n)||y - b - X beta||^2 + lambda ||beta||_1
/// over columns of x (already standardized). Throws NoConvergence at the
/// iteration cap. `warm_start`, when sized, seeds beta.
LassoSolution solve_lasso(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda,
                          const SolverOptions& options = {}, const Eigen::VectorXd& warm_start = {});

/// Largest violation of the LASSO optimality conditions.
double lasso_kkt_residual(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const LassoSolution& sol,
                          double lambda);

struct WeightEntry {
  std::string feature;
  double beta = 0.0;
};

struct LassoReport {
  LinearModel model;
  double test_mse = 0.0;  // mean over folds
  std::vector<double> fold_test_mse;
  std::vector<double> fold_lambda;
  std::vector<WeightEntry> weight_report;  // by descending |beta|, standardized scale
};

/// Group-aware k-fold LASSO. Each fold picks lambda on its dev part and
/// reports test MSE; the returned model is refit on all rows at the lambda
/// with the lowest dev MSE averaged over folds.
LassoReport fit_lasso(const GroupedDataset& data, std::span<const double> lambda_grid, std::size_t folds = 5,
                      std::uint64_t seed = 0, const SolverOptions& options = {});

/// `count` log-spaced values from lo to hi inclusive.
std::vector<double> log_spaced(double lo, double hi, std::size_t count);

/// 20 log-spaced values in [1e-4, 10].
std::vector<double> default_lambda_grid();

}  // namespace ice
