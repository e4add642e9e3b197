#include <doctest.h>

#include "oracles.hpp"

#include "ice/errors.hpp"
#include "ice/rng.hpp"
#include "ice/stat_models.hpp"

#include <cmath>
#include <map>
#include <set>

using namespace ice;

namespace {

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::Io;
}

// `groups` individuals with `per_group` rows each; features are standard
// normal, the target is left at zero for the caller to fill.
GroupedDataset make_dataset(Rng& rng, std::size_t groups, std::size_t per_group, std::size_t features) {
  GroupedDataset d;
  const std::size_t n = groups * per_group;
  d.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(features));
  d.target = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    d.group_ids.push_back("g" + std::to_string(r / per_group));
    for (std::size_t j = 0; j < features; ++j) d.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = rng.normal();
  }
  for (std::size_t j = 0; j < features; ++j) d.feature_names.push_back("f" + std::to_string(j));
  return d;
}

std::set<std::string> groups_in(const GroupedDataset& d, const std::vector<std::size_t>& rows) {
  std::set<std::string> s;
  for (std::size_t r : rows) s.insert(d.group_ids[r]);
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// t-test

TEST_CASE("identical samples give t = 0, d = 0, p = 1") {
  const std::vector<double> a{0.1, 0.4, 0.2, 0.9};
  const TTestResult r = t_test_cohens_d(a, a);
  CHECK(r.t_stat == 0.0);
  CHECK(r.cohens_d == 0.0);
  CHECK(r.p_two_tailed == 1.0);
  CHECK_FALSE(r.significant_bonferroni);
}

TEST_CASE("shift-by-one example against the closed form") {
  const std::vector<double> a{0, 0, 0, 1};
  const std::vector<double> b{1, 1, 1, 2};
  const TTestResult r = t_test_cohens_d(a, b);
  // Both sample variances are 0.25, so the pooled sd is 0.5.
  CHECK(r.cohens_d == doctest::Approx(-2.0));
  CHECK(r.t_stat == doctest::Approx(-1.0 / (0.5 * std::sqrt(0.5))));
  CHECK(r.df == 6.0);
  CHECK(r.p_two_tailed == doctest::Approx(oracle::big_two_tailed_p(r.t_stat, 6.0)).epsilon(1e-10));
}

TEST_CASE("Bonferroni threshold and significance") {
  const std::vector<double> a{1, 2, 3, 4, 5, 6, 7, 8};
  const std::vector<double> b{11, 12, 13, 14, 15, 16, 17, 18};
  const TTestResult r = t_test_cohens_d(a, b);
  CHECK(r.bonferroni_threshold == 0.05 / 9.0);
  CHECK(r.significant_bonferroni == (r.p_two_tailed < 0.05 / 9.0));
  CHECK(r.significant_bonferroni);
  TTestOptions opts;
  opts.num_comparisons = 1;
  opts.alpha = 0.1;
  CHECK(t_test_cohens_d(a, b, opts).bonferroni_threshold == 0.1);
}

TEST_CASE("degenerate samples") {
  const std::vector<double> one{1.0};
  const std::vector<double> two{1.0, 2.0};
  const std::vector<double> flat{3.0, 3.0, 3.0};
  CHECK(kind_of([&] { (void)t_test_cohens_d(one, two); }) == ErrorKind::DegenerateSample);
  CHECK(kind_of([&] { (void)t_test_cohens_d(flat, flat); }) == ErrorKind::DegenerateSample);
}

TEST_CASE("property: swapping samples flips t and d and keeps p") {
  Rng rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> a(2 + rng.below(40)), b(2 + rng.below(40));
    for (double& v : a) v = rng.normal();
    for (double& v : b) v = 0.5 + rng.normal();
    const TTestResult ab = t_test_cohens_d(a, b);
    const TTestResult ba = t_test_cohens_d(b, a);
    CHECK(ab.t_stat == -ba.t_stat);
    CHECK(ab.cohens_d == -ba.cohens_d);
    CHECK(ab.p_two_tailed == ba.p_two_tailed);
    CHECK(ab.p_two_tailed >= 0.0);
    CHECK(ab.p_two_tailed <= 1.0);
  }
}

TEST_CASE("property: t, p and d match the 50-digit oracle") {
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> a(2 + rng.below(60)), b(2 + rng.below(60));
    const double shift = rng.uniform(-2, 2);
    const double scale = rng.uniform(0.01, 5);
    for (double& v : a) v = scale * rng.normal();
    for (double& v : b) v = shift + scale * rng.normal();
    const TTestResult r = t_test_cohens_d(a, b);
    const oracle::BigTTest o = oracle::big_pooled_t(a, b);
    CHECK(std::abs(r.t_stat - o.t) <= 1e-9 * std::max(1.0, std::abs(o.t)));
    CHECK(std::abs(r.p_two_tailed - o.p) <= 1e-9);
    CHECK(std::abs(r.cohens_d - o.d) <= 1e-9 * std::max(1.0, std::abs(o.d)));
    CHECK(r.df == o.df);
  }
}

TEST_CASE("property: tail probabilities match the oracle on random (t, df)") {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const double df = rng.uniform() < 0.5 ? static_cast<double>(1 + rng.below(200)) : rng.uniform(0.5, 500);
    const double t = rng.uniform(-12, 12);
    const double p = student_t_two_tailed_p(t, df);
    const double ref = oracle::big_two_tailed_p(t, df);
    CHECK(std::abs(p - ref) <= 1e-10);
    if (ref > 1e-280) CHECK(std::abs(p - ref) <= 1e-9 * ref);
  }
}

TEST_CASE("regularized incomplete beta edge values") {
  CHECK(regularized_incomplete_beta(2, 3, 0.0) == 0.0);
  CHECK(regularized_incomplete_beta(2, 3, 1.0) == 1.0);
  CHECK(regularized_incomplete_beta(1, 1, 0.3) == doctest::Approx(0.3));
  CHECK_THROWS_AS(regularized_incomplete_beta(0, 1, 0.5), Error);
  CHECK_THROWS_AS(regularized_incomplete_beta(1, 1, 1.5), Error);
}

TEST_CASE("region-8 fixture with the published moments gives |d| near 0.79") {
  Rng rng(8);
  const auto honest = oracle::moment_matched(47, 0.020, 0.018, rng);
  const auto deceptive = oracle::moment_matched(38, 0.047, 0.047, rng);
  const TTestResult r = t_test_cohens_d(honest, deceptive);
  CHECK(std::abs(std::abs(r.cohens_d) - 0.79) <= 0.05);
  CHECK(r.cohens_d < 0.0);
  CHECK(r.mean_a == doctest::Approx(0.020));
  CHECK(r.sd_b == doctest::Approx(0.047));
}

// ---------------------------------------------------------------------------
// Logistic regression

TEST_CASE("logistic gradient agrees with central differences") {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 50, p = 4;
    Eigen::MatrixXd x(n, p);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < p; ++j) x(i, j) = rng.normal();
      y(i) = rng.below(2) ? 1.0 : 0.0;
    }
    Eigen::VectorXd w(p);
    for (Eigen::Index j = 0; j < p; ++j) w(j) = rng.normal();
    const double bias = rng.normal();
    const double l2 = trial % 2 ? 0.3 : 0.0;
    const Eigen::VectorXd g = logistic_objective_gradient(x, y, w, bias, l2);
    const double h = 1e-5;
    double worst = 0.0;
    for (Eigen::Index j = 0; j <= p; ++j) {
      Eigen::VectorXd wp = w, wm = w;
      double bp = bias, bm = bias;
      if (j < p) {
        wp(j) += h;
        wm(j) -= h;
      } else {
        bp += h;
        bm -= h;
      }
      const double fd = (logistic_objective(x, y, wp, bp, l2) - logistic_objective(x, y, wm, bm, l2)) / (2 * h);
      worst = std::max(worst, std::abs(fd - g(j)) / std::max(std::abs(g(j)), 1e-3));
    }
    CHECK(worst < 1e-5);
  }
}

TEST_CASE("property: the penalized objective never increases") {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Index n = 80, p = 5;
    Eigen::MatrixXd x(n, p);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < p; ++j) x(i, j) = rng.normal();
      y(i) = x(i, 0) + 0.5 * rng.normal() > 0 ? 1.0 : 0.0;
    }
    for (auto reg : {Regularization::L1, Regularization::L2}) {
      const LogisticSolution s = solve_logistic(x, y, reg, 0.01 * (trial + 1));
      REQUIRE(s.objective_history.size() >= 2);
      for (std::size_t k = 1; k < s.objective_history.size(); ++k) {
        CHECK(s.objective_history[k] <= s.objective_history[k - 1] + 1e-15);
      }
      CHECK(s.converged);
    }
  }
}

TEST_CASE("a huge L1 penalty zeroes the weights and leaves the base-rate bias") {
  Rng rng(6);
  const Eigen::Index n = 100, p = 3;
  Eigen::MatrixXd x(n, p);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) x(i, j) = rng.normal();
    y(i) = i % 4 == 0 ? 1.0 : 0.0;
  }
  const LogisticSolution s = solve_logistic(x, y, Regularization::L1, 1e3);
  CHECK(s.weights.cwiseAbs().maxCoeff() == 0.0);
  CHECK(s.bias == doctest::Approx(std::log(0.25 / 0.75)).epsilon(1e-6));
}

TEST_CASE("a separable toy set is classified perfectly") {
  Rng rng(7);
  GroupedDataset d = make_dataset(rng, 12, 10, 2);
  for (Eigen::Index i = 0; i < d.features.rows(); ++i) {
    const double s = d.features(i, 0) + d.features(i, 1);
    // Push points away from the boundary.
    d.features(i, 0) += s > 0 ? 1.0 : -1.0;
    d.target(i) = s > 0 ? 1.0 : 0.0;
  }
  const auto splits = group_k_fold(d, 3, 1);
  const std::vector<double> grid{1e-4, 1e-3};
  for (auto reg : {Regularization::L1, Regularization::L2}) {
    const LogisticReport rep = fit_logistic(d, reg, grid, splits[0]);
    CHECK(rep.test_accuracy == 1.0);
    CHECK(rep.dev_curve.size() == 2);
    CHECK(rep.model.weights.size() == 2);
  }
}

TEST_CASE("logistic input checks") {
  Rng rng(8);
  GroupedDataset d = make_dataset(rng, 6, 5, 2);
  for (Eigen::Index i = 0; i < d.target.size(); ++i) d.target(i) = static_cast<double>(i % 2);
  const auto splits = group_k_fold(d, 3, 0);
  const std::vector<double> grid{0.01};
  GroupedDataset bad = d;
  bad.target(0) = 2.0;
  CHECK(kind_of([&] { (void)fit_logistic(bad, Regularization::L1, grid, splits[0]); }) == ErrorKind::NonBinaryLabels);
  GroupedDataset single = d;
  for (auto& g : single.group_ids) g = "same";
  CHECK(kind_of([&] { (void)fit_logistic(single, Regularization::L1, grid, splits[0]); }) == ErrorKind::SingleGroup);
  GroupSplit thin = splits[0];
  thin.test.resize(1);
  CHECK(kind_of([&] { (void)fit_logistic(d, Regularization::L1, grid, thin); }) == ErrorKind::SingleGroup);
}

// ---------------------------------------------------------------------------
// LASSO

TEST_CASE("LASSO at lambda 0 is least squares") {
  Rng rng(9);
  const Eigen::Index n = 60, p = 4;
  Eigen::MatrixXd x(n, p);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) x(i, j) = rng.normal();
    y(i) = 1.0 + 2.0 * x(i, 0) - x(i, 2) + 0.3 * rng.normal();
  }
  const Eigen::MatrixXd xs = Standardizer::fit(x).apply(x);
  const LassoSolution s = solve_lasso(xs, y, 0.0, SolverOptions{100000, 1e-14});
  const oracle::Ols ols = oracle::least_squares(xs, y);
  CHECK((s.beta - ols.beta).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(std::abs(s.intercept - ols.intercept) < 1e-8);
}

TEST_CASE("property: LASSO solutions satisfy the optimality conditions") {
  Rng rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 40 + static_cast<Eigen::Index>(rng.below(60));
    const Eigen::Index p = 2 + static_cast<Eigen::Index>(rng.below(8));
    Eigen::MatrixXd x(n, p);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < p; ++j) x(i, j) = rng.normal() + (j > 0 ? 0.5 * x(i, j - 1) : 0.0);
      y(i) = x(i, 0) - 0.5 * x(i, p - 1) + rng.normal();
    }
    const Eigen::MatrixXd xs = Standardizer::fit(x).apply(x);
    const double lambda = std::pow(10.0, rng.uniform(-3, 0));
    const LassoSolution s = solve_lasso(xs, y, lambda);
    CHECK(lasso_kkt_residual(xs, y, s, lambda) < 1e-6);
  }
}

TEST_CASE("LASSO iteration cap raises NoConvergence") {
  Rng rng(11);
  Eigen::MatrixXd x(30, 3);
  Eigen::VectorXd y(30);
  for (Eigen::Index i = 0; i < 30; ++i) {
    x(i, 0) = rng.normal();
    x(i, 1) = x(i, 0) + 1e-3 * rng.normal();
    x(i, 2) = rng.normal();
    y(i) = x(i, 0) + rng.normal();
  }
  CHECK(kind_of([&] { (void)solve_lasso(x, y, 0.0, SolverOptions{2, 1e-14}); }) == ErrorKind::NoConvergence);
}

TEST_CASE("y = 3x is recovered in input units") {
  Rng rng(12);
  GroupedDataset d = make_dataset(rng, 10, 8, 1);
  for (Eigen::Index i = 0; i < d.target.size(); ++i) {
    d.features(i, 0) = 5.0 + 2.0 * d.features(i, 0);
    d.target(i) = 3.0 * d.features(i, 0);
  }
  const LassoReport rep = fit_lasso(d, log_spaced(1e-6, 1e-2, 5), 5, 0);
  CHECK(rep.model.raw_weights()[0] == doctest::Approx(3.0).epsilon(1e-4));
  CHECK(rep.model.raw_bias() == doctest::Approx(0.0).scale(1.0).epsilon(1e-3));
  CHECK(rep.fold_test_mse.size() == 5);
}

TEST_CASE("planted eye-contact coefficient ranks first in the weight report") {
  Rng rng(13);
  GroupedDataset d = make_dataset(rng, 30, 5, 6);
  d.feature_names = {"rve", "AU12", "AU01", "AU04", "AU06", "AU15"};
  for (Eigen::Index i = 0; i < d.target.size(); ++i) {
    d.features(i, 0) = rng.uniform(0.6, 1.1);  // fraction-like, sd about 0.14
    d.features(i, 1) = rng.uniform();          // sd about 0.29
    for (Eigen::Index j = 2; j < 6; ++j) d.features(i, j) = rng.uniform();
    d.target(i) = 2.0 * d.features(i, 0) + 0.5 * d.features(i, 1) + 0.05 * rng.normal();
  }
  const LassoReport rep = fit_lasso(d, default_lambda_grid(), 5, 3);
  REQUIRE(rep.weight_report.size() == 6);
  CHECK(rep.weight_report[0].feature == "rve");
  CHECK(rep.weight_report[1].feature == "AU12");
  for (std::size_t k = 1; k < rep.weight_report.size(); ++k) {
    CHECK(std::abs(rep.weight_report[k - 1].beta) >= std::abs(rep.weight_report[k].beta));
  }
}

TEST_CASE("lambda grids") {
  const auto g = default_lambda_grid();
  REQUIRE(g.size() == 20);
  CHECK(g.front() == 1e-4);
  CHECK(g.back() == 10.0);
  for (std::size_t k = 1; k < g.size(); ++k) CHECK(g[k] > g[k - 1]);
  CHECK(log_spaced(2.0, 2.0, 1) == std::vector<double>{2.0});
  CHECK_THROWS_AS(log_spaced(0.0, 1.0, 3), Error);
}

// ---------------------------------------------------------------------------
// Group splits

TEST_CASE("ten groups in five folds: each group is tested exactly once") {
  Rng rng(14);
  const GroupedDataset d = make_dataset(rng, 10, 3, 1);
  const auto splits = group_k_fold(d, 5, 42);
  REQUIRE(splits.size() == 5);
  std::map<std::string, int> tested;
  for (const auto& s : splits) {
    for (const auto& g : groups_in(d, s.test)) ++tested[g];
    CHECK(s.train.size() + s.dev.size() + s.test.size() == d.rows());
  }
  CHECK(tested.size() == 10);
  for (const auto& [g, count] : tested) CHECK(count == 1);
}

TEST_CASE("property: no group leaks across partitions and seeds are reproducible") {
  Rng rng(15);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t groups = 3 + rng.below(20);
    GroupedDataset d = make_dataset(rng, groups, 1 + rng.below(4), 1);
    rng.shuffle(d.group_ids);  // rows of one group need not be adjacent
    const std::size_t k = 3 + rng.below(groups - 2);
    const std::uint64_t seed = rng.next_u64();
    const auto splits = group_k_fold(d, k, seed);
    for (const auto& s : splits) {
      const auto tr = groups_in(d, s.train), dv = groups_in(d, s.dev), te = groups_in(d, s.test);
      for (const auto& g : te) {
        CHECK(tr.count(g) == 0);
        CHECK(dv.count(g) == 0);
      }
      for (const auto& g : dv) CHECK(tr.count(g) == 0);
      CHECK_FALSE(dv.empty());
      CHECK_FALSE(te.empty());
    }
    const auto again = group_k_fold(d, k, seed);
    for (std::size_t i = 0; i < k; ++i) {
      CHECK(again[i].train == splits[i].train);
      CHECK(again[i].dev == splits[i].dev);
      CHECK(again[i].test == splits[i].test);
    }
  }
}

TEST_CASE("group split errors") {
  Rng rng(16);
  const GroupedDataset d = make_dataset(rng, 4, 2, 1);
  CHECK(kind_of([&] { (void)group_k_fold(d, 2, 0); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([&] { (void)group_k_fold(d, 5, 0); }) == ErrorKind::TooFewGroups);
}

TEST_CASE("feature CSV parsing") {
  const GroupedDataset d = parse_feature_csv("group_id,label,a,b\np1,1,0.5,2\np1,0,0.25,3\np2,1,1,4\n");
  CHECK(d.rows() == 3);
  CHECK(d.groups() == 2);
  CHECK(d.feature_names == std::vector<std::string>{"a", "b"});
  CHECK(d.features(1, 0) == 0.25);
  CHECK(d.target(2) == 1.0);
  CHECK(kind_of([] { (void)parse_feature_csv("group_id,label\np1,1\n"); }) == ErrorKind::MissingColumn);
  CHECK(kind_of([] { (void)parse_feature_csv("group_id,label,a\np1,x,1\n"); }) == ErrorKind::InvalidArgument);
}
