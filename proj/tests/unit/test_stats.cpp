#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "treeph/error.hpp"
#include "treeph/stats.hpp"

using namespace treeph;

namespace {

Eigen::MatrixXd random_matrix(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = g(rng) * (j + 1);
  return m;
}

Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& m) {
  Eigen::MatrixXd c = m.rowwise() - m.colwise().mean();
  return c.transpose() * c / double(m.rows() - 1);
}

}  // namespace

TEST_CASE("pca: rank-one data") {
  Eigen::MatrixXd m(5, 3);
  for (int i = 0; i < 5; ++i) m.row(i) = Eigen::RowVector3d(1, 2, -3) * (i - 1.5) + Eigen::RowVector3d(4, 4, 4);
  auto model = pca(m, 2);
  CHECK(model.variances(0) > 1.0);
  CHECK(std::abs(model.variances(1)) < 1e-12);
  Eigen::Vector3d dir(1, 2, -3);
  dir.normalize();
  CHECK(std::abs(std::abs(model.loadings.col(0).dot(dir)) - 1.0) < 1e-12);
  CHECK(model.loadings(2, 0) > 0);
}

TEST_CASE("pca: full reconstruction, orthonormality and score moments") {
  std::mt19937_64 rng(1);
  for (auto [rows, cols] : std::vector<std::pair<int, int>>{{40, 2}, {10, 6}, {6, 20}}) {
    auto m = random_matrix(rng, rows, cols);
    const int k = std::min(rows - 1, cols);
    auto model = pca(m, k);
    Eigen::MatrixXd gram = model.loadings.transpose() * model.loadings;
    CHECK((gram - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff() < 1e-9);
    for (int j = 1; j < k; ++j) CHECK(model.variances(j) <= model.variances(j - 1));
    for (int j = 0; j < k; ++j) {
      CHECK(std::abs(model.scores.col(j).mean()) < 1e-9);
      const double var = model.scores.col(j).squaredNorm() / (rows - 1);
      CHECK(std::abs(var - model.variances(j)) <= 1e-9 * std::max(1.0, model.variances(j)));
      Eigen::Index arg;
      model.loadings.col(j).cwiseAbs().maxCoeff(&arg);
      CHECK(model.loadings(arg, j) > 0);
    }
    if (k == cols) {
      Eigen::MatrixXd rebuilt = (model.scores * model.loadings.transpose()).rowwise() + model.mean.transpose();
      CHECK((rebuilt - m).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
  CHECK_THROWS_AS(pca(random_matrix(rng, 5, 3), 0), ArgumentError);
  CHECK_THROWS_AS(pca(random_matrix(rng, 3, 5), 3), ArgumentError);
}

TEST_CASE("pca variances equal covariance eigenvalues from a Jacobi oracle") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    auto m = random_matrix(rng, 10, 6);
    auto model = pca(m, 6);
    auto ev = oracle::jacobi_eigenvalues(sample_covariance(m));
    for (int j = 0; j < 6; ++j) CHECK(std::abs(model.variances(j) - ev[j]) <= 1e-7);
  }
  // More features than subjects takes the Gram-matrix route.
  auto wide = random_matrix(rng, 8, 30);
  auto model = pca(wide, 7);
  auto ev = oracle::jacobi_eigenvalues(sample_covariance(wide));
  for (int j = 0; j < 7; ++j) CHECK(std::abs(model.variances(j) - ev[j]) <= 1e-7 * std::max(1.0, ev[j]));
}

TEST_CASE("pearson examples and p-value reference values") {
  std::vector<double> x{1, 2, 3, 4, 5, 7}, y, z;
  for (double v : x) {
    y.push_back(2 * v + 3);
    z.push_back(-v);
  }
  auto r = pearson(x, y);
  CHECK(r.rho == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.p_value < 1e-12);
  CHECK(pearson(x, z).rho == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK_THROWS_AS(pearson(x, std::vector<double>(6, 1.0)), DegenerateError);
  CHECK_THROWS_AS(pearson(std::vector<double>{1, 2}, std::vector<double>{1, 2}), ArgumentError);

  // Reference values from an independent t-distribution implementation.
  CHECK(pearson_p_value(0.5, 12) == doctest::Approx(0.09785461425781246).epsilon(1e-9));
  CHECK(pearson_p_value(-0.3, 40) == doctest::Approx(0.06000178954876174).epsilon(1e-9));
  CHECK(pearson_p_value(0.53, 98) == doctest::Approx(1.997954209276314e-08).epsilon(1e-7));
  CHECK(pearson_p_value(0.61, 98) == doctest::Approx(2.605553612288119e-11).epsilon(1e-7));
  CHECK(pearson_p_value(0.53, 98) < 1e-7);
}

TEST_CASE("pearson is invariant under positive affine maps") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x(30), y(30), xp(30), xn(30);
    for (int i = 0; i < 30; ++i) {
      x[i] = g(rng);
      y[i] = x[i] + g(rng);
      xp[i] = 2.5 * x[i] + 7;
      xn[i] = -0.5 * x[i] + 1;
    }
    const double rho = pearson(x, y).rho;
    CHECK(std::abs(pearson(xp, y).rho - rho) <= 1e-12);
    CHECK(std::abs(pearson(xn, y).rho + rho) <= 1e-12);
  }
}

TEST_CASE("diproperm examples") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(30, 3), b(30, 3);
  for (int i = 0; i < 30; ++i)
    for (int j = 0; j < 3; ++j) {
      a(i, j) = g(rng);
      b(i, j) = g(rng) + (j == 0 ? 10.0 : 0.0);
    }
  auto sep = diproperm(a, b, 1000, 7);
  CHECK(sep.p_emp == 0.0);
  CHECK(sep.permuted_stats.size() == 1000);

  Eigen::MatrixXd c(20, 2);
  for (int i = 0; i < 20; ++i) c.row(i) << g(rng), g(rng);
  Eigen::MatrixXd d = c.colwise().reverse();
  auto same = diproperm(c, d, 500, 1);
  CHECK(same.observed_stat < 1e-12);
  CHECK(same.p_emp > 0.9);

  std::vector<double> permuted(1000, 0.0);
  for (int i = 0; i < 119; ++i) permuted[i] = 2.0;
  for (int i = 119; i < 130; ++i) permuted[i] = 1.0;  // ties do not count
  CHECK(empirical_p_value(1.0, permuted) == 0.119);

  CHECK_THROWS_AS(diproperm(a, b, 0, 1), ArgumentError);
}

TEST_CASE("diproperm is reproducible and invariant under coordinate permutation") {
  std::mt19937_64 rng(5);
  auto a = random_matrix(rng, 12, 5), b = random_matrix(rng, 9, 5);
  auto r1 = diproperm(a, b, 300, 42), r2 = diproperm(a, b, 300, 42);
  CHECK(r1.p_emp == r2.p_emp);
  CHECK(r1.permuted_stats == r2.permuted_stats);
  Eigen::PermutationMatrix<Eigen::Dynamic> perm(5);
  perm.indices() << 3, 0, 4, 1, 2;
  Eigen::MatrixXd ap = a * perm, bp = b * perm;
  CHECK(std::abs(diproperm(ap, bp, 10, 1).observed_stat - r1.observed_stat) <= 1e-12);
}

namespace {

std::vector<PersistenceDiagram> trend_cohort(std::mt19937_64& rng, std::vector<double>& ages, int subjects) {
  std::uniform_real_distribution<double> age(20, 80), u(0.0, 1.0);
  std::vector<PersistenceDiagram> out;
  for (int s = 0; s < subjects; ++s) {
    ages.push_back(age(rng));
    PersistenceDiagram d;
    // Ranks 20..60 carry the trend; other ranks are noise.
    for (int r = 1; r <= 80; ++r) {
      double p = 200.0 - 2.0 * r + 1.5 * u(rng);
      if (r >= 20 && r <= 60) p += 0.02 * ages.back();
      d.dots.push_back({0.0, p, 0});
    }
    out.push_back(d);
  }
  return out;
}

}  // namespace

TEST_CASE("heatmap: shape, signal location, degenerate covariates") {
  std::mt19937_64 rng(6);
  std::vector<double> ages;
  auto diagrams = trend_cohort(rng, ages, 30);
  CohortCovariates cov{ages, std::vector<Sex>(30, Sex::Female)};
  for (int i = 0; i < 30; i += 2) cov.sexes[i] = Sex::Male;

  auto grid = heatmap(diagrams, cov, HeatKind::AgeRho, {.n_max = 70, .n_perm = 10, .seed = 1, .workers = 2});
  CHECK(grid.entries.size() == 70 * 69 / 2);
  CHECK(std::abs(grid.entries.at({25, 55})) > std::abs(grid.entries.at({1, 2})) + 0.3);

  auto small = heatmap(std::span(diagrams).first(5), {std::vector<double>(ages.begin(), ages.begin() + 5),
                                                      std::vector<Sex>(cov.sexes.begin(), cov.sexes.begin() + 5)},
                       HeatKind::SexP, {.n_max = 10, .n_perm = 20, .seed = 1});
  CHECK(small.entries.size() == 45);
  for (const auto& [key, value] : small.entries) CHECK(key.first < key.second);

  CohortCovariates flat{std::vector<double>(30, 40.0), cov.sexes};
  CHECK_THROWS_AS(heatmap(diagrams, flat, HeatKind::AgeRho, {.n_max = 5}), DegenerateError);
  CohortCovariates one_sex{ages, std::vector<Sex>(30, Sex::Male)};
  CHECK_THROWS_AS(heatmap(diagrams, one_sex, HeatKind::SexP, {.n_max = 5}), DegenerateError);
}

TEST_CASE("heatmap results do not depend on the worker count") {
  std::mt19937_64 rng(7);
  std::vector<double> ages;
  auto diagrams = trend_cohort(rng, ages, 12);
  CohortCovariates cov{ages, {}};
  for (int i = 0; i < 12; ++i) cov.sexes.push_back(i % 2 ? Sex::Male : Sex::Female);
  auto one = heatmap(diagrams, cov, HeatKind::SexP, {.n_max = 12, .n_perm = 50, .seed = 3, .workers = 1});
  auto four = heatmap(diagrams, cov, HeatKind::SexP, {.n_max = 12, .n_perm = 50, .seed = 3, .workers = 4});
  CHECK(one.entries == four.entries);
  CHECK(cell_seed(3, 1, 2) != cell_seed(3, 2, 1));
}
