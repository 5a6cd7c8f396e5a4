#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "treeph/cohort.hpp"
#include "treeph/diagram.hpp"

namespace treeph {

/// Mean-centred principal components. Loadings are orthonormal columns in
/// order of decreasing variance; each loading's largest-magnitude entry is
/// positive. scores = (data - mean) * loadings.
struct PcaModel {
  Eigen::VectorXd mean;
  Eigen::MatrixXd loadings;   // features x k
  Eigen::MatrixXd scores;     // subjects x k
  Eigen::VectorXd variances;  // k, sample variance (divisor subjects - 1)
};

/// `data` has one row per subject. Requires 1 <= k <= min(subjects - 1, features).
PcaModel pca(const Eigen::MatrixXd& data, int k);

struct CorrelationResult {
  double rho = 0.0;
  double p_value = 1.0;  // two-sided, t distribution with n - 2 dof
  std::size_t n = 0;
};

CorrelationResult pearson(std::span<const double> x, std::span<const double> y);

/// Two-sided p-value for a Pearson coefficient on n samples.
double pearson_p_value(double rho, std::size_t n);

struct DiProPermResult {
  double observed_stat = 0.0;
  std::vector<double> permuted_stats;
  double p_emp = 1.0;
  std::size_t n_perm = 0;
  std::uint64_t seed = 0;
};

/// Mean-difference permutation test. The statistic is the Euclidean norm of
/// mean(A) - mean(B); each permutation reassigns all subjects into groups of
/// the original sizes. p_emp counts permuted statistics strictly greater
/// than the observed one, divided by n_perm.
DiProPermResult diproperm(const Eigen::MatrixXd& group_a, const Eigen::MatrixXd& group_b, std::size_t n_perm,
                          std::uint64_t seed);

double empirical_p_value(double observed, std::span<const double> permuted);

enum class HeatKind { AgeRho, SexP };

/// Statistic per feature window (n, N), 1 <= n < N <= n_max. Cells whose
/// statistic is undefined (e.g. all-zero windows) hold NaN.
struct HeatGrid {
  HeatKind kind = HeatKind::AgeRho;
  int n_max = 200;
  std::map<std::pair<int, int>, double> entries;
};

struct CohortCovariates {
  std::vector<double> ages;
  std::vector<Sex> sexes;
};

struct HeatmapOptions {
  int n_max = 200;
  std::size_t n_perm = 1000;
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

/// Age kind: PC1 scores of the window vectors correlated with age.
/// Sex kind: DiProPerm of the window vectors grouped by sex. Each cell's
/// permutation stream is seeded from (seed, n, N).
HeatGrid heatmap(std::span<const PersistenceDiagram> diagrams, const CohortCovariates& covariates, HeatKind kind,
                 const HeatmapOptions& options = {});

/// Stream seed for one heat-map cell.
std::uint64_t cell_seed(std::uint64_t seed, int n, int N);

/// CSV rows `n,N,value` in (n, N) order.
void write_heatgrid_csv(std::ostream& out, const HeatGrid& grid);

}  // namespace treeph
