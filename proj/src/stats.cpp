#include "treeph/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>

#include <Eigen/Eigenvalues>
#include <boost/math/distributions/students_t.hpp>

#include "parallel.hpp"
#include "treeph/error.hpp"
#include "treeph/features.hpp"
#include "treeph/tree.hpp"

namespace treeph {

namespace {

// Extends the first `filled` orthonormal columns of `q` to k columns using
// standard basis vectors (needed when the data has lower rank than k).
void complete_orthonormal(Eigen::MatrixXd& q, Eigen::Index filled) {
  const Eigen::Index dim = q.rows();
  Eigen::Index next = filled;
  for (Eigen::Index e = 0; e < dim && next < q.cols(); ++e) {
    Eigen::VectorXd v = Eigen::VectorXd::Unit(dim, e);
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index c = 0; c < next; ++c) v -= q.col(c).dot(v) * q.col(c);
    const double len = v.norm();
    if (len > 1e-8) q.col(next++) = v / len;
  }
}

void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  Eigen::Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  if (v(arg) < 0.0) v = -v;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

PcaModel pca(const Eigen::MatrixXd& data, int k) {
  const Eigen::Index subjects = data.rows();
  const Eigen::Index features = data.cols();
  if (subjects < 2) throw ArgumentError("PCA needs at least 2 subjects");
  if (k < 1 || k > std::min<Eigen::Index>(subjects - 1, features))
    throw ArgumentError("PCA component count out of range");

  PcaModel model;
  model.mean = data.colwise().mean().transpose();
  const Eigen::MatrixXd x = data.rowwise() - model.mean.transpose();
  const double denom = static_cast<double>(subjects - 1);

  model.loadings.resize(features, k);
  model.variances.resize(k);
  Eigen::Index filled = 0;

  if (features <= subjects) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig((x.transpose() * x) / denom);
    if (eig.info() != Eigen::Success) throw DegenerateError("covariance eigen-decomposition failed");
    for (int c = 0; c < k; ++c) {
      const Eigen::Index src = features - 1 - c;
      model.variances(c) = std::max(0.0, eig.eigenvalues()(src));
      model.loadings.col(c) = eig.eigenvectors().col(src);
    }
    filled = k;
  } else {
    // Fewer subjects than features: decompose the subject Gram matrix.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig((x * x.transpose()) / denom);
    if (eig.info() != Eigen::Success) throw DegenerateError("Gram eigen-decomposition failed");
    for (int c = 0; c < k; ++c) {
      const Eigen::Index src = subjects - 1 - c;
      const double lambda = std::max(0.0, eig.eigenvalues()(src));
      model.variances(c) = lambda;
      Eigen::VectorXd v = x.transpose() * eig.eigenvectors().col(src);
      const double len = v.norm();
      if (!(len > 1e-12 * std::max(1.0, x.norm()))) break;
      model.loadings.col(c) = v / len;
      filled = c + 1;
    }
    for (Eigen::Index c = filled; c < k; ++c) model.variances(c) = 0.0;
  }
  if (filled < k) complete_orthonormal(model.loadings, filled);
  for (int c = 0; c < k; ++c) fix_sign(model.loadings.col(c));
  model.scores = x * model.loadings;
  return model;
}

double pearson_p_value(double rho, std::size_t n) {
  if (n < 3) throw ArgumentError("Pearson test needs at least 3 samples");
  const double r = std::abs(rho);
  if (r >= 1.0) return 0.0;
  const double dof = static_cast<double>(n - 2);
  const double t = r * std::sqrt(dof / (1.0 - r * r));
  const boost::math::students_t dist(dof);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, t));
}

CorrelationResult pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ArgumentError("Pearson inputs differ in length");
  const std::size_t n = x.size();
  if (n < 3) throw ArgumentError("Pearson correlation needs at least 3 samples");
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) throw DegenerateError("Pearson correlation of a constant vector");
  CorrelationResult out;
  out.n = n;
  out.rho = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  out.p_value = pearson_p_value(out.rho, n);
  return out;
}

double empirical_p_value(double observed, std::span<const double> permuted) {
  if (permuted.empty()) throw ArgumentError("no permuted statistics");
  const auto exceed = std::count_if(permuted.begin(), permuted.end(), [&](double s) { return s > observed; });
  return static_cast<double>(exceed) / static_cast<double>(permuted.size());
}

DiProPermResult diproperm(const Eigen::MatrixXd& group_a, const Eigen::MatrixXd& group_b, std::size_t n_perm,
                          std::uint64_t seed) {
  if (n_perm == 0) throw ArgumentError("n_perm must be positive");
  if (group_a.rows() < 2 || group_b.rows() < 2) throw ArgumentError("each group needs at least 2 subjects");
  if (group_a.cols() != group_b.cols()) throw ArgumentError("groups have different feature lengths");

  const Eigen::Index na = group_a.rows();
  const Eigen::Index total = na + group_b.rows();
  Eigen::MatrixXd pooled(total, group_a.cols());
  pooled << group_a, group_b;
  const Eigen::RowVectorXd sum_all = pooled.colwise().sum();

  std::vector<Eigen::Index> idx(static_cast<std::size_t>(total));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  auto statistic = [&] {
    Eigen::RowVectorXd sum_a = Eigen::RowVectorXd::Zero(pooled.cols());
    for (Eigen::Index i = 0; i < na; ++i) sum_a += pooled.row(idx[static_cast<std::size_t>(i)]);
    const Eigen::RowVectorXd diff =
        sum_a / static_cast<double>(na) - (sum_all - sum_a) / static_cast<double>(total - na);
    return diff.norm();
  };

  DiProPermResult out;
  out.n_perm = n_perm;
  out.seed = seed;
  out.observed_stat = statistic();
  out.permuted_stats.reserve(n_perm);
  std::mt19937_64 rng(seed);
  for (std::size_t p = 0; p < n_perm; ++p) {
    std::shuffle(idx.begin(), idx.end(), rng);
    out.permuted_stats.push_back(statistic());
  }
  out.p_emp = empirical_p_value(out.observed_stat, out.permuted_stats);
  return out;
}

std::uint64_t cell_seed(std::uint64_t seed, int n, int N) {
  return splitmix64(splitmix64(seed) ^ (static_cast<std::uint64_t>(n) << 32 | static_cast<std::uint32_t>(N)));
}

HeatGrid heatmap(std::span<const PersistenceDiagram> diagrams, const CohortCovariates& covariates, HeatKind kind,
                 const HeatmapOptions& options) {
  if (options.n_max < 2) throw ArgumentError("heat map needs n_max >= 2");
  const auto subjects = static_cast<Eigen::Index>(diagrams.size());

  std::vector<Eigen::Index> males, females;
  if (kind == HeatKind::AgeRho) {
    if (covariates.ages.size() != diagrams.size()) throw ArgumentError("one age per subject required");
    const auto [lo, hi] = std::minmax_element(covariates.ages.begin(), covariates.ages.end());
    if (lo == covariates.ages.end() || *lo == *hi) throw DegenerateError("age covariate is constant");
  } else {
    if (covariates.sexes.size() != diagrams.size()) throw ArgumentError("one sex per subject required");
    for (Eigen::Index s = 0; s < subjects; ++s)
      (covariates.sexes[static_cast<std::size_t>(s)] == Sex::Male ? males : females).push_back(s);
    if (males.size() < 2 || females.size() < 2) throw DegenerateError("sex covariate needs two groups of >= 2");
  }

  Eigen::MatrixXd pers = Eigen::MatrixXd::Zero(subjects, options.n_max);
  for (Eigen::Index s = 0; s < subjects; ++s) {
    const auto fv = persistence_vector(diagrams[static_cast<std::size_t>(s)], 1, options.n_max);
    for (int r = 0; r < options.n_max; ++r) pers(s, r) = fv.values[static_cast<std::size_t>(r)];
  }

  std::vector<std::pair<int, int>> cells;
  for (int n = 1; n <= options.n_max; ++n)
    for (int N = n + 1; N <= options.n_max; ++N) cells.emplace_back(n, N);
  std::vector<double> values(cells.size(), std::numeric_limits<double>::quiet_NaN());

  auto compute = [&](std::size_t c) {
    const auto [n, N] = cells[c];
    const Eigen::MatrixXd window = pers.middleCols(n - 1, N - n + 1);
    try {
      if (kind == HeatKind::AgeRho) {
        const auto model = pca(window, 1);
        const Eigen::VectorXd scores = model.scores.col(0);
        values[c] = pearson({scores.data(), static_cast<std::size_t>(scores.size())}, covariates.ages).rho;
      } else {
        const Eigen::MatrixXd a = window(males, Eigen::all);
        const Eigen::MatrixXd b = window(females, Eigen::all);
        values[c] = diproperm(a, b, options.n_perm, cell_seed(options.seed, n, N)).p_emp;
      }
    } catch (const DegenerateError&) {
      // left as NaN
    }
  };

  detail::parallel_for(cells.size(), options.workers, compute);

  HeatGrid grid;
  grid.kind = kind;
  grid.n_max = options.n_max;
  for (std::size_t c = 0; c < cells.size(); ++c) grid.entries.emplace(cells[c], values[c]);
  return grid;
}

void write_heatgrid_csv(std::ostream& out, const HeatGrid& grid) {
  out << "# kind=" << (grid.kind == HeatKind::AgeRho ? "age_rho" : "sex_p") << " n_max=" << grid.n_max << '\n';
  out << "n,N,value\n";
  for (const auto& [key, value] : grid.entries)
    out << key.first << ',' << key.second << ',' << (std::isnan(value) ? std::string("nan") : format_double(value))
        << '\n';
}

}  // namespace treeph
