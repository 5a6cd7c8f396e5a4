#include "treeph/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>

#include "parallel.hpp"
#include "treeph/error.hpp"
#include "treeph/features.hpp"
#include "treeph/ph0.hpp"
#include "treeph/ph1.hpp"
#include "treeph/tree.hpp"

namespace treeph {

namespace fs = std::filesystem;

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void write_atomically(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::vector<ManifestRow> sorted_rows(const CohortManifest& manifest) {
  auto rows = manifest.rows;
  std::sort(rows.begin(), rows.end(),
            [](const ManifestRow& a, const ManifestRow& b) { return a.subject_id < b.subject_id; });
  return rows;
}

nlohmann::json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

}  // namespace

Covariate parse_covariate(const std::string& name) {
  if (name == "age") return Covariate::Age;
  if (name == "sex") return Covariate::Sex;
  throw ArgumentError("covariate must be 'age' or 'sex'");
}

LengthControl parse_control(const std::string& name) {
  if (name == "none") return LengthControl::None;
  if (name == "residual") return LengthControl::Residual;
  if (name == "L") return LengthControl::L;
  if (name == "sqrtL") return LengthControl::SqrtL;
  if (name == "cbrtL") return LengthControl::CbrtL;
  throw ArgumentError("control must be one of none, residual, L, sqrtL, cbrtL");
}

std::string to_string(Covariate c) { return c == Covariate::Age ? "age" : "sex"; }

std::string to_string(LengthControl c) {
  switch (c) {
    case LengthControl::None:
      return "none";
    case LengthControl::Residual:
      return "residual";
    case LengthControl::L:
      return "L";
    case LengthControl::SqrtL:
      return "sqrtL";
    case LengthControl::CbrtL:
      return "cbrtL";
  }
  return "none";
}

nlohmann::json RunReport::to_json() const {
  nlohmann::json j;
  j["computed"] = computed;
  j["skipped"] = skipped;
  j["failures"] = nlohmann::json::array();
  for (const auto& f : failures) j["failures"].push_back({{"subject_id", f.subject_id}, {"error", f.message}});
  j["warnings"] = nlohmann::json::array();
  for (const auto& [id, w] : warnings) j["warnings"].push_back({{"subject_id", id}, {"warning", w}});
  return j;
}

fs::path diagram_path(const fs::path& dir, const std::string& subject_id, int dimension) {
  return dir / (subject_id + ".dgm" + std::to_string(dimension) + ".csv");
}

RunReport cmd_diagrams(const PipelineConfig& config) {
  const CohortManifest manifest = read_manifest(config.manifest);
  const fs::path base = config.manifest.parent_path();
  const auto rows = sorted_rows(manifest);
  fs::create_directories(config.diagram_dir);

  enum class Outcome { Computed, Skipped, Failed };
  struct Result {
    Outcome outcome = Outcome::Failed;
    std::string message;
    std::vector<std::string> warnings;
  };
  std::vector<Result> results(rows.size());

  detail::parallel_for(rows.size(), config.workers, [&](std::size_t i) {
    const auto& row = rows[i];
    Result& r = results[i];
    const fs::path p0 = diagram_path(config.diagram_dir, row.subject_id, 0);
    const fs::path p1 = diagram_path(config.diagram_dir, row.subject_id, 1);
    if (!config.force && fs::exists(p0) && fs::exists(p1)) {
      r.outcome = Outcome::Skipped;
      return;
    }
    try {
      const EmbeddedTree tree = read_tree_file(manifest.resolve(row, base), &r.warnings);
      const auto dgm0 = persistence0(height_filtration(tree, config.direction));
      const auto dgm1 =
          tree_loops(tree, config.subsample_points, config.max_scale, config.seed ^ fnv1a(row.subject_id));
      std::ostringstream s0, s1;
      write_diagram_csv(s0, dgm0);
      write_diagram_csv(s1, dgm1);
      write_atomically(p0, s0.str());
      write_atomically(p1, s1.str());
      r.outcome = Outcome::Computed;
    } catch (const std::exception& e) {
      r.outcome = Outcome::Failed;
      r.message = e.what();
    }
  });

  RunReport report;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (const auto& w : results[i].warnings) report.warnings.emplace_back(rows[i].subject_id, w);
    switch (results[i].outcome) {
      case Outcome::Computed:
        ++report.computed;
        break;
      case Outcome::Skipped:
        ++report.skipped;
        break;
      case Outcome::Failed:
        report.failures.push_back({rows[i].subject_id, results[i].message});
        break;
    }
  }
  write_atomically(config.diagram_dir / "run_report.json", report.to_json().dump(2) + "\n");
  return report;
}

CohortData load_cohort(const PipelineConfig& config, int dimension) {
  if (dimension != 0 && dimension != 1) throw ArgumentError("dimension must be 0 or 1");
  const CohortManifest manifest = read_manifest(config.manifest);
  const fs::path base = config.manifest.parent_path();
  const auto rows = sorted_rows(manifest);

  CohortData data;
  data.ids.resize(rows.size());
  data.ages.resize(rows.size());
  data.sexes.resize(rows.size());
  data.lengths.resize(rows.size());
  data.diagrams.resize(rows.size());
  detail::parallel_for(rows.size(), config.workers, [&](std::size_t i) {
    const auto& row = rows[i];
    try {
      data.ids[i] = row.subject_id;
      data.ages[i] = row.age;
      data.sexes[i] = row.sex;
      data.lengths[i] = total_length(read_tree_file(manifest.resolve(row, base)));
      const fs::path p = diagram_path(config.diagram_dir, row.subject_id, dimension);
      std::ifstream in(p);
      if (!in) throw std::runtime_error("missing diagram " + p.string());
      data.diagrams[i] = read_diagram_csv(in);
      data.diagrams[i].dimension = dimension;
    } catch (const SubjectError&) {
      throw;
    } catch (const std::exception& e) {
      throw SubjectError(row.subject_id, e.what());
    }
  });
  return data;
}

Eigen::MatrixXd feature_matrix(std::span<const PersistenceDiagram> diagrams, int first, int last) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(diagrams.size()), last - first + 1);
  for (std::size_t s = 0; s < diagrams.size(); ++s) {
    const auto fv = persistence_vector(diagrams[s], first, last);
    for (std::size_t c = 0; c < fv.values.size(); ++c)
      m(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(c)) = fv.values[c];
  }
  return m;
}

void cmd_featurize(const PipelineConfig& config, int dimension, std::ostream& out) {
  const auto data = load_cohort(config, dimension);
  const auto m = feature_matrix(data.diagrams, config.window_first, config.window_last);
  out << "# dim=" << dimension << " window=" << config.window_first << ".." << config.window_last << '\n';
  out << "subject_id";
  for (int r = config.window_first; r <= config.window_last; ++r) out << ",f_" << r;
  out << '\n';
  for (Eigen::Index s = 0; s < m.rows(); ++s) {
    out << data.ids[static_cast<std::size_t>(s)];
    for (Eigen::Index c = 0; c < m.cols(); ++c) out << ',' << format_double(m(s, c));
    out << '\n';
  }
}

StatsReport analyze_features(const Eigen::MatrixXd& features, const CohortCovariates& covariates,
                             std::span<const double> lengths, Covariate covariate, LengthControl control,
                             int components, std::size_t n_perm, std::uint64_t seed) {
  const auto subjects = features.rows();
  if (static_cast<std::size_t>(subjects) != lengths.size()) throw ArgumentError("one length per subject required");

  Eigen::MatrixXd x = features;
  switch (control) {
    case LengthControl::None:
      break;
    case LengthControl::Residual:
      x = residualize(features, lengths);
      break;
    case LengthControl::L:
    case LengthControl::SqrtL:
    case LengthControl::CbrtL: {
      const auto exponent = control == LengthControl::L       ? LengthExponent::Linear
                            : control == LengthControl::SqrtL ? LengthExponent::SquareRoot
                                                              : LengthExponent::CubeRoot;
      for (Eigen::Index s = 0; s < subjects; ++s)
        x.row(s) /= length_divisor(lengths[static_cast<std::size_t>(s)], exponent);
      break;
    }
  }

  StatsReport report;
  report.covariate = covariate;
  report.control = control;
  report.subjects = static_cast<std::size_t>(subjects);
  const int k = static_cast<int>(std::min<Eigen::Index>({components, subjects - 1, x.cols()}));
  report.pca = pca(x, k);

  if (covariate == Covariate::Age) {
    if (covariates.ages.size() != static_cast<std::size_t>(subjects)) throw ArgumentError("one age per subject required");
    const Eigen::VectorXd pc1 = report.pca.scores.col(0);
    report.correlation = pearson({pc1.data(), static_cast<std::size_t>(pc1.size())}, covariates.ages);
  } else {
    if (covariates.sexes.size() != static_cast<std::size_t>(subjects)) throw ArgumentError("one sex per subject required");
    std::vector<Eigen::Index> males, females;
    for (Eigen::Index s = 0; s < subjects; ++s)
      (covariates.sexes[static_cast<std::size_t>(s)] == Sex::Male ? males : females).push_back(s);
    report.diproperm = diproperm(x(males, Eigen::all), x(females, Eigen::all), n_perm, seed);
  }
  return report;
}

nlohmann::json StatsReport::to_json() const {
  nlohmann::json j;
  j["covariate"] = to_string(covariate);
  j["dimension"] = dimension;
  j["control"] = to_string(control);
  j["window"] = {first_rank, last_rank};
  j["subjects"] = subjects;
  nlohmann::json loadings = nlohmann::json::array();
  for (Eigen::Index c = 0; c < pca.loadings.cols(); ++c) loadings.push_back(vector_json(pca.loadings.col(c)));
  j["pca"] = {{"variances", vector_json(pca.variances)}, {"loadings", loadings}};
  if (correlation) j["correlation"] = {{"rho", correlation->rho}, {"p", correlation->p_value}, {"n", correlation->n}};
  if (diproperm)
    j["diproperm"] = {{"observed", diproperm->observed_stat},
                      {"p_emp", diproperm->p_emp},
                      {"n_perm", diproperm->n_perm},
                      {"seed", diproperm->seed}};
  return j;
}

StatsReport cmd_analyze(const PipelineConfig& config, Covariate covariate, int dimension, LengthControl control) {
  const auto data = load_cohort(config, dimension);
  const auto features = feature_matrix(data.diagrams, config.window_first, config.window_last);
  auto report = analyze_features(features, data.covariates(), data.lengths, covariate, control,
                                 config.pca_components, config.n_perm, config.seed);
  report.dimension = dimension;
  report.first_rank = config.window_first;
  report.last_rank = config.window_last;
  return report;
}

HeatGrid cmd_heatmap(const PipelineConfig& config, Covariate covariate, int dimension, int n_max) {
  const auto data = load_cohort(config, dimension);
  HeatmapOptions options;
  options.n_max = n_max;
  options.n_perm = config.n_perm;
  options.seed = config.seed;
  options.workers = config.workers;
  return heatmap(data.diagrams, data.covariates(), covariate == Covariate::Age ? HeatKind::AgeRho : HeatKind::SexP,
                 options);
}

}  // namespace treeph
