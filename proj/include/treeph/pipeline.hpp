#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "treeph/cohort.hpp"
#include "treeph/diagram.hpp"
#include "treeph/geometry.hpp"
#include "treeph/stats.hpp"

namespace treeph {

enum class Covariate { Age, Sex };
enum class LengthControl { None, Residual, L, SqrtL, CbrtL };

Covariate parse_covariate(const std::string& name);
LengthControl parse_control(const std::string& name);
std::string to_string(Covariate c);
std::string to_string(LengthControl c);

struct PipelineConfig {
  std::filesystem::path manifest;
  std::filesystem::path diagram_dir;
  Vec3 direction{0.0, 0.0, 1.0};
  std::size_t subsample_points = 3000;
  std::optional<double> max_scale;  // unset: half the bounding-box diagonal per subject
  int window_first = 1;
  int window_last = 100;
  std::size_t n_perm = 1000;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  bool force = false;
  int pca_components = 3;
};

/// A failure that belongs to one subject of the cohort.
class SubjectError : public std::runtime_error {
public:
  SubjectError(std::string subject, const std::string& what)
      : std::runtime_error(subject + ": " + what), subject_(std::move(subject)) {}
  const std::string& subject() const noexcept { return subject_; }

private:
  std::string subject_;
};

struct SubjectFailure {
  std::string subject_id;
  std::string message;
};

struct RunReport {
  std::size_t computed = 0;
  std::size_t skipped = 0;
  std::vector<SubjectFailure> failures;
  std::vector<std::pair<std::string, std::string>> warnings;

  nlohmann::json to_json() const;
};

std::filesystem::path diagram_path(const std::filesystem::path& dir, const std::string& subject_id, int dimension);

/// Dimension-0 and dimension-1 diagram files for every manifest subject,
/// plus `run_report.json`. Existing outputs are kept unless config.force.
/// Unreadable trees are recorded as failures and the run continues.
RunReport cmd_diagrams(const PipelineConfig& config);

/// Manifest rows (sorted by subject_id) joined with total lengths and the
/// stored diagrams of one dimension.
struct CohortData {
  std::vector<std::string> ids;
  std::vector<double> ages;
  std::vector<Sex> sexes;
  std::vector<double> lengths;
  std::vector<PersistenceDiagram> diagrams;

  CohortCovariates covariates() const { return {ages, sexes}; }
};

CohortData load_cohort(const PipelineConfig& config, int dimension);

/// Rows = subjects, columns = ranks first..last of the persistence vectors.
Eigen::MatrixXd feature_matrix(std::span<const PersistenceDiagram> diagrams, int first, int last);

/// Writes the feature CSV (`subject_id,f_<n>,...,f_<N>`).
void cmd_featurize(const PipelineConfig& config, int dimension, std::ostream& out);

struct StatsReport {
  Covariate covariate = Covariate::Age;
  LengthControl control = LengthControl::None;
  int dimension = 0;
  int first_rank = 1;
  int last_rank = 100;
  std::size_t subjects = 0;
  PcaModel pca;
  std::optional<CorrelationResult> correlation;
  std::optional<DiProPermResult> diproperm;

  nlohmann::json to_json() const;
};

/// Length control, PCA, then Pearson of PC1 against age or DiProPerm by sex.
StatsReport analyze_features(const Eigen::MatrixXd& features, const CohortCovariates& covariates,
                             std::span<const double> lengths, Covariate covariate, LengthControl control,
                             int components, std::size_t n_perm, std::uint64_t seed);

StatsReport cmd_analyze(const PipelineConfig& config, Covariate covariate, int dimension, LengthControl control);

HeatGrid cmd_heatmap(const PipelineConfig& config, Covariate covariate, int dimension, int n_max);

}  // namespace treeph
