// Command-line front end: synth, diagrams, featurize, analyze, heatmap, dist.
//
// Exit codes: 0 success, 1 usage, 2 partial subject failures, 3 fatal.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "treeph/error.hpp"
#include "treeph/metrics.hpp"
#include "treeph/pipeline.hpp"
#include "treeph/synth.hpp"

namespace {

constexpr int kUsage = 1;
constexpr int kPartial = 2;
constexpr int kFatal = 3;

treeph::Vec3 parse_direction(const std::string& text) {
  std::stringstream ss(text);
  std::string part;
  double v[3];
  for (int i = 0; i < 3; ++i) {
    if (!std::getline(ss, part, ',')) throw treeph::ArgumentError("direction must be 'x,y,z'");
    v[i] = std::stod(part);
  }
  if (std::getline(ss, part, ',')) throw treeph::ArgumentError("direction must be 'x,y,z'");
  return {v[0], v[1], v[2]};
}

treeph::PersistenceDiagram load_diagram(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return treeph::read_diagram_csv(in);
}

treeph::PointCloud load_cloud(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return treeph::read_point_cloud(in);
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Persistent-homology features and statistics for embedded trees"};
  app.require_subcommand(1);

  treeph::PipelineConfig cfg;
  std::string manifest, diagrams_dir, direction = "0,0,1", max_scale = "auto", out_path;
  std::string covariate = "age", control = "none";
  int dimension = 0;
  int n_max = 200;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--manifest", manifest, "Cohort manifest CSV")->required()->check(CLI::ExistingFile);
    sub->add_option("--diagrams", diagrams_dir, "Diagram directory")->required();
    sub->add_option("--workers", cfg.workers, "Worker threads")->envname("TREEPH_WORKERS")->check(CLI::PositiveNumber);
    sub->add_option("--seed", cfg.seed, "Random seed")->envname("TREEPH_SEED");
  };
  auto add_window = [&](CLI::App* sub) {
    sub->add_option("--n", cfg.window_first, "First persistence rank")->check(CLI::PositiveNumber);
    sub->add_option("--N", cfg.window_last, "Last persistence rank")->check(CLI::PositiveNumber);
  };

  // synth
  treeph::SynthSpec spec;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic cohort of tree files and manifest.csv");
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--subjects", spec.n_subjects, "Number of subjects");
  synth->add_option("--seed", spec.seed, "Random seed")->envname("TREEPH_SEED");
  synth->add_option("--min-branches", spec.min_branches);
  synth->add_option("--max-branches", spec.max_branches);
  synth->add_option("--bend-amplitude", spec.bend_amplitude, "Base vertical bend amplitude (mm)");
  synth->add_option("--age-slope", spec.age_slope, "Bend amplitude increase per year (mm)");
  synth->add_option("--amplitude-noise", spec.amplitude_noise, "Per-subject amplitude noise sd (mm)");
  synth->add_option("--loop-probability", spec.loop_probability);
  synth->add_option("--sex-effect", spec.sex_effect_size, "Loop radius multiplier for male subjects");
  synth->add_option("--min-age", spec.min_age);
  synth->add_option("--max-age", spec.max_age);

  // diagrams
  auto* dg = app.add_subcommand("diagrams", "Compute dimension-0 and dimension-1 diagrams per subject");
  add_common(dg);
  dg->add_option("--direction", direction, "Height direction x,y,z");
  dg->add_option("--points", cfg.subsample_points, "Subsample size for loop diagrams")->check(CLI::PositiveNumber);
  dg->add_option("--max-scale", max_scale, "Rips scale cap in mm, or 'auto'");
  dg->add_flag("--force", cfg.force, "Recompute existing outputs");

  // featurize
  auto* fz = app.add_subcommand("featurize", "Write persistence feature vectors");
  add_common(fz);
  add_window(fz);
  fz->add_option("--dim", dimension, "Homology dimension (0 or 1)")->check(CLI::Range(0, 1));
  fz->add_option("--out", out_path, "Output CSV (default stdout)");

  // analyze
  auto* an = app.add_subcommand("analyze", "PCA plus age correlation or sex permutation test");
  add_common(an);
  add_window(an);
  an->add_option("--dim", dimension, "Homology dimension (0 or 1)")->check(CLI::Range(0, 1));
  an->add_option("--covariate", covariate)->check(CLI::IsMember({"age", "sex"}));
  an->add_option("--control", control)->check(CLI::IsMember({"none", "residual", "L", "sqrtL", "cbrtL"}));
  an->add_option("--n-perm", cfg.n_perm)->check(CLI::PositiveNumber);
  an->add_option("--components", cfg.pca_components)->check(CLI::PositiveNumber);
  an->add_option("--out", out_path, "Output JSON (default stdout)");

  // heatmap
  auto* hm = app.add_subcommand("heatmap", "Statistic over all feature windows (n, N)");
  add_common(hm);
  hm->add_option("--dim", dimension, "Homology dimension (0 or 1)")->check(CLI::Range(0, 1));
  hm->add_option("--covariate", covariate)->check(CLI::IsMember({"age", "sex"}));
  hm->add_option("--n-max", n_max)->check(CLI::Range(2, 100000));
  hm->add_option("--n-perm", cfg.n_perm)->check(CLI::PositiveNumber);
  hm->add_option("--out", out_path, "Output CSV (default stdout)");

  // dist
  std::string metric = "wasserstein";
  double p = 1.0;
  std::string a_path, b_path;
  auto* ds = app.add_subcommand("dist", "Distance between two diagrams or two point clouds");
  ds->add_option("--metric", metric)->check(CLI::IsMember({"wasserstein", "bottleneck", "hausdorff"}));
  ds->add_option("--p", p, "Wasserstein exponent");
  ds->add_option("A", a_path)->required()->check(CLI::ExistingFile);
  ds->add_option("B", b_path)->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    cfg.manifest = manifest;
    cfg.diagram_dir = diagrams_dir;
    if (cfg.window_last < cfg.window_first) throw treeph::ArgumentError("--N must be >= --n");

    if (*synth) {
      const auto subjects = treeph::generate_cohort(spec);
      treeph::write_cohort(subjects, synth_out);
      std::cerr << "wrote " << subjects.size() << " trees to " << synth_out << '\n';
    } else if (*dg) {
      cfg.direction = parse_direction(direction);
      if (max_scale != "auto") cfg.max_scale = std::stod(max_scale);
      const auto report = treeph::cmd_diagrams(cfg);
      std::cerr << "computed " << report.computed << ", skipped " << report.skipped << ", failed "
                << report.failures.size() << '\n';
      for (const auto& f : report.failures) std::cerr << "  " << f.subject_id << ": " << f.message << '\n';
      if (!report.failures.empty()) return kPartial;
    } else if (*fz) {
      std::ostringstream out;
      treeph::cmd_featurize(cfg, dimension, out);
      emit(out_path, out.str());
    } else if (*an) {
      const auto report =
          treeph::cmd_analyze(cfg, treeph::parse_covariate(covariate), dimension, treeph::parse_control(control));
      emit(out_path, report.to_json().dump(2) + "\n");
    } else if (*hm) {
      const auto grid = treeph::cmd_heatmap(cfg, treeph::parse_covariate(covariate), dimension, n_max);
      std::ostringstream out;
      treeph::write_heatgrid_csv(out, grid);
      emit(out_path, out.str());
    } else if (*ds) {
      double d = 0.0;
      if (metric == "hausdorff") {
        d = treeph::hausdorff(load_cloud(a_path), load_cloud(b_path));
      } else if (metric == "bottleneck") {
        d = treeph::bottleneck(load_diagram(a_path), load_diagram(b_path));
      } else {
        d = treeph::wasserstein(load_diagram(a_path), load_diagram(b_path), {p});
      }
      std::cout << treeph::format_double(d) << '\n';
    }
  } catch (const treeph::SubjectError& e) {
    std::cerr << "error (subject " << e.subject() << "): " << e.what() << '\n';
    return kFatal;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFatal;
  }
  return 0;
}
