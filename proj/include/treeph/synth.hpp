#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "treeph/cohort.hpp"
#include "treeph/tree.hpp"

namespace treeph {

/// Parameters of the synthetic cohort. Lengths in mm, ages in years.
///
/// Branches are horizontal polylines with a vertical sinusoidal bend of
/// amplitude bend_amplitude + age_slope * age (+ Gaussian subject noise), so
/// the height-function diagram of every trough has persistence close to
/// twice the amplitude. With probability loop_probability a branch ends in
/// a near-closed circle whose radius is multiplied by sex_effect_size for
/// male subjects; the circle's radius sets its loop persistence.
struct SynthSpec {
  std::size_t n_subjects = 40;
  std::uint64_t seed = 1;

  int min_branches = 20;
  int max_branches = 28;
  double min_branch_length = 40.0;
  double max_branch_length = 60.0;
  double min_wavelength = 8.0;
  double max_wavelength = 14.0;
  double vertex_spacing = 0.5;
  double trunk_height = 20.0;
  double box_half_width = 120.0;

  double bend_amplitude = 2.0;
  double age_slope = 0.0;
  double amplitude_noise = 0.4;

  double loop_probability = 0.3;
  double min_loop_radius = 6.0;
  double max_loop_radius = 10.0;
  double loop_gap = 0.3;  // radians left open between the two arcs
  double sex_effect_size = 1.0;

  double min_age = 18.0;
  double max_age = 80.0;
};

struct SynthSubject {
  std::string subject_id;
  double age = 0.0;
  Sex sex = Sex::Female;
  double bend_amplitude = 0.0;  // realised subject amplitude, for diagnostics
  EmbeddedTree tree;
};

void validate(const SynthSpec& spec);

/// Deterministic in spec.seed; every subject draws from its own stream.
std::vector<SynthSubject> generate_cohort(const SynthSpec& spec);

/// Writes `<id>.tree` per subject and `manifest.csv` into `dir`.
CohortManifest write_cohort(const std::vector<SynthSubject>& subjects, const std::filesystem::path& dir);

}  // namespace treeph
