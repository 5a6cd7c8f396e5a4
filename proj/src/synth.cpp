#include "treeph/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include "treeph/error.hpp"

namespace treeph {

namespace {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double reflect(double v, double w) {
  // Fold v into [-w, w].
  const double period = 4.0 * w;
  double t = std::fmod(v + w, period);
  if (t < 0) t += period;
  return t <= 2.0 * w ? t - w : 3.0 * w - t;
}

class TreeBuilder {
public:
  std::size_t add(Vec3 p) {
    vertices_.push_back({static_cast<std::int64_t>(vertices_.size()), p, std::nullopt});
    return vertices_.size() - 1;
  }
  void connect(std::size_t a, std::size_t b) {
    edges_.emplace_back(static_cast<std::int64_t>(a), static_cast<std::int64_t>(b));
  }
  const Vec3& position(std::size_t i) const { return vertices_[i].position; }
  EmbeddedTree build() { return EmbeddedTree(std::move(vertices_), edges_); }

private:
  std::vector<Vertex> vertices_;
  std::vector<std::pair<std::int64_t, std::int64_t>> edges_;
};

EmbeddedTree grow_tree(const SynthSpec& spec, double amplitude, double loop_scale, std::mt19937_64& rng) {
  using std::numbers::pi;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  std::normal_distribution<double> heading_noise(0.0, 0.02);

  TreeBuilder tb;
  std::vector<std::size_t> attachable;
  std::size_t prev = tb.add({0.0, 0.0, 0.0});
  attachable.push_back(prev);
  const auto trunk_steps = static_cast<int>(std::ceil(spec.trunk_height / spec.vertex_spacing));
  for (int i = 1; i <= trunk_steps; ++i) {
    const std::size_t v = tb.add({0.0, 0.0, spec.trunk_height * i / trunk_steps});
    tb.connect(prev, v);
    attachable.push_back(v);
    prev = v;
  }

  const int branch_count = std::uniform_int_distribution<int>(spec.min_branches, spec.max_branches)(rng);
  for (int b = 0; b < branch_count; ++b) {
    const std::size_t start = attachable[std::uniform_int_distribution<std::size_t>(0, attachable.size() - 1)(rng)];
    double heading = uniform(0.0, 2.0 * pi);
    const double length = uniform(spec.min_branch_length, spec.max_branch_length);
    const double wavelength = uniform(spec.min_wavelength, spec.max_wavelength);
    const double amp = amplitude * uniform(0.8, 1.2);
    const Vec3 origin = tb.position(start);

    double x = origin.x;
    double y = origin.y;
    prev = start;
    const auto steps = static_cast<int>(std::ceil(length / spec.vertex_spacing));
    for (int i = 1; i <= steps; ++i) {
      heading += heading_noise(rng);
      x += spec.vertex_spacing * std::cos(heading);
      y += spec.vertex_spacing * std::sin(heading);
      const double s = spec.vertex_spacing * i;
      const Vec3 p{reflect(x, spec.box_half_width), reflect(y, spec.box_half_width),
                   origin.z + amp * std::sin(2.0 * pi * s / wavelength)};
      const std::size_t v = tb.add(p);
      tb.connect(prev, v);
      attachable.push_back(v);
      prev = v;
    }

    if (unit(rng) < spec.loop_probability) {
      // Two arcs leave the branch tip and nearly meet on the far side of a
      // horizontal circle.
      const Vec3 tip = tb.position(prev);
      const double radius = uniform(spec.min_loop_radius, spec.max_loop_radius) * loop_scale;
      const Vec3 centre{tip.x + radius * std::cos(heading), tip.y + radius * std::sin(heading), tip.z};
      const double phi0 = heading + pi;
      const double sweep = pi - 0.5 * spec.loop_gap;
      const auto arc_steps = std::max(2, static_cast<int>(std::ceil(sweep * radius / spec.vertex_spacing)));
      for (double sign : {1.0, -1.0}) {
        std::size_t last = prev;
        for (int i = 1; i <= arc_steps; ++i) {
          const double phi = phi0 + sign * sweep * i / arc_steps;
          const std::size_t v =
              tb.add({centre.x + radius * std::cos(phi), centre.y + radius * std::sin(phi), centre.z});
          tb.connect(last, v);
          last = v;
        }
      }
    }
  }
  return tb.build();
}

}  // namespace

void validate(const SynthSpec& spec) {
  if (spec.n_subjects == 0) throw ArgumentError("n_subjects must be positive");
  if (spec.min_branches < 1 || spec.max_branches < spec.min_branches) throw ArgumentError("bad branch count range");
  if (!(spec.min_branch_length > 0.0) || spec.max_branch_length < spec.min_branch_length)
    throw ArgumentError("bad branch length range");
  if (!(spec.min_wavelength > 0.0) || spec.max_wavelength < spec.min_wavelength)
    throw ArgumentError("bad wavelength range");
  if (!(spec.vertex_spacing > 0.0) || !(spec.trunk_height > 0.0) || !(spec.box_half_width > 0.0))
    throw ArgumentError("spacing, trunk height and box size must be positive");
  if (!(spec.bend_amplitude > 0.0)) throw ArgumentError("bend amplitude must be positive");
  if (!(spec.amplitude_noise >= 0.0)) throw ArgumentError("amplitude noise must be non-negative");
  if (!(spec.loop_probability >= 0.0 && spec.loop_probability <= 1.0))
    throw ArgumentError("loop probability must lie in [0, 1]");
  if (!(spec.min_loop_radius > 0.0) || spec.max_loop_radius < spec.min_loop_radius)
    throw ArgumentError("bad loop radius range");
  if (!(spec.loop_gap > 0.0 && spec.loop_gap < std::numbers::pi)) throw ArgumentError("loop gap must lie in (0, pi)");
  if (!(spec.sex_effect_size > 0.0)) throw ArgumentError("sex effect size must be positive");
  if (!(spec.min_age > 0.0) || spec.max_age < spec.min_age) throw ArgumentError("bad age range");
}

std::vector<SynthSubject> generate_cohort(const SynthSpec& spec) {
  validate(spec);
  const int width = static_cast<int>(std::to_string(spec.n_subjects).size());
  std::vector<SynthSubject> out;
  out.reserve(spec.n_subjects);
  for (std::size_t i = 0; i < spec.n_subjects; ++i) {
    std::mt19937_64 rng(mix(spec.seed ^ mix(i + 1)));
    SynthSubject s;
    std::string number = std::to_string(i + 1);
    s.subject_id = "S" + std::string(static_cast<std::size_t>(width) - number.size(), '0') + number;
    s.sex = i % 2 == 0 ? Sex::Female : Sex::Male;
    s.age = std::uniform_real_distribution<double>(spec.min_age, spec.max_age)(rng);
    const double noise = std::normal_distribution<double>(0.0, 1.0)(rng) * spec.amplitude_noise;
    s.bend_amplitude = std::max(0.1, spec.bend_amplitude + spec.age_slope * s.age + noise);
    const double loop_scale = s.sex == Sex::Male ? spec.sex_effect_size : 1.0;
    s.tree = grow_tree(spec, s.bend_amplitude, loop_scale, rng);
    out.push_back(std::move(s));
  }
  return out;
}

CohortManifest write_cohort(const std::vector<SynthSubject>& subjects, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  CohortManifest manifest;
  for (const auto& s : subjects) {
    const std::string file = s.subject_id + ".tree";
    std::ofstream out(dir / file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / file).string());
    write_tree(out, s.tree);
    manifest.rows.push_back({s.subject_id, file, s.age, s.sex});
  }
  std::ofstream mf(dir / "manifest.csv", std::ios::binary);
  if (!mf) throw std::runtime_error("cannot write manifest");
  write_manifest(mf, manifest);
  return manifest;
}

}  // namespace treeph
