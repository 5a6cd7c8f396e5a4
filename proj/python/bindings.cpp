#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "treeph/error.hpp"
#include "treeph/features.hpp"
#include "treeph/metrics.hpp"
#include "treeph/ph0.hpp"
#include "treeph/ph1.hpp"
#include "treeph/pipeline.hpp"
#include "treeph/stats.hpp"
#include "treeph/synth.hpp"

namespace py = pybind11;
using namespace treeph;

namespace {

using Points = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

PointCloud to_cloud(const Points& pts) {
  PointCloud c;
  for (Eigen::Index i = 0; i < pts.rows(); ++i) c.points.push_back({pts(i, 0), pts(i, 1), pts(i, 2)});
  return c;
}

Points from_cloud(const PointCloud& c) {
  Points pts(static_cast<Eigen::Index>(c.size()), 3);
  for (std::size_t i = 0; i < c.size(); ++i) pts.row(static_cast<Eigen::Index>(i)) << c.points[i].x, c.points[i].y, c.points[i].z;
  return pts;
}

Vec3 to_vec(const std::array<double, 3>& a) { return {a[0], a[1], a[2]}; }

py::object json_to_python(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

}  // namespace

PYBIND11_MODULE(_treeph, m) {
  m.doc() = "Persistent-homology features and statistics for embedded trees";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ReferenceError>(m, "ReferenceError", PyExc_ValueError);
  py::register_exception<DuplicateError>(m, "DuplicateError", PyExc_ValueError);
  py::register_exception<DegenerateError>(m, "DegenerateError", PyExc_ValueError);
  py::register_exception<InfiniteDistanceError>(m, "InfiniteDistanceError", PyExc_ValueError);
  py::register_exception<SubjectError>(m, "SubjectError", PyExc_RuntimeError);

  py::class_<EmbeddedTree>(m, "EmbeddedTree")
      .def_property_readonly("vertex_ids",
                             [](const EmbeddedTree& t) {
                               std::vector<std::int64_t> ids;
                               for (const auto& v : t.vertices()) ids.push_back(v.id);
                               return ids;
                             })
      .def_property_readonly("positions",
                             [](const EmbeddedTree& t) {
                               PointCloud c;
                               for (const auto& v : t.vertices()) c.points.push_back(v.position);
                               return from_cloud(c);
                             })
      .def_property_readonly("edges",
                             [](const EmbeddedTree& t) {
                               std::vector<std::pair<std::int64_t, std::int64_t>> es;
                               for (const auto& e : t.edges()) es.emplace_back(t.vertices()[e.a].id, t.vertices()[e.b].id);
                               return es;
                             })
      .def_property_readonly("branch_count", [](const EmbeddedTree& t) { return t.branches().size(); })
      .def_property_readonly("has_cycle", &EmbeddedTree::has_cycle)
      .def("to_text", [](const EmbeddedTree& t) {
        std::ostringstream out;
        write_tree(out, t);
        return out.str();
      });

  m.def("parse_tree", [](const std::string& text) {
    std::istringstream in(text);
    return parse_tree(in);
  }, py::arg("text"));
  m.def("read_tree", [](const std::filesystem::path& p) { return read_tree_file(p); }, py::arg("path"));
  m.def("total_length", &total_length, py::arg("tree"));
  m.def("subsample", [](const EmbeddedTree& t, std::size_t m, std::uint64_t seed) { return from_cloud(subsample(t, m, seed)); },
        py::arg("tree"), py::arg("m"), py::arg("seed") = 0);

  py::class_<PersistenceDiagram>(m, "PersistenceDiagram")
      .def_readonly("dimension", &PersistenceDiagram::dimension)
      .def_readonly("truncated_at", &PersistenceDiagram::truncated_at)
      .def_property_readonly("dots",
                             [](const PersistenceDiagram& d) {
                               Eigen::Matrix<double, Eigen::Dynamic, 2, Eigen::RowMajor> out(
                                   static_cast<Eigen::Index>(d.dots.size()), 2);
                               for (std::size_t i = 0; i < d.dots.size(); ++i)
                                 out.row(static_cast<Eigen::Index>(i)) << d.dots[i].birth, d.dots[i].death;
                               return out;
                             })
      .def("__len__", [](const PersistenceDiagram& d) { return d.dots.size(); })
      .def("to_csv", [](const PersistenceDiagram& d) {
        std::ostringstream out;
        write_diagram_csv(out, d);
        return out.str();
      });

  m.def("diagram", [](const std::vector<std::pair<double, double>>& dots, int dimension) {
    PersistenceDiagram d;
    d.dimension = dimension;
    for (auto [b, e] : dots) d.dots.push_back({b, e, dimension});
    return d;
  }, py::arg("dots"), py::arg("dimension") = 0);

  m.def("persistence0",
        [](const std::vector<double>& values, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
          return persistence0(VertexFiltration(values, edges));
        },
        py::arg("values"), py::arg("edges"));
  m.def("tree_persistence0",
        [](const EmbeddedTree& t, std::array<double, 3> dir) { return persistence0(height_filtration(t, to_vec(dir))); },
        py::arg("tree"), py::arg("direction") = std::array<double, 3>{0.0, 0.0, 1.0});
  m.def("rips_persistence1",
        [](const Points& pts, std::optional<double> max_scale) {
          const auto cloud = to_cloud(pts);
          return rips_persistence1(cloud, max_scale.value_or(default_max_scale(cloud)));
        },
        py::arg("points"), py::arg("max_scale") = py::none());
  m.def("tree_loops", &tree_loops, py::arg("tree"), py::arg("m") = 3000, py::arg("max_scale") = py::none(),
        py::arg("seed") = 0);

  m.def("wasserstein",
        [](const PersistenceDiagram& a, const PersistenceDiagram& b, double p, double ground_norm) {
          return wasserstein(a, b, {p, ground_norm});
        },
        py::arg("a"), py::arg("b"), py::arg("p") = 1.0, py::arg("ground_norm") = kInfinity);
  m.def("bottleneck", &bottleneck, py::arg("a"), py::arg("b"), py::arg("ground_norm") = kInfinity);
  m.def("hausdorff", [](const Points& a, const Points& b) { return hausdorff(to_cloud(a), to_cloud(b)); },
        py::arg("a"), py::arg("b"));

  m.def("persistence_vector", [](const PersistenceDiagram& d, int n, int N) { return persistence_vector(d, n, N).values; },
        py::arg("diagram"), py::arg("n"), py::arg("N"));
  m.def("residualize",
        [](const Eigen::MatrixXd& features, const std::vector<double>& lengths) { return residualize(features, lengths); },
        py::arg("features"), py::arg("lengths"));

  m.def("pca",
        [](const Eigen::MatrixXd& data, int k) {
          const auto model = pca(data, k);
          py::dict out;
          out["mean"] = model.mean;
          out["loadings"] = model.loadings;
          out["scores"] = model.scores;
          out["variances"] = model.variances;
          return out;
        },
        py::arg("data"), py::arg("k"));
  m.def("pearson",
        [](const std::vector<double>& x, const std::vector<double>& y) {
          const auto r = pearson(x, y);
          return py::make_tuple(r.rho, r.p_value);
        },
        py::arg("x"), py::arg("y"));
  m.def("diproperm",
        [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, std::size_t n_perm, std::uint64_t seed) {
          const auto r = diproperm(a, b, n_perm, seed);
          py::dict out;
          out["observed"] = r.observed_stat;
          out["p_emp"] = r.p_emp;
          out["permuted"] = r.permuted_stats;
          return out;
        },
        py::arg("a"), py::arg("b"), py::arg("n_perm") = 1000, py::arg("seed") = 0);

  m.def("synth",
        [](const std::filesystem::path& out, std::size_t n_subjects, std::uint64_t seed, double age_slope,
           double sex_effect_size) {
          SynthSpec spec;
          spec.n_subjects = n_subjects;
          spec.seed = seed;
          spec.age_slope = age_slope;
          spec.sex_effect_size = sex_effect_size;
          write_cohort(generate_cohort(spec), out);
          return out / "manifest.csv";
        },
        py::arg("out"), py::arg("n_subjects") = 40, py::arg("seed") = 1, py::arg("age_slope") = 0.0,
        py::arg("sex_effect_size") = 1.0);

  auto make_config = [](const std::filesystem::path& manifest, const std::filesystem::path& diagrams, std::size_t points,
                        int n, int N, std::size_t n_perm, std::uint64_t seed, unsigned workers) {
    PipelineConfig c;
    c.manifest = manifest;
    c.diagram_dir = diagrams;
    c.subsample_points = points;
    c.window_first = n;
    c.window_last = N;
    c.n_perm = n_perm;
    c.seed = seed;
    c.workers = workers;
    return c;
  };

  m.def("compute_diagrams",
        [make_config](const std::filesystem::path& manifest, const std::filesystem::path& diagrams, std::size_t points,
                      std::uint64_t seed, unsigned workers, bool force) {
          auto c = make_config(manifest, diagrams, points, 1, 100, 1000, seed, workers);
          c.force = force;
          py::gil_scoped_release release;
          auto report = cmd_diagrams(c);
          py::gil_scoped_acquire acquire;
          return json_to_python(report.to_json());
        },
        py::arg("manifest"), py::arg("diagrams"), py::arg("points") = 3000, py::arg("seed") = 0,
        py::arg("workers") = 1, py::arg("force") = false);
  m.def("analyze",
        [make_config](const std::filesystem::path& manifest, const std::filesystem::path& diagrams,
                      const std::string& covariate, int dim, const std::string& control, int n, int N,
                      std::size_t n_perm, std::uint64_t seed) {
          const auto c = make_config(manifest, diagrams, 3000, n, N, n_perm, seed, 1);
          return json_to_python(cmd_analyze(c, parse_covariate(covariate), dim, parse_control(control)).to_json());
        },
        py::arg("manifest"), py::arg("diagrams"), py::arg("covariate") = "age", py::arg("dim") = 0,
        py::arg("control") = "none", py::arg("n") = 1, py::arg("N") = 100, py::arg("n_perm") = 1000,
        py::arg("seed") = 0);
  m.def("heatmap",
        [make_config](const std::filesystem::path& manifest, const std::filesystem::path& diagrams,
                      const std::string& covariate, int dim, int n_max, std::size_t n_perm, std::uint64_t seed,
                      unsigned workers) {
          const auto c = make_config(manifest, diagrams, 3000, 1, 100, n_perm, seed, workers);
          const auto grid = cmd_heatmap(c, parse_covariate(covariate), dim, n_max);
          return grid.entries;
        },
        py::arg("manifest"), py::arg("diagrams"), py::arg("covariate") = "age", py::arg("dim") = 0,
        py::arg("n_max") = 200, py::arg("n_perm") = 1000, py::arg("seed") = 0, py::arg("workers") = 1);
}
