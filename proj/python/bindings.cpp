#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "homog/cell_problem.hpp"
#include "homog/coarse.hpp"
#include "homog/energy.hpp"
#include "homog/percolation.hpp"
#include "homog/sampling.hpp"
#include "homog/voronoi.hpp"

namespace py = pybind11;
using namespace homog;

PYBIND11_MODULE(homogpc, m) {
  m.doc() = "Discrete-to-continuum homogenization on random point clouds";

  py::class_<Vec2>(m, "Vec2")
      .def(py::init<>())
      .def(py::init<double, double>(), py::arg("x"), py::arg("y"))
      .def_readwrite("x", &Vec2::x)
      .def_readwrite("y", &Vec2::y)
      .def("norm", &Vec2::norm)
      .def("dot", &Vec2::dot)
      .def("__repr__", [](const Vec2& v) {
        return "Vec2(" + std::to_string(v.x) + ", " + std::to_string(v.y) + ")";
      });

  py::class_<Window>(m, "Window")
      .def(py::init<Vec2, double, double>(), py::arg("center"),
           py::arg("width"), py::arg("height"))
      .def_static("square", &Window::square, py::arg("center"), py::arg("side"))
      .def_readonly("center", &Window::center)
      .def_readonly("width", &Window::width)
      .def_readonly("height", &Window::height)
      .def("area", &Window::area)
      .def("contains", &Window::contains);

  py::class_<Region>(m, "Region")
      .def(py::init<const Window&>(), py::arg("window"))
      .def("area", &Region::area)
      .def("contains", &Region::contains);

  py::class_<RandomStream>(m, "RandomStream")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def("derive", &RandomStream::derive, py::arg("label"))
      .def_readonly_static("algorithm", &RandomStream::kAlgorithm);

  py::class_<PointCloud>(m, "PointCloud")
      .def_readonly("window", &PointCloud::window)
      .def("__len__", &PointCloud::size)
      .def_property_readonly("points", [](const PointCloud& c) {
        std::vector<std::pair<double, double>> out;
        out.reserve(c.size());
        for (const Vec2& p : c.pts) out.emplace_back(p.x, p.y);
        return out;
      });

  m.def(
      "sample_poisson",
      [](const Window& window, double intensity, double padding,
         const RandomStream& stream) {
        SamplingSpec spec;
        spec.window = window;
        spec.intensity = intensity;
        spec.padding = padding;
        spec.stream = stream;
        return samplePoisson(spec);
      },
      py::arg("window"), py::arg("intensity"), py::arg("padding"),
      py::arg("stream"));
  m.def("lattice_cloud", &latticeCloud, py::arg("window"), py::arg("spacing"),
        py::arg("jitter"), py::arg("stream"));
  m.def(
      "scale_cloud",
      [](const PointCloud& c, double s) { return transformCloud(c, Scale{s}); },
      py::arg("cloud"), py::arg("s"));
  m.def(
      "translate_cloud",
      [](const PointCloud& c, Vec2 v) {
        return transformCloud(c, Translate{v});
      },
      py::arg("cloud"), py::arg("v"));
  m.def(
      "rotate_cloud",
      [](const PointCloud& c, double theta) {
        return transformCloud(c, RotateOp{theta});
      },
      py::arg("cloud"), py::arg("theta"));

  py::class_<ScalarField>(m, "ScalarField")
      .def_readwrite("values", &ScalarField::values)
      .def_static(
          "sample",
          [](const PointCloud& cloud, const std::function<double(Vec2)>& f) {
            return ScalarField::sample(cloud, f);
          },
          py::arg("cloud"), py::arg("f"), py::keep_alive<0, 1>());

  py::class_<NeighborIndex>(m, "NeighborIndex")
      .def(py::init<const PointCloud&, double, bool>(), py::arg("cloud"),
           py::arg("radius"), py::arg("build_lists") = true,
           py::keep_alive<1, 2>())
      .def("count_in_ball", &NeighborIndex::countInBall, py::arg("p"),
           py::arg("r"))
      .def("nearest", &NeighborIndex::nearest, py::arg("p"));

  m.def("dirichlet_energy", &dirichletEnergy, py::arg("cloud"),
        py::arg("index"), py::arg("field"), py::arg("region"),
        py::arg("range"));
  m.def(
      "pair_count",
      [](const PointCloud& cloud, const NeighborIndex& index, const Region& A,
         double range) {
        const PairCountResult r = pairCount(cloud, index, A, range);
        return std::make_pair(r.points, r.pairs);
      },
      py::arg("cloud"), py::arg("index"), py::arg("region"), py::arg("range"));

  py::class_<CellProblemSolution>(m, "CellProblemSolution")
      .def_readonly("m", &CellProblemSolution::m)
      .def_readonly("residual", &CellProblemSolution::residual)
      .def_readonly("iterations", &CellProblemSolution::iterations)
      .def_readonly("converged", &CellProblemSolution::converged)
      .def_readonly("free_count", &CellProblemSolution::freeCount)
      .def_readonly("clamped_count", &CellProblemSolution::clampedCount)
      .def_readonly("field", &CellProblemSolution::field);
  m.def(
      "solve_cell_problem",
      [](const PointCloud& cloud, const Region& A, double lambda_, Vec2 xi,
         double tol, std::size_t maxIter) {
        return solveCellProblem(cloud, A, lambda_, xi, tol, maxIter);
      },
      py::arg("cloud"), py::arg("region"), py::arg("lam"), py::arg("xi"),
      py::arg("tol") = 1e-10, py::arg("max_iter") = 0);

  py::class_<XiRow>(m, "XiRow")
      .def_readonly("T", &XiRow::T)
      .def_readonly("seed", &XiRow::seed)
      .def_readonly("xi", &XiRow::xi)
      .def_readonly("m", &XiRow::m)
      .def_readonly("normalized", &XiRow::normalized)
      .def_readonly("ok", &XiRow::ok)
      .def_readonly("error", &XiRow::error);
  py::class_<XiAggregate>(m, "XiAggregate")
      .def_readonly("T", &XiAggregate::T)
      .def_readonly("count", &XiAggregate::count)
      .def_readonly("mean", &XiAggregate::mean)
      .def_readonly("stddev", &XiAggregate::stddev)
      .def_readonly("direction_spread", &XiAggregate::directionSpread);
  py::class_<XiEstimate>(m, "XiEstimate")
      .def_readonly("rows", &XiEstimate::rows)
      .def_readonly("per_T", &XiEstimate::perT)
      .def_readonly("xi", &XiEstimate::xi)
      .def_readonly("xi_uncertainty", &XiEstimate::xiUncertainty);
  m.def(
      "estimate_xi",
      [](std::vector<double> Ts, std::size_t seeds, std::vector<Vec2> dirs,
         double lambda_, double gamma, double tol, std::uint64_t seed,
         bool lattice) {
        XiPlan plan;
        plan.Ts = std::move(Ts);
        plan.seeds = seeds;
        plan.dirs = std::move(dirs);
        plan.lambda = lambda_;
        plan.gamma = gamma;
        plan.tol = tol;
        plan.seed = seed;
        plan.lattice = lattice;
        return estimateXi(plan);
      },
      py::arg("Ts"), py::arg("seeds"), py::arg("dirs"), py::arg("lam"),
      py::arg("gamma") = 1.0, py::arg("tol") = 1e-10, py::arg("seed") = 0,
      py::arg("lattice") = false);

  py::class_<VoronoiDiagram>(m, "VoronoiDiagram")
      .def("__len__",
           [](const VoronoiDiagram& d) { return d.cells.size(); })
      .def("cell_area",
           [](const VoronoiDiagram& d, std::size_t i) {
             return d.cells.at(i).area;
           })
      .def("to_json", &VoronoiDiagram::toJson);
  m.def(
      "voronoi_diagram",
      [](const PointCloud& cloud, const Window& clip) {
        return voronoiDiagram(cloud, clip);
      },
      py::arg("cloud"), py::arg("clip"), py::keep_alive<0, 1>());

  py::class_<RegularMask>(m, "RegularMask")
      .def_readonly("regular", &RegularMask::regular);
  m.def("regular_subcluster", &regularSubcluster, py::arg("cloud"),
        py::arg("diagram"), py::arg("alpha"), py::arg("lam"),
        py::arg("scale") = 1.0);

  py::class_<RegularGrid>(m, "RegularGrid")
      .def_readonly("eps", &RegularGrid::eps)
      .def_readonly("t", &RegularGrid::t)
      .def_readonly("kt", &RegularGrid::kt)
      .def_readonly("M", &RegularGrid::M)
      .def_readonly("domain", &RegularGrid::domain);
  py::class_<GridAssembly>(m, "GridAssembly")
      .def_readonly("ok", &GridAssembly::ok)
      .def_readonly("grid", &GridAssembly::grid)
      .def_readonly("failure", &GridAssembly::failure)
      .def_readonly("raw_horizontal", &GridAssembly::rawHorizontal)
      .def_readonly("raw_vertical", &GridAssembly::rawVertical);
  m.def("assemble_grid", &assembleGrid, py::arg("cloud"), py::arg("eps"),
        py::arg("t"), py::arg("alpha"), py::arg("lam"), py::arg("upsilon"),
        py::arg("from_top") = false);
  m.def(
      "validate_grid",
      [](const RegularGrid& grid, const PointCloud& cloud,
         const NeighborIndex& index, const RegularMask& mask) {
        const GridValidation v = validateGrid(grid, cloud, index, mask);
        std::vector<std::tuple<char, bool, std::string>> out;
        for (const PropertyReport& p : v.properties)
          out.emplace_back(p.property, p.pass, p.witness);
        return out;
      },
      py::arg("grid"), py::arg("cloud"), py::arg("index"), py::arg("mask"));

  py::class_<SimpleFunction>(m, "SimpleFunction")
      .def_readonly("t", &SimpleFunction::t)
      .def_readonly("kt", &SimpleFunction::kt)
      .def_readonly("coeff", &SimpleFunction::coeff)
      .def("at", &SimpleFunction::at, py::arg("p"));
  py::class_<GridAverages>(m, "GridAverages")
      .def_readonly("f", &GridAverages::f)
      .def_readonly("counts", &GridAverages::counts)
      .def_readonly("empty_squares", &GridAverages::emptySquares);
  m.def("grid_average", &gridAverage, py::arg("u"), py::arg("grid"));
  m.def(
      "grid_l2_distance",
      [](const ScalarField& u, const RegularGrid& grid,
         const VoronoiDiagram& diagram, const std::function<double(Vec2)>& w,
         const Region& region) {
        const L2Result r = gridL2Distance(u, grid, diagram, w, region);
        return std::make_pair(r.value, r.area);
      },
      py::arg("u"), py::arg("grid"), py::arg("diagram"), py::arg("w"),
      py::arg("region"));
  m.def(
      "grid_independence_gap",
      [](const ScalarField& u, const RegularGrid& a, const RegularGrid& b) {
        const GapResult r = gridIndependenceGap(u, a, b);
        return std::make_pair(r.gap, r.skipped);
      },
      py::arg("u"), py::arg("grid_a"), py::arg("grid_b"));
}
