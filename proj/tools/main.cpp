#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "homog/cell_problem.hpp"
#include "homog/coarse.hpp"
#include "homog/energy.hpp"
#include "homog/experiments.hpp"
#include "homog/percolation.hpp"
#include "homog/sampling.hpp"

using nlohmann::json;
using namespace homog;

namespace {

Window windowFromFlags(const std::vector<double>& v) {
  if (v.size() != 4)
    throw CLI::ValidationError("window", "expects four numbers: cx cy w h");
  return Window({v[0], v[1]}, v[2], v[3]);
}

json gridToJson(const RegularGrid& grid, const PointCloud& cloud) {
  auto familyToJson = [&](const std::vector<std::vector<PointPath>>& fam) {
    json out = json::array();
    for (const auto& rect : fam) {
      json paths = json::array();
      for (const PointPath& p : rect) {
        json ids = json::array();
        for (std::uint32_t x : p.idx) ids.push_back(cloud.ids[x]);
        paths.push_back(ids);
      }
      out.push_back(paths);
    }
    return out;
  };
  return json{{"eps", grid.eps},
              {"t", grid.t},
              {"lambda", grid.lambda},
              {"alpha", grid.alpha},
              {"upsilon", grid.upsilon},
              {"kt", grid.kt},
              {"M", grid.M},
              {"domain",
               {grid.domain.center.x, grid.domain.center.y, grid.domain.width,
                grid.domain.height}},
              {"horizontal", familyToJson(grid.horizontal)},
              {"vertical", familyToJson(grid.vertical)}};
}

RegularGrid gridFromJson(const json& j, const PointCloud& cloud) {
  RegularGrid grid;
  grid.eps = j.at("eps").get<double>();
  grid.t = j.at("t").get<double>();
  grid.lambda = j.at("lambda").get<double>();
  grid.alpha = j.at("alpha").get<double>();
  grid.upsilon = j.at("upsilon").get<double>();
  grid.kt = j.at("kt").get<std::size_t>();
  grid.M = j.at("M").get<std::size_t>();
  const auto& d = j.at("domain");
  grid.domain = Window({d[0].get<double>(), d[1].get<double>()},
                       d[2].get<double>(), d[3].get<double>());
  auto familyFromJson = [&](const json& fam) {
    std::vector<std::vector<PointPath>> out;
    for (const auto& rect : fam) {
      std::vector<PointPath> paths;
      for (const auto& ids : rect) {
        PointPath p;
        for (const auto& id : ids)
          p.idx.push_back(
              static_cast<std::uint32_t>(cloud.indexOf(id.get<std::int64_t>())));
        paths.push_back(std::move(p));
      }
      out.push_back(std::move(paths));
    }
    return out;
  };
  grid.horizontal = familyFromJson(j.at("horizontal"));
  grid.vertical = familyFromJson(j.at("vertical"));
  return grid;
}

void emit(const std::string& text, const std::string& outPath) {
  if (outPath.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(outPath, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + outPath);
    out << text;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Point-cloud Dirichlet energies, cell problems and grids"};
  app.require_subcommand(1);

  // --- sample --------------------------------------------------------------
  auto* sampleCmd = app.add_subcommand("sample", "Sample a Poisson cloud");
  double gamma = 1.0, padding = 0.0;
  std::vector<double> windowFlags;
  std::uint64_t seed = 0;
  std::string outPath;
  sampleCmd->add_option("--gamma", gamma, "intensity")->required();
  sampleCmd->add_option("--window", windowFlags, "cx cy w h")
      ->expected(4)
      ->required();
  sampleCmd->add_option("--padding", padding, "margin on all sides");
  sampleCmd->add_option("--seed", seed, "master seed");
  sampleCmd->add_option("--out", outPath, "output cloud file")->required();

  // --- energy --------------------------------------------------------------
  auto* energyCmd = app.add_subcommand("energy", "Evaluate the Dirichlet energy");
  std::string cloudPath, fieldPath;
  std::vector<double> regionFlags;
  double radius = 1.0;
  energyCmd->add_option("--cloud", cloudPath, "cloud file")->required();
  energyCmd->add_option("--field", fieldPath, "field file (id value)")->required();
  energyCmd->add_option("--region", regionFlags, "cx cy w h")
      ->expected(4)
      ->required();
  energyCmd->add_option("--radius", radius, "interaction radius")->required();

  // --- cell ----------------------------------------------------------------
  auto* cellCmd = app.add_subcommand("cell", "Solve one cell problem");
  double cellT = 0.0, cellLambda = 0.0, cellTol = 1e-10;
  std::vector<double> xiFlags;
  std::string cellCloud;
  cellCmd->add_option("--cloud", cellCloud, "cloud file")->required();
  cellCmd->add_option("--T", cellT, "square side")->required();
  cellCmd->add_option("--lambda", cellLambda, "interaction radius")->required();
  cellCmd->add_option("--xi", xiFlags, "direction fx fy")->expected(2)->required();
  cellCmd->add_option("--tol", cellTol, "solver tolerance");

  // --- xi ------------------------------------------------------------------
  auto* xiCmd = app.add_subcommand("xi", "Sweep the normalized cell problem");
  double xiGamma = 1.0, xiLambda = 0.0, xiTol = 1e-10;
  std::vector<double> xiTs, xiDirs;
  std::size_t xiSeeds = 1;
  std::uint64_t xiSeed = 0;
  bool xiLattice = false;
  std::string xiOut;
  xiCmd->add_option("--gamma", xiGamma, "intensity");
  xiCmd->add_option("--lambda", xiLambda, "interaction radius")->required();
  xiCmd->add_option("--T", xiTs, "square sides")->required();
  xiCmd->add_option("--seeds", xiSeeds, "realizations per T")->required();
  xiCmd->add_option("--dirs", xiDirs, "directions, flattened pairs")->required();
  xiCmd->add_option("--seed", xiSeed, "master seed");
  xiCmd->add_option("--tol", xiTol, "solver tolerance");
  xiCmd->add_flag("--lattice", xiLattice, "unit lattice instead of Poisson");
  xiCmd->add_option("--out", xiOut, "CSV path (default stdout)");

  // --- grid ----------------------------------------------------------------
  auto* gridCmd = app.add_subcommand("grid", "Assemble and validate a t-grid");
  std::string gridCloud, gridOut;
  double gridEps = 0.0, gridT = 0.0, gridAlpha = 0.0, gridLambda = 0.0,
         gridUpsilon = 20.0;
  unsigned gridLambdaBlocks = 12;
  gridCmd->add_option("--cloud", gridCloud, "cloud file")->required();
  gridCmd->add_option("--eps", gridEps, "scale")->required();
  gridCmd->add_option("--t", gridT, "mesh size")->required();
  gridCmd->add_option("--alpha", gridAlpha, "regularity parameter")->required();
  gridCmd->add_option("--lambda", gridLambda, "interaction radius")->required();
  gridCmd->add_option("--Lambda", gridLambdaBlocks, "block side multiplier");
  gridCmd->add_option("--upsilon", gridUpsilon, "target uniform bound");
  gridCmd->add_option("--out", gridOut, "JSON path (default stdout)");

  // --- converge ------------------------------------------------------------
  auto* convCmd = app.add_subcommand("converge", "Coarse-grain diagnostics");
  std::string convCloud, convField, convGrid, convRef = "quadratic", convOut;
  double convT = 0.0;
  convCmd->add_option("--cloud", convCloud, "cloud file")->required();
  convCmd->add_option("--field", convField, "field file")->required();
  convCmd->add_option("--grid", convGrid, "grid JSON from the grid subcommand")
      ->required();
  convCmd->add_option("--t", convT, "mesh size")->required();
  convCmd->add_option("--ref", convRef,
                      "reference: constant | linear | quadratic");
  convCmd->add_option("--out", convOut, "CSV path (default stdout)");

  // --- run / report --------------------------------------------------------
  auto* runCmd = app.add_subcommand("run", "Run an experiment config");
  std::string configPath;
  runCmd->add_option("config", configPath, "JSON config")->required();

  auto* reportCmd = app.add_subcommand("report", "Verify an artifact manifest");
  std::string manifestPath;
  reportCmd->add_option("manifest", manifestPath, "manifest.json")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sampleCmd->parsed()) {
      SamplingSpec spec;
      spec.window = windowFromFlags(windowFlags);
      spec.intensity = gamma;
      spec.padding = padding;
      spec.stream = RandomStream(seed);
      writeCloud(samplePoisson(spec), outPath);
      std::cout << "wrote " << outPath << "\n";
    } else if (energyCmd->parsed()) {
      const PointCloud cloud = readCloud(cloudPath);
      const ScalarField field = readField(cloud, fieldPath);
      NeighborIndex index(cloud, radius);
      const double value = dirichletEnergy(
          cloud, index, field, Region(windowFromFlags(regionFlags)), radius);
      std::cout << formatDouble(value) << "\n";
    } else if (cellCmd->parsed()) {
      const PointCloud cloud = readCloud(cellCloud);
      const auto sol =
          solveCellProblem(cloud, Region(Window::square({0, 0}, cellT)),
                           cellLambda, {xiFlags[0], xiFlags[1]}, cellTol);
      json j{{"m", sol.m},
             {"m_normalized",
              sol.m / (cellT * cellT * sol.xi.norm2())},
             {"residual", sol.residual},
             {"iterations", sol.iterations},
             {"converged", sol.converged},
             {"free", sol.freeCount},
             {"clamped", sol.clampedCount},
             {"floating_components", sol.floatingComponents},
             {"wall_seconds", sol.wallSeconds},
             {"rng", RandomStream::kAlgorithm}};
      std::cout << j.dump(2) << "\n";
    } else if (xiCmd->parsed()) {
      if (xiDirs.size() % 2 != 0)
        throw std::runtime_error("--dirs expects an even number of values");
      XiPlan plan;
      plan.Ts = xiTs;
      plan.seeds = xiSeeds;
      for (std::size_t i = 0; i + 1 < xiDirs.size(); i += 2)
        plan.dirs.push_back({xiDirs[i], xiDirs[i + 1]});
      plan.lambda = xiLambda;
      plan.gamma = xiGamma;
      plan.tol = xiTol;
      plan.seed = xiSeed;
      plan.lattice = xiLattice;
      const XiEstimate est = estimateXi(plan);
      std::ostringstream os;
      os << "#schema xi_sweep v1\n";
      os << "T,seed,xi_x,xi_y,m,m_normalized,residual,iters\n";
      for (const XiRow& r : est.rows)
        os << formatDouble(r.T) << ',' << r.seed << ',' << formatDouble(r.xi.x)
           << ',' << formatDouble(r.xi.y) << ',' << formatDouble(r.m) << ','
           << formatDouble(r.normalized) << ',' << formatDouble(r.residual)
           << ',' << r.iterations << "\n";
      emit(os.str(), xiOut);
    } else if (gridCmd->parsed()) {
      const PointCloud cloud = readCloud(gridCloud);
      const GridAssembly res = assembleGrid(cloud, gridEps, gridT, gridAlpha,
                                            gridLambda, gridUpsilon);
      json j{{"ok", res.ok},
             {"Lambda", gridLambdaBlocks},
             {"raw_horizontal", res.rawHorizontal},
             {"raw_vertical", res.rawVertical}};
      if (res.ok) {
        j["grid"] = gridToJson(res.grid, cloud);
        const VoronoiDiagram diagram = voronoiDiagram(cloud, cloud.window);
        const RegularMask mask =
            regularSubcluster(cloud, diagram, gridAlpha, gridLambda, gridEps);
        NeighborIndex index(cloud, 3.0 * gridLambda * gridEps, false);
        const GridValidation v = validateGrid(res.grid, cloud, index, mask);
        json props = json::array();
        for (const PropertyReport& p : v.properties)
          props.push_back(json{{"property", std::string(1, p.property)},
                               {"pass", p.pass},
                               {"witness", p.witness}});
        j["validation"] = props;
        j["all_pass"] = v.allPass();
      } else {
        j["failure"] = res.failure;
        j["details"] = res.details;
      }
      emit(j.dump(2) + "\n", gridOut);
      if (!res.ok) return 2;
    } else if (convCmd->parsed()) {
      const PointCloud cloud = readCloud(convCloud);
      const ScalarField field = readField(cloud, convField);
      std::ifstream gin(convGrid);
      if (!gin) throw std::runtime_error("cannot open " + convGrid);
      json gj;
      gin >> gj;
      if (gj.contains("grid")) gj = gj["grid"];
      const RegularGrid grid = gridFromJson(gj, cloud);
      if (std::abs(grid.t - convT) > 1e-12)
        throw std::runtime_error("--t disagrees with the grid file");
      std::function<double(Vec2)> ref;
      if (convRef == "constant")
        ref = [](Vec2) { return 1.0; };
      else if (convRef == "linear")
        ref = [](Vec2 p) { return p.x + p.y; };
      else if (convRef == "quadratic")
        ref = [](Vec2 p) { return p.x * p.x - p.y; };
      else
        throw std::runtime_error("unknown reference " + convRef);
      const VoronoiDiagram diagram = voronoiDiagram(cloud, cloud.window);
      ConvergenceEntry entry{grid.eps, &field, &grid, &diagram};
      const ConvergenceReport rep = convergenceReport({entry}, ref);
      std::ostringstream os;
      os << "#schema convergence v1\n";
      os << "eps,t,dist_grid,area_grid,dist_simple,empty_squares\n";
      for (const ConvergenceRow& r : rep.rows)
        os << formatDouble(r.eps) << ',' << formatDouble(r.t) << ','
           << formatDouble(r.distGrid) << ',' << formatDouble(r.areaGrid)
           << ',' << formatDouble(r.distSimple) << ',' << r.emptySquares
           << "\n";
      emit(os.str(), convOut);
    } else if (runCmd->parsed()) {
      const ExperimentConfig cfg = ExperimentConfig::load(configPath);
      const Manifest man = runExperiment(cfg);
      std::cout << "wrote " << (std::filesystem::path(cfg.outputDir) /
                                "manifest.json").string()
                << " (" << man.files.size() << " files, "
                << man.failures.size() << " failures)\n";
    } else if (reportCmd->parsed()) {
      const std::string rep = verifyManifest(manifestPath);
      std::cout << rep;
      if (rep.find(", mismatched: 0") == std::string::npos) return 3;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
