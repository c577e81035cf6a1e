#include "homog/experiments.hpp"

#include <array>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <stdexcept>

#include "homog/cell_problem.hpp"
#include "homog/coarse.hpp"
#include "homog/parallel.hpp"
#include "homog/percolation.hpp"
#include "homog/sampling.hpp"

namespace homog {

namespace fs = std::filesystem;
using nlohmann::json;

// --- SHA-256 ---------------------------------------------------------------

namespace {

struct Sha256 {
  std::uint32_t h[8] = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                        0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};
  std::uint64_t length = 0;
  std::array<std::uint8_t, 64> buf{};
  std::size_t fill = 0;

  static std::uint32_t rotr(std::uint32_t x, unsigned n) {
    return (x >> n) | (x << (32 - n));
  }

  void block(const std::uint8_t* p) {
    static const std::uint32_t K[64] = {
        0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1,
        0x923f82a4, 0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3,
        0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786,
        0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
        0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147,
        0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13,
        0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
        0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
        0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a,
        0x5b9cca4f, 0x682e6ff3, 0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208,
        0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2};
    std::uint32_t w[64];
    for (int i = 0; i < 16; ++i)
      w[i] = (std::uint32_t(p[4 * i]) << 24) | (std::uint32_t(p[4 * i + 1]) << 16) |
             (std::uint32_t(p[4 * i + 2]) << 8) | std::uint32_t(p[4 * i + 3]);
    for (int i = 16; i < 64; ++i) {
      const std::uint32_t s0 =
          rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
      const std::uint32_t s1 =
          rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
      w[i] = w[i - 16] + s0 + w[i - 7] + s1;
    }
    std::uint32_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4], f = h[5],
                  g = h[6], hh = h[7];
    for (int i = 0; i < 64; ++i) {
      const std::uint32_t S1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
      const std::uint32_t ch = (e & f) ^ (~e & g);
      const std::uint32_t t1 = hh + S1 + ch + K[i] + w[i];
      const std::uint32_t S0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
      const std::uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
      const std::uint32_t t2 = S0 + maj;
      hh = g;
      g = f;
      f = e;
      e = d + t1;
      d = c;
      c = b;
      b = a;
      a = t1 + t2;
    }
    h[0] += a;
    h[1] += b;
    h[2] += c;
    h[3] += d;
    h[4] += e;
    h[5] += f;
    h[6] += g;
    h[7] += hh;
  }

  void update(const void* data, std::size_t len) {
    const std::uint8_t* p = static_cast<const std::uint8_t*>(data);
    length += len;
    while (len > 0) {
      const std::size_t take = std::min(len, buf.size() - fill);
      std::memcpy(buf.data() + fill, p, take);
      fill += take;
      p += take;
      len -= take;
      if (fill == buf.size()) {
        block(buf.data());
        fill = 0;
      }
    }
  }

  std::string finish() {
    const std::uint64_t bits = length * 8;
    const std::uint8_t one = 0x80;
    update(&one, 1);
    const std::uint8_t zero = 0;
    while (fill != 56) update(&zero, 1);
    std::uint8_t lenb[8];
    for (int i = 0; i < 8; ++i) lenb[i] = std::uint8_t(bits >> (56 - 8 * i));
    update(lenb, 8);
    std::ostringstream os;
    os << std::hex << std::setfill('0');
    for (std::uint32_t v : h) os << std::setw(8) << v;
    return os.str();
  }
};

}  // namespace

std::string sha256Hex(const void* data, std::size_t len) {
  Sha256 s;
  s.update(data, len);
  return s.finish();
}

std::string sha256Hex(const std::string& data) {
  return sha256Hex(data.data(), data.size());
}

std::string sha256File(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("sha256File: cannot open " + path);
  Sha256 s;
  char chunk[65536];
  while (in.read(chunk, sizeof chunk) || in.gcount() > 0)
    s.update(chunk, static_cast<std::size_t>(in.gcount()));
  return s.finish();
}

// --- CSV -------------------------------------------------------------------

void writeCsv(const std::string& path, const std::string& schema,
              const std::vector<std::string>& header,
              const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("writeCsv: cannot open " + path);
  out << "#schema " << schema << " v1\n";
  for (std::size_t i = 0; i < header.size(); ++i)
    out << header[i] << (i + 1 < header.size() ? "," : "");
  out << "\n";
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw std::invalid_argument("writeCsv: row width differs from header");
    for (std::size_t i = 0; i < row.size(); ++i)
      out << row[i] << (i + 1 < row.size() ? "," : "");
    out << "\n";
  }
}

void checkCsvSchema(const std::string& path, const std::string& schema) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("checkCsvSchema: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != "#schema " + schema + " v1")
    throw std::runtime_error("checkCsvSchema: " + path +
                             " does not declare schema '" + schema + " v1'");
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.rfind("#schema", 0) == 0)
      throw std::runtime_error("checkCsvSchema: " + path + " line " +
                               std::to_string(lineno) +
                               ": second schema line (concatenated files?)");
  }
}

// --- config ----------------------------------------------------------------

namespace {

const std::set<std::string> kKinds = {"xi-sweep",          "isotropy",
                                      "lattice-oracle",    "percolation-sweep",
                                      "grid-success",      "convergence"};

void rejectUnknown(const json& j, const std::set<std::string>& allowed,
                   const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw std::invalid_argument("config: unknown field '" + it.key() +
                                  "' in " + where);
}

}  // namespace

ExperimentConfig ExperimentConfig::fromJson(const json& j) {
  rejectUnknown(j, {"kind", "seed", "output_dir", "threads", "params"},
                "top level");
  ExperimentConfig cfg;
  if (!j.contains("kind") || !j["kind"].is_string())
    throw std::invalid_argument("config: missing or non-string field 'kind'");
  cfg.kind = j["kind"].get<std::string>();
  if (!kKinds.count(cfg.kind))
    throw std::invalid_argument("config: unknown experiment kind '" + cfg.kind + "'");
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("output_dir")) cfg.outputDir = j["output_dir"].get<std::string>();
  if (j.contains("threads")) cfg.threads = j["threads"].get<unsigned>();
  if (j.contains("params")) {
    if (!j["params"].is_object())
      throw std::invalid_argument("config: field 'params' must be an object");
    cfg.params = j["params"];
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config: " + path + ": " + e.what());
  }
  return fromJson(j);
}

json ExperimentConfig::toJson() const {
  return json{{"kind", kind},
              {"seed", seed},
              {"output_dir", outputDir},
              {"threads", threads},
              {"params", params}};
}

json Manifest::toJson() const {
  json files_ = json::array();
  for (const ManifestEntry& e : files)
    files_.push_back(json{{"file", e.file}, {"sha256", e.sha256}});
  return json{{"config", config},
              {"rng", rng},
              {"files", files_},
              {"failures", failures}};
}

// --- experiment kinds ------------------------------------------------------

namespace {

std::string fmt(double v) { return formatDouble(v); }

double needNumber(const json& p, const char* key) {
  if (!p.contains(key) || !p[key].is_number())
    throw std::invalid_argument(std::string("config: params missing number '") +
                                key + "'");
  return p[key].get<double>();
}

std::vector<double> needNumberList(const json& p, const char* key) {
  if (!p.contains(key) || !p[key].is_array() || p[key].empty())
    throw std::invalid_argument(
        std::string("config: params missing nonempty array '") + key + "'");
  std::vector<double> out;
  for (const auto& v : p[key]) out.push_back(v.get<double>());
  return out;
}

XiPlan xiPlanFrom(const json& p, std::uint64_t seed, bool lattice) {
  rejectUnknown(p, {"T", "seeds", "dirs", "lambda", "gamma", "tol"}, "params");
  XiPlan plan;
  plan.Ts = needNumberList(p, "T");
  plan.seeds = static_cast<std::size_t>(needNumber(p, "seeds"));
  plan.lambda = needNumber(p, "lambda");
  plan.gamma = p.contains("gamma") ? p["gamma"].get<double>() : 1.0;
  plan.tol = p.contains("tol") ? p["tol"].get<double>() : 1e-10;
  plan.seed = seed;
  plan.lattice = lattice;
  if (!p.contains("dirs"))
    throw std::invalid_argument("config: params missing array 'dirs'");
  for (const auto& d : p["dirs"]) {
    if (!d.is_array() || d.size() != 2)
      throw std::invalid_argument("config: each direction must be [x, y]");
    plan.dirs.push_back({d[0].get<double>(), d[1].get<double>()});
  }
  return plan;
}

std::vector<std::vector<std::string>> xiRowsToCsv(const XiEstimate& est) {
  std::vector<std::vector<std::string>> rows;
  for (const XiRow& r : est.rows)
    rows.push_back({fmt(r.T), std::to_string(r.seed), fmt(r.xi.x), fmt(r.xi.y),
                    fmt(r.m), fmt(r.normalized), fmt(r.residual),
                    std::to_string(r.iterations)});
  return rows;
}

void collectXiFailures(const XiEstimate& est, std::vector<std::string>& out) {
  for (const XiRow& r : est.rows)
    if (!r.ok)
      out.push_back("T=" + fmt(r.T) + " seed=" + std::to_string(r.seed) +
                    ": " + r.error);
}

void runXiSweep(const ExperimentConfig& cfg, const fs::path& dir, Manifest& man) {
  const XiEstimate est = estimateXi(xiPlanFrom(cfg.params, cfg.seed, false));
  writeCsv((dir / "xi_sweep.csv").string(), "xi_sweep",
           {"T", "seed", "xi_x", "xi_y", "m", "m_normalized", "residual",
            "iters"},
           xiRowsToCsv(est));
  std::vector<std::vector<std::string>> agg;
  for (const XiAggregate& a : est.perT)
    agg.push_back({fmt(a.T), std::to_string(a.count), fmt(a.mean),
                   fmt(a.stddev), fmt(a.directionSpread)});
  agg.push_back({"extrapolated", "0", fmt(est.xi), fmt(est.xiUncertainty), "0"});
  writeCsv((dir / "xi_aggregate.csv").string(), "xi_aggregate",
           {"T", "count", "mean", "stddev", "direction_spread"}, agg);
  collectXiFailures(est, man.failures);
  man.files.push_back({"xi_sweep.csv", ""});
  man.files.push_back({"xi_aggregate.csv", ""});
}

void runIsotropy(const ExperimentConfig& cfg, const fs::path& dir, Manifest& man) {
  const XiEstimate est = estimateXi(xiPlanFrom(cfg.params, cfg.seed, false));
  std::vector<std::vector<std::string>> rows;
  for (const XiAggregate& a : est.perT)
    rows.push_back({fmt(a.T), std::to_string(a.count), fmt(a.mean),
                    fmt(a.stddev), fmt(a.directionSpread)});
  writeCsv((dir / "isotropy.csv").string(), "isotropy",
           {"T", "count", "mean", "stddev", "direction_spread"}, rows);
  collectXiFailures(est, man.failures);
  man.files.push_back({"isotropy.csv", ""});
}

void runLatticeOracle(const ExperimentConfig& cfg, const fs::path& dir,
                      Manifest& man) {
  rejectUnknown(cfg.params, {"T", "lambda"}, "params");
  const double T = needNumber(cfg.params, "T");
  const double lambda = needNumber(cfg.params, "lambda");
  XiPlan plan;
  plan.Ts = {T};
  plan.seeds = 1;
  plan.dirs = {{1, 0}};
  plan.lambda = lambda;
  plan.seed = cfg.seed;
  plan.lattice = true;
  const XiEstimate est = estimateXi(plan);
  writeCsv((dir / "lattice_oracle.csv").string(), "lattice_oracle",
           {"T", "lambda", "m", "m_over_T2"},
           {{fmt(T), fmt(lambda), fmt(est.rows[0].m),
             fmt(est.rows[0].normalized)}});
  collectXiFailures(est, man.failures);
  man.files.push_back({"lattice_oracle.csv", ""});
}

void runPercolationSweep(const ExperimentConfig& cfg, const fs::path& dir,
                         Manifest& man) {
  rejectUnknown(cfg.params, {"size", "probs", "fields"}, "params");
  const int size = static_cast<int>(needNumber(cfg.params, "size"));
  const std::vector<double> probs = needNumberList(cfg.params, "probs");
  const std::size_t nFields =
      static_cast<std::size_t>(needNumber(cfg.params, "fields"));
  const RandomStream master(cfg.seed);

  std::vector<std::vector<std::string>> rows(probs.size() * nFields);
  parallelFor(rows.size(), [&](std::size_t k) {
    const std::size_t pi = k / nFields;
    const std::size_t fi = k % nFields;
    const BlockField field =
        bernoulliField(size, size, probs[pi], master.derive(pi).derive(fi));
    const auto crossings =
        findCrossings(field, {0, 0, size, size}, CrossDir::Horizontal,
                      static_cast<std::size_t>(size));
    rows[k] = {fmt(probs[pi]), std::to_string(fi),
               std::to_string(crossings.size())};
  });
  writeCsv((dir / "percolation.csv").string(), "percolation",
           {"p", "field", "crossings"}, rows);
  man.files.push_back({"percolation.csv", ""});
}

PointCloud sampleScaledCloud(double eps, double gamma, double lambda,
                             const RandomStream& stream) {
  SamplingSpec spec;
  spec.window = Window::square({0, 0}, 1.0);
  spec.intensity = gamma / (eps * eps);  // eps-scaled cloud of intensity gamma
  spec.padding = 3.0 * lambda * eps;
  spec.stream = stream;
  return samplePoisson(spec);
}

void runGridSuccess(const ExperimentConfig& cfg, const fs::path& dir,
                    Manifest& man) {
  rejectUnknown(cfg.params,
                {"alpha", "lambda", "eps", "t", "gamma", "seeds", "upsilon"},
                "params");
  const double alpha = needNumber(cfg.params, "alpha");
  const double lambda = needNumber(cfg.params, "lambda");
  const double eps = needNumber(cfg.params, "eps");
  const double t = needNumber(cfg.params, "t");
  const double gamma =
      cfg.params.contains("gamma") ? cfg.params["gamma"].get<double>() : 1.0;
  const double upsilon =
      cfg.params.contains("upsilon") ? cfg.params["upsilon"].get<double>() : 20.0;
  const std::size_t seeds =
      static_cast<std::size_t>(needNumber(cfg.params, "seeds"));

  const RandomStream master(cfg.seed);
  std::vector<std::vector<std::string>> rows(seeds);
  std::vector<std::string> failures(seeds);
  parallelFor(seeds, [&](std::size_t s) {
    const PointCloud cloud =
        sampleScaledCloud(eps, gamma, lambda, master.derive(s));
    const GridAssembly res =
        assembleGrid(cloud, eps, t, alpha, lambda, upsilon);
    bool valid = false;
    if (res.ok) {
      const VoronoiDiagram diagram = voronoiDiagram(cloud, cloud.window);
      const RegularMask mask =
          regularSubcluster(cloud, diagram, alpha, lambda, eps);
      NeighborIndex index(cloud, 3.0 * lambda * eps, false);
      valid = validateGrid(res.grid, cloud, index, mask).allPass();
    } else {
      failures[s] = "seed " + std::to_string(s) + ": " + res.failure;
    }
    rows[s] = {std::to_string(s), res.ok ? "1" : "0", valid ? "1" : "0",
               std::to_string(res.ok ? res.grid.M : 0),
               res.ok ? std::string() : res.failure};
  });
  for (const std::string& f : failures)
    if (!f.empty()) man.failures.push_back(f);
  writeCsv((dir / "grid_success.csv").string(), "grid_success",
           {"seed", "assembled", "validated", "M", "failure"}, rows);
  man.files.push_back({"grid_success.csv", ""});
}

void runConvergence(const ExperimentConfig& cfg, const fs::path& dir,
                    Manifest& man) {
  rejectUnknown(cfg.params,
                {"eps", "t", "alpha", "lambda", "gamma", "upsilon", "ref"},
                "params");
  const std::vector<double> epss = needNumberList(cfg.params, "eps");
  const double t = needNumber(cfg.params, "t");
  const double alpha = needNumber(cfg.params, "alpha");
  const double lambda = needNumber(cfg.params, "lambda");
  const double gamma =
      cfg.params.contains("gamma") ? cfg.params["gamma"].get<double>() : 1.0;
  const double upsilon =
      cfg.params.contains("upsilon") ? cfg.params["upsilon"].get<double>() : 20.0;
  const std::string refName =
      cfg.params.contains("ref") ? cfg.params["ref"].get<std::string>()
                                 : std::string("quadratic");
  std::function<double(Vec2)> ref;
  if (refName == "constant")
    ref = [](Vec2) { return 1.0; };
  else if (refName == "linear")
    ref = [](Vec2 p) { return p.x + p.y; };
  else if (refName == "quadratic")
    ref = [](Vec2 p) { return p.x * p.x - p.y; };
  else
    throw std::invalid_argument("config: unknown reference '" + refName + "'");

  const RandomStream master(cfg.seed);
  std::vector<std::vector<std::string>> rows;
  for (std::size_t ei = 0; ei < epss.size(); ++ei) {
    const double eps = epss[ei];
    const PointCloud cloud =
        sampleScaledCloud(eps, gamma, lambda, master.derive(ei));
    const ScalarField u = ScalarField::sample(cloud, ref);
    const GridAssembly res = assembleGrid(cloud, eps, t, alpha, lambda, upsilon);
    if (!res.ok) {
      man.failures.push_back("eps=" + fmt(eps) + ": " + res.failure);
      rows.push_back({fmt(eps), fmt(t), "nan", "nan", "nan", "0"});
      continue;
    }
    const VoronoiDiagram diagram = voronoiDiagram(cloud, cloud.window);
    ConvergenceEntry entry{eps, &u, &res.grid, &diagram};
    const ConvergenceReport rep = convergenceReport({entry}, ref);
    const ConvergenceRow& r = rep.rows[0];
    rows.push_back({fmt(r.eps), fmt(r.t), fmt(r.distGrid), fmt(r.areaGrid),
                    fmt(r.distSimple), std::to_string(r.emptySquares)});
  }
  writeCsv((dir / "convergence.csv").string(), "convergence",
           {"eps", "t", "dist_grid", "area_grid", "dist_simple",
            "empty_squares"},
           rows);
  man.files.push_back({"convergence.csv", ""});
}

struct ThreadCapGuard {
  std::string previous;
  bool hadPrevious = false;
  bool active = false;

  explicit ThreadCapGuard(unsigned threads) {
    if (threads == 0) return;
    if (const char* env = std::getenv("HOMOG_THREADS")) {
      previous = env;
      hadPrevious = true;
    }
    setenv("HOMOG_THREADS", std::to_string(threads).c_str(), 1);
    active = true;
  }
  ~ThreadCapGuard() {
    if (!active) return;
    if (hadPrevious)
      setenv("HOMOG_THREADS", previous.c_str(), 1);
    else
      unsetenv("HOMOG_THREADS");
  }
};

}  // namespace

Manifest runExperiment(const ExperimentConfig& cfg) {
  const fs::path dir(cfg.outputDir);
  fs::create_directories(dir);
  ThreadCapGuard cap(cfg.threads);

  Manifest man;
  man.config = cfg.toJson();
  man.rng = RandomStream::kAlgorithm;

  if (cfg.kind == "xi-sweep")
    runXiSweep(cfg, dir, man);
  else if (cfg.kind == "isotropy")
    runIsotropy(cfg, dir, man);
  else if (cfg.kind == "lattice-oracle")
    runLatticeOracle(cfg, dir, man);
  else if (cfg.kind == "percolation-sweep")
    runPercolationSweep(cfg, dir, man);
  else if (cfg.kind == "grid-success")
    runGridSuccess(cfg, dir, man);
  else if (cfg.kind == "convergence")
    runConvergence(cfg, dir, man);
  else
    throw std::invalid_argument("runExperiment: unknown kind " + cfg.kind);

  for (ManifestEntry& e : man.files)
    e.sha256 = sha256File((dir / e.file).string());
  std::ofstream out(dir / "manifest.json", std::ios::binary);
  out << man.toJson().dump(2) << "\n";
  return man;
}

std::string verifyManifest(const std::string& manifestPath) {
  std::ifstream in(manifestPath);
  if (!in) throw std::runtime_error("verifyManifest: cannot open " + manifestPath);
  json j;
  in >> j;
  const fs::path dir = fs::path(manifestPath).parent_path();
  std::ostringstream os;
  os << "kind: " << j["config"]["kind"].get<std::string>() << "\n";
  os << "rng: " << j["rng"].get<std::string>() << "\n";
  std::size_t okCount = 0, badCount = 0;
  for (const auto& f : j["files"]) {
    const std::string rel = f["file"].get<std::string>();
    const std::string expect = f["sha256"].get<std::string>();
    std::string got;
    try {
      got = sha256File((dir / rel).string());
    } catch (const std::exception&) {
      got = "<missing>";
    }
    const bool ok = got == expect;
    ok ? ++okCount : ++badCount;
    os << (ok ? "ok   " : "FAIL ") << rel << "\n";
  }
  os << "failures recorded: " << j["failures"].size() << "\n";
  os << "verified: " << okCount << ", mismatched: " << badCount << "\n";
  return os.str();
}

}  // namespace homog
