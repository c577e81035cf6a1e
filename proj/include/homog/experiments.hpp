#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace homog {

// SHA-256 of a byte string / file, lowercase hex.
std::string sha256Hex(const void* data, std::size_t len);
std::string sha256Hex(const std::string& data);
std::string sha256File(const std::string& path);

// Versioned CSV: first line `#schema <name> v1`, then a header row, then data
// rows, `\n` endings throughout.
void writeCsv(const std::string& path, const std::string& schema,
              const std::vector<std::string>& header,
              const std::vector<std::vector<std::string>>& rows);

// Check the schema line of an existing CSV; throws on mismatch (or when a
// second schema line appears mid-file, i.e. concatenated outputs).
void checkCsvSchema(const std::string& path, const std::string& schema);

struct ExperimentConfig {
  std::string kind;  // xi-sweep | isotropy | lattice-oracle |
                     // percolation-sweep | grid-success | convergence
  std::uint64_t seed = 0;
  std::string outputDir = ".";
  unsigned threads = 0;  // 0 = hardware default
  nlohmann::json params = nlohmann::json::object();

  static ExperimentConfig fromJson(const nlohmann::json& j);
  static ExperimentConfig load(const std::string& path);
  nlohmann::json toJson() const;
};

struct ManifestEntry {
  std::string file;    // relative to the output directory
  std::string sha256;
};

struct Manifest {
  nlohmann::json config;  // effective config, echoed
  std::string rng;        // random stream algorithm tag
  std::vector<ManifestEntry> files;
  std::vector<std::string> failures;  // per-row failure notes

  nlohmann::json toJson() const;
};

// Run one experiment; outputs land in config.outputDir, the manifest is also
// written there as manifest.json. Deterministic for a fixed seed regardless
// of the parallelism degree. Per-row solver failures become recorded rows.
Manifest runExperiment(const ExperimentConfig& config);

// Load a manifest and re-hash the listed files; returns a human-readable
// verification report and throws on a missing manifest.
std::string verifyManifest(const std::string& manifestPath);

}  // namespace homog
