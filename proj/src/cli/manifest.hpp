#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace rscavity::cli {

inline constexpr const char* kToolVersion = "0.1.0";

/// Provenance of one command run. Everything here is a function of the
/// command line; wall time lives only in the sidecar written next to --out.
struct RunManifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> parameters;  // sorted by name
  std::uint64_t seed = 0;
  bool has_seed = false;
  std::string version = kToolVersion;
  std::string digest;  // FNV-1a of the data body, 16 hex digits

  nlohmann::json to_json() const;
  /// "# key: value" lines closing a CSV file.
  std::string csv_block() const;
};

std::string fnv_digest(const std::string& data);

/// Body followed by the manifest comment block; sets manifest.digest.
std::string finish_csv(const std::string& body, RunManifest& manifest);

/// Body with a "manifest" member; the digest covers the body dumped without it.
std::string finish_json(nlohmann::json body, RunManifest& manifest);

/// Writes `<path>.manifest.json` holding the manifest plus wall time.
void write_sidecar(const std::string& path, const RunManifest& manifest, double wall_seconds);

}  // namespace rscavity::cli
