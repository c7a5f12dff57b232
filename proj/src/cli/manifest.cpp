#include "cli/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "rscavity/error.hpp"
#include "rscavity/rng.hpp"

namespace rscavity::cli {

std::string fnv_digest(const std::string& data) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(stream_tag(data)));
  return buf;
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json params = nlohmann::json::object();
  for (const auto& [k, v] : parameters) params[k] = v;
  nlohmann::json j = {{"command", command}, {"parameters", params}, {"version", version}, {"digest", digest}};
  if (has_seed) j["seed"] = seed;
  return j;
}

std::string RunManifest::csv_block() const {
  std::ostringstream os;
  os << "# manifest\n";
  os << "# command: " << command << '\n';
  for (const auto& [k, v] : parameters) os << "# param " << k << ": " << v << '\n';
  if (has_seed) os << "# seed: " << seed << '\n';
  os << "# version: " << version << '\n';
  os << "# digest: " << digest << '\n';
  return os.str();
}

std::string finish_csv(const std::string& body, RunManifest& manifest) {
  manifest.digest = fnv_digest(body);
  return body + manifest.csv_block();
}

std::string finish_json(nlohmann::json body, RunManifest& manifest) {
  manifest.digest = fnv_digest(body.dump());
  body["manifest"] = manifest.to_json();
  return body.dump(2) + "\n";
}

void write_sidecar(const std::string& path, const RunManifest& manifest, double wall_seconds) {
  nlohmann::json j = manifest.to_json();
  j["wall_seconds"] = wall_seconds;
  std::ofstream out(path + ".manifest.json");
  if (!out) throw InputError("cannot write " + path + ".manifest.json");
  out << j.dump(2) << '\n';
}

}  // namespace rscavity::cli
