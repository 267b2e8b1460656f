#include "lexica/manifest.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>

#include <json.hpp>

#include "lexica/util.hpp"

namespace lexica {

std::string iso8601_utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void RunManifest::add_input(const std::filesystem::path& path) {
  input_hashes[path.string()] = hash_file_hex(path);
}

void RunManifest::add_config(const std::filesystem::path& path) {
  config_hashes[path.string()] = hash_file_hex(path);
}

void RunManifest::write(const std::filesystem::path& artifact) const {
  nlohmann::json obj;
  obj["command_line"] = command_line;
  obj["version"] = version;
  obj["input_hashes"] = input_hashes;
  obj["config_hashes"] = config_hashes;
  if (seed) obj["seed"] = *seed;
  obj["started_at"] = started_at;
  obj["finished_at"] = finished_at;
  write_file(artifact.string() + ".manifest.json", obj.dump(2) + "\n");
}

}  // namespace lexica
