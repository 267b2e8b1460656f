#ifndef LEXICA_MANIFEST_HPP
#define LEXICA_MANIFEST_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lexica {

inline constexpr std::string_view kToolVersion = "0.1.0";

// Written next to every artifact a subcommand produces. Two runs with the same
// inputs differ only in the timestamp fields.
struct RunManifest {
  std::string command_line;
  std::map<std::string, std::string> input_hashes;   // path -> fnv1a64
  std::map<std::string, std::string> config_hashes;  // path -> fnv1a64
  std::optional<std::uint64_t> seed;
  std::string version = std::string(kToolVersion);
  std::string started_at;   // ISO-8601 UTC
  std::string finished_at;

  void add_input(const std::filesystem::path& path);
  void add_config(const std::filesystem::path& path);

  // writes <artifact>.manifest.json
  void write(const std::filesystem::path& artifact) const;
};

std::string iso8601_utc_now();

}  // namespace lexica

#endif  // LEXICA_MANIFEST_HPP
