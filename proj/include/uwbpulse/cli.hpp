#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace uwbpulse::cli {

using json = nlohmann::json;

inline constexpr int kManifestSchema = 1;

// Defaults for every key a command understands; unknown keys are rejected.
json default_config(const std::string& command);
// Reads a config file or, when it holds a manifest, the manifest's "config".
json load_config(const std::filesystem::path& path, const std::string& command);
json merge_config(const std::string& command, const json& base, const json& overrides);

struct Artifacts {
  std::vector<std::filesystem::path> outputs;
  std::vector<std::filesystem::path> inputs;
  json report;
};

Artifacts cmd_design(const json& cfg);
Artifacts cmd_orthogonalize(const json& cfg);
Artifacts cmd_analyze(const json& cfg);
Artifacts cmd_simulate(const json& cfg);
Artifacts cmd_sweep(const json& cfg);

Artifacts run_command(const std::string& command, const json& cfg);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);
// manifest.json in cfg["out"]; stable key order and no timestamps.
std::filesystem::path write_manifest(const std::string& command, const json& cfg, const Artifacts& art);

// Exit codes: 0 ok, 2 unusable configuration (infeasible, unstable, bad input values), 1 otherwise.
int main(int argc, char** argv);

}  // namespace uwbpulse::cli
