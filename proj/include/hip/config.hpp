#pragma once

#include "hip/fit.hpp"
#include "hip/ingest.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hip {

struct ServiceConfig {
    std::string host = "0.0.0.0";
    int port = 8080;
    std::filesystem::path data_dir = "data";
    int workers = 2;
    RemoteConfig remote;  // remote.base_url empty -> fixture source
    std::vector<std::filesystem::path> fixture_dirs;
    std::filesystem::path demo_manifest;  // empty -> no seeded collection
    std::filesystem::path static_dir;     // empty -> no static mount
    FitConfig fit;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// Process environment.
[[nodiscard]] std::optional<std::string> system_env(const std::string& name);

/// Defaults, then the JSON file (if given), then HIP_* environment
/// variables: HIP_HOST, HIP_PORT, HIP_DATA_DIR, HIP_WORKERS, HIP_REMOTE_URL,
/// HIP_API_KEY, HIP_TIMEOUT (seconds), HIP_CACHE_DIR, HIP_FIXTURES
/// (colon-separated), HIP_DEMO_MANIFEST, HIP_STATIC_DIR, HIP_SEED.
/// Relative paths in the file resolve against the file's directory.
[[nodiscard]] ServiceConfig load_config(const std::optional<std::filesystem::path>& file,
                                        const EnvLookup& env = system_env);

}  // namespace hip
