#include "hip/config.hpp"

#include "hip/error.hpp"
#include "hip/serialize.hpp"

#include <charconv>
#include <cstdlib>

namespace hip {

namespace fs = std::filesystem;

std::optional<std::string> system_env(const std::string& name) {
    if (const char* v = std::getenv(name.c_str())) return std::string(v);
    return std::nullopt;
}

namespace {

long long parse_int(const std::string& name, const std::string& text) {
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw Error(ErrorCode::invalid_argument, name + " must be an integer, got '" + text + "'");
    }
    return v;
}

std::vector<fs::path> split_paths(const std::string& text) {
    std::vector<fs::path> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto pos = std::min(text.find(':', start), text.size());
        if (pos > start) out.emplace_back(text.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

}  // namespace

ServiceConfig load_config(const std::optional<fs::path>& file, const EnvLookup& env) {
    ServiceConfig cfg;
    if (file) {
        json j;
        try {
            j = json::parse(read_file(*file));
        } catch (const json::exception& e) {
            throw Error(ErrorCode::malformed_input, file->string() + ": " + e.what());
        }
        const fs::path base = file->parent_path();
        const auto path_of = [&](const std::string& key) { return base / j.at(key).get<std::string>(); };
        try {
            cfg.host = j.value("host", cfg.host);
            cfg.port = j.value("port", cfg.port);
            cfg.workers = j.value("workers", cfg.workers);
            if (j.contains("data_dir")) cfg.data_dir = path_of("data_dir");
            if (j.contains("demo_manifest")) cfg.demo_manifest = path_of("demo_manifest");
            if (j.contains("static_dir")) cfg.static_dir = path_of("static_dir");
            if (j.contains("cache_dir")) cfg.remote.cache_dir = path_of("cache_dir");
            for (const auto& d : j.value("fixture_dirs", std::vector<std::string>{})) {
                cfg.fixture_dirs.push_back(base / d);
            }
            if (j.contains("remote")) {
                const auto& r = j.at("remote");
                cfg.remote.base_url = r.value("base_url", "");
                cfg.remote.api_key = r.value("api_key", "");
                cfg.remote.timeout = std::chrono::seconds(r.value("timeout_seconds", 30));
            }
            if (j.contains("fit")) {
                const auto& f = j.at("fit");
                cfg.fit.train_days = f.value("train_days", cfg.fit.train_days);
                cfg.fit.total_days = f.value("total_days", cfg.fit.total_days);
                cfg.fit.seed = f.value("seed", cfg.fit.seed);
            }
        } catch (const json::exception& e) {
            throw Error(ErrorCode::malformed_input, file->string() + ": " + e.what());
        }
    }

    if (auto v = env("HIP_HOST")) cfg.host = *v;
    if (auto v = env("HIP_PORT")) cfg.port = static_cast<int>(parse_int("HIP_PORT", *v));
    if (auto v = env("HIP_DATA_DIR")) cfg.data_dir = *v;
    if (auto v = env("HIP_WORKERS")) cfg.workers = static_cast<int>(parse_int("HIP_WORKERS", *v));
    if (auto v = env("HIP_REMOTE_URL")) cfg.remote.base_url = *v;
    if (auto v = env("HIP_API_KEY")) cfg.remote.api_key = *v;
    if (auto v = env("HIP_TIMEOUT")) cfg.remote.timeout = std::chrono::seconds(parse_int("HIP_TIMEOUT", *v));
    if (auto v = env("HIP_CACHE_DIR")) cfg.remote.cache_dir = *v;
    if (auto v = env("HIP_FIXTURES")) cfg.fixture_dirs = split_paths(*v);
    if (auto v = env("HIP_DEMO_MANIFEST")) cfg.demo_manifest = *v;
    if (auto v = env("HIP_STATIC_DIR")) cfg.static_dir = *v;
    if (auto v = env("HIP_SEED")) cfg.fit.seed = static_cast<std::uint64_t>(parse_int("HIP_SEED", *v));

    if (cfg.port < 0 || cfg.port > 65535) {
        throw Error(ErrorCode::invalid_argument, "port out of range", {{"port", static_cast<double>(cfg.port)}});
    }
    if (cfg.workers < 1) {
        throw Error(ErrorCode::invalid_argument, "at least one worker is required",
                    {{"workers", static_cast<double>(cfg.workers)}});
    }
    cfg.fit.validate();
    return cfg;
}

}  // namespace hip
