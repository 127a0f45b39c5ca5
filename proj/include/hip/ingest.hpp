#pragma once

// Getting videos into the system: ID parsing, CSV import/export, eligibility
// checks, and the pluggable remote statistics source with retry and cache.

#include "hip/core.hpp"
#include "hip/fit.hpp"

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hip {

struct VideoMetadata {
    std::string video_id;
    std::string title;
    std::string author;
    std::string category;
    std::string upload_date;  // YYYY-MM-DD

    friend bool operator==(const VideoMetadata&, const VideoMetadata&) = default;
};

struct VideoRecord {
    VideoMetadata meta;
    DailySeries views;
    DailySeries shares;               // the exogenous series, whatever its source
    std::string exo_source = "shares";  // label: shares, tweets, promotions, ...
    std::optional<FitResult> fit;

    [[nodiscard]] std::size_t days() const noexcept { return views.size(); }
    /// Throws series-mismatch / empty-series / invalid-id when the record is inconsistent.
    void validate() const;

    friend bool operator==(const VideoRecord&, const VideoRecord&) = default;
};

/// True for an 11-character platform token of [A-Za-z0-9_-].
[[nodiscard]] bool is_video_id(std::string_view text) noexcept;

/// Accepts a bare ID or a watch / short / embed URL. Throws invalid-id.
[[nodiscard]] std::string parse_video_id(std::string_view input);

/// Parses `day,views,shares` CSV text. Days must run 0, 1, 2, ... without gaps.
[[nodiscard]] VideoRecord parse_series_csv(std::string_view text, VideoMetadata meta);

/// Reads `file` plus an optional sidecar `<stem>.json` with metadata. The
/// video ID falls back to the file stem when the sidecar is missing.
[[nodiscard]] VideoRecord import_series(const std::filesystem::path& file);

[[nodiscard]] std::string export_series_csv(const VideoRecord& record);
[[nodiscard]] std::string export_metadata_json(const VideoMetadata& meta);

/// Throws too-short(actual, required) unless the record has total_days of data.
void validate_for_fit(const VideoRecord& record, std::size_t total_days = 120);

/// Shortest decimal text that parses back to the same double.
[[nodiscard]] std::string format_number(double value);

class InsightSource {
public:
    virtual ~InsightSource() = default;
    /// Errors: not-found, stats-unavailable, fetch-failed (retryable).
    [[nodiscard]] virtual VideoRecord fetch(const std::string& video_id) = 0;
};

/// Offline source: looks up `<dir>/<id>.csv` (+ sidecar) in each directory in turn.
class FixtureSource final : public InsightSource {
public:
    explicit FixtureSource(std::vector<std::filesystem::path> dirs);
    [[nodiscard]] VideoRecord fetch(const std::string& video_id) override;

private:
    std::vector<std::filesystem::path> dirs_;
};

struct RemoteConfig {
    std::string base_url;  // e.g. http://insight.example:8000/api
    std::string api_key;
    std::chrono::seconds timeout{30};
    std::filesystem::path cache_dir;
};

/// GET {base_url}/videos/{id}/insights with an X-Api-Key header.
/// 200 -> record JSON, 404 -> not-found, 403 -> stats-unavailable,
/// anything else (including transport errors) -> fetch-failed.
class HttpInsightSource final : public InsightSource {
public:
    explicit HttpInsightSource(RemoteConfig config);
    [[nodiscard]] VideoRecord fetch(const std::string& video_id) override;

private:
    RemoteConfig config_;
};

struct RetryPolicy {
    int attempts = 3;
    std::chrono::milliseconds initial_backoff{500};
    std::function<void(std::chrono::milliseconds)> sleep;  // defaults to this_thread::sleep_for
};

/// Wraps a source with ID validation, per-ID serialization, exponential
/// backoff on fetch-failed, and an on-disk cache keyed by (id, fetch date).
class VideoFetcher {
public:
    VideoFetcher(std::shared_ptr<InsightSource> source, std::filesystem::path cache_dir = {},
                 RetryPolicy retry = {}, std::function<std::string()> today = {});

    [[nodiscard]] VideoRecord fetch(std::string_view id_or_url);

private:
    std::shared_ptr<std::mutex> lock_for(const std::string& id);

    std::shared_ptr<InsightSource> source_;
    std::filesystem::path cache_dir_;
    RetryPolicy retry_;
    std::function<std::string()> today_;
    std::mutex locks_mutex_;
    std::map<std::string, std::shared_ptr<std::mutex>> locks_;
};

/// Writes `contents` to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
[[nodiscard]] std::string read_file(const std::filesystem::path& path);

}  // namespace hip
