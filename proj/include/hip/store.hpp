#pragma once

// File-backed persistence for video records and collections, plus the
// collection-relative endo-exo map.
//
// Layout under the data directory:
//   videos/<id>.json   one VideoRecord (metadata, series, fit)
//   collections.json   ordered list of collections
// Every write replaces the target file atomically. Mutations are serialized
// by a writer lock; readers share a lock and see a consistent snapshot.

#include "hip/ingest.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

namespace hip {

struct Collection {
    std::string name;
    std::vector<std::string> video_ids;  // insertion order, no duplicates
    bool is_default = false;

    friend bool operator==(const Collection&, const Collection&) = default;
};

struct EndoExoPoint {
    std::string video_id;
    std::string title;
    std::string author;
    double exo_sensitivity = 0.0;           // mu
    std::optional<double> endo_response;    // A; empty when supercritical
    std::optional<double> viral_potential;  // mu * A
    double views_total = 0.0;
    double shares_total = 0.0;
    double views_percentile = 0.0;
    double shares_percentile = 0.0;
    bool supercritical = false;
    double branching_factor = 0.0;
};

struct EndoExoMap {
    std::string collection;
    std::vector<EndoExoPoint> points;
    std::vector<std::string> pending;  // members without a fit
};

/// Percentile of each value within the sample: mean rank / (N - 1) * 100,
/// ranks 0-based, ties share their mean rank. A single value maps to 100.
[[nodiscard]] std::vector<double> rank_percentiles(std::span<const double> values);

/// Map point for a fitted record, percentiles left at zero. Throws not-fitted.
[[nodiscard]] EndoExoPoint point_for(const VideoRecord& record);

/// Fills views_percentile and shares_percentile relative to `points`.
void assign_percentiles(std::vector<EndoExoPoint>& points);

class Store {
public:
    explicit Store(std::filesystem::path data_dir);

    [[nodiscard]] const std::filesystem::path& data_dir() const noexcept { return dir_; }

    /// Inserts or replaces a record.
    void put_video(const VideoRecord& record);
    [[nodiscard]] std::optional<VideoRecord> find_video(const std::string& id) const;
    /// Throws unknown-video.
    [[nodiscard]] VideoRecord get_video(const std::string& id) const;
    [[nodiscard]] std::vector<std::string> video_ids() const;

    [[nodiscard]] std::vector<Collection> list_collections() const;
    /// Throws unknown-collection.
    [[nodiscard]] Collection get_collection(const std::string& name) const;
    [[nodiscard]] std::vector<std::string> collections_containing(const std::string& id) const;

    /// Throws invalid-argument (empty name) or name-conflict.
    void create_collection(const std::string& name);
    void delete_collection(const std::string& name);
    /// Returns false when the video is already a member (no change).
    bool add_video(const std::string& name, const std::string& id);
    void remove_video(const std::string& name, const std::string& id);

    /// Creates or overwrites a read-only collection. Unknown IDs are skipped.
    void install_default_collection(const std::string& name, const std::vector<std::string>& ids);

    [[nodiscard]] EndoExoMap endo_exo_map(const std::string& name) const;

private:
    Collection& mutable_collection(const std::string& name);
    const Collection& find_collection(const std::string& name) const;
    void persist_collections() const;
    EndoExoPoint cached_point(const VideoRecord& record) const;

    std::filesystem::path dir_;
    mutable std::shared_mutex mutex_;
    std::map<std::string, VideoRecord> videos_;
    std::vector<Collection> collections_;

    mutable std::mutex point_cache_mutex_;
    mutable std::map<std::string, EndoExoPoint> point_cache_;
};

}  // namespace hip
