#include "hip/store.hpp"

#include "hip/error.hpp"
#include "hip/serialize.hpp"

#include <algorithm>
#include <mutex>
#include <numeric>

namespace hip {

namespace fs = std::filesystem;

std::vector<double> rank_percentiles(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<double> out(n, 100.0);
    if (n <= 1) return out;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double mean_rank = 0.5 * static_cast<double>(i + j);
        const double pct = mean_rank / static_cast<double>(n - 1) * 100.0;
        for (std::size_t k = i; k <= j; ++k) out[order[k]] = pct;
        i = j + 1;
    }
    return out;
}

EndoExoPoint point_for(const VideoRecord& record) {
    if (!record.fit) throw Error(ErrorCode::not_fitted, "video " + record.meta.video_id + " has no fit");
    const FitResult& fit = *record.fit;
    EndoExoPoint p;
    p.video_id = record.meta.video_id;
    p.title = record.meta.title;
    p.author = record.meta.author;
    p.exo_sensitivity = fit.params.mu;
    p.views_total = record.views.total();
    p.shares_total = record.shares.total();
    p.branching_factor = fit.branching_factor;
    p.supercritical = fit.supercritical();
    if (!p.supercritical) {
        try {
            const double a = impulse_response(fit.params).total;
            p.endo_response = a;
            p.viral_potential = viral_potential(fit.params.mu, a);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::divergent_response) throw;
            p.supercritical = true;
        }
    }
    return p;
}

void assign_percentiles(std::vector<EndoExoPoint>& points) {
    std::vector<double> views(points.size());
    std::vector<double> shares(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        views[i] = points[i].views_total;
        shares[i] = points[i].shares_total;
    }
    const auto vp = rank_percentiles(views);
    const auto sp = rank_percentiles(shares);
    for (std::size_t i = 0; i < points.size(); ++i) {
        points[i].views_percentile = vp[i];
        points[i].shares_percentile = sp[i];
    }
}

namespace {

json collections_to_json(const std::vector<Collection>& collections) {
    json arr = json::array();
    for (const auto& c : collections) {
        arr.push_back({{"name", c.name}, {"video_ids", c.video_ids}, {"default", c.is_default}});
    }
    return json{{"collections", arr}};
}

std::vector<Collection> collections_from_json(const json& j) {
    std::vector<Collection> out;
    for (const auto& item : j.at("collections")) {
        Collection c;
        c.name = item.at("name").get<std::string>();
        c.video_ids = item.at("video_ids").get<std::vector<std::string>>();
        c.is_default = item.value("default", false);
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace

Store::Store(fs::path data_dir) : dir_(std::move(data_dir)) {
    fs::create_directories(dir_ / "videos");
    for (const auto& entry : fs::directory_iterator(dir_ / "videos")) {
        if (entry.path().extension() != ".json") continue;
        try {
            auto record = json::parse(read_file(entry.path())).get<VideoRecord>();
            videos_.emplace(record.meta.video_id, std::move(record));
        } catch (const json::exception& e) {
            throw Error(ErrorCode::malformed_input, entry.path().string() + ": " + e.what());
        }
    }
    const auto index = dir_ / "collections.json";
    if (fs::exists(index)) {
        try {
            collections_ = collections_from_json(json::parse(read_file(index)));
        } catch (const json::exception& e) {
            throw Error(ErrorCode::malformed_input, index.string() + ": " + e.what());
        }
    }
}

void Store::put_video(const VideoRecord& record) {
    record.validate();
    std::unique_lock lock(mutex_);
    write_file_atomic(dir_ / "videos" / (record.meta.video_id + ".json"), json(record).dump(2) + "\n");
    videos_[record.meta.video_id] = record;
    std::lock_guard cache_lock(point_cache_mutex_);
    point_cache_.erase(record.meta.video_id);
}

std::optional<VideoRecord> Store::find_video(const std::string& id) const {
    std::shared_lock lock(mutex_);
    const auto it = videos_.find(id);
    if (it == videos_.end()) return std::nullopt;
    return it->second;
}

VideoRecord Store::get_video(const std::string& id) const {
    auto record = find_video(id);
    if (!record) throw Error(ErrorCode::unknown_video, "unknown video " + id);
    return std::move(*record);
}

std::vector<std::string> Store::video_ids() const {
    std::shared_lock lock(mutex_);
    std::vector<std::string> ids;
    for (const auto& [id, _] : videos_) ids.push_back(id);
    return ids;
}

std::vector<Collection> Store::list_collections() const {
    std::shared_lock lock(mutex_);
    return collections_;
}

const Collection& Store::find_collection(const std::string& name) const {
    const auto it = std::find_if(collections_.begin(), collections_.end(),
                                 [&](const Collection& c) { return c.name == name; });
    if (it == collections_.end()) throw Error(ErrorCode::unknown_collection, "unknown collection '" + name + "'");
    return *it;
}

Collection& Store::mutable_collection(const std::string& name) {
    auto& c = const_cast<Collection&>(find_collection(name));
    if (c.is_default) {
        throw Error(ErrorCode::mutate_default_collection, "collection '" + name + "' is read-only");
    }
    return c;
}

Collection Store::get_collection(const std::string& name) const {
    std::shared_lock lock(mutex_);
    return find_collection(name);
}

std::vector<std::string> Store::collections_containing(const std::string& id) const {
    std::shared_lock lock(mutex_);
    std::vector<std::string> names;
    for (const auto& c : collections_) {
        if (std::find(c.video_ids.begin(), c.video_ids.end(), id) != c.video_ids.end()) names.push_back(c.name);
    }
    return names;
}

void Store::persist_collections() const {
    write_file_atomic(dir_ / "collections.json", collections_to_json(collections_).dump(2) + "\n");
}

void Store::create_collection(const std::string& name) {
    if (name.empty()) throw Error(ErrorCode::invalid_argument, "collection name must be non-empty");
    std::unique_lock lock(mutex_);
    for (const auto& c : collections_) {
        if (c.name == name) throw Error(ErrorCode::name_conflict, "collection '" + name + "' already exists");
    }
    collections_.push_back(Collection{name, {}, false});
    persist_collections();
}

void Store::delete_collection(const std::string& name) {
    std::unique_lock lock(mutex_);
    const Collection& target = mutable_collection(name);
    collections_.erase(collections_.begin() + (&target - collections_.data()));
    persist_collections();
}

bool Store::add_video(const std::string& name, const std::string& id) {
    std::unique_lock lock(mutex_);
    Collection& c = mutable_collection(name);
    if (!videos_.contains(id)) throw Error(ErrorCode::unknown_video, "unknown video " + id);
    if (std::find(c.video_ids.begin(), c.video_ids.end(), id) != c.video_ids.end()) return false;
    c.video_ids.push_back(id);
    persist_collections();
    return true;
}

void Store::remove_video(const std::string& name, const std::string& id) {
    std::unique_lock lock(mutex_);
    Collection& c = mutable_collection(name);
    const auto it = std::find(c.video_ids.begin(), c.video_ids.end(), id);
    if (it == c.video_ids.end()) {
        throw Error(ErrorCode::unknown_video, "video " + id + " is not in collection '" + name + "'");
    }
    c.video_ids.erase(it);
    persist_collections();
}

void Store::install_default_collection(const std::string& name, const std::vector<std::string>& ids) {
    std::unique_lock lock(mutex_);
    Collection fresh{name, {}, true};
    for (const auto& id : ids) {
        if (videos_.contains(id) &&
            std::find(fresh.video_ids.begin(), fresh.video_ids.end(), id) == fresh.video_ids.end()) {
            fresh.video_ids.push_back(id);
        }
    }
    const auto it = std::find_if(collections_.begin(), collections_.end(),
                                 [&](const Collection& c) { return c.name == name; });
    if (it != collections_.end()) {
        if (*it == fresh) return;
        *it = std::move(fresh);
    } else {
        collections_.insert(collections_.begin(), std::move(fresh));
    }
    persist_collections();
}

EndoExoPoint Store::cached_point(const VideoRecord& record) const {
    {
        std::lock_guard lock(point_cache_mutex_);
        const auto it = point_cache_.find(record.meta.video_id);
        if (it != point_cache_.end()) return it->second;
    }
    EndoExoPoint p = point_for(record);
    std::lock_guard lock(point_cache_mutex_);
    point_cache_.emplace(record.meta.video_id, p);
    return p;
}

EndoExoMap Store::endo_exo_map(const std::string& name) const {
    std::shared_lock lock(mutex_);
    const Collection& c = find_collection(name);
    EndoExoMap map;
    map.collection = c.name;
    for (const auto& id : c.video_ids) {
        const auto it = videos_.find(id);
        if (it == videos_.end() || !it->second.fit) {
            map.pending.push_back(id);
            continue;
        }
        map.points.push_back(cached_point(it->second));
    }
    assign_percentiles(map.points);
    return map;
}

}  // namespace hip
