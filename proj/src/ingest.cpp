#include "hip/ingest.hpp"

#include "hip/error.hpp"
#include "hip/serialize.hpp"

#include <httplib.h>

#include <atomic>
#include <charconv>
#include <ctime>
#include <fstream>
#include <regex>
#include <sstream>
#include <thread>
#include <unistd.h>

namespace hip {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(sep, start);
        out.push_back(trim(line.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

bool parse_double(std::string_view text, double& out) {
    if (text.empty()) return false;
    if (text.front() == '+') text.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc() && ptr == text.data() + text.size();
}

bool parse_day(std::string_view text, long long& out) {
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc() && ptr == text.data() + text.size();
}

std::string utc_today() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[16];
    std::strftime(buf, sizeof buf, "%Y-%m-%d", &tm);
    return buf;
}

VideoRecord record_from_payload(const json& body, const std::string& requested_id) {
    VideoRecord record;
    record.meta = body.get<VideoMetadata>();
    if (record.meta.video_id.empty()) record.meta.video_id = requested_id;
    record.exo_source = body.value("exo_source", "shares");
    const auto views = body.at("views").get<std::vector<double>>();
    const auto shares = body.at("shares").get<std::vector<double>>();
    if (views.size() != shares.size()) {
        // Trailing days missing from one series are rejected, never zero-filled.
        throw Error(ErrorCode::series_mismatch, "views and shares cover different numbers of days",
                    {{"views", static_cast<double>(views.size())},
                     {"shares", static_cast<double>(shares.size())}});
    }
    record.views = DailySeries(views, SeriesKind::views);
    record.shares = DailySeries(shares, SeriesKind::shares);
    record.validate();
    return record;
}

}  // namespace

void VideoRecord::validate() const {
    if (!is_video_id(meta.video_id)) {
        throw Error(ErrorCode::invalid_id, "'" + meta.video_id + "' is not a valid video ID");
    }
    if (views.empty()) throw Error(ErrorCode::empty_series, "video has no daily data");
    if (views.size() != shares.size()) {
        throw Error(ErrorCode::series_mismatch, "views and shares cover different numbers of days",
                    {{"views", static_cast<double>(views.size())},
                     {"shares", static_cast<double>(shares.size())}});
    }
}

bool is_video_id(std::string_view text) noexcept {
    if (text.size() != 11) return false;
    for (char ch : text) {
        const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') ||
                        ch == '_' || ch == '-';
        if (!ok) return false;
    }
    return true;
}

std::string parse_video_id(std::string_view input) {
    const std::string text(trim(input));
    if (is_video_id(text)) return text;
    static const std::regex url(
        R"(^(?:https?://)?(?:www\.|m\.|music\.)?(?:youtube\.com/(?:watch\?(?:[^#]*&)?v=|embed/|shorts/|live/|v/)|youtu\.be/)([A-Za-z0-9_-]{11})(?:[?&#/].*)?$)",
        std::regex::icase);
    std::smatch match;
    if (std::regex_match(text, match, url)) return match[1].str();
    throw Error(ErrorCode::invalid_id, "'" + text + "' is neither a video ID nor a recognised video URL");
}

VideoRecord parse_series_csv(std::string_view text, VideoMetadata meta) {
    if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
    std::vector<double> views;
    std::vector<double> shares;
    bool header_seen = false;
    std::size_t row = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = std::min(text.find('\n', pos), text.size());
        const auto line = trim(text.substr(pos, end - pos));
        pos = end + 1;
        if (line.empty()) continue;
        if (!header_seen) {
            const auto cols = split(line, ',');
            if (cols.size() != 3 || cols[0] != "day" || cols[1] != "views" || cols[2] != "shares") {
                throw Error(ErrorCode::malformed_input, "CSV header must be 'day,views,shares'");
            }
            header_seen = true;
            continue;
        }
        ++row;
        const auto cols = split(line, ',');
        long long day = 0;
        double v = 0.0;
        double s = 0.0;
        if (cols.size() != 3 || !parse_day(cols[0], day) || !parse_double(cols[1], v) ||
            !parse_double(cols[2], s)) {
            throw Error(ErrorCode::malformed_input, "cannot parse CSV row " + std::to_string(row),
                        {{"row", static_cast<double>(row)}});
        }
        const auto expected = static_cast<long long>(views.size());
        if (day != expected) {
            if (day > expected) {
                throw Error(ErrorCode::gapped_series, "day " + std::to_string(expected) + " is missing",
                            {{"day", static_cast<double>(expected)}});
            }
            throw Error(ErrorCode::malformed_input, "days must be consecutive from 0 (row " +
                                                        std::to_string(row) + ")",
                        {{"row", static_cast<double>(row)}});
        }
        if (!std::isfinite(v) || !std::isfinite(s) || v < 0.0 || s < 0.0) {
            throw Error(ErrorCode::invalid_value,
                        "row " + std::to_string(row) + " has a negative or non-finite value",
                        {{"row", static_cast<double>(row)}});
        }
        views.push_back(v);
        shares.push_back(s);
    }
    if (!header_seen) throw Error(ErrorCode::malformed_input, "CSV header 'day,views,shares' is missing");
    if (views.empty()) throw Error(ErrorCode::empty_series, "CSV has no data rows");
    VideoRecord record;
    record.meta = std::move(meta);
    record.views = DailySeries(std::move(views), SeriesKind::views);
    record.shares = DailySeries(std::move(shares), SeriesKind::shares);
    return record;
}

VideoRecord import_series(const std::filesystem::path& file) {
    VideoMetadata meta;
    meta.video_id = file.stem().string();
    std::filesystem::path sidecar = file;
    sidecar.replace_extension(".json");
    std::string exo_source = "shares";
    if (std::filesystem::exists(sidecar)) {
        json j;
        try {
            j = json::parse(read_file(sidecar));
        } catch (const json::exception& e) {
            throw Error(ErrorCode::malformed_input, "sidecar " + sidecar.string() + ": " + e.what());
        }
        meta.video_id = j.value("video_id", meta.video_id);
        meta.title = j.value("title", "");
        meta.author = j.value("author", "");
        meta.category = j.value("category", "");
        meta.upload_date = j.value("upload_date", "");
        exo_source = j.value("exo_source", exo_source);
    }
    VideoRecord record = parse_series_csv(read_file(file), std::move(meta));
    record.exo_source = exo_source;
    record.validate();
    return record;
}

std::string format_number(double value) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

std::string export_series_csv(const VideoRecord& record) {
    std::string out = "day,views,shares\n";
    for (std::size_t t = 0; t < record.views.size(); ++t) {
        out += std::to_string(t);
        out += ',';
        out += format_number(record.views[t]);
        out += ',';
        out += format_number(record.shares[t]);
        out += '\n';
    }
    return out;
}

std::string export_metadata_json(const VideoMetadata& meta) {
    return json(meta).dump(2) + "\n";
}

void validate_for_fit(const VideoRecord& record, std::size_t total_days) {
    record.validate();
    if (record.days() < total_days) {
        throw Error(ErrorCode::too_short,
                    "video has " + std::to_string(record.days()) + " days of data, " +
                        std::to_string(total_days) + " required",
                    {{"actual", static_cast<double>(record.days())},
                     {"required", static_cast<double>(total_days)}});
    }
}

FixtureSource::FixtureSource(std::vector<std::filesystem::path> dirs) : dirs_(std::move(dirs)) {}

VideoRecord FixtureSource::fetch(const std::string& video_id) {
    for (const auto& dir : dirs_) {
        const auto csv = dir / (video_id + ".csv");
        if (!std::filesystem::exists(csv)) continue;
        const auto sidecar = dir / (video_id + ".json");
        if (std::filesystem::exists(sidecar)) {
            const auto j = json::parse(read_file(sidecar));
            if (!j.value("stats_available", true)) {
                throw Error(ErrorCode::stats_unavailable, "statistics are hidden for " + video_id);
            }
        }
        VideoRecord record = import_series(csv);
        record.meta.video_id = video_id;
        return record;
    }
    throw Error(ErrorCode::not_found, "no fixture for video " + video_id);
}

HttpInsightSource::HttpInsightSource(RemoteConfig config) : config_(std::move(config)) {}

VideoRecord HttpInsightSource::fetch(const std::string& video_id) {
    static const std::regex base(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch match;
    if (!std::regex_match(config_.base_url, match, base)) {
        throw Error(ErrorCode::invalid_argument, "remote base URL '" + config_.base_url + "' is not http(s)");
    }
    std::string prefix = match[2].matched ? match[2].str() : "";
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();

    httplib::Client client(match[1].str());
    client.set_connection_timeout(config_.timeout);
    client.set_read_timeout(config_.timeout);
    httplib::Headers headers;
    if (!config_.api_key.empty()) headers.emplace("X-Api-Key", config_.api_key);
    const auto res = client.Get(prefix + "/videos/" + video_id + "/insights", headers);
    if (!res) {
        throw Error(ErrorCode::fetch_failed, "transport error contacting " + config_.base_url + ": " +
                                                 httplib::to_string(res.error()));
    }
    if (res->status == 404) throw Error(ErrorCode::not_found, "video " + video_id + " not found");
    if (res->status == 403) {
        throw Error(ErrorCode::stats_unavailable, "statistics are private or disabled for " + video_id);
    }
    if (res->status != 200) {
        throw Error(ErrorCode::fetch_failed, "remote source answered HTTP " + std::to_string(res->status),
                    {{"status", static_cast<double>(res->status)}});
    }
    try {
        return record_from_payload(json::parse(res->body), video_id);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::malformed_input, std::string("remote payload: ") + e.what());
    }
}

VideoFetcher::VideoFetcher(std::shared_ptr<InsightSource> source, std::filesystem::path cache_dir,
                           RetryPolicy retry, std::function<std::string()> today)
    : source_(std::move(source)),
      cache_dir_(std::move(cache_dir)),
      retry_(std::move(retry)),
      today_(today ? std::move(today) : std::function<std::string()>(utc_today)) {
    if (!retry_.sleep) {
        retry_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
    }
    retry_.attempts = std::max(retry_.attempts, 1);
}

std::shared_ptr<std::mutex> VideoFetcher::lock_for(const std::string& id) {
    std::lock_guard guard(locks_mutex_);
    auto& slot = locks_[id];
    if (!slot) slot = std::make_shared<std::mutex>();
    return slot;
}

VideoRecord VideoFetcher::fetch(std::string_view id_or_url) {
    const std::string id = parse_video_id(id_or_url);
    const auto lock = lock_for(id);
    std::lock_guard guard(*lock);

    std::filesystem::path cached;
    if (!cache_dir_.empty()) {
        cached = cache_dir_ / id / (today_() + ".json");
        if (std::filesystem::exists(cached)) {
            return json::parse(read_file(cached)).get<VideoRecord>();
        }
    }

    auto backoff = retry_.initial_backoff;
    for (int attempt = 1;; ++attempt) {
        try {
            VideoRecord record = source_->fetch(id);
            record.meta.video_id = id;
            record.validate();
            record.fit.reset();
            if (!cached.empty()) write_file_atomic(cached, json(record).dump());
            return record;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::fetch_failed) throw;
            if (attempt >= retry_.attempts) {
                throw Error(ErrorCode::fetch_failed,
                            std::string(e.what()) + " (after " + std::to_string(attempt) + " attempts)",
                            {{"attempts", static_cast<double>(attempt)}});
            }
        }
        retry_.sleep(backoff);
        backoff *= 2;
    }
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
    static std::atomic<unsigned long> counter{0};
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto temp = path;
    temp += ".tmp-" + std::to_string(::getpid()) + "-" + std::to_string(counter++);
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::io_error, "cannot write " + temp.string());
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out) throw Error(ErrorCode::io_error, "short write to " + temp.string());
    }
    std::error_code ec;
    std::filesystem::rename(temp, path, ec);
    if (ec) {
        std::filesystem::remove(temp);
        throw Error(ErrorCode::io_error, "cannot replace " + path.string() + ": " + ec.message());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::io_error, "cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace hip
