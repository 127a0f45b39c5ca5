#include "hip/service.hpp"

#include "hip/serialize.hpp"
#include "hip/whatif.hpp"

#include <httplib.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <ctime>

namespace hip {

namespace {

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t secs = std::chrono::system_clock::to_time_t(now);
    const auto ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
    char out[40];
    std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms));
    return out;
}

bool is_active(JobState s) { return s == JobState::queued || s == JobState::crawling || s == JobState::fitting; }

json job_json(const FitJob& job) {
    return json{{"job_id", job.job_id},
                {"video_id", job.video_id},
                {"collection", job.collection.empty() ? json(nullptr) : json(job.collection)},
                {"state", to_string(job.state)},
                {"error", job.error ? error_json(*job.error) : json(nullptr)},
                {"submitted_at", job.submitted_at},
                {"finished_at", job.finished_at.empty() ? json(nullptr) : json(job.finished_at)}};
}

std::vector<double> values_of(const DailySeries& s) { return {s.values().begin(), s.values().end()}; }

}  // namespace

std::string_view to_string(JobState s) noexcept {
    switch (s) {
        case JobState::queued: return "queued";
        case JobState::crawling: return "crawling";
        case JobState::fitting: return "fitting";
        case JobState::done: return "done";
        case JobState::failed: return "failed";
    }
    return "unknown";
}

int http_status(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::not_found:
        case ErrorCode::unknown_collection:
        case ErrorCode::unknown_video: return 404;
        case ErrorCode::name_conflict:
        case ErrorCode::not_fitted: return 409;
        case ErrorCode::mutate_default_collection: return 403;
        case ErrorCode::window_out_of_range:
        case ErrorCode::too_short:
        case ErrorCode::demotion_overflow:
        case ErrorCode::stats_unavailable:
        case ErrorCode::insufficient_exogenous_data:
        case ErrorCode::divergent_response:
        case ErrorCode::fit_failed: return 422;
        case ErrorCode::fetch_failed: return 502;
        case ErrorCode::io_error: return 500;
        default: return 400;
    }
}

VideoRecord ingest_and_fit(Store& store, VideoFetcher& fetcher, const std::string& video_id,
                           const FitConfig& fit_config, const std::function<void(JobState)>& on_state) {
    const auto notify = [&](JobState s) {
        if (on_state) on_state(s);
    };
    if (auto existing = store.find_video(video_id); existing && existing->fit) return std::move(*existing);
    notify(JobState::crawling);
    VideoRecord record = fetcher.fetch(video_id);
    validate_for_fit(record, fit_config.total_days);
    notify(JobState::fitting);
    record.fit = fit(record.views, record.shares, fit_config);
    store.put_video(record);
    return record;
}

// ---------------------------------------------------------------- JobQueue

JobQueue::JobQueue(int workers, Runner runner) : runner_(std::move(runner)) {
    for (int i = 0; i < std::max(workers, 1); ++i) threads_.emplace_back([this] { work(); });
}

JobQueue::~JobQueue() { shutdown(); }

void JobQueue::shutdown() {
    {
        std::lock_guard lock(mutex_);
        if (stopping_) return;
        stopping_ = true;
    }
    wake_.notify_all();
    for (auto& t : threads_) {
        if (t.joinable()) t.join();
    }
}

std::pair<FitJob, bool> JobQueue::submit(const std::string& video_id, const std::string& collection) {
    std::lock_guard lock(mutex_);
    for (const auto& [id, job] : jobs_) {
        if (job.video_id == video_id && is_active(job.state)) return {job, false};
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "job-%06zu", next_id_++);
    FitJob job{buf, video_id, collection, JobState::queued, std::nullopt, utc_timestamp(), ""};
    jobs_.emplace(job.job_id, job);
    order_.push_back(job.job_id);
    queue_.push_back(job.job_id);
    wake_.notify_one();
    return {job, true};
}

std::optional<FitJob> JobQueue::get(const std::string& job_id) const {
    std::lock_guard lock(mutex_);
    const auto it = jobs_.find(job_id);
    if (it == jobs_.end()) return std::nullopt;
    return it->second;
}

std::vector<FitJob> JobQueue::list() const {
    std::lock_guard lock(mutex_);
    std::vector<FitJob> out;
    for (const auto& id : order_) out.push_back(jobs_.at(id));
    return out;
}

std::size_t JobQueue::depth() const {
    std::lock_guard lock(mutex_);
    return queue_.size();
}

void JobQueue::drain() {
    std::unique_lock lock(mutex_);
    idle_.wait(lock, [&] { return queue_.empty() && running_ == 0; });
}

void JobQueue::advance(const std::string& job_id, JobState next) {
    std::lock_guard lock(mutex_);
    FitJob& job = jobs_.at(job_id);
    if (static_cast<int>(next) > static_cast<int>(job.state)) job.state = next;
}

void JobQueue::work() {
    for (;;) {
        FitJob job;
        {
            std::unique_lock lock(mutex_);
            wake_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
            if (stopping_) return;
            job = jobs_.at(queue_.front());
            queue_.pop_front();
            ++running_;
        }
        std::optional<Error> failure;
        try {
            runner_(job, [&](JobState s) { advance(job.job_id, s); });
        } catch (const Error& e) {
            failure = e;
        } catch (const std::exception& e) {
            failure = Error(ErrorCode::io_error, e.what());
        }
        {
            std::lock_guard lock(mutex_);
            FitJob& stored = jobs_.at(job.job_id);
            stored.state = failure ? JobState::failed : JobState::done;
            stored.error = std::move(failure);
            stored.finished_at = utc_timestamp();
            --running_;
        }
        idle_.notify_all();
    }
}

// ---------------------------------------------------------------- Service

struct Service::Http {
    httplib::Server server;
    int port = -1;
};

Service::Service(ServiceConfig config, std::shared_ptr<InsightSource> source)
    : config_(std::move(config)), http_(std::make_unique<Http>()) {
    store_ = std::make_unique<Store>(config_.data_dir);
    if (!source) {
        if (!config_.remote.base_url.empty()) {
            source = std::make_shared<HttpInsightSource>(config_.remote);
        } else {
            source = std::make_shared<FixtureSource>(config_.fixture_dirs);
        }
    }
    fetcher_ = std::make_shared<VideoFetcher>(std::move(source), config_.remote.cache_dir);
    jobs_ = std::make_unique<JobQueue>(config_.workers, [this](FitJob& job, const auto& advance) {
        ingest_and_fit(*store_, *fetcher_, job.video_id, config_.fit, advance);
        if (!job.collection.empty()) store_->add_video(job.collection, job.video_id);
    });
    routes();
}

Service::~Service() {
    stop();
    jobs_->shutdown();
}

void Service::seed_demo() {
    if (config_.demo_manifest.empty()) return;
    const json manifest = json::parse(read_file(config_.demo_manifest));
    const auto name = manifest.at("collection").get<std::string>();
    const auto ids = manifest.at("videos").get<std::vector<std::string>>();
    VideoFetcher local(std::make_shared<FixtureSource>(std::vector{config_.demo_manifest.parent_path()}));
    for (const auto& id : ids) ingest_and_fit(*store_, local, id, config_.fit);
    store_->install_default_collection(name, ids);
}

int Service::bind() {
    auto& server = http_->server;
    http_->port = config_.port == 0 ? server.bind_to_any_port(config_.host)
                                    : (server.bind_to_port(config_.host, config_.port) ? config_.port : -1);
    if (http_->port < 0) {
        throw Error(ErrorCode::io_error, "cannot bind " + config_.host + ":" + std::to_string(config_.port));
    }
    return http_->port;
}

void Service::run() { http_->server.listen_after_bind(); }

void Service::stop() {
    if (http_->server.is_running()) http_->server.stop();
}

void Service::routes() {
    auto& s = http_->server;
    using Req = httplib::Request;
    using Res = httplib::Response;

    const auto reply = [](Res& res, int status, const json& body) {
        res.status = status;
        res.set_content(body.dump(), "application/json");
    };
    // Runs `body`, mapping every failure onto the error envelope.
    const auto guarded = [reply](auto body) {
        return [reply, body](const Req& req, Res& res) {
            try {
                body(req, res);
            } catch (const Error& e) {
                reply(res, http_status(e.code()), error_json(e));
            } catch (const json::exception& e) {
                reply(res, 400, error_json(Error(ErrorCode::malformed_input, e.what())));
            } catch (const std::exception& e) {
                reply(res, 500, error_json(Error(ErrorCode::io_error, e.what())));
            }
        };
    };
    const auto body_json = [](const Req& req) {
        if (req.body.empty()) return json::object();
        json j = json::parse(req.body);
        if (!j.is_object()) throw Error(ErrorCode::malformed_input, "request body must be a JSON object");
        return j;
    };
    const auto fitted_video = [this](const std::string& id) {
        VideoRecord record = store_->get_video(id);
        if (!record.fit) throw Error(ErrorCode::not_fitted, "video " + id + " has not been fitted yet");
        return record;
    };

    const std::string api = "/api/v1";

    s.Get(api + "/health", guarded([this, reply](const Req&, Res& res) {
              reply(res, 200,
                    {{"status", "ok"},
                     {"queue_depth", jobs_->depth()},
                     {"workers", jobs_->workers()},
                     {"videos", store_->video_ids().size()},
                     {"collections", store_->list_collections().size()}});
          }));

    s.Get(api + "/collections", guarded([this, reply](const Req&, Res& res) {
              reply(res, 200, {{"collections", store_->list_collections()}});
          }));

    s.Get(api + R"(/collections/([^/]+))", guarded([this, reply](const Req& req, Res& res) {
              reply(res, 200, store_->get_collection(req.matches[1]));
          }));

    s.Post(api + R"(/collections/([^/]+))", guarded([this, reply](const Req& req, Res& res) {
               const std::string name = req.matches[1];
               store_->create_collection(name);
               reply(res, 201, store_->get_collection(name));
           }));

    s.Delete(api + R"(/collections/([^/]+))", guarded([this, reply](const Req& req, Res& res) {
                 const std::string name = req.matches[1];
                 store_->delete_collection(name);
                 reply(res, 200, {{"deleted", name}});
             }));

    s.Get(api + R"(/collections/([^/]+)/map)", guarded([this, reply](const Req& req, Res& res) {
              reply(res, 200, store_->endo_exo_map(req.matches[1]));
          }));

    s.Post(api + R"(/collections/([^/]+)/videos)", guarded([this, reply, body_json](const Req& req, Res& res) {
               const std::string name = req.matches[1];
               const json body = body_json(req);
               std::string raw = body.value("video_id", req.get_param_value("video_id"));
               const std::string id = parse_video_id(raw);
               const bool added = store_->add_video(name, id);
               reply(res, 200, {{"added", added}, {"collection", store_->get_collection(name)}});
           }));

    const auto remove_member = [this, reply](Res& res, const std::string& name, const std::string& raw) {
        const std::string id = parse_video_id(raw);
        store_->remove_video(name, id);
        reply(res, 200, {{"removed", id}, {"collection", store_->get_collection(name)}});
    };
    s.Delete(api + R"(/collections/([^/]+)/videos)",
             guarded([remove_member, body_json](const Req& req, Res& res) {
                 const json body = body_json(req);
                 remove_member(res, req.matches[1], body.value("video_id", req.get_param_value("video_id")));
             }));
    s.Delete(api + R"(/collections/([^/]+)/videos/([^/]+))",
             guarded([remove_member](const Req& req, Res& res) {
                 remove_member(res, req.matches[1], req.matches[2]);
             }));

    s.Post(api + "/videos", guarded([this, reply, body_json](const Req& req, Res& res) {
               const json body = body_json(req);
               std::string raw = body.value("id_or_url", body.value("video_id", std::string{}));
               const std::string id = parse_video_id(raw);
               const std::string collection = body.value("collection", std::string{});
               if (!collection.empty()) {
                   const Collection c = store_->get_collection(collection);
                   if (c.is_default) {
                       throw Error(ErrorCode::mutate_default_collection,
                                   "collection '" + collection + "' is read-only");
                   }
               }
               const auto [job, created] = jobs_->submit(id, collection);
               reply(res, created ? 202 : 200, job_json(job));
           }));

    s.Get(api + "/jobs", guarded([this, reply](const Req&, Res& res) {
              json arr = json::array();
              for (const auto& job : jobs_->list()) arr.push_back(job_json(job));
              reply(res, 200, {{"jobs", arr}});
          }));

    s.Get(api + R"(/jobs/([^/]+))", guarded([this, reply](const Req& req, Res& res) {
              const auto job = jobs_->get(req.matches[1]);
              if (!job) throw Error(ErrorCode::not_found, "unknown job " + std::string(req.matches[1]));
              reply(res, 200, job_json(*job));
          }));

    s.Get(api + "/videos", guarded([this, reply](const Req&, Res& res) {
              json arr = json::array();
              for (const auto& id : store_->video_ids()) {
                  const auto record = store_->find_video(id);
                  if (record) arr.push_back({{"video_id", id}, {"title", record->meta.title}, {"fitted", record->fit.has_value()}});
              }
              reply(res, 200, {{"videos", arr}});
          }));

    s.Get(api + R"(/videos/([^/]+))", guarded([this, reply](const Req& req, Res& res) {
              const VideoRecord record = store_->get_video(req.matches[1]);
              json body = json(record.meta);
              body["exo_source"] = record.exo_source;
              body["days"] = record.days();
              body["views_total"] = record.views.total();
              body["shares_total"] = record.shares.total();
              body["fit"] = record.fit ? json(*record.fit) : json(nullptr);
              body["metrics"] = record.fit ? json(point_for(record)) : json(nullptr);
              body["collections"] = store_->collections_containing(record.meta.video_id);
              reply(res, 200, body);
          }));

    s.Get(api + R"(/videos/([^/]+)/series)", guarded([fitted_video, reply](const Req& req, Res& res) {
              const VideoRecord record = fitted_video(req.matches[1]);
              const FitResult& f = *record.fit;
              const auto param = [&](const char* key, std::size_t fallback) -> std::size_t {
                  if (!req.has_param(key)) return fallback;
                  const std::string text = req.get_param_value(key);
                  std::size_t value = 0;
                  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
                  if (ec != std::errc() || ptr != text.data() + text.size()) {
                      throw Error(ErrorCode::invalid_argument, std::string(key) + " must be a non-negative integer");
                  }
                  return value;
              };
              const std::size_t from = param("forecast_from", f.train_days);
              const std::size_t to = param("to", record.days());
              const std::size_t train = std::min(f.train_days, record.days());
              const DailySeries fitted = simulate(f.params, record.shares, train);
              const DailySeries predicted = forecast(f, record.views, record.shares, from, to);
              reply(res, 200,
                    {{"video_id", record.meta.video_id},
                     {"train_days", f.train_days},
                     {"forecast_from", from},
                     {"forecast_to", to},
                     {"observed_views", values_of(record.views)},
                     {"shares", values_of(record.shares)},
                     {"fitted_views", values_of(fitted)},
                     {"forecast_views", values_of(predicted)}});
          }));

    s.Post(api + R"(/videos/([^/]+)/simulate-promotion)",
           guarded([this, fitted_video, reply, body_json](const Req& req, Res& res) {
               const VideoRecord record = fitted_video(req.matches[1]);
               const json body = body_json(req);
               if (!body.contains("volume") || !body.at("volume").is_number()) {
                   throw Error(ErrorCode::invalid_argument, "volume (number) is required");
               }
               PromotionRequest request;
               request.volume = body.at("volume").get<double>();
               request.days = body.value("days", request.days);
               request.horizon = body.value("horizon", request.horizon);
               const auto outcome = simulate_promotion(*record.fit, &record.views, &record.shares, request);

               std::string collection = body.value("collection", std::string{});
               if (collection.empty()) {
                   const auto names = store_->collections_containing(record.meta.video_id);
                   if (!names.empty()) collection = names.front();
               }
               std::vector<EndoExoPoint> context;
               if (!collection.empty()) context = store_->endo_exo_map(collection).points;
               EndoExoPoint current = point_for(record);
               current = project_point(current, context, 0.0, 0.0);
               const EndoExoPoint projected =
                   project_point(current, context, outcome.incremental_total, request.volume);
               reply(res, 200,
                     {{"video_id", record.meta.video_id},
                      {"volume", request.volume},
                      {"days", request.days},
                      {"horizon", request.horizon},
                      {"collection", collection.empty() ? json(nullptr) : json(collection)},
                      {"baseline_views", outcome.baseline},
                      {"promoted_views", outcome.promoted},
                      {"incremental_total", outcome.incremental_total},
                      {"current_point", current},
                      {"projected_point", projected}});
           }));

    if (!config_.static_dir.empty()) s.set_mount_point("/", config_.static_dir.string());

    s.set_error_handler([reply](const Req& req, Res& res) {
        if (!res.body.empty()) return;
        if (res.status == 404) {
            reply(res, 404, error_json(Error(ErrorCode::not_found, "no route for " + req.method + " " + req.path)));
        }
    });
}

}  // namespace hip
