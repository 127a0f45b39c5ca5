#pragma once

// HTTP JSON API under /api/v1 and the background fit-job queue behind it.

#include "hip/config.hpp"
#include "hip/error.hpp"
#include "hip/ingest.hpp"
#include "hip/store.hpp"

#include <condition_variable>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace hip {

enum class JobState { queued, crawling, fitting, done, failed };
[[nodiscard]] std::string_view to_string(JobState s) noexcept;

struct FitJob {
    std::string job_id;
    std::string video_id;
    std::string collection;  // empty: fit only
    JobState state = JobState::queued;
    std::optional<Error> error;
    std::string submitted_at;  // ISO-8601 UTC
    std::string finished_at;   // empty until done or failed
};

/// HTTP status for an error code.
[[nodiscard]] int http_status(ErrorCode code) noexcept;

/// Fetches, validates and fits one video into the store. Shared by the job
/// workers, demo seeding and the CLI `--video` path.
VideoRecord ingest_and_fit(Store& store, VideoFetcher& fetcher, const std::string& video_id,
                           const FitConfig& fit_config, const std::function<void(JobState)>& on_state = {});

/// FIFO queue drained by a fixed pool of workers. States only move forward.
class JobQueue {
public:
    using Runner = std::function<void(FitJob& job, const std::function<void(JobState)>& advance)>;

    JobQueue(int workers, Runner runner);
    ~JobQueue();
    JobQueue(const JobQueue&) = delete;
    JobQueue& operator=(const JobQueue&) = delete;

    /// Returns the active job for the same video (and false) if one exists.
    std::pair<FitJob, bool> submit(const std::string& video_id, const std::string& collection);
    [[nodiscard]] std::optional<FitJob> get(const std::string& job_id) const;
    [[nodiscard]] std::vector<FitJob> list() const;
    [[nodiscard]] std::size_t depth() const;
    [[nodiscard]] int workers() const noexcept { return static_cast<int>(threads_.size()); }
    /// Blocks until no job is queued or running.
    void drain();
    void shutdown();

private:
    void work();
    void advance(const std::string& job_id, JobState next);

    Runner runner_;
    mutable std::mutex mutex_;
    std::condition_variable wake_;
    std::condition_variable idle_;
    std::deque<std::string> queue_;
    std::map<std::string, FitJob> jobs_;
    std::vector<std::string> order_;
    std::size_t running_ = 0;
    std::size_t next_id_ = 1;
    bool stopping_ = false;
    std::vector<std::thread> threads_;
};

class Service {
public:
    /// `source` defaults to the remote client when configured, else fixtures.
    explicit Service(ServiceConfig config, std::shared_ptr<InsightSource> source = nullptr);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Imports and fits the manifest's videos if missing, then installs the
    /// read-only collection it names.
    void seed_demo();

    /// Binds to config host/port (0 picks a free port) and returns the port.
    int bind();
    /// Serves until stop(); call after bind().
    void run();
    void stop();

    [[nodiscard]] Store& store() noexcept { return *store_; }
    [[nodiscard]] JobQueue& jobs() noexcept { return *jobs_; }
    [[nodiscard]] const ServiceConfig& config() const noexcept { return config_; }

private:
    struct Http;
    void routes();

    ServiceConfig config_;
    std::unique_ptr<Store> store_;
    std::shared_ptr<VideoFetcher> fetcher_;
    std::unique_ptr<JobQueue> jobs_;
    std::unique_ptr<Http> http_;
};

}  // namespace hip
