// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fail.

#include "hip/core.hpp"
#include "hip/error.hpp"
#include "hip/fit.hpp"
#include "hip/point_process.hpp"
#include "hip/serialize.hpp"
#include "hip/service.hpp"
#include "hip/store.hpp"
#include "support/oracles.hpp"
#include "support/rescaling.hpp"
#include "support/synthetic.hpp"

#include <httplib.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

using namespace hip;
namespace fs = std::filesystem;

namespace {

const fs::path kSource = HIP_SOURCE_DIR;
const fs::path kHipctl = HIPCTL_PATH;

struct Verdict {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

// Noiseless round-trip fits, reused by the promotion criterion.
std::vector<FitResult> g_noiseless_fits;

Verdict closed_form_response() {
    const auto start = Clock::now();
    const double cs[] = {0.1, 0.5, 1.0, 2.0, 5.0};
    const double thetas[] = {0.2, 0.5, 0.8, 1.1, 1.5};
    const double excitations[] = {0.05, 0.1, 0.2, 0.4, 0.8};
    std::size_t cases = 0;
    double worst = 0.0;
    double worst_prefix = 0.0;
    const std::vector<double> unit = [] {
        std::vector<double> v(256, 0.0);
        v[0] = 1.0;
        return v;
    }();
    for (double C : excitations) {
        for (double c : cs) {
            for (double theta : thetas) {
                const HipParams p{1.0, C, c, theta};
                const double nstar = kernel_mass(p);
                if (nstar >= 0.95) continue;
                ++cases;
                const auto response = impulse_response(p);
                worst = std::max(worst, std::abs(response.total * (1.0 - nstar) - 1.0));
                // The simulated part of the response against direct long-double summation.
                const auto direct = oracle::direct_simulate(p, unit, unit.size());
                const auto prefix = response.series.values().first(unit.size());
                worst_prefix = std::max(worst_prefix, oracle::relative_rms(direct, prefix));
            }
        }
    }
    const double elapsed = seconds_since(start);
    return {worst <= 1e-6 && worst_prefix <= 1e-12 && elapsed < 5.0 && cases > 0,
            fmt("%zu grid points with n*<0.95, max |A(1-n*)-1| = %.2e, impulse prefix vs direct sum %.1e, %.2fs", cases,
                worst, worst_prefix, elapsed)};
}

Verdict linearity_monotonicity_causality() {
    std::mt19937_64 rng(2024);
    const std::size_t days = 120;
    double worst_linear = 0.0;
    std::size_t monotone_violations = 0;
    std::size_t causal_violations = 0;
    for (int i = 0; i < 100; ++i) {
        const HipParams p = oracle::random_subcritical(rng, 0.05, 0.95);
        const DailySeries s1 = oracle::random_shares(rng, days);
        const DailySeries s2 = oracle::random_shares(rng, days);
        const double a = std::uniform_real_distribution<double>(0.1, 3.0)(rng);
        const double b = std::uniform_real_distribution<double>(0.1, 3.0)(rng);
        std::vector<double> mix(days);
        for (std::size_t t = 0; t < days; ++t) mix[t] = a * s1[t] + b * s2[t];
        const auto v1 = simulate(p, s1, days);
        const auto v2 = simulate(p, s2, days);
        const auto vm = simulate(p, DailySeries(mix, SeriesKind::shares), days);
        double scale = 0.0;
        for (std::size_t t = 0; t < days; ++t) scale = std::max(scale, std::abs(vm[t]));
        for (std::size_t t = 0; t < days; ++t) {
            worst_linear = std::max(worst_linear, std::abs(vm[t] - (a * v1[t] + b * v2[t])) / std::max(scale, 1e-300));
        }
    }
    for (int i = 0; i < 100; ++i) {
        const HipParams p = oracle::random_subcritical(rng, 0.05, 0.95);
        const DailySeries base = oracle::random_shares(rng, days);
        std::vector<double> more(base.values().begin(), base.values().end());
        for (double& x : more) x += static_cast<double>(std::poisson_distribution<int>(2.0)(rng));
        const auto lo = simulate(p, base, days);
        const auto hi = simulate(p, DailySeries(more, SeriesKind::shares), days);
        for (std::size_t t = 0; t < days; ++t) monotone_violations += hi[t] < lo[t] ? 1 : 0;
    }
    for (int i = 0; i < 100; ++i) {
        const HipParams p = oracle::random_subcritical(rng, 0.05, 0.95);
        const DailySeries base = oracle::random_shares(rng, days);
        const auto k = std::uniform_int_distribution<std::size_t>(1, days - 1)(rng);
        std::vector<double> changed(base.values().begin(), base.values().end());
        for (std::size_t t = k; t < days; ++t) changed[t] = std::uniform_real_distribution<double>(0.0, 500.0)(rng);
        const auto x = simulate(p, base, days);
        const auto y = simulate(p, DailySeries(changed, SeriesKind::shares), days);
        for (std::size_t t = 0; t < k; ++t) causal_violations += x[t] != y[t] ? 1 : 0;
    }
    return {worst_linear <= 1e-9 && monotone_violations == 0 && causal_violations == 0,
            fmt("linearity max rel err %.2e, monotonicity violations %zu, causality violations %zu (100 cases each)",
                worst_linear, monotone_violations, causal_violations)};
}

Verdict synthetic_round_trip() {
    const auto start = Clock::now();
    FitConfig cfg;  // 8 random + default + coarse = 10 rounds, seed 0
    std::vector<double> clean_mape, noisy_mape;
    g_noiseless_fits.clear();
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        for (double sigma : {0.0, 0.05}) {
            const auto video = oracle::make_video(seed, 120, sigma);
            const auto result = fit(video.views, video.shares, cfg);
            const auto predicted = forecast(result, video.views.prefix(90), video.shares, 90, 120);
            std::vector<double> observed(video.views.values().begin() + 90, video.views.values().end());
            const double score = mape(predicted, DailySeries(observed)).daily;
            if (sigma == 0.0) {
                clean_mape.push_back(score);
                g_noiseless_fits.push_back(result);
            } else {
                noisy_mape.push_back(score);
            }
        }
    }
    const double elapsed = seconds_since(start);
    const double worst_clean = *std::max_element(clean_mape.begin(), clean_mape.end());
    std::sort(noisy_mape.begin(), noisy_mape.end());
    const double median_noisy = 0.5 * (noisy_mape[9] + noisy_mape[10]);
    return {worst_clean <= 1.0 && median_noisy <= 10.0 && elapsed < 120.0,
            fmt("20 videos: noiseless max MAPE %.3g%%, 5%% noise median MAPE %.3g%%, %.1fs", worst_clean, median_noisy,
                elapsed)};
}

Verdict promotion_roi() {
    if (g_noiseless_fits.size() != 20) return {false, "needs the 20 round-trip fits"};
    std::mt19937_64 rng(77);
    double worst = 0.0;
    for (const auto& f : g_noiseless_fits) {
        const double volume = std::uniform_real_distribution<double>(100.0, 10000.0)(rng);
        // A from the geometric-sum identity, independent of the cascade simulation.
        const double a = 1.0 / (1.0 - kernel_mass(f.params));
        const double incremental = cascade_total(f.params, even_schedule(volume, 90), {.tail_tol = 1e-6}).total();
        const double expected = f.params.mu * a * volume;
        worst = std::max(worst, std::abs(incremental - expected) / expected);
    }
    return {worst <= 0.01, fmt("20 fits: max relative gap to mu*A*V %.2e", worst)};
}

Verdict nhpp_module() {
    using namespace hip::pp;
    std::mt19937_64 rng(9);
    double worst_constant = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double lambda = std::uniform_real_distribution<double>(0.1, 20.0)(rng);
        std::vector<double> times(std::uniform_int_distribution<int>(1, 50)(rng));
        for (double& t : times) t = std::uniform_real_distribution<double>(0.0, 30.0)(rng);
        std::sort(times.begin(), times.end());
        times.erase(std::unique(times.begin(), times.end()), times.end());
        const double n = static_cast<double>(times.size());
        const double expected = n * std::log(lambda) - lambda * times.back();
        const double got = log_likelihood(constant_intensity(lambda), EventSequence(times, times.back()));
        worst_constant = std::max(worst_constant, std::abs(got - expected) / std::max(1.0, std::abs(expected)));
    }
    IntensitySpec linear;
    linear.rate = [](double t) { return 2.0 * t; };
    linear.compensator = [](double t) { return t * t; };
    IntensitySpec linear_quad;
    linear_quad.rate = linear.rate;
    double worst_telescope = 0.0;
    for (int i = 0; i < 100; ++i) {
        std::vector<double> times(6);
        for (double& t : times) t = std::uniform_real_distribution<double>(0.01, 3.0)(rng);
        std::sort(times.begin(), times.end());
        for (const auto* spec : {&linear, &linear_quad}) {
            double sum = first_event_logpdf(*spec, times[0]);
            for (std::size_t k = 1; k < times.size(); ++k) sum += next_event_logprob(*spec, times[k - 1], times[k]);
            worst_telescope = std::max(worst_telescope, std::abs(log_likelihood(*spec, EventSequence(times, 3.0)) - sum));
        }
    }
    IntensitySpec bounded = linear;
    bounded.upper_bound = 40.0;
    int ks_passes = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto events = simulate_thinning(bounded, 20.0, seed);
        ks_passes += oracle::rescaled_ks_statistic(bounded, events) < oracle::ks_critical_1pct(events.size()) ? 1 : 0;
    }
    const bool witness = next_event_logprob(linear, 1.0, 1.5) != next_event_logprob(linear, 2.0, 2.5);
    const double eps = std::numeric_limits<double>::epsilon();
    return {worst_constant <= 8 * eps && worst_telescope <= 1e-9 && ks_passes >= 95 && witness,
            fmt("constant-rate rel err %.1e (%.0f ulp), telescoping err %.1e, KS pass %d/100, non-Markov witness %s",
                worst_constant, worst_constant / eps, worst_telescope, ks_passes, witness ? "holds" : "fails")};
}

Verdict percentile_oracle() {
    const auto dir = fs::temp_directory_path() / ("hip_accept_pct_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    Store store(dir);
    std::mt19937_64 rng(31337);
    std::uniform_int_distribution<int> small(0, 6);
    std::vector<std::string> ids;
    for (int i = 0; i < 120; ++i) {
        VideoRecord r;
        r.meta.video_id = fmt("acc%08d", i);
        r.views = DailySeries({double(small(rng)), double(small(rng)), double(small(rng))});
        r.shares = DailySeries({double(small(rng)), double(small(rng)), double(small(rng))}, SeriesKind::shares);
        FitResult f;
        f.params = {1.0 + i % 5, 0.2, 1.0, 1.0};
        f.branching_factor = kernel_mass(f.params);
        f.train_days = 3;
        r.fit = f;
        store.put_video(r);
        ids.push_back(r.meta.video_id);
    }
    std::size_t mismatches = 0;
    for (int k = 0; k < 200; ++k) {
        const std::string name = fmt("c%03d", k);
        store.create_collection(name);
        std::shuffle(ids.begin(), ids.end(), rng);
        const auto size = std::uniform_int_distribution<std::size_t>(1, 40)(rng);
        for (std::size_t i = 0; i < size; ++i) (void)store.add_video(name, ids[i]);
        const auto map = store.endo_exo_map(name);
        std::vector<double> views, shares;
        for (const auto& p : map.points) {
            views.push_back(p.views_total);
            shares.push_back(p.shares_total);
        }
        const auto ev = oracle::brute_percentiles(views);
        const auto es = oracle::brute_percentiles(shares);
        for (std::size_t i = 0; i < map.points.size(); ++i) {
            mismatches += map.points[i].views_percentile != ev[i] ? 1 : 0;
            mismatches += map.points[i].shares_percentile != es[i] ? 1 : 0;
        }
    }
    fs::remove_all(dir);
    return {mismatches == 0, fmt("200 tie-heavy collections, %zu mismatched percentiles", mismatches)};
}

Verdict end_to_end() {
    const auto out = fs::temp_directory_path() / ("hip_accept_golden_" + std::to_string(::getpid()));
    fs::remove_all(out);
    const std::string cmd = "sh " + (kSource / "tests/golden/pipeline.sh").string() + " " + kHipctl.string() + " " +
                            kSource.string() + " " + out.string();
    if (std::system(cmd.c_str()) != 0) return {false, "golden pipeline failed to run"};
    std::vector<std::string> differing;
    for (const char* name : {"fit.json", "forecast.csv", "promotion.csv", "map.csv"}) {
        if (read_file(out / name) != read_file(kSource / "tests/golden" / name)) differing.emplace_back(name);
    }
    fs::remove_all(out);

    ServiceConfig cfg;
    cfg.host = "127.0.0.1";
    cfg.port = 0;
    cfg.data_dir = fs::temp_directory_path() / ("hip_accept_svc_" + std::to_string(::getpid()));
    fs::remove_all(cfg.data_dir);
    cfg.fixture_dirs = {kSource / "fixtures/extra"};
    Service service(cfg);
    const int port = service.bind();
    std::thread server([&] { service.run(); });
    httplib::Client client("127.0.0.1", port);
    std::string state = "unsubmitted";
    bool exact = false;
    (void)client.Post("/api/v1/collections/accept");
    const auto submitted = client.Post("/api/v1/videos", R"({"id_or_url":"synthExtr01","collection":"accept"})",
                                       "application/json");
    if (submitted && submitted->status == 202) {
        const std::string job = json::parse(submitted->body).at("job_id");
        for (int i = 0; i < 6000; ++i) {
            const auto r = client.Get("/api/v1/jobs/" + job);
            state = json::parse(r->body).at("state");
            if (state == "done" || state == "failed") break;
            std::this_thread::sleep_for(std::chrono::milliseconds(10));
        }
        const auto map = json::parse(client.Get("/api/v1/collections/accept/map")->body);
        if (map.at("points").size() == 1) {
            const auto& p = map.at("points").at(0);
            exact = p.at("endo_response").is_number() &&
                    p.at("viral_potential").get<double>() == p.at("mu").get<double>() * p.at("endo_response").get<double>();
        }
    }
    service.stop();
    server.join();
    fs::remove_all(cfg.data_dir);

    std::string diff = differing.empty() ? "all goldens byte-identical" : "differs:";
    for (const auto& d : differing) diff += " " + d;
    return {differing.empty() && state == "done" && exact,
            diff + fmt(", POST /videos job %s, map point nu == mu*A %s", state.c_str(), exact ? "exactly" : "NOT exact")};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
        {"closed-form endogenous response", closed_form_response},
        {"linearity / monotonicity / causality", linearity_monotonicity_causality},
        {"synthetic round trip", synthetic_round_trip},
        {"promotion ROI", promotion_roi},
        {"point-process module", nhpp_module},
        {"percentile oracle", percentile_oracle},
        {"end-to-end (CLI goldens, service job)", end_to_end},
    };
    int failures = 0;
    for (const auto& [name, run] : criteria) {
        Verdict v;
        try {
            v = run();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        failures += v.pass ? 0 : 1;
        std::cout << (v.pass ? "PASS " : "FAIL ") << name << ": " << v.detail << std::endl;
    }
    std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed" << std::endl;
    return failures == 0 ? 0 : 1;
}
