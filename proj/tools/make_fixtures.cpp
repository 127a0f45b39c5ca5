// Regenerates the synthetic fixture corpus under fixtures/.
//
//   make_fixtures <fixtures-dir>
//
// Every series is produced by the model itself from fixed parameters and a
// seeded exogenous series, so a fit recovers it up to the 0.01 rounding of
// the stored views.

#include "hip/core.hpp"
#include "hip/ingest.hpp"
#include "hip/serialize.hpp"

#include <cmath>
#include <iostream>
#include <random>

namespace fs = std::filesystem;
using namespace hip;

namespace {

struct Spec {
    const char* id;
    const char* title;
    const char* author;
    const char* category;
    const char* upload_date;
    double mu;
    double kernel_offset;
    double decay_exponent;
    double branching_factor;
    std::size_t days;
    std::uint64_t seed;
    bool stats_available = true;
};

DailySeries exogenous(std::uint64_t seed, std::size_t days) {
    std::mt19937_64 rng(seed);
    const double peak = std::uniform_real_distribution<double>(40.0, 200.0)(rng);
    const double decay = std::uniform_real_distribution<double>(6.0, 30.0)(rng);
    const double floor = std::uniform_real_distribution<double>(2.0, 8.0)(rng);
    std::bernoulli_distribution burst(0.06);
    std::vector<double> s(days);
    for (std::size_t t = 0; t < days; ++t) {
        double rate = peak * std::exp(-static_cast<double>(t) / decay) + floor;
        if (burst(rng)) rate += 0.6 * peak;
        s[t] = static_cast<double>(std::poisson_distribution<long>(rate)(rng));
    }
    return DailySeries(std::move(s), SeriesKind::shares);
}

void write(const fs::path& dir, const Spec& spec) {
    HipParams p{spec.mu, 1.0, spec.kernel_offset, spec.decay_exponent};
    p.excitation = spec.branching_factor / kernel_mass(p);
    const DailySeries shares = exogenous(spec.seed, spec.days);
    const DailySeries clean = simulate(p, shares, spec.days);
    std::vector<double> views(clean.values().begin(), clean.values().end());
    for (double& v : views) v = std::round(v * 100.0) / 100.0;

    VideoRecord record;
    record.meta = {spec.id, spec.title, spec.author, spec.category, spec.upload_date};
    record.views = DailySeries(std::move(views), SeriesKind::views);
    record.shares = shares;
    write_file_atomic(dir / (std::string(spec.id) + ".csv"), export_series_csv(record));

    json meta = record.meta;
    if (!spec.stats_available) meta["stats_available"] = false;
    meta["generator"] = {{"params", p}, {"seed", spec.seed}};
    write_file_atomic(dir / (std::string(spec.id) + ".json"), meta.dump(2) + "\n");
    std::cout << spec.id << " n*=" << spec.branching_factor << " mu=" << spec.mu << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: make_fixtures <fixtures-dir>\n";
        return 1;
    }
    const fs::path root = argv[1];
    const std::vector<Spec> demo = {
        {"synthDemo01", "Festival anthem (synthetic)", "Synthetic Beats", "Music", "2016-01-04", 40.0, 1.0, 0.6, 0.85, 120, 101},
        {"synthDemo02", "Dance challenge (synthetic)", "Synthetic Moves", "Entertainment", "2016-01-11", 30.0, 0.5, 0.8, 0.80, 120, 102},
        {"synthDemo03", "Lecture recording (synthetic)", "Synthetic Campus", "Education", "2016-01-18", 2.0, 2.0, 1.2, 0.30, 120, 103},
        {"synthDemo04", "Product launch (synthetic)", "Synthetic Brand", "Science & Technology", "2016-01-25", 25.0, 1.5, 1.0, 0.20, 120, 104},
        {"synthDemo05", "Cat compilation (synthetic)", "Synthetic Pets", "Pets & Animals", "2016-02-01", 3.0, 0.8, 0.5, 0.75, 120, 105},
        {"synthDemo06", "Match highlights (synthetic)", "Synthetic Sports", "Sports", "2016-02-08", 8.0, 3.0, 0.9, 0.50, 120, 106},
    };
    const std::vector<Spec> extra = {
        {"synthExtr01", "Cooking tutorial (synthetic)", "Synthetic Kitchen", "Howto & Style", "2016-03-07", 12.0, 1.2, 0.7, 0.60, 120, 201},
        {"synthExtr02", "Travel vlog (synthetic)", "Synthetic Roads", "Travel & Events", "2016-03-14", 5.0, 0.6, 1.1, 0.40, 150, 202},
        {"synthShort1", "Short-lived clip (synthetic)", "Synthetic Shorts", "Comedy", "2016-03-21", 10.0, 1.0, 0.8, 0.50, 60, 203},
        {"synthHidden", "Hidden statistics (synthetic)", "Synthetic Private", "People & Blogs", "2016-03-28", 6.0, 1.0, 0.8, 0.50, 120, 204, false},
    };

    fs::create_directories(root / "demo");
    fs::create_directories(root / "extra");
    json ids = json::array();
    for (const auto& s : demo) {
        write(root / "demo", s);
        ids.push_back(s.id);
    }
    for (const auto& s : extra) write(root / "extra", s);
    write_file_atomic(root / "demo" / "manifest.json",
                      json{{"collection", "demo"}, {"videos", ids}}.dump(2) + "\n");
    return 0;
}
