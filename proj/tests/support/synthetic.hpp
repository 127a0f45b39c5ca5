#pragma once

// Synthetic HIP videos for generate-then-recover tests.

#include "hip/core.hpp"

#include <cstdint>
#include <random>

namespace hip::oracle {

struct SyntheticVideo {
    HipParams params;
    DailySeries views;
    DailySeries shares;
};

/// Random parameters with branching factor drawn from [min_nstar, max_nstar].
inline HipParams random_subcritical(std::mt19937_64& rng, double min_nstar = 0.2, double max_nstar = 0.85) {
    auto log_uniform = [&](double lo, double hi) {
        return std::exp(std::uniform_real_distribution<double>(std::log(lo), std::log(hi))(rng));
    };
    HipParams p;
    p.mu = log_uniform(0.5, 50.0);
    p.kernel_offset = log_uniform(0.1, 5.0);
    p.decay_exponent = std::uniform_real_distribution<double>(0.2, 1.5)(rng);
    const double target = std::uniform_real_distribution<double>(min_nstar, max_nstar)(rng);
    const double unit_mass = kernel_mass({1.0, 1.0, p.kernel_offset, p.decay_exponent});
    p.excitation = target / unit_mass;
    return p;
}

/// Decaying promotion-like exogenous counts with occasional bursts.
inline DailySeries random_shares(std::mt19937_64& rng, std::size_t days) {
    const double peak = std::uniform_real_distribution<double>(20.0, 200.0)(rng);
    const double decay = std::uniform_real_distribution<double>(5.0, 40.0)(rng);
    const double floor = std::uniform_real_distribution<double>(1.0, 10.0)(rng);
    std::bernoulli_distribution burst(0.05);
    std::vector<double> s(days);
    for (std::size_t t = 0; t < days; ++t) {
        double rate = peak * std::exp(-static_cast<double>(t) / decay) + floor;
        if (burst(rng)) rate += peak * 0.5;
        s[t] = static_cast<double>(std::poisson_distribution<long>(rate)(rng));
    }
    return DailySeries(std::move(s), SeriesKind::shares);
}

/// Noiseless when noise_sigma == 0; otherwise views are multiplied by
/// lognormal(0, noise_sigma) factors.
inline SyntheticVideo make_video(std::uint64_t seed, std::size_t days = 120, double noise_sigma = 0.0) {
    std::mt19937_64 rng(seed);
    SyntheticVideo v;
    v.params = random_subcritical(rng);
    v.shares = random_shares(rng, days);
    DailySeries clean = simulate(v.params, v.shares, days);
    if (noise_sigma > 0.0) {
        std::lognormal_distribution<double> noise(0.0, noise_sigma);
        std::vector<double> noisy(clean.values().begin(), clean.values().end());
        for (double& x : noisy) x *= noise(rng);
        v.views = DailySeries(std::move(noisy), SeriesKind::views);
    } else {
        v.views = std::move(clean);
    }
    return v;
}

}  // namespace hip::oracle
