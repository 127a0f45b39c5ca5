#pragma once

// Multistart least-squares fitting of HIP parameters to a views/shares
// prefix, plus forecasting and holdout scoring.

#include "hip/core.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace hip {

struct ParamRange {
    double lo = 0.0;
    double hi = 0.0;
};

/// Per-parameter ranges, ordered (mu, C, c, theta).
struct ParamBounds {
    ParamRange mu{0.0, 1e4};
    ParamRange excitation{0.0, 50.0};
    ParamRange kernel_offset{kMinKernelOffset, 100.0};
    ParamRange decay_exponent{0.01, kMaxDecayExponent};

    [[nodiscard]] HipParams lower() const {
        return {mu.lo, excitation.lo, kernel_offset.lo, decay_exponent.lo};
    }
    [[nodiscard]] HipParams upper() const {
        return {mu.hi, excitation.hi, kernel_offset.hi, decay_exponent.hi};
    }
    [[nodiscard]] bool contains(const HipParams& p) const;
    void validate() const;
};

/// Ranges that random and coarse-search starts are drawn from, log-uniformly.
/// Intersected with the bounds before sampling.
struct StartRanges {
    ParamRange mu{1e-3, 1e3};
    ParamRange excitation{1e-4, 10.0};
    ParamRange kernel_offset{1e-3, 100.0};
    ParamRange decay_exponent{0.05, 10.0};
};

enum class Execution { serial, parallel };

struct FitConfig {
    std::size_t train_days = 90;
    std::size_t total_days = 120;
    std::size_t restarts = 8;  // random starts; one default and one coarse-search start are added
    std::size_t coarse_samples = 1000;
    ParamBounds bounds{};
    StartRanges start_ranges{};
    std::uint64_t seed = 0;
    Execution execution = Execution::parallel;

    void validate() const;
};

enum class StartKind { random, fixed_default, coarse_search };

std::string_view to_string(StartKind kind) noexcept;
std::optional<StartKind> start_kind_from_string(std::string_view name) noexcept;

struct FitRound {
    StartKind kind = StartKind::random;
    HipParams start{};
    HipParams final_params{};
    double objective = 0.0;
    bool converged = false;
    bool failed = false;
    std::size_t iterations = 0;

    friend bool operator==(const FitRound&, const FitRound&) = default;
};

struct FitResult {
    HipParams params{};
    double objective_value = 0.0;
    double branching_factor = 0.0;
    std::size_t train_days = 0;
    std::uint64_t seed = 0;
    std::vector<FitRound> rounds;
    std::size_t best_round_index = 0;

    [[nodiscard]] bool supercritical() const noexcept { return branching_factor >= 1.0; }

    friend bool operator==(const FitResult&, const FitResult&) = default;
};

/// Sum of squared differences between the model driven by `shares` and the
/// observed views over [0, train_days). Throws numeric-overflow when the
/// model output is not finite.
[[nodiscard]] double objective(const HipParams& params, const DailySeries& views,
                               const DailySeries& shares, std::size_t train_days);

/// Deterministic given cfg.seed, independent of cfg.execution and thread count.
[[nodiscard]] FitResult fit(const DailySeries& views, const DailySeries& shares, const FitConfig& cfg);

/// Serial reference for the coarse global search: index of the best of
/// `samples` candidate parameter sets (lowest objective, ties to lowest index).
[[nodiscard]] std::size_t coarse_search(const std::vector<HipParams>& samples, const DailySeries& views,
                                        const DailySeries& shares, std::size_t train_days,
                                        Execution execution);

/// Continues the recurrence over [from_day, to_day) using the observed views
/// before from_day as history and model output afterwards.
[[nodiscard]] DailySeries forecast(const FitResult& fit, const DailySeries& views_prefix,
                                   const DailySeries& shares_full, std::size_t from_day, std::size_t to_day);

struct MapeScore {
    double daily = 0.0;      // 100 * mean |p - o| / max(o, 1)
    double aggregate = 0.0;  // 100 * |sum p - sum o| / max(sum o, 1)
};

[[nodiscard]] MapeScore mape(const DailySeries& predicted, const DailySeries& observed);

/// Fits many independent videos; OpenMP over videos in parallel mode.
struct FitTask {
    const DailySeries* views = nullptr;
    const DailySeries* shares = nullptr;
};

[[nodiscard]] std::vector<FitResult> fit_batch(std::span<const FitTask> tasks, const FitConfig& cfg);

}  // namespace hip
