#pragma once

// Discrete-time Hawkes Intensity Process: the daily recurrence, its kernel
// mass, the unit-impulse (endogenous) response and promotion what-ifs.
//
//   views[t] = mu * exo[t] + C * sum_{lag=1..t} views[t - lag] * (lag + c)^-(1 + theta)
//
// Everything here is a pure function of its arguments.

#include <cstddef>
#include <span>
#include <vector>

namespace hip {

enum class SeriesKind { views, shares, promotion };

/// Dense per-day counts starting at day 0 (upload day). Values are finite
/// and non-negative; explicit zeros stand for days without activity.
class DailySeries {
public:
    DailySeries() = default;
    explicit DailySeries(std::vector<double> values, SeriesKind kind = SeriesKind::views);

    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] bool empty() const noexcept { return values_.empty(); }
    [[nodiscard]] double operator[](std::size_t day) const { return values_[day]; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] SeriesKind kind() const noexcept { return kind_; }
    [[nodiscard]] double total() const noexcept;

    /// First `days` entries; throws window-out-of-range when longer than the series.
    [[nodiscard]] DailySeries prefix(std::size_t days) const;

    friend bool operator==(const DailySeries&, const DailySeries&) = default;

private:
    std::vector<double> values_;
    SeriesKind kind_ = SeriesKind::views;
};

inline constexpr double kMinKernelOffset = 1e-3;
inline constexpr double kMaxDecayExponent = 10.0;

struct HipParams {
    double mu = 0.0;              // exogenous sensitivity (views per unit stimulus)
    double excitation = 0.0;      // C
    double kernel_offset = 1.0;   // c, in days
    double decay_exponent = 1.0;  // theta

    /// Throws invalid-argument unless mu >= 0, C >= 0, c >= 1e-3, 0 < theta <= 10.
    void validate() const;

    friend bool operator==(const HipParams&, const HipParams&) = default;
};

struct SimulateOptions {
    /// Treat exogenous days past the end of the input as zero instead of failing.
    bool zero_fill_exogenous = false;
};

/// Kernel weights w[lag] = (lag + c)^-(1 + theta) for lag in [0, horizon); w[0] = 0.
[[nodiscard]] std::vector<double> kernel_weights(double kernel_offset, double decay_exponent,
                                                 std::size_t horizon);

/// sum_{lag > after} (lag + c)^-(1 + theta), by Euler-Maclaurin with three
/// correction terms. Accurate to double precision once after + c >= 32.
[[nodiscard]] double kernel_tail(double kernel_offset, double decay_exponent, std::size_t after);

/// Branching factor n* = C * sum_{lag >= 1} (lag + c)^-(1 + theta).
[[nodiscard]] double kernel_mass(const HipParams& params, double rel_tol = 1e-9);

/// Runs the recurrence for days [first_day, out.size()) with the already
/// filled out[0, first_day) as history. `drive` holds the exogenous term
/// (mu * s[t]) and must cover out.size(); `weights` must cover out.size().
void extend_recurrence(double excitation, std::span<const double> weights,
                       std::span<const double> drive, std::span<double> out,
                       std::size_t first_day);

[[nodiscard]] DailySeries simulate(const HipParams& params, const DailySeries& exo,
                                   std::size_t horizon, SimulateOptions options = {});

/// Unchecked variant used on hot paths (objective evaluation): writes
/// out.size() days, reads exo[t] for t < out.size(). Parameters are not
/// validated and overflow is left for the caller to detect.
void simulate_into(const HipParams& params, std::span<const double> exo, std::span<double> out);

struct ImpulseOptions {
    double tail_tol = 1e-9;
    /// The horizon doubles from 64 up to this cap. Heavy-tailed kernels
    /// (small theta) reach the cap; the remaining mass is then carried by
    /// the geometric tail term instead of the simulated prefix.
    std::size_t max_horizon = 4096;
};

struct ImpulseResponse {
    DailySeries series;          // series[0] == 1
    double total = 1.0;          // A = sum(series) + tail_bound
    std::size_t truncated_at = 1;
    double tail_bound = 0.0;     // mass attributed past truncated_at
    double branching_factor = 0.0;
};

/// Response to a unit impulse at day 0 with mu taken as 1. Throws
/// divergent-response (details: branching_factor) when n* >= 1.
[[nodiscard]] ImpulseResponse impulse_response(const HipParams& params, ImpulseOptions options = {});

/// Total views generated by a finite exogenous input, including the
/// endogenous mass still to come after the simulated horizon.
struct CascadeTotal {
    double simulated = 0.0;
    double tail = 0.0;
    std::size_t horizon = 0;
    [[nodiscard]] double total() const noexcept { return simulated + tail; }
};

[[nodiscard]] CascadeTotal cascade_total(const HipParams& params, const DailySeries& exo,
                                         ImpulseOptions options = {});

[[nodiscard]] double viral_potential(double mu, double endogenous_response);

using PromotionSchedule = DailySeries;

[[nodiscard]] PromotionSchedule even_schedule(double volume, std::size_t days = 90);

/// simulate(params, organic + promo, horizon). The promotion is zero-padded
/// to the horizon; the organic series follows `options`.
[[nodiscard]] DailySeries promoted_series(const HipParams& params, const DailySeries& organic,
                                          const PromotionSchedule& promo, std::size_t horizon,
                                          SimulateOptions options = {});

}  // namespace hip
