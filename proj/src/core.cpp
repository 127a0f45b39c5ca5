#include "hip/core.hpp"

#include "hip/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace hip {

namespace {

constexpr std::size_t kMinEulerMaclaurinStart = 64;
constexpr std::size_t kInitialImpulseHorizon = 64;

void require_valid_values(std::span<const double> values) {
    for (std::size_t day = 0; day < values.size(); ++day) {
        if (!std::isfinite(values[day]) || values[day] < 0.0) {
            throw Error(ErrorCode::invalid_value,
                        "series value at day " + std::to_string(day) + " must be finite and >= 0",
                        {{"day", static_cast<double>(day)}});
        }
    }
}

// sum_{lag > n} (lag + c)^-s for s = 1 + theta, via Euler-Maclaurin at n:
// integral - f(n)/2 + s/12 x^-(s+1) - s(s+1)(s+2)/720 x^-(s+3) + ... with x = n + c.
// Returns the magnitude of the first omitted term in `remainder`.
double euler_maclaurin_tail(double offset, double theta, std::size_t n, double& remainder) {
    const double s = 1.0 + theta;
    const double x = static_cast<double>(n) + offset;
    const double fx = std::pow(x, -s);
    const double x2 = x * x;
    const double integral = x * fx / theta;
    const double t1 = s / 12.0 * fx / x;
    const double t2 = s * (s + 1) * (s + 2) / 720.0 * fx / (x * x2);
    const double t3 = s * (s + 1) * (s + 2) * (s + 3) * (s + 4) / 30240.0 * fx / (x * x2 * x2);
    remainder = s * (s + 1) * (s + 2) * (s + 3) * (s + 4) * (s + 5) * (s + 6) / 1209600.0 * fx /
                (x * x2 * x2 * x2);
    return integral - 0.5 * fx + t1 - t2 + t3;
}

}  // namespace

DailySeries::DailySeries(std::vector<double> values, SeriesKind kind)
    : values_(std::move(values)), kind_(kind) {
    require_valid_values(values_);
}

double DailySeries::total() const noexcept {
    return std::accumulate(values_.begin(), values_.end(), 0.0);
}

DailySeries DailySeries::prefix(std::size_t days) const {
    if (days > values_.size()) {
        throw Error(ErrorCode::window_out_of_range,
                    "requested " + std::to_string(days) + " days from a series of " +
                        std::to_string(values_.size()),
                    {{"requested", static_cast<double>(days)},
                     {"available", static_cast<double>(values_.size())}});
    }
    return DailySeries({values_.begin(), values_.begin() + static_cast<std::ptrdiff_t>(days)}, kind_);
}

void HipParams::validate() const {
    const bool ok = std::isfinite(mu) && mu >= 0.0 && std::isfinite(excitation) &&
                    excitation >= 0.0 && std::isfinite(kernel_offset) &&
                    kernel_offset >= kMinKernelOffset && std::isfinite(decay_exponent) &&
                    decay_exponent > 0.0 && decay_exponent <= kMaxDecayExponent;
    if (!ok) {
        throw Error(ErrorCode::invalid_argument,
                    "HIP parameters out of range (need mu >= 0, C >= 0, c >= 1e-3, 0 < theta <= 10)",
                    {{"mu", mu}, {"C", excitation}, {"c", kernel_offset}, {"theta", decay_exponent}});
    }
}

std::vector<double> kernel_weights(double kernel_offset, double decay_exponent, std::size_t horizon) {
    std::vector<double> w(horizon, 0.0);
    const double s = -(1.0 + decay_exponent);
    for (std::size_t lag = 1; lag < horizon; ++lag) {
        w[lag] = std::pow(static_cast<double>(lag) + kernel_offset, s);
    }
    return w;
}

double kernel_tail(double kernel_offset, double decay_exponent, std::size_t after) {
    const std::size_t n = std::max(after, kMinEulerMaclaurinStart);
    const double s = -(1.0 + decay_exponent);
    double head = 0.0;
    // Smallest terms first.
    for (std::size_t lag = n; lag > after; --lag) {
        head += std::pow(static_cast<double>(lag) + kernel_offset, s);
    }
    double remainder = 0.0;
    return head + euler_maclaurin_tail(kernel_offset, decay_exponent, n, remainder);
}

double kernel_mass(const HipParams& params, double rel_tol) {
    params.validate();
    if (params.excitation == 0.0) {
        return 0.0;
    }
    const double s = -(1.0 + params.decay_exponent);
    std::size_t n = kMinEulerMaclaurinStart;
    for (;;) {
        double head = 0.0;
        for (std::size_t lag = n; lag >= 1; --lag) {
            head += std::pow(static_cast<double>(lag) + params.kernel_offset, s);
        }
        double remainder = 0.0;
        const double tail = euler_maclaurin_tail(params.kernel_offset, params.decay_exponent, n, remainder);
        const double sum = head + tail;
        if (remainder <= rel_tol * 1e-3 * sum || n >= (std::size_t{1} << 20)) {
            return params.excitation * sum;
        }
        n *= 2;
    }
}

void extend_recurrence(double excitation, std::span<const double> weights,
                       std::span<const double> drive, std::span<double> out, std::size_t first_day) {
    for (std::size_t t = first_day; t < out.size(); ++t) {
        double endogenous = 0.0;
        for (std::size_t lag = 1; lag <= t; ++lag) {
            endogenous += out[t - lag] * weights[lag];
        }
        out[t] = drive[t] + excitation * endogenous;
    }
}

DailySeries simulate(const HipParams& params, const DailySeries& exo, std::size_t horizon,
                     SimulateOptions options) {
    params.validate();
    if (horizon == 0) {
        throw Error(ErrorCode::invalid_argument, "horizon must be at least one day");
    }
    if (exo.size() < horizon && !options.zero_fill_exogenous) {
        throw Error(ErrorCode::insufficient_exogenous_data,
                    "exogenous series covers " + std::to_string(exo.size()) + " of " +
                        std::to_string(horizon) + " days",
                    {{"available", static_cast<double>(exo.size())},
                     {"horizon", static_cast<double>(horizon)}});
    }
    std::vector<double> drive(horizon, 0.0);
    const std::size_t covered = std::min(horizon, exo.size());
    for (std::size_t t = 0; t < covered; ++t) {
        drive[t] = params.mu * exo[t];
    }
    const auto weights = kernel_weights(params.kernel_offset, params.decay_exponent, horizon);
    std::vector<double> views(horizon, 0.0);
    extend_recurrence(params.excitation, weights, drive, views, 0);
    return DailySeries(std::move(views), SeriesKind::views);
}

void simulate_into(const HipParams& params, std::span<const double> exo, std::span<double> out) {
    const std::size_t horizon = out.size();
    std::vector<double> drive(horizon);
    for (std::size_t t = 0; t < horizon; ++t) {
        drive[t] = params.mu * exo[t];
    }
    const auto weights = kernel_weights(params.kernel_offset, params.decay_exponent, horizon);
    extend_recurrence(params.excitation, weights, drive, out, 0);
}

namespace {

// Shared driver for impulse_response and cascade_total: simulates `drive`
// (zero past its end) with doubling horizons, and adds the geometric tail
// (direct offspring beyond the horizon) / (1 - n*).
struct TailedRun {
    std::vector<double> views;
    double simulated = 0.0;
    double tail = 0.0;
    double branching_factor = 0.0;
};

TailedRun run_with_tail(const HipParams& params, std::span<const double> input, ImpulseOptions options) {
    params.validate();
    const double n_star = kernel_mass(params);
    if (n_star >= 1.0) {
        throw Error(ErrorCode::divergent_response,
                    "endogenous response diverges: branching factor " + std::to_string(n_star) + " >= 1",
                    {{"branching_factor", n_star}});
    }
    TailedRun run;
    run.branching_factor = n_star;

    std::size_t horizon = std::max(kInitialImpulseHorizon, input.size());
    horizon = std::max(horizon, std::size_t{1});
    const std::size_t cap = std::max(options.max_horizon, horizon);
    std::size_t done = 0;
    std::vector<double> drive;

    for (;;) {
        drive.assign(horizon, 0.0);
        std::copy(input.begin(), input.end(), drive.begin());
        const auto weights = kernel_weights(params.kernel_offset, params.decay_exponent, horizon + 1);
        run.views.resize(horizon, 0.0);
        extend_recurrence(params.excitation, std::span(weights).first(horizon), drive, run.views, done);
        done = horizon;

        // suffix[k] = sum_{lag > k} w[lag]; offspring of day u beyond the
        // horizon is C * views[u] * suffix[horizon - 1 - u].
        double suffix = kernel_tail(params.kernel_offset, params.decay_exponent, horizon);
        double direct = 0.0;
        for (std::size_t k = horizon; k-- > 0;) {
            suffix += weights[k + 1];
            // now suffix == sum_{lag > k}
            direct += run.views[horizon - 1 - k] * suffix;
        }
        direct *= params.excitation;

        run.simulated = 0.0;
        for (std::size_t t = horizon; t-- > 0;) {
            run.simulated += run.views[t];
        }
        run.tail = direct / (1.0 - n_star);
        const double total = run.simulated + run.tail;
        if (run.tail <= options.tail_tol * total || horizon >= cap) {
            return run;
        }
        horizon = std::min(horizon * 2, cap);
    }
}

}  // namespace

ImpulseResponse impulse_response(const HipParams& params, ImpulseOptions options) {
    params.validate();
    if (params.excitation == 0.0) {
        return {DailySeries({1.0}, SeriesKind::views), 1.0, 1, 0.0, 0.0};
    }
    const double unit[] = {1.0};
    TailedRun run = run_with_tail(params, unit, options);
    ImpulseResponse response;
    response.truncated_at = run.views.size();
    response.tail_bound = run.tail;
    response.total = run.simulated + run.tail;
    response.branching_factor = run.branching_factor;
    response.series = DailySeries(std::move(run.views), SeriesKind::views);
    return response;
}

CascadeTotal cascade_total(const HipParams& params, const DailySeries& exo, ImpulseOptions options) {
    params.validate();
    std::vector<double> drive(exo.values().begin(), exo.values().end());
    for (double& d : drive) {
        d *= params.mu;
    }
    if (params.excitation == 0.0) {
        return {std::accumulate(drive.begin(), drive.end(), 0.0), 0.0, drive.size()};
    }
    const TailedRun run = run_with_tail(params, drive, options);
    return {run.simulated, run.tail, run.views.size()};
}

double viral_potential(double mu, double endogenous_response) {
    if (!(mu >= 0.0) || !(endogenous_response >= 1.0)) {
        throw Error(ErrorCode::invalid_argument, "viral potential needs mu >= 0 and A >= 1",
                    {{"mu", mu}, {"A", endogenous_response}});
    }
    return mu * endogenous_response;
}

PromotionSchedule even_schedule(double volume, std::size_t days) {
    if (!std::isfinite(volume) || volume < 0.0 || days == 0) {
        throw Error(ErrorCode::invalid_argument, "even schedule needs volume >= 0 and days >= 1",
                    {{"volume", volume}, {"days", static_cast<double>(days)}});
    }
    return DailySeries(std::vector<double>(days, volume / static_cast<double>(days)),
                       SeriesKind::promotion);
}

DailySeries promoted_series(const HipParams& params, const DailySeries& organic,
                            const PromotionSchedule& promo, std::size_t horizon,
                            SimulateOptions options) {
    if (organic.size() < horizon && !options.zero_fill_exogenous) {
        throw Error(ErrorCode::insufficient_exogenous_data,
                    "organic exogenous series covers " + std::to_string(organic.size()) + " of " +
                        std::to_string(horizon) + " days",
                    {{"available", static_cast<double>(organic.size())},
                     {"horizon", static_cast<double>(horizon)}});
    }
    std::vector<double> combined(horizon, 0.0);
    for (std::size_t t = 0; t < horizon; ++t) {
        if (t < organic.size()) combined[t] += organic[t];
        if (t < promo.size()) combined[t] += promo[t];
    }
    return simulate(params, DailySeries(std::move(combined), organic.kind()), horizon);
}

}  // namespace hip
