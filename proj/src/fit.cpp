#include "hip/fit.hpp"

#include "hip/error.hpp"
#include "hip/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <tuple>

namespace hip {

namespace {

constexpr std::uint64_t kCoarseStream = 0x9e3779b97f4a7c15ULL;

std::array<double, 4> to_array(const HipParams& p) {
    return {p.mu, p.excitation, p.kernel_offset, p.decay_exponent};
}

HipParams from_span(std::span<const double> x) {
    return {x[0], x[1], x[2], x[3]};
}

std::array<ParamRange, 4> ranges_of(const ParamBounds& b) {
    return {b.mu, b.excitation, b.kernel_offset, b.decay_exponent};
}

std::array<ParamRange, 4> ranges_of(const StartRanges& s) {
    return {s.mu, s.excitation, s.kernel_offset, s.decay_exponent};
}

// Start range intersected with the bounds; degenerates to the bounds when
// the intersection is empty.
std::array<ParamRange, 4> sampling_ranges(const FitConfig& cfg) {
    const auto bounds = ranges_of(cfg.bounds);
    const auto starts = ranges_of(cfg.start_ranges);
    std::array<ParamRange, 4> out{};
    for (std::size_t i = 0; i < 4; ++i) {
        const double lo = std::max(bounds[i].lo, starts[i].lo);
        const double hi = std::min(bounds[i].hi, starts[i].hi);
        out[i] = lo <= hi ? ParamRange{lo, hi} : bounds[i];
    }
    return out;
}

double draw(std::mt19937_64& rng, const ParamRange& range) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double u = unit(rng);
    if (range.lo > 0.0) {
        return std::exp(std::log(range.lo) + u * (std::log(range.hi) - std::log(range.lo)));
    }
    return range.lo + u * (range.hi - range.lo);
}

HipParams draw_params(std::mt19937_64& rng, const std::array<ParamRange, 4>& ranges) {
    std::array<double, 4> x{};
    for (std::size_t i = 0; i < 4; ++i) x[i] = draw(rng, ranges[i]);
    return from_span(x);
}

HipParams geometric_midpoint(const std::array<ParamRange, 4>& ranges) {
    std::array<double, 4> x{};
    for (std::size_t i = 0; i < 4; ++i) {
        x[i] = ranges[i].lo > 0.0 ? std::sqrt(ranges[i].lo * ranges[i].hi)
                                  : 0.5 * (ranges[i].lo + ranges[i].hi);
    }
    return from_span(x);
}

// Objective without validation; +inf on overflow.
double raw_objective(const HipParams& p, std::span<const double> views, std::span<const double> shares,
                     std::vector<double>& scratch) {
    scratch.resize(views.size());
    simulate_into(p, shares, scratch);
    double sse = 0.0;
    for (std::size_t t = 0; t < views.size(); ++t) {
        const double d = scratch[t] - views[t];
        sse += d * d;
    }
    return std::isfinite(sse) ? sse : std::numeric_limits<double>::infinity();
}

void require_coverage(const DailySeries& views, const DailySeries& shares, std::size_t train_days) {
    if (views.size() < train_days || shares.size() < train_days) {
        throw Error(ErrorCode::window_out_of_range,
                    "series must cover the " + std::to_string(train_days) + "-day training window",
                    {{"views", static_cast<double>(views.size())},
                     {"shares", static_cast<double>(shares.size())},
                     {"train_days", static_cast<double>(train_days)}});
    }
}

// Lower objective wins; ties prefer the smaller branching factor, then the
// lexicographically smaller parameter vector.
bool better_round(const FitRound& a, double a_nstar, const FitRound& b, double b_nstar) {
    if (a.objective != b.objective) return a.objective < b.objective;
    if (a_nstar != b_nstar) return a_nstar < b_nstar;
    return to_array(a.final_params) < to_array(b.final_params);
}

FitRound run_round(StartKind kind, const HipParams& start, std::span<const double> views,
                   std::span<const double> shares, const optimize::Box& box) {
    FitRound round;
    round.kind = kind;
    round.start = start;
    std::vector<double> scratch;
    const optimize::ResidualFn residuals = [&](std::span<const double> x, std::vector<double>& r) {
        const HipParams p = from_span(x);
        r.resize(views.size());
        scratch.resize(views.size());
        simulate_into(p, shares, scratch);
        for (std::size_t t = 0; t < views.size(); ++t) {
            r[t] = scratch[t] - views[t];
            if (!std::isfinite(r[t])) return false;
        }
        return true;
    };
    const auto x0 = to_array(start);
    const auto lm = optimize::minimize_lm(residuals, {x0.begin(), x0.end()}, box);
    round.final_params = from_span(lm.x);
    round.objective = lm.failed ? std::numeric_limits<double>::infinity() : lm.cost;
    round.converged = lm.converged;
    round.failed = lm.failed;
    round.iterations = lm.iterations;
    return round;
}

}  // namespace

bool ParamBounds::contains(const HipParams& p) const {
    const auto r = ranges_of(*this);
    const auto x = to_array(p);
    for (std::size_t i = 0; i < 4; ++i) {
        if (!(x[i] >= r[i].lo && x[i] <= r[i].hi)) return false;
    }
    return true;
}

void ParamBounds::validate() const {
    const auto r = ranges_of(*this);
    for (const auto& range : r) {
        if (!(range.lo <= range.hi) || !std::isfinite(range.lo) || !std::isfinite(range.hi)) {
            throw Error(ErrorCode::invalid_argument, "parameter bounds must be finite with lo <= hi");
        }
    }
    lower().validate();
    upper().validate();
}

void FitConfig::validate() const {
    if (train_days < 7 || total_days <= train_days || restarts < 1) {
        throw Error(ErrorCode::invalid_argument,
                    "fit config needs train_days >= 7, total_days > train_days and restarts >= 1",
                    {{"train_days", static_cast<double>(train_days)},
                     {"total_days", static_cast<double>(total_days)},
                     {"restarts", static_cast<double>(restarts)}});
    }
    bounds.validate();
}

std::string_view to_string(StartKind kind) noexcept {
    switch (kind) {
        case StartKind::random: return "random";
        case StartKind::fixed_default: return "default";
        case StartKind::coarse_search: return "coarse";
    }
    return "random";
}

std::optional<StartKind> start_kind_from_string(std::string_view name) noexcept {
    if (name == "random") return StartKind::random;
    if (name == "default") return StartKind::fixed_default;
    if (name == "coarse") return StartKind::coarse_search;
    return std::nullopt;
}

double objective(const HipParams& params, const DailySeries& views, const DailySeries& shares,
                 std::size_t train_days) {
    params.validate();
    if (train_days == 0) {
        throw Error(ErrorCode::invalid_argument, "training window must be at least one day");
    }
    require_coverage(views, shares, train_days);
    std::vector<double> scratch;
    const double sse = raw_objective(params, views.values().first(train_days),
                                     shares.values().first(train_days), scratch);
    if (!std::isfinite(sse)) {
        throw Error(ErrorCode::numeric_overflow, "model output is not finite for these parameters",
                    {{"mu", params.mu},
                     {"C", params.excitation},
                     {"c", params.kernel_offset},
                     {"theta", params.decay_exponent}});
    }
    return sse;
}

std::size_t coarse_search(const std::vector<HipParams>& samples, const DailySeries& views,
                          const DailySeries& shares, std::size_t train_days, Execution execution) {
    if (samples.empty()) {
        throw Error(ErrorCode::invalid_argument, "coarse search needs at least one sample");
    }
    require_coverage(views, shares, train_days);
    const auto v = views.values().first(train_days);
    const auto s = shares.values().first(train_days);
    std::vector<double> costs(samples.size());
    const auto count = static_cast<std::ptrdiff_t>(samples.size());
    const bool parallel = execution == Execution::parallel;
#pragma omp parallel if (parallel)
    {
        std::vector<double> scratch;
#pragma omp for schedule(static)
        for (std::ptrdiff_t i = 0; i < count; ++i) {
            costs[static_cast<std::size_t>(i)] = raw_objective(samples[static_cast<std::size_t>(i)], v, s, scratch);
        }
    }
    // Serial argmin keeps the tie rule (lowest index) independent of threading.
    std::size_t best = 0;
    for (std::size_t i = 1; i < costs.size(); ++i) {
        if (costs[i] < costs[best]) best = i;
    }
    return best;
}

FitResult fit(const DailySeries& views, const DailySeries& shares, const FitConfig& cfg) {
    cfg.validate();
    if (views.kind() != SeriesKind::views || shares.kind() == SeriesKind::views) {
        throw Error(ErrorCode::invalid_argument,
                    "fit expects a views series and a shares/promotion exogenous series");
    }
    require_coverage(views, shares, cfg.train_days);
    const auto v = views.values().first(cfg.train_days);
    const auto s = shares.values().first(cfg.train_days);

    FitResult result;
    result.train_days = cfg.train_days;
    result.seed = cfg.seed;

    if (std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; })) {
        // Degenerate input: the lower bounds reproduce an all-zero series exactly.
        const HipParams lower = cfg.bounds.lower();
        result.params = lower;
        result.objective_value = 0.0;
        result.branching_factor = kernel_mass(lower);
        result.rounds.push_back({StartKind::fixed_default, lower, lower, 0.0, true, false, 0});
        result.best_round_index = 0;
        return result;
    }

    const auto ranges = sampling_ranges(cfg);
    std::vector<std::pair<StartKind, HipParams>> starts;
    std::mt19937_64 rng(cfg.seed);
    for (std::size_t k = 0; k < cfg.restarts; ++k) {
        starts.emplace_back(StartKind::random, draw_params(rng, ranges));
    }
    starts.emplace_back(StartKind::fixed_default, geometric_midpoint(ranges));

    std::mt19937_64 coarse_rng(cfg.seed ^ kCoarseStream);
    std::vector<HipParams> samples;
    samples.reserve(cfg.coarse_samples);
    for (std::size_t k = 0; k < std::max<std::size_t>(cfg.coarse_samples, 1); ++k) {
        samples.push_back(draw_params(coarse_rng, ranges));
    }
    starts.emplace_back(StartKind::coarse_search,
                        samples[coarse_search(samples, views, shares, cfg.train_days, cfg.execution)]);

    const auto lo = to_array(cfg.bounds.lower());
    const auto hi = to_array(cfg.bounds.upper());
    const optimize::Box box{{lo.begin(), lo.end()}, {hi.begin(), hi.end()}};

    result.rounds.resize(starts.size());
    const auto count = static_cast<std::ptrdiff_t>(starts.size());
    const bool parallel = cfg.execution == Execution::parallel;
#pragma omp parallel for schedule(dynamic, 1) if (parallel)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        const auto& [kind, start] = starts[static_cast<std::size_t>(i)];
        result.rounds[static_cast<std::size_t>(i)] = run_round(kind, start, v, s, box);
    }

    std::optional<std::size_t> best;
    double best_nstar = 0.0;
    for (std::size_t i = 0; i < result.rounds.size(); ++i) {
        const FitRound& round = result.rounds[i];
        if (round.failed || !std::isfinite(round.objective)) continue;
        const double nstar = kernel_mass(round.final_params);
        if (!best || better_round(round, nstar, result.rounds[*best], best_nstar)) {
            best = i;
            best_nstar = nstar;
        }
    }
    if (!best) {
        std::string diagnostics;
        for (std::size_t i = 0; i < result.rounds.size(); ++i) {
            diagnostics += (i ? "; " : "") + std::string(to_string(result.rounds[i].kind)) + " start failed";
        }
        throw Error(ErrorCode::fit_failed, "every optimization round failed: " + diagnostics,
                    {{"rounds", static_cast<double>(result.rounds.size())}});
    }
    result.best_round_index = *best;
    result.params = result.rounds[*best].final_params;
    result.objective_value = result.rounds[*best].objective;
    result.branching_factor = best_nstar;
    return result;
}

std::vector<FitResult> fit_batch(std::span<const FitTask> tasks, const FitConfig& cfg) {
    std::vector<FitResult> results(tasks.size());
    std::vector<std::exception_ptr> errors(tasks.size());
    FitConfig inner = cfg;
    inner.execution = Execution::serial;
    const auto count = static_cast<std::ptrdiff_t>(tasks.size());
    const bool parallel = cfg.execution == Execution::parallel;
#pragma omp parallel for schedule(dynamic, 1) if (parallel)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        const auto k = static_cast<std::size_t>(i);
        try {
            results[k] = fit(*tasks[k].views, *tasks[k].shares, inner);
        } catch (...) {
            errors[k] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return results;
}

DailySeries forecast(const FitResult& fit, const DailySeries& views_prefix, const DailySeries& shares_full,
                     std::size_t from_day, std::size_t to_day) {
    const HipParams& p = fit.params;
    p.validate();
    if (from_day > to_day) {
        throw Error(ErrorCode::invalid_argument, "forecast window must satisfy from <= to",
                    {{"from", static_cast<double>(from_day)}, {"to", static_cast<double>(to_day)}});
    }
    if (views_prefix.size() < from_day || shares_full.size() < to_day) {
        throw Error(ErrorCode::window_out_of_range,
                    "forecast window [" + std::to_string(from_day) + ", " + std::to_string(to_day) +
                        ") is not covered by the supplied series",
                    {{"from", static_cast<double>(from_day)},
                     {"to", static_cast<double>(to_day)},
                     {"views", static_cast<double>(views_prefix.size())},
                     {"shares", static_cast<double>(shares_full.size())}});
    }
    if (from_day == to_day) {
        return DailySeries({}, SeriesKind::views);
    }
    std::vector<double> history(to_day, 0.0);
    std::copy_n(views_prefix.values().begin(), from_day, history.begin());
    std::vector<double> drive(to_day);
    for (std::size_t t = 0; t < to_day; ++t) drive[t] = p.mu * shares_full[t];
    const auto weights = kernel_weights(p.kernel_offset, p.decay_exponent, to_day);
    extend_recurrence(p.excitation, weights, drive, history, from_day);
    return DailySeries({history.begin() + static_cast<std::ptrdiff_t>(from_day), history.end()},
                       SeriesKind::views);
}

MapeScore mape(const DailySeries& predicted, const DailySeries& observed) {
    if (predicted.size() != observed.size() || predicted.empty()) {
        throw Error(ErrorCode::invalid_argument, "MAPE needs two non-empty series of equal length",
                    {{"predicted", static_cast<double>(predicted.size())},
                     {"observed", static_cast<double>(observed.size())}});
    }
    double sum_rel = 0.0;
    for (std::size_t t = 0; t < predicted.size(); ++t) {
        sum_rel += std::abs(predicted[t] - observed[t]) / std::max(observed[t], 1.0);
    }
    MapeScore score;
    score.daily = 100.0 * sum_rel / static_cast<double>(predicted.size());
    score.aggregate = 100.0 * std::abs(predicted.total() - observed.total()) / std::max(observed.total(), 1.0);
    return score;
}

}  // namespace hip
