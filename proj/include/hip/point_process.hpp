#pragma once

// Non-homogeneous Poisson process utilities: waiting-time densities,
// sequential conditional probabilities, the event-sequence log-likelihood
// and an Ogata-style thinning sampler.

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace hip::pp {

/// Strictly increasing, finite event times in [0, horizon].
class EventSequence {
public:
    EventSequence() = default;
    EventSequence(std::vector<double> times, double horizon);

    [[nodiscard]] std::span<const double> times() const noexcept { return times_; }
    [[nodiscard]] std::size_t size() const noexcept { return times_.size(); }
    [[nodiscard]] double horizon() const noexcept { return horizon_; }

private:
    std::vector<double> times_;
    double horizon_ = 0.0;
};

struct IntensitySpec {
    std::function<double(double)> rate;
    /// Lambda(t) = integral_0^t rate. Empty means adaptive quadrature.
    std::function<double(double)> compensator;
    /// Bound on rate over any window passed to simulate_thinning.
    double upper_bound = std::numeric_limits<double>::infinity();

    [[nodiscard]] double intensity(double t) const { return rate(t); }
    [[nodiscard]] double cumulative(double t) const;
    /// Lambda(b) - Lambda(a).
    [[nodiscard]] double cumulative(double a, double b) const;
};

[[nodiscard]] IntensitySpec constant_intensity(double lambda);

/// Gauss-Kronrod adaptive integral of rate over [a, b], relative tolerance 1e-10.
[[nodiscard]] double integrate_rate(const std::function<double(double)>& rate, double a, double b);

/// Spot-checks |Lambda'(t) - lambda(t)| at `samples` random points of
/// [0, horizon] with central differences; throws invalid-argument on a
/// mismatch larger than `tol` (relative to max(1, lambda)). No-op without
/// an analytic compensator.
void check_compensator(const IntensitySpec& spec, double horizon, std::size_t samples = 32,
                       std::uint64_t seed = 1, double tol = 1e-6);

/// log lambda(t) - Lambda(t). Returns -infinity when lambda(t) == 0.
[[nodiscard]] double first_event_logpdf(const IntensitySpec& spec, double t);

/// log lambda(t_next) + Lambda(t_prev) - Lambda(t_next); needs 0 <= t_prev < t_next.
[[nodiscard]] double next_event_logprob(const IntensitySpec& spec, double t_prev, double t_next);

enum class LikelihoodWindow {
    last_event,  // subtract Lambda(t_n)
    horizon,     // censored at the observation end: subtract Lambda(T)
};

/// sum_i log lambda(t_i) - Lambda(t_n) (or Lambda(T) when censored).
[[nodiscard]] double log_likelihood(const IntensitySpec& spec, const EventSequence& events,
                                    LikelihoodWindow window = LikelihoodWindow::last_event);

/// Proposals from a homogeneous process at rate upper_bound, each kept with
/// probability lambda(t) / upper_bound. Deterministic given the seed.
[[nodiscard]] EventSequence simulate_thinning(const IntensitySpec& spec, double horizon, std::uint64_t seed);

}  // namespace hip::pp
