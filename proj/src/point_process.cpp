#include "hip/point_process.hpp"

#include "hip/error.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <random>
#include <string>

namespace hip::pp {

EventSequence::EventSequence(std::vector<double> times, double horizon)
    : times_(std::move(times)), horizon_(horizon) {
    double previous = -1.0;
    for (std::size_t i = 0; i < times_.size(); ++i) {
        const double t = times_[i];
        if (!std::isfinite(t) || t < 0.0 || t <= previous) {
            throw Error(ErrorCode::invalid_argument,
                        "event times must be finite, >= 0 and strictly increasing (index " +
                            std::to_string(i) + ")",
                        {{"index", static_cast<double>(i)}});
        }
        previous = t;
    }
    if (!std::isfinite(horizon_) || (!times_.empty() && horizon_ < times_.back()) || horizon_ < 0.0) {
        throw Error(ErrorCode::invalid_argument, "horizon must be finite and >= the last event time",
                    {{"horizon", horizon_}});
    }
}

double integrate_rate(const std::function<double(double)>& rate, double a, double b) {
    if (b <= a) return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(rate, a, b, 20, 1e-10);
}

double IntensitySpec::cumulative(double t) const {
    return compensator ? compensator(t) : integrate_rate(rate, 0.0, t);
}

double IntensitySpec::cumulative(double a, double b) const {
    return compensator ? compensator(b) - compensator(a) : integrate_rate(rate, a, b);
}

IntensitySpec constant_intensity(double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw Error(ErrorCode::invalid_argument, "rate must be finite and >= 0", {{"lambda", lambda}});
    }
    return {[lambda](double) { return lambda; }, [lambda](double t) { return lambda * t; }, lambda};
}

void check_compensator(const IntensitySpec& spec, double horizon, std::size_t samples, std::uint64_t seed,
                       double tol) {
    if (!spec.compensator) return;
    if (std::abs(spec.compensator(0.0)) > tol) {
        throw Error(ErrorCode::invalid_argument, "compensator must vanish at t = 0");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> where(0.0, horizon);
    for (std::size_t k = 0; k < samples; ++k) {
        const double t = where(rng);
        const double h = 1e-4 * std::max(1.0, t);
        const double lo = std::max(0.0, t - h);
        const double derivative = (spec.compensator(t + h) - spec.compensator(lo)) / (t + h - lo);
        const double lambda = spec.rate(t);
        if (std::abs(derivative - lambda) > tol * std::max(1.0, std::abs(lambda))) {
            throw Error(ErrorCode::invalid_argument,
                        "compensator derivative disagrees with the rate at t = " + std::to_string(t),
                        {{"t", t}, {"rate", lambda}, {"derivative", derivative}});
        }
    }
}

double first_event_logpdf(const IntensitySpec& spec, double t) {
    if (!(t >= 0.0)) {
        throw Error(ErrorCode::invalid_argument, "event time must be >= 0", {{"t", t}});
    }
    const double lambda = spec.rate(t);
    if (lambda <= 0.0) return -std::numeric_limits<double>::infinity();
    return std::log(lambda) - spec.cumulative(t);
}

double next_event_logprob(const IntensitySpec& spec, double t_prev, double t_next) {
    if (!(t_prev >= 0.0) || !(t_next > t_prev)) {
        throw Error(ErrorCode::invalid_argument, "need 0 <= t_prev < t_next",
                    {{"t_prev", t_prev}, {"t_next", t_next}});
    }
    const double lambda = spec.rate(t_next);
    if (lambda <= 0.0) return -std::numeric_limits<double>::infinity();
    return std::log(lambda) - spec.cumulative(t_prev, t_next);
}

double log_likelihood(const IntensitySpec& spec, const EventSequence& events, LikelihoodWindow window) {
    double sum = 0.0;
    for (double t : events.times()) {
        const double lambda = spec.rate(t);
        if (lambda <= 0.0) return -std::numeric_limits<double>::infinity();
        sum += std::log(lambda);
    }
    double end = 0.0;
    if (window == LikelihoodWindow::horizon) {
        end = events.horizon();
    } else if (events.size() > 0) {
        end = events.times().back();
    }
    return sum - spec.cumulative(end);
}

EventSequence simulate_thinning(const IntensitySpec& spec, double horizon, std::uint64_t seed) {
    if (!std::isfinite(horizon) || horizon < 0.0) {
        throw Error(ErrorCode::invalid_argument, "horizon must be finite and >= 0", {{"horizon", horizon}});
    }
    const double bound = spec.upper_bound;
    if (!std::isfinite(bound) || bound < 0.0) {
        throw Error(ErrorCode::invalid_argument, "thinning needs a finite rate upper bound",
                    {{"upper_bound", bound}});
    }
    std::vector<double> times;
    if (bound == 0.0) return EventSequence(std::move(times), horizon);

    std::mt19937_64 rng(seed);
    std::exponential_distribution<double> gap(bound);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double t = 0.0;
    for (;;) {
        t += gap(rng);
        if (t > horizon) break;
        const double lambda = spec.rate(t);
        if (lambda > bound * (1.0 + 1e-12)) {
            throw Error(ErrorCode::invalid_argument,
                        "rate exceeds the declared upper bound at t = " + std::to_string(t),
                        {{"t", t}, {"rate", lambda}, {"upper_bound", bound}});
        }
        if (unit(rng) * bound < lambda && (times.empty() || t > times.back())) {
            times.push_back(t);
        }
    }
    return EventSequence(std::move(times), horizon);
}

}  // namespace hip::pp
