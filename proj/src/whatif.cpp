#include "hip/whatif.hpp"

#include "hip/error.hpp"

#include <algorithm>
#include <cmath>

namespace hip {

PromotionOutcome simulate_promotion(const FitResult& fit, const DailySeries* views, const DailySeries* shares,
                                    const PromotionRequest& request) {
    if (!std::isfinite(request.volume)) {
        throw Error(ErrorCode::invalid_argument, "promotion volume must be finite");
    }
    if (request.days == 0 || request.horizon == 0) {
        throw Error(ErrorCode::invalid_argument, "promotion days and horizon must be positive",
                    {{"days", static_cast<double>(request.days)},
                     {"horizon", static_cast<double>(request.horizon)}});
    }
    const std::size_t horizon = request.horizon;
    std::vector<double> organic(horizon, 0.0);
    if (shares) {
        std::copy_n(shares->values().begin(), std::min(horizon, shares->size()), organic.begin());
    }

    if (request.volume < 0.0) {
        const double per_day = -request.volume / static_cast<double>(request.days);
        for (std::size_t t = 0; t < std::min(request.days, horizon); ++t) {
            if (organic[t] - per_day < 0.0) {
                throw Error(ErrorCode::demotion_overflow,
                            "demotion removes more exogenous activity than day " + std::to_string(t) + " has",
                            {{"day", static_cast<double>(t)}, {"shares", organic[t]}, {"per_day", per_day}});
            }
        }
    }

    PromotionOutcome out;
    out.baseline.assign(horizon, 0.0);
    if (views && shares && !views->empty()) {
        const std::size_t train = std::min({fit.train_days, views->size(), horizon});
        const DailySeries organic_series(organic, SeriesKind::shares);
        const DailySeries fitted = simulate(fit.params, organic_series, train);
        std::copy_n(fitted.values().begin(), train, out.baseline.begin());
        if (horizon > train) {
            const DailySeries tail = forecast(fit, views->prefix(train), organic_series, train, horizon);
            std::copy(tail.values().begin(), tail.values().end(), out.baseline.begin() + static_cast<long>(train));
        }
    }

    out.increment.assign(horizon, 0.0);
    if (request.volume != 0.0) {
        const double sign = request.volume < 0.0 ? -1.0 : 1.0;
        const DailySeries schedule = even_schedule(std::abs(request.volume), request.days);
        const DailySeries response = simulate(fit.params, schedule, horizon, {.zero_fill_exogenous = true});
        for (std::size_t t = 0; t < horizon; ++t) out.increment[t] = sign * response[t];
    }

    out.promoted.resize(horizon);
    for (std::size_t t = 0; t < horizon; ++t) {
        out.promoted[t] = out.baseline[t] + out.increment[t];
        out.incremental_total += out.increment[t];
    }
    return out;
}

EndoExoPoint project_point(const EndoExoPoint& subject, const std::vector<EndoExoPoint>& others,
                           double incremental_total, double volume) {
    std::vector<EndoExoPoint> points;
    points.reserve(others.size() + 1);
    EndoExoPoint moved = subject;
    moved.views_total += incremental_total;
    moved.shares_total += volume;
    points.push_back(moved);
    for (const auto& p : others) {
        if (p.video_id != subject.video_id) points.push_back(p);
    }
    assign_percentiles(points);
    return points.front();
}

}  // namespace hip
