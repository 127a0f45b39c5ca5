#pragma once

// Stateless promotion what-ifs on a fitted video. An even schedule of
// `volume` extra exogenous units over `days` days is pushed through the
// fitted model and superposed on the organic baseline.

#include "hip/core.hpp"
#include "hip/fit.hpp"
#include "hip/store.hpp"

#include <optional>
#include <vector>

namespace hip {

struct PromotionRequest {
    double volume = 0.0;  // negative demotes
    std::size_t days = 90;
    std::size_t horizon = 120;
};

struct PromotionOutcome {
    std::vector<double> baseline;   // fitted on [0, train) then forecast to horizon
    std::vector<double> increment;  // response to the schedule alone, signed
    std::vector<double> promoted;   // baseline + increment
    double incremental_total = 0.0;
};

/// Baseline: simulate on [0, train_days), then forecast conditioned on the
/// observed prefix with organic shares zero-filled past the stored data.
/// Without `views` the baseline is all zeros. Demotion larger than the
/// organic shares on any promoted day throws demotion-overflow.
[[nodiscard]] PromotionOutcome simulate_promotion(const FitResult& fit, const DailySeries* views,
                                                  const DailySeries* shares, const PromotionRequest& request);

/// Moves `subject` by the outcome (views += incremental total, shares +=
/// volume) and recomputes percentiles against the unchanged `others`.
/// mu, A and nu are kept.
[[nodiscard]] EndoExoPoint project_point(const EndoExoPoint& subject, const std::vector<EndoExoPoint>& others,
                                         double incremental_total, double volume);

}  // namespace hip
