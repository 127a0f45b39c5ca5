#include "hip/error.hpp"

namespace hip {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::invalid_argument: return "invalid-argument";
        case ErrorCode::insufficient_exogenous_data: return "insufficient-exogenous-data";
        case ErrorCode::divergent_response: return "divergent-response";
        case ErrorCode::numeric_overflow: return "numeric-overflow";
        case ErrorCode::fit_failed: return "fit-failed";
        case ErrorCode::window_out_of_range: return "window-out-of-range";
        case ErrorCode::invalid_id: return "invalid-id";
        case ErrorCode::not_found: return "not-found";
        case ErrorCode::stats_unavailable: return "stats-unavailable";
        case ErrorCode::fetch_failed: return "fetch-failed";
        case ErrorCode::gapped_series: return "gapped-series";
        case ErrorCode::invalid_value: return "invalid-value";
        case ErrorCode::empty_series: return "empty-series";
        case ErrorCode::series_mismatch: return "series-mismatch";
        case ErrorCode::malformed_input: return "malformed-input";
        case ErrorCode::too_short: return "too-short";
        case ErrorCode::mutate_default_collection: return "mutate-default-collection";
        case ErrorCode::unknown_collection: return "unknown-collection";
        case ErrorCode::unknown_video: return "unknown-video";
        case ErrorCode::name_conflict: return "name-conflict";
        case ErrorCode::not_fitted: return "not-fitted";
        case ErrorCode::demotion_overflow: return "demotion-overflow";
        case ErrorCode::io_error: return "io-error";
    }
    return "unknown";
}

}  // namespace hip
