#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hip {

enum class ErrorCode {
    invalid_argument,
    insufficient_exogenous_data,
    divergent_response,
    numeric_overflow,
    fit_failed,
    window_out_of_range,
    invalid_id,
    not_found,
    stats_unavailable,
    fetch_failed,
    gapped_series,
    invalid_value,
    empty_series,
    series_mismatch,
    malformed_input,
    too_short,
    mutate_default_collection,
    unknown_collection,
    unknown_video,
    name_conflict,
    not_fitted,
    demotion_overflow,
    io_error,
};

/// Stable kebab-case identifier used on the wire and in CLI error lines.
std::string_view to_string(ErrorCode code) noexcept;

/// Every engine failure carries a machine-readable code plus optional
/// numeric details (offending day, row, branching factor, ...).
class Error : public std::runtime_error {
public:
    using Details = std::map<std::string, double>;

    Error(ErrorCode code, const std::string& message, Details details = {})
        : std::runtime_error(message), code_(code), details_(std::move(details)) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }
    [[nodiscard]] const Details& details() const noexcept { return details_; }

private:
    ErrorCode code_;
    Details details_;
};

}  // namespace hip
