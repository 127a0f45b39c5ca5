#pragma once

// JSON mappings for the engine and store types. Doubles round-trip exactly.

#include "hip/core.hpp"
#include "hip/fit.hpp"
#include "hip/ingest.hpp"
#include "hip/store.hpp"

#include <json.hpp>

namespace hip {

using json = nlohmann::json;

void to_json(json& j, const HipParams& p);
void from_json(const json& j, HipParams& p);

void to_json(json& j, const FitRound& r);
void from_json(const json& j, FitRound& r);

void to_json(json& j, const FitResult& r);
void from_json(const json& j, FitResult& r);

void to_json(json& j, const VideoMetadata& m);
void from_json(const json& j, VideoMetadata& m);

void to_json(json& j, const VideoRecord& r);
void from_json(const json& j, VideoRecord& r);

void to_json(json& j, const Collection& c);
void to_json(json& j, const EndoExoPoint& p);
void to_json(json& j, const EndoExoMap& m);

/// Error envelope {code, message, details}.
json error_json(const class Error& e);

}  // namespace hip
