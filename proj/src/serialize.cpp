#include "hip/serialize.hpp"

#include "hip/error.hpp"

#include <cmath>
#include <limits>

namespace hip {

namespace {

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_or_inf(const json& j) {
    return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

std::vector<double> values_of(const DailySeries& s) { return {s.values().begin(), s.values().end()}; }

}  // namespace

void to_json(json& j, const HipParams& p) {
    j = json{{"mu", p.mu}, {"C", p.excitation}, {"c", p.kernel_offset}, {"theta", p.decay_exponent}};
}

void from_json(const json& j, HipParams& p) {
    p.mu = j.at("mu").get<double>();
    p.excitation = j.at("C").get<double>();
    p.kernel_offset = j.at("c").get<double>();
    p.decay_exponent = j.at("theta").get<double>();
}

void to_json(json& j, const FitRound& r) {
    j = json{{"kind", to_string(r.kind)},
             {"start", r.start},
             {"final", r.final_params},
             {"objective", finite_or_null(r.objective)},
             {"converged", r.converged},
             {"failed", r.failed},
             {"iterations", r.iterations}};
}

void from_json(const json& j, FitRound& r) {
    const auto kind = start_kind_from_string(j.at("kind").get<std::string>());
    if (!kind) throw Error(ErrorCode::malformed_input, "unknown fit round kind");
    r.kind = *kind;
    r.start = j.at("start").get<HipParams>();
    r.final_params = j.at("final").get<HipParams>();
    r.objective = number_or_inf(j.at("objective"));
    r.converged = j.at("converged").get<bool>();
    r.failed = j.value("failed", false);
    r.iterations = j.value("iterations", std::size_t{0});
}

void to_json(json& j, const FitResult& r) {
    j = json{{"params", r.params},
             {"objective_value", r.objective_value},
             {"branching_factor", r.branching_factor},
             {"supercritical", r.supercritical()},
             {"train_days", r.train_days},
             {"seed", r.seed},
             {"best_round_index", r.best_round_index},
             {"rounds", r.rounds}};
}

void from_json(const json& j, FitResult& r) {
    r.params = j.at("params").get<HipParams>();
    r.objective_value = j.at("objective_value").get<double>();
    r.branching_factor = j.at("branching_factor").get<double>();
    r.train_days = j.at("train_days").get<std::size_t>();
    r.seed = j.value("seed", std::uint64_t{0});
    r.best_round_index = j.value("best_round_index", std::size_t{0});
    r.rounds = j.value("rounds", std::vector<FitRound>{});
}

void to_json(json& j, const VideoMetadata& m) {
    j = json{{"video_id", m.video_id},
             {"title", m.title},
             {"author", m.author},
             {"category", m.category},
             {"upload_date", m.upload_date}};
}

void from_json(const json& j, VideoMetadata& m) {
    m.video_id = j.at("video_id").get<std::string>();
    m.title = j.value("title", "");
    m.author = j.value("author", "");
    m.category = j.value("category", "");
    m.upload_date = j.value("upload_date", "");
}

void to_json(json& j, const VideoRecord& r) {
    j = json(r.meta);
    j["exo_source"] = r.exo_source;
    j["views"] = values_of(r.views);
    j["shares"] = values_of(r.shares);
    j["fit"] = r.fit ? json(*r.fit) : json(nullptr);
}

void from_json(const json& j, VideoRecord& r) {
    r.meta = j.get<VideoMetadata>();
    r.exo_source = j.value("exo_source", "shares");
    r.views = DailySeries(j.at("views").get<std::vector<double>>(), SeriesKind::views);
    r.shares = DailySeries(j.at("shares").get<std::vector<double>>(), SeriesKind::shares);
    if (j.contains("fit") && !j.at("fit").is_null()) {
        r.fit = j.at("fit").get<FitResult>();
    } else {
        r.fit.reset();
    }
}

void to_json(json& j, const Collection& c) {
    j = json{{"name", c.name}, {"video_ids", c.video_ids}, {"default", c.is_default}};
}

void to_json(json& j, const EndoExoPoint& p) {
    const auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    j = json{{"video_id", p.video_id},
             {"title", p.title},
             {"author", p.author},
             {"mu", p.exo_sensitivity},
             {"endo_response", opt(p.endo_response)},
             {"viral_potential", opt(p.viral_potential)},
             {"views_total", p.views_total},
             {"shares_total", p.shares_total},
             {"views_percentile", p.views_percentile},
             {"shares_percentile", p.shares_percentile},
             {"supercritical", p.supercritical},
             {"branching_factor", p.branching_factor}};
}

void to_json(json& j, const EndoExoMap& m) {
    j = json{{"collection", m.collection}, {"points", m.points}, {"pending", m.pending}};
}

json error_json(const Error& e) {
    json details = json::object();
    for (const auto& [key, value] : e.details()) details[key] = finite_or_null(value);
    return json{{"code", to_string(e.code())}, {"message", e.what()}, {"details", details}};
}

}  // namespace hip
