// hipctl: batch front end for import, fit, forecast, promotion what-ifs,
// map export, and the HTTP service.

#include "hip/config.hpp"
#include "hip/error.hpp"
#include "hip/fit.hpp"
#include "hip/ingest.hpp"
#include "hip/serialize.hpp"
#include "hip/service.hpp"
#include "hip/store.hpp"
#include "hip/whatif.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace hip;

namespace {

struct Output {
    std::string out_path;

    // Primary payload goes to --out or stdout; the summary goes to stdout
    // when the payload went to a file, else to stderr.
    void emit(const std::string& payload, const std::string& summary) const {
        if (out_path.empty()) {
            std::cout << payload;
            if (!summary.empty()) std::cerr << summary;
        } else {
            write_file_atomic(out_path, payload);
            std::cout << summary;
        }
    }
};

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

std::string opt_number(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

FitResult load_fit(const std::string& path) {
    try {
        return json::parse(read_file(path)).get<FitResult>();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::malformed_input, path + ": " + e.what());
    }
}

// Resolves the series either from --input or from --video in --data-dir.
VideoRecord load_record(const std::string& input, const std::string& video, const std::string& data_dir) {
    if (!input.empty()) return import_series(input);
    if (!video.empty()) return Store(data_dir).get_video(parse_video_id(video));
    throw Error(ErrorCode::invalid_argument, "one of --input or --video is required");
}

int run_import(const std::vector<std::string>& inputs, const std::string& data_dir, const std::string& collection) {
    Store store(data_dir);
    if (!collection.empty()) {
        const auto all = store.list_collections();
        const bool exists = std::any_of(all.begin(), all.end(), [&](const Collection& c) { return c.name == collection; });
        if (!exists) store.create_collection(collection);
    }
    for (const auto& input : inputs) {
        VideoRecord record = import_series(input);
        if (auto existing = store.find_video(record.meta.video_id);
            existing && existing->views == record.views && existing->shares == record.shares) {
            record.fit = existing->fit;
        }
        store.put_video(record);
        if (!collection.empty()) store.add_video(collection, record.meta.video_id);
        std::cout << "imported " << record.meta.video_id << " (" << record.days() << " days)\n";
    }
    return 0;
}

int run_fit(const std::string& input, const std::string& video, const std::string& data_dir,
            const FitConfig& cfg, std::size_t min_days, const Output& out) {
    VideoRecord record = load_record(input, video, data_dir);
    validate_for_fit(record, std::max(min_days, cfg.train_days));
    const FitResult result = fit(record.views, record.shares, cfg);
    if (input.empty()) {
        record.fit = result;
        Store(data_dir).put_video(record);
    }
    std::ostringstream summary;
    summary << "fitted " << record.meta.video_id << ": objective " << format_number(result.objective_value)
            << ", branching factor " << format_number(result.branching_factor) << "\n";
    out.emit(json(result).dump(2) + "\n", summary.str());
    return 0;
}

int run_forecast(const std::string& fit_path, const std::string& input, const std::string& video,
                 const std::string& data_dir, std::size_t from, std::optional<std::size_t> to, const Output& out) {
    const VideoRecord record = load_record(input, video, data_dir);
    FitResult result;
    if (!fit_path.empty()) {
        result = load_fit(fit_path);
    } else if (record.fit) {
        result = *record.fit;
    } else {
        throw Error(ErrorCode::not_fitted, "no --fit given and video " + record.meta.video_id + " is not fitted");
    }
    const std::size_t end = to.value_or(std::max(from, record.days()));
    const DailySeries predicted = forecast(result, record.views, record.shares, from, end);

    std::string csv = "day,forecast,observed\n";
    const std::size_t overlap_end = std::min(end, record.days());
    for (std::size_t t = from; t < end; ++t) {
        csv += std::to_string(t) + "," + format_number(predicted[t - from]) + "," +
               (t < record.days() ? format_number(record.views[t]) : "") + "\n";
    }
    std::string summary;
    if (overlap_end > from) {
        const auto score = mape(DailySeries({predicted.values().begin(), predicted.values().begin() +
                                                                             static_cast<long>(overlap_end - from)}),
                                DailySeries({record.views.values().begin() + static_cast<long>(from),
                                             record.views.values().begin() + static_cast<long>(overlap_end)}));
        summary = "mape_daily=" + format_number(score.daily) + " mape_aggregate=" + format_number(score.aggregate) + "\n";
    }
    out.emit(csv, summary);
    return 0;
}

int run_simulate(const std::string& fit_path, const std::string& input, const PromotionRequest& request,
                 const Output& out) {
    const FitResult result = load_fit(fit_path);
    std::optional<VideoRecord> record;
    if (!input.empty()) record = import_series(input);
    const auto outcome = simulate_promotion(result, record ? &record->views : nullptr,
                                            record ? &record->shares : nullptr, request);
    std::string csv = "day,baseline,promoted\n";
    for (std::size_t t = 0; t < outcome.promoted.size(); ++t) {
        csv += std::to_string(t) + "," + format_number(outcome.baseline[t]) + "," +
               format_number(outcome.promoted[t]) + "\n";
    }
    out.emit(csv, "incremental_total=" + format_number(outcome.incremental_total) + "\n");
    return 0;
}

int run_map_export(const std::string& data_dir, const std::string& collection, const Output& out) {
    const Store store(data_dir);
    const EndoExoMap map = store.endo_exo_map(collection);
    std::string csv =
        "video_id,title,author,mu,endo_response,viral_potential,views_total,shares_total,"
        "views_percentile,shares_percentile,supercritical,branching_factor\n";
    for (const auto& p : map.points) {
        csv += csv_field(p.video_id) + "," + csv_field(p.title) + "," + csv_field(p.author) + "," +
               format_number(p.exo_sensitivity) + "," + opt_number(p.endo_response) + "," +
               opt_number(p.viral_potential) + "," + format_number(p.views_total) + "," +
               format_number(p.shares_total) + "," + format_number(p.views_percentile) + "," +
               format_number(p.shares_percentile) + "," + (p.supercritical ? "true" : "false") + "," +
               format_number(p.branching_factor) + "\n";
    }
    std::string summary = std::to_string(map.points.size()) + " points";
    if (!map.pending.empty()) {
        summary += ", pending:";
        for (const auto& id : map.pending) summary += " " + id;
    }
    out.emit(csv, summary + "\n");
    return 0;
}

int run_serve(const std::string& config_path, std::optional<int> port, const std::string& data_dir) {
    ServiceConfig cfg = load_config(config_path.empty() ? std::nullopt : std::optional<fs::path>(config_path));
    if (port) cfg.port = *port;
    if (!data_dir.empty()) cfg.data_dir = data_dir;
    Service service(cfg);
    service.seed_demo();
    const int bound = service.bind();
    std::cout << "listening on " << cfg.host << ":" << bound << " (data: " << cfg.data_dir.string() << ")" << std::endl;
    service.run();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fit, forecast and explore daily popularity series with a Hawkes intensity process"};
    app.require_subcommand(1);

    std::string data_dir = "data";
    std::string out_path;

    auto* import_cmd = app.add_subcommand("import", "Import CSV series (with optional sidecar JSON) into the data directory");
    std::vector<std::string> import_inputs;
    std::string import_collection;
    import_cmd->add_option("--input,inputs", import_inputs, "CSV files")->required()->check(CLI::ExistingFile);
    import_cmd->add_option("--data-dir", data_dir, "Data directory")->capture_default_str();
    import_cmd->add_option("--collection", import_collection, "Add imported videos to this collection (created if missing)");

    auto* fit_cmd = app.add_subcommand("fit", "Fit model parameters on the training prefix");
    std::string fit_input, fit_video;
    FitConfig fit_cfg;
    std::size_t min_days = fit_cfg.total_days;
    bool serial = false;
    fit_cmd->add_option("--input", fit_input, "CSV series")->check(CLI::ExistingFile);
    fit_cmd->add_option("--video", fit_video, "Stored video ID (fit is saved back to the store)");
    fit_cmd->add_option("--data-dir", data_dir, "Data directory")->capture_default_str();
    fit_cmd->add_option("--train-days", fit_cfg.train_days, "Training window length")->capture_default_str();
    fit_cmd->add_option("--min-days", min_days, "Required series length")->capture_default_str();
    fit_cmd->add_option("--seed", fit_cfg.seed, "Multistart seed")->capture_default_str();
    fit_cmd->add_option("--restarts", fit_cfg.restarts, "Random starts")->capture_default_str();
    fit_cmd->add_flag("--serial", serial, "Run the rounds serially");
    fit_cmd->add_option("--out", out_path, "Write FitResult JSON here instead of stdout");

    auto* fc_cmd = app.add_subcommand("forecast", "Forecast views on [from, to) and score against observed data");
    std::string fc_fit, fc_input, fc_video;
    std::size_t fc_from = 90;
    std::optional<std::size_t> fc_to;
    fc_cmd->add_option("--fit", fc_fit, "FitResult JSON (defaults to the stored fit)")->check(CLI::ExistingFile);
    fc_cmd->add_option("--input", fc_input, "CSV series")->check(CLI::ExistingFile);
    fc_cmd->add_option("--video", fc_video, "Stored video ID");
    fc_cmd->add_option("--data-dir", data_dir, "Data directory")->capture_default_str();
    fc_cmd->add_option("--from", fc_from, "First forecast day")->capture_default_str();
    fc_cmd->add_option("--to", fc_to, "End day, exclusive (defaults to series length)");
    fc_cmd->add_option("--out", out_path, "Write CSV here instead of stdout");

    auto* sim_cmd = app.add_subcommand("simulate-promotion", "Add an even promotion schedule and report the extra views");
    std::string sim_fit, sim_input;
    PromotionRequest request;
    sim_cmd->add_option("--fit", sim_fit, "FitResult JSON")->required()->check(CLI::ExistingFile);
    sim_cmd->add_option("--volume", request.volume, "Promotion volume (negative demotes)")->required();
    sim_cmd->add_option("--input", sim_input, "CSV series supplying the organic baseline")->check(CLI::ExistingFile);
    sim_cmd->add_option("--days", request.days, "Days the volume is spread over")->capture_default_str();
    sim_cmd->add_option("--horizon", request.horizon, "Output length in days")->capture_default_str();
    sim_cmd->add_option("--out", out_path, "Write CSV here instead of stdout");

    auto* map_cmd = app.add_subcommand("map-export", "Export a collection's endo-exo map as CSV");
    std::string map_collection;
    map_cmd->add_option("--collection", map_collection, "Collection name")->required();
    map_cmd->add_option("--data-dir", data_dir, "Data directory")->capture_default_str();
    map_cmd->add_option("--out", out_path, "Write CSV here instead of stdout");

    auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP API");
    std::string serve_config;
    std::optional<int> serve_port;
    std::string serve_data_dir;
    serve_cmd->add_option("--config", serve_config, "JSON config file")->check(CLI::ExistingFile);
    serve_cmd->add_option("--port", serve_port, "Port (overrides config and HIP_PORT)");
    serve_cmd->add_option("--data-dir", serve_data_dir, "Data directory (overrides config and HIP_DATA_DIR)");

    CLI11_PARSE(app, argc, argv);

    const Output out{out_path};
    try {
        if (*import_cmd) return run_import(import_inputs, data_dir, import_collection);
        if (*fit_cmd) {
            fit_cfg.execution = serial ? Execution::serial : Execution::parallel;
            fit_cfg.total_days = std::max(min_days, fit_cfg.train_days);
            return run_fit(fit_input, fit_video, data_dir, fit_cfg, min_days, out);
        }
        if (*fc_cmd) return run_forecast(fc_fit, fc_input, fc_video, data_dir, fc_from, fc_to, out);
        if (*sim_cmd) return run_simulate(sim_fit, sim_input, request, out);
        if (*map_cmd) return run_map_export(data_dir, map_collection, out);
        if (*serve_cmd) return run_serve(serve_config, serve_port, serve_data_dir);
    } catch (const Error& e) {
        std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << to_string(ErrorCode::io_error) << ": " << e.what() << "\n";
        return 2;
    }
    return 1;
}
