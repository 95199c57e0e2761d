#pragma once

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "anchord/depth_map.hpp"
#include "anchord/errors.hpp"
#include "anchord/metrics.hpp"
#include "anchord/pipeline.hpp"
#include "anchord/synthetic.hpp"

namespace anchord {

/// A method under benchmark: one of the built-in pipeline methods, or an
/// externally produced prediction file identified by name (for methods
/// that cannot run inside the harness, e.g. model inference outputs).
struct MethodSpec {
    bool external = false;
    Method method = Method::Anchord;
    std::string external_name;

    std::string name() const { return external ? "external:" + external_name : method_name(method); }
};

inline MethodSpec parse_method_spec(const std::string& text) {
    MethodSpec spec;
    if (text.rfind("external:", 0) == 0) {
        spec.external = true;
        spec.external_name = text.substr(9);
        if (spec.external_name.empty()) {
            throw InputError("input-invalid", "external method needs a name, e.g. external:da3");
        }
        return spec;
    }
    spec.method = parse_method(text);
    return spec;
}

/// One evaluation frame: inputs, ground truth, optional object mask, and
/// any externally supplied predictions keyed by name.
struct BenchFrame {
    std::string id;
    DepthMap sensor;
    DepthMap mde;
    DepthMap gt;
    std::optional<BoolMask> object_mask;
    std::map<std::string, DepthMap> external_predictions;
};

struct BenchmarkConfig {
    PipelineOptions pipeline;  // pipeline.method is ignored; methods come per MethodSpec
    InvalidPred invalid_pred = InvalidPred::Skip;
    int threads = 1;
};

/// Per-method aggregate: arithmetic mean of each per-frame region metric
/// over the frames the method succeeded on.
struct MethodResult {
    std::string method;
    int frames_evaluated = 0;
    std::optional<RegionMetrics> objects;
    std::optional<RegionMetrics> background;
    std::optional<RegionMetrics> full;
    std::vector<RegionReport> per_frame;  // aligned with report frame ids where evaluated
};

struct BenchmarkFailure {
    std::string frame_id;
    std::string method;
    std::string error_class;
    std::string message;
};

struct BenchmarkReport {
    std::vector<std::string> frame_ids;
    std::vector<MethodResult> methods;
    std::vector<BenchmarkFailure> failures;
};

namespace detail {

inline std::optional<RegionMetrics> aggregate_region(
    const std::vector<RegionReport>& reports,
    const std::optional<RegionMetrics> RegionReport::*member) {
    double mae = 0.0;
    double rmse = 0.0;
    double rel = 0.0;
    std::int64_t pixels = 0;
    int count = 0;
    for (const auto& report : reports) {
        const auto& region = report.*member;
        if (!region.has_value()) continue;
        mae += region->mae;
        rmse += region->rmse;
        rel += region->rel;
        pixels += region->pixel_count;
        ++count;
    }
    if (count == 0) return std::nullopt;
    RegionMetrics out;
    out.mae = mae / count;
    out.rmse = rmse / count;
    out.rel = rel / count;
    out.pixel_count = pixels;
    return out;
}

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Work items
/// are preassigned by index stride, and each writes only its own slots,
/// so the outcome does not depend on the thread count or scheduling.
template <typename Fn>
inline void parallel_for_index(int count, int threads, Fn&& fn) {
    threads = std::max(1, std::min(threads, count));
    if (threads <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        workers.emplace_back([t, count, threads, &fn] {
            for (int i = t; i < count; i += threads) fn(i);
        });
    }
    for (auto& worker : workers) worker.join();
}

}  // namespace detail

/// Runs every method on every frame and aggregates per-region metrics
/// (mean over frames). Per-frame failures are recorded, not fatal.
/// Frames may be processed in parallel; aggregation order is fixed by
/// frame index, so reports are identical for any thread count.
inline BenchmarkReport run_benchmark(const std::vector<BenchFrame>& frames,
                                     const std::vector<MethodSpec>& methods,
                                     const BenchmarkConfig& config) {
    if (frames.empty()) {
        throw InputError("input-invalid", "benchmark needs at least one frame");
    }
    BenchmarkReport report;
    report.frame_ids.reserve(frames.size());
    for (const auto& frame : frames) report.frame_ids.push_back(frame.id);

    struct Cell {
        bool ok = false;
        RegionReport regions;
        BenchmarkFailure failure;
    };

    const int frame_count = static_cast<int>(frames.size());
    const int method_count = static_cast<int>(methods.size());
    std::vector<Cell> cells(static_cast<std::size_t>(frame_count) * method_count);

    detail::parallel_for_index(frame_count, config.threads, [&](int f) {
        const auto& frame = frames[static_cast<std::size_t>(f)];
        const BoolMask empty_mask(frame.gt.height, frame.gt.width, false);
        const BoolMask& mask = frame.object_mask.has_value() ? *frame.object_mask : empty_mask;
        for (int mi = 0; mi < method_count; ++mi) {
            auto& cell = cells[static_cast<std::size_t>(f) * method_count + mi];
            const auto& spec = methods[static_cast<std::size_t>(mi)];
            try {
                DepthMap prediction;
                if (spec.external) {
                    const auto it = frame.external_predictions.find(spec.external_name);
                    if (it == frame.external_predictions.end()) {
                        throw InputError("input-missing", "no external prediction '" +
                                                              spec.external_name + "' for frame " +
                                                              frame.id);
                    }
                    prediction = it->second;
                } else {
                    PipelineOptions options = config.pipeline;
                    options.method = spec.method;
                    options.want_uncertainty = false;
                    prediction = run_complete(frame.sensor, frame.mde, options).prediction;
                }
                cell.regions = evaluate_regions(prediction, frame.gt, mask, config.invalid_pred);
                cell.ok = true;
            } catch (const InputError& e) {
                cell.failure = {frame.id, spec.name(), e.error_class(), e.what()};
            } catch (const NumericError& e) {
                cell.failure = {frame.id, spec.name(), e.error_class(), e.what()};
            }
        }
    });

    for (int mi = 0; mi < method_count; ++mi) {
        MethodResult result;
        result.method = methods[static_cast<std::size_t>(mi)].name();
        for (int f = 0; f < frame_count; ++f) {
            const auto& cell = cells[static_cast<std::size_t>(f) * method_count + mi];
            if (cell.ok) {
                result.per_frame.push_back(cell.regions);
                ++result.frames_evaluated;
            } else {
                report.failures.push_back(cell.failure);
            }
        }
        result.objects = detail::aggregate_region(result.per_frame, &RegionReport::objects);
        result.background = detail::aggregate_region(result.per_frame, &RegionReport::background);
        result.full = detail::aggregate_region(result.per_frame, &RegionReport::full);
        report.methods.push_back(std::move(result));
    }
    return report;
}

/// The default synthetic evaluation suite: `count` scenes with seeds
/// base_seed, base_seed + 1, ...
inline std::vector<BenchFrame> synthetic_suite(int count, std::uint64_t base_seed,
                                               const SceneParams& params = {}) {
    if (count < 1) {
        throw InputError("input-invalid", "synthetic suite needs at least one scene");
    }
    std::vector<BenchFrame> frames;
    frames.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        SyntheticScene scene = generate_scene(base_seed + static_cast<std::uint64_t>(i), params);
        BenchFrame frame;
        frame.id = "synthetic-" + std::to_string(base_seed + static_cast<std::uint64_t>(i));
        frame.sensor = std::move(scene.sensor);
        frame.mde = std::move(scene.mde);
        frame.gt = std::move(scene.gt);
        frame.object_mask = std::move(scene.object_mask);
        frames.push_back(std::move(frame));
    }
    return frames;
}

namespace detail {

inline std::string format_metric(const std::optional<RegionMetrics>& region, double RegionMetrics::*field) {
    if (!region.has_value()) return "-";
    std::ostringstream out;
    out << std::fixed << std::setprecision(4) << ((*region).*field);
    return out.str();
}

inline nlohmann::json region_to_json(const std::optional<RegionMetrics>& region) {
    if (!region.has_value()) return nullptr;
    return nlohmann::json{{"mae", region->mae},
                          {"rmse", region->rmse},
                          {"rel", region->rel},
                          {"pixel_count", region->pixel_count}};
}

}  // namespace detail

/// Line-oriented key/value header plus a fixed-width table mirroring the
/// objects / background / full layout.
inline std::string render_report_text(const BenchmarkReport& report) {
    std::ostringstream out;
    out << "format: anchord-benchmark-report v1\n";
    out << "frames: " << report.frame_ids.size() << "\n";
    out << "methods: " << report.methods.size() << "\n";
    out << "failures: " << report.failures.size() << "\n";
    for (const auto& failure : report.failures) {
        out << "failure: " << failure.frame_id << " " << failure.method << " "
            << failure.error_class << " " << failure.message << "\n";
    }
    out << "\n";

    const int name_width = 18;
    out << std::left << std::setw(name_width) << "Method"
        << "| Objects                | Background             | Full\n";
    out << std::left << std::setw(name_width) << ""
        << "| MAE    RMSE   REL      | MAE    RMSE   REL      | MAE    RMSE   REL\n";
    for (const auto& method : report.methods) {
        out << std::left << std::setw(name_width) << method.method;
        for (const auto* region : {&method.objects, &method.background, &method.full}) {
            out << "| " << std::setw(6) << detail::format_metric(*region, &RegionMetrics::mae) << " "
                << std::setw(6) << detail::format_metric(*region, &RegionMetrics::rmse) << " "
                << std::setw(6) << detail::format_metric(*region, &RegionMetrics::rel) << "   ";
        }
        out << "\n";
    }
    return out.str();
}

inline nlohmann::json report_to_json(const BenchmarkReport& report) {
    nlohmann::json methods = nlohmann::json::array();
    for (const auto& method : report.methods) {
        methods.push_back({{"method", method.method},
                           {"frames_evaluated", method.frames_evaluated},
                           {"objects", detail::region_to_json(method.objects)},
                           {"background", detail::region_to_json(method.background)},
                           {"full", detail::region_to_json(method.full)}});
    }
    nlohmann::json failures = nlohmann::json::array();
    for (const auto& failure : report.failures) {
        failures.push_back({{"frame", failure.frame_id},
                            {"method", failure.method},
                            {"error_class", failure.error_class},
                            {"message", failure.message}});
    }
    return nlohmann::json{{"format", "anchord-benchmark-report"},
                          {"version", 1},
                          {"frames", report.frame_ids},
                          {"methods", methods},
                          {"failures", failures}};
}

}  // namespace anchord
