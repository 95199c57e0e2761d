// Command-line interface: depth completion (complete), evaluation (eval),
// benchmarking over synthetic suites or dataset directories (bench),
// hyperparameter sweeps (sweep), and synthetic scene generation (synth).
//
// Exit codes: 0 success, 1 input error, 2 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "anchord/anchord.hpp"

namespace fs = std::filesystem;

namespace {

struct SolverCliOptions {
    anchord::SolverConfig config;
    double sigma = 0.0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--patch-size", config.patch_size, "Patch size m in pixels")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        cmd->add_option("--lambda-mde", config.weights.lambda_mde, "Weight of the MDE alignment factors")
            ->capture_default_str();
        cmd->add_option("--lambda-sen", config.weights.lambda_sen, "Weight of the sensor factors")
            ->capture_default_str();
        cmd->add_option("--lambda-slp", config.weights.lambda_slp, "Weight of the log-slope factors")
            ->capture_default_str();
        cmd->add_option("--delta1", config.huber.delta1, "Huber threshold for MDE/sensor residuals (m)")
            ->capture_default_str();
        cmd->add_option("--delta2", config.huber.delta2, "Huber threshold for log-slope residuals")
            ->capture_default_str();
        cmd->add_option("--k", config.k, "Sample count for the global affine initialization")
            ->check(CLI::Range(2, 1 << 30))
            ->capture_default_str();
        cmd->add_option("--seed", config.seed, "Seed for all random sampling")->capture_default_str();
        cmd->add_option("--max-iterations", config.max_iterations, "Outer IRLS iteration cap")
            ->capture_default_str();
        cmd->add_option("--rel-tol", config.rel_tol, "Relative cost-decrease convergence threshold")
            ->capture_default_str();
        cmd->add_option("--depth-floor", config.depth_floor, "Minimum depth in meters")
            ->capture_default_str();
        cmd->add_option("--cg-max-iterations", config.cg_max_iterations, "CG iteration cap")
            ->capture_default_str();
        cmd->add_option("--cg-tol", config.cg_tol, "CG relative residual target")
            ->capture_default_str();
        cmd->add_option("--damping-init", config.damping_init, "Initial diagonal damping")
            ->capture_default_str();
        cmd->add_option("--sigma", sigma, "Gaussian smoothing stddev in pixels (0 = patch size)")
            ->capture_default_str();
    }
};

anchord::DepthMap load_depth_any(const std::string& path) {
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".png") {
        return anchord::load_depth_png16(path);
    }
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".adpf") {
        return anchord::load_raw_f32(path);
    }
    throw anchord::InputError("input-format", path + ": unknown depth extension (use .png or .adpf)");
}

void save_depth_any(const anchord::DepthMap& map, const std::string& path) {
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".png") {
        anchord::save_depth_png16(map, path);
        return;
    }
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".adpf") {
        anchord::save_raw_f32(map, path);
        return;
    }
    throw anchord::InputError("input-format", path + ": unknown depth extension (use .png or .adpf)");
}

void save_scalar_field(const anchord::ScalarField& field, const std::string& path) {
    anchord::DepthMap as_map(field.height, field.width, 0.0, true);
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".png") {
        // [0, 1] scaled to the full 16-bit range.
        std::vector<std::uint16_t> samples(field.values.size());
        for (std::size_t i = 0; i < field.values.size(); ++i) {
            const double v = std::clamp(field.values[i], 0.0, 1.0);
            samples[i] = static_cast<std::uint16_t>(std::lround(v * 65535.0));
        }
        anchord::detail::write_gray16_png(path, field.height, field.width, samples);
        return;
    }
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".adpf") {
        for (std::size_t i = 0; i < field.values.size(); ++i) {
            as_map.values[i] = field.values[i];
            as_map.valid[i] = field.values[i] > 0.0 ? 1 : 0;
        }
        anchord::save_raw_f32(as_map, path);
        return;
    }
    throw anchord::InputError("input-format", path + ": unknown extension (use .png or .adpf)");
}

anchord::UncertaintyNorm parse_uncertainty_norm(const std::string& text) {
    anchord::UncertaintyNorm norm;
    if (text == "image") {
        norm.mode = anchord::UncertaintyNorm::Mode::PerImageMax;
        return norm;
    }
    try {
        norm.external_value = std::stod(text);
    } catch (const std::exception&) {
        throw anchord::InputError("input-invalid",
                                  "--uncertainty-norm must be 'image' or a positive number");
    }
    if (!(norm.external_value > 0.0)) {
        throw anchord::InputError("input-invalid", "external uncertainty norm must be positive");
    }
    norm.mode = anchord::UncertaintyNorm::Mode::External;
    return norm;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw anchord::InputError("input-missing", "cannot open " + path + " for writing");
    }
    out << content;
}

std::string first_existing(const std::vector<std::string>& candidates) {
    for (const auto& path : candidates) {
        if (fs::exists(path)) return path;
    }
    return {};
}

/// Scans a dataset directory laid out as <stem>.sensor.png, <stem>.mde.png,
/// <stem>.gt.png, optional <stem>.mask.png (or .adpf counterparts), plus
/// <stem>.<name>.png for external predictions.
std::vector<anchord::BenchFrame> load_dataset_dir(const std::string& dir,
                                                  const std::vector<anchord::MethodSpec>& methods) {
    if (!fs::is_directory(dir)) {
        throw anchord::InputError("input-missing", dir + ": not a directory");
    }
    std::set<std::string> stems;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        for (const std::string suffix : {".sensor.png", ".sensor.adpf"}) {
            if (name.size() > suffix.size() &&
                name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
                stems.insert(name.substr(0, name.size() - suffix.size()));
            }
        }
    }
    if (stems.empty()) {
        throw anchord::InputError("input-missing", dir + ": no frames found (*.sensor.png)");
    }

    std::vector<anchord::BenchFrame> frames;
    for (const auto& stem : stems) {
        const std::string base = (fs::path(dir) / stem).string();
        anchord::BenchFrame frame;
        frame.id = stem;
        const auto require = [&](const std::string& kind) {
            const std::string path =
                first_existing({base + "." + kind + ".png", base + "." + kind + ".adpf"});
            if (path.empty()) {
                throw anchord::InputError("input-missing",
                                          base + "." + kind + ".png: required input missing");
            }
            return load_depth_any(path);
        };
        frame.sensor = require("sensor");
        frame.mde = require("mde");
        frame.gt = require("gt");
        const std::string mask_path = first_existing({base + ".mask.png"});
        if (!mask_path.empty()) {
            frame.object_mask = anchord::load_mask_png(mask_path);
        }
        for (const auto& spec : methods) {
            if (!spec.external) continue;
            const std::string pred_path = first_existing(
                {base + "." + spec.external_name + ".png", base + "." + spec.external_name + ".adpf"});
            if (!pred_path.empty()) {
                frame.external_predictions.emplace(spec.external_name, load_depth_any(pred_path));
            }
        }
        frames.push_back(std::move(frame));
    }
    return frames;
}

std::vector<anchord::MethodSpec> parse_methods_csv(const std::string& csv) {
    std::vector<anchord::MethodSpec> methods;
    std::stringstream stream(csv);
    std::string item;
    while (std::getline(stream, item, ',')) {
        if (!item.empty()) methods.push_back(anchord::parse_method_spec(item));
    }
    if (methods.empty()) {
        throw anchord::InputError("input-invalid", "method list is empty");
    }
    return methods;
}

std::vector<double> parse_double_csv(const std::string& csv, const std::string& what) {
    std::vector<double> values;
    std::stringstream stream(csv);
    std::string item;
    while (std::getline(stream, item, ',')) {
        if (item.empty()) continue;
        try {
            values.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw anchord::InputError("input-invalid", what + ": cannot parse '" + item + "'");
        }
    }
    if (values.empty()) {
        throw anchord::InputError("input-invalid", what + ": empty grid");
    }
    return values;
}

std::string format_double(double v) {
    std::ostringstream out;
    out << std::setprecision(12) << v;
    return out.str();
}

// ---------------------------------------------------------------------------
// complete

struct CompleteArgs {
    SolverCliOptions solver;
    std::string sensor_path;
    std::string mde_path;
    std::string output_path;
    std::string output_raw_path;
    std::string uncertainty_path;
    std::string uncertainty_norm = "image";
    std::string method = "anchord";
    std::string summary_path;
};

int run_complete_cmd(const CompleteArgs& args) {
    const auto start = std::chrono::steady_clock::now();
    const anchord::DepthMap sensor = load_depth_any(args.sensor_path);
    const anchord::DepthMap mde = load_depth_any(args.mde_path);

    anchord::PipelineOptions options;
    options.solver = args.solver.config;
    options.sigma = args.solver.sigma;
    options.method = anchord::parse_method(args.method);
    options.want_uncertainty = !args.uncertainty_path.empty();
    options.uncertainty_norm = parse_uncertainty_norm(args.uncertainty_norm);

    const anchord::PipelineResult result = anchord::run_complete(sensor, mde, options);
    if (!args.output_path.empty()) save_depth_any(result.prediction, args.output_path);
    if (!args.output_raw_path.empty()) anchord::save_raw_f32(result.prediction, args.output_raw_path);
    if (result.uncertainty.has_value()) save_scalar_field(*result.uncertainty, args.uncertainty_path);

    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - start)
                             .count();

    std::ostringstream summary;
    summary << "format: anchord-run-summary v1\n";
    summary << "method: " << args.method << "\n";
    summary << "sensor: " << args.sensor_path << "\n";
    summary << "mde: " << args.mde_path << "\n";
    summary << "patch_size: " << options.solver.patch_size << "\n";
    summary << "lambda_mde: " << format_double(options.solver.weights.lambda_mde) << "\n";
    summary << "lambda_sen: " << format_double(options.solver.weights.lambda_sen) << "\n";
    summary << "lambda_slp: " << format_double(options.solver.weights.lambda_slp) << "\n";
    summary << "delta1: " << format_double(options.solver.huber.delta1) << "\n";
    summary << "delta2: " << format_double(options.solver.huber.delta2) << "\n";
    summary << "k: " << options.solver.k << "\n";
    summary << "seed: " << options.solver.seed << "\n";
    summary << "sigma: " << format_double(options.sigma > 0 ? options.sigma
                                                            : options.solver.patch_size) << "\n";
    summary << "resized: " << result.resized_height << "x" << result.resized_width << "\n";
    summary << "init_slope: " << format_double(result.init_fit.slope) << "\n";
    summary << "init_bias: " << format_double(result.init_fit.bias) << "\n";
    summary << "degenerate_init: " << (result.stats.degenerate_init ? 1 : 0) << "\n";
    summary << "iterations: " << result.stats.iterations << "\n";
    summary << "initial_cost: " << format_double(result.stats.initial_cost) << "\n";
    summary << "final_cost: " << format_double(result.stats.final_cost) << "\n";
    summary << "converged: " << (result.stats.converged ? 1 : 0) << "\n";
    summary << "runtime_ms: " << elapsed << "\n";
    if (!args.summary_path.empty()) {
        write_text_file(args.summary_path, summary.str());
    } else {
        std::cout << summary.str();
    }
    return 0;
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
    std::string pred_path;
    std::string gt_path;
    std::string mask_path;
    std::string report_path;
    std::string json_path;
    std::string invalid_pred = "skip";
};

std::string render_region_report(const anchord::RegionReport& report) {
    std::ostringstream out;
    out << "format: anchord-region-report v1\n";
    const auto line = [&](const char* name, const std::optional<anchord::RegionMetrics>& region) {
        if (region.has_value()) {
            out << name << ": mae " << format_double(region->mae) << " rmse "
                << format_double(region->rmse) << " rel " << format_double(region->rel)
                << " pixels " << region->pixel_count << "\n";
        } else {
            out << name << ": absent\n";
        }
    };
    line("objects", report.objects);
    line("background", report.background);
    line("full", report.full);
    return out.str();
}

nlohmann::json region_report_to_json(const anchord::RegionReport& report) {
    return nlohmann::json{{"objects", anchord::detail::region_to_json(report.objects)},
                          {"background", anchord::detail::region_to_json(report.background)},
                          {"full", anchord::detail::region_to_json(report.full)}};
}

int run_eval_cmd(const EvalArgs& args) {
    const anchord::DepthMap pred = load_depth_any(args.pred_path);
    const anchord::DepthMap gt = load_depth_any(args.gt_path);
    anchord::BoolMask mask(gt.height, gt.width, false);
    if (!args.mask_path.empty()) {
        mask = anchord::load_mask_png(args.mask_path);
    }
    const anchord::InvalidPred mode = args.invalid_pred == "penalize"
                                          ? anchord::InvalidPred::Penalize
                                          : anchord::InvalidPred::Skip;
    const anchord::RegionReport report = anchord::evaluate_regions(pred, gt, mask, mode);
    const std::string text = render_region_report(report);
    if (!args.report_path.empty()) {
        write_text_file(args.report_path, text);
    } else {
        std::cout << text;
    }
    if (!args.json_path.empty()) {
        write_text_file(args.json_path, region_report_to_json(report).dump(2) + "\n");
    }
    return 0;
}

// ---------------------------------------------------------------------------
// bench

struct BenchArgs {
    SolverCliOptions solver;
    std::string dataset_dir;
    int synthetic_count = 0;
    std::uint64_t scene_seed = 1;
    std::string methods_csv = "anchord,no-patch,no-smooth,affine,inpaint";
    std::string report_path;
    std::string json_path;
    std::string invalid_pred = "skip";
    int threads = 1;
};

int run_bench_cmd(const BenchArgs& args) {
    const std::vector<anchord::MethodSpec> methods = parse_methods_csv(args.methods_csv);
    std::vector<anchord::BenchFrame> frames;
    if (!args.dataset_dir.empty()) {
        frames = load_dataset_dir(args.dataset_dir, methods);
    } else if (args.synthetic_count > 0) {
        frames = anchord::synthetic_suite(args.synthetic_count, args.scene_seed);
    } else {
        throw anchord::InputError("input-invalid", "bench needs --dataset or --synthetic");
    }

    anchord::BenchmarkConfig config;
    config.pipeline.solver = args.solver.config;
    config.pipeline.sigma = args.solver.sigma;
    config.invalid_pred = args.invalid_pred == "penalize" ? anchord::InvalidPred::Penalize
                                                          : anchord::InvalidPred::Skip;
    config.threads = args.threads;

    const anchord::BenchmarkReport report = anchord::run_benchmark(frames, methods, config);
    const std::string text = anchord::render_report_text(report);
    if (!args.report_path.empty()) {
        write_text_file(args.report_path, text);
    } else {
        std::cout << text;
    }
    if (!args.json_path.empty()) {
        write_text_file(args.json_path, anchord::report_to_json(report).dump(2) + "\n");
    }
    return 0;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepArgs {
    SolverCliOptions solver;
    std::string dataset_dir;
    int synthetic_count = 0;
    std::uint64_t scene_seed = 1;
    std::string lambda_mde_grid = "0.625,2.5,10";
    std::string lambda_sen_grid = "0.125,0.5,2";
    std::string report_path;
    std::string json_path;
    int threads = 1;
};

int run_sweep_cmd(const SweepArgs& args) {
    const std::vector<double> mde_grid = parse_double_csv(args.lambda_mde_grid, "--lambda-mde-grid");
    const std::vector<double> sen_grid = parse_double_csv(args.lambda_sen_grid, "--lambda-sen-grid");

    const std::vector<anchord::MethodSpec> methods = {{false, anchord::Method::Anchord, ""}};
    std::vector<anchord::BenchFrame> frames;
    if (!args.dataset_dir.empty()) {
        frames = load_dataset_dir(args.dataset_dir, methods);
    } else if (args.synthetic_count > 0) {
        frames = anchord::synthetic_suite(args.synthetic_count, args.scene_seed);
    } else {
        throw anchord::InputError("input-invalid", "sweep needs --dataset or --synthetic");
    }

    std::vector<std::vector<double>> full_mae(mde_grid.size(),
                                              std::vector<double>(sen_grid.size(),
                                                                  std::numeric_limits<double>::quiet_NaN()));
    nlohmann::json cell_failures = nlohmann::json::array();
    for (std::size_t i = 0; i < mde_grid.size(); ++i) {
        for (std::size_t j = 0; j < sen_grid.size(); ++j) {
            anchord::BenchmarkConfig config;
            config.pipeline.solver = args.solver.config;
            config.pipeline.sigma = args.solver.sigma;
            config.pipeline.solver.weights.lambda_mde = mde_grid[i];
            config.pipeline.solver.weights.lambda_sen = sen_grid[j];
            config.threads = args.threads;
            try {
                const anchord::BenchmarkReport report =
                    anchord::run_benchmark(frames, methods, config);
                if (!report.methods.empty() && report.methods[0].full.has_value()) {
                    full_mae[i][j] = report.methods[0].full->mae;
                }
                for (const auto& failure : report.failures) {
                    cell_failures.push_back({{"lambda_mde", mde_grid[i]},
                                             {"lambda_sen", sen_grid[j]},
                                             {"frame", failure.frame_id},
                                             {"error_class", failure.error_class},
                                             {"message", failure.message}});
                }
            } catch (const anchord::InputError& e) {
                cell_failures.push_back({{"lambda_mde", mde_grid[i]},
                                         {"lambda_sen", sen_grid[j]},
                                         {"error_class", e.error_class()},
                                         {"message", e.what()}});
            } catch (const anchord::NumericError& e) {
                cell_failures.push_back({{"lambda_mde", mde_grid[i]},
                                         {"lambda_sen", sen_grid[j]},
                                         {"error_class", e.error_class()},
                                         {"message", e.what()}});
            }
        }
    }

    std::ostringstream text;
    text << "format: anchord-sweep-report v1\n";
    text << "frames: " << frames.size() << "\n";
    text << "metric: full-region MAE (m), rows lambda_mde, cols lambda_sen\n\n";
    text << std::setw(10) << "" << " ";
    for (const double sen : sen_grid) text << std::setw(10) << sen << " ";
    text << "\n";
    for (std::size_t i = 0; i < mde_grid.size(); ++i) {
        text << std::setw(10) << mde_grid[i] << " ";
        for (std::size_t j = 0; j < sen_grid.size(); ++j) {
            if (std::isnan(full_mae[i][j])) {
                text << std::setw(10) << "-" << " ";
            } else {
                text << std::setw(10) << std::fixed << std::setprecision(5) << full_mae[i][j] << " ";
                text.unsetf(std::ios_base::fixed);
                text << std::setprecision(6);
            }
        }
        text << "\n";
    }
    if (!args.report_path.empty()) {
        write_text_file(args.report_path, text.str());
    } else {
        std::cout << text.str();
    }

    if (!args.json_path.empty()) {
        nlohmann::json cells = nlohmann::json::array();
        for (const auto& row : full_mae) {
            nlohmann::json json_row = nlohmann::json::array();
            for (const double v : row) {
                if (std::isnan(v)) {
                    json_row.push_back(nullptr);
                } else {
                    json_row.push_back(v);
                }
            }
            cells.push_back(json_row);
        }
        const nlohmann::json doc{{"format", "anchord-sweep-report"},
                                 {"version", 1},
                                 {"frames", frames.size()},
                                 {"lambda_mde_grid", mde_grid},
                                 {"lambda_sen_grid", sen_grid},
                                 {"full_mae", cells},
                                 {"failures", cell_failures}};
        write_text_file(args.json_path, doc.dump(2) + "\n");
    }
    return 0;
}

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
    std::string out_dir;
    int count = 1;
    std::uint64_t seed = 1;
    std::string format = "png";
    anchord::SceneParams params;
};

int run_synth_cmd(const SynthArgs& args) {
    if (args.format != "png" && args.format != "raw") {
        throw anchord::InputError("input-invalid", "--format must be png or raw");
    }
    fs::create_directories(args.out_dir);
    for (int i = 0; i < args.count; ++i) {
        const std::uint64_t seed = args.seed + static_cast<std::uint64_t>(i);
        const anchord::SyntheticScene scene = anchord::generate_scene(seed, args.params);
        const std::string stem =
            (fs::path(args.out_dir) / ("scene-" + std::to_string(seed))).string();
        if (args.format == "png") {
            anchord::save_depth_png16(scene.sensor, stem + ".sensor.png");
            anchord::save_depth_png16(scene.mde, stem + ".mde.png");
            anchord::save_depth_png16(scene.gt, stem + ".gt.png");
        } else {
            anchord::save_raw_f32(scene.sensor, stem + ".sensor.adpf");
            anchord::save_raw_f32(scene.mde, stem + ".mde.adpf");
            anchord::save_raw_f32(scene.gt, stem + ".gt.adpf");
        }
        anchord::save_mask_png(scene.object_mask, stem + ".mask.png");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Depth grounding: fuse metric sensor depth with a monocular depth prior"};
    app.require_subcommand(1);

    CompleteArgs complete_args;
    auto* complete = app.add_subcommand("complete", "Run one depth completion method on a frame");
    complete->set_config("--config");
    complete->add_option("--sensor", complete_args.sensor_path, "Sensor depth map (.png or .adpf)")
        ->required();
    complete->add_option("--mde", complete_args.mde_path, "Monocular prior (.png or .adpf)")
        ->required();
    complete->add_option("--output", complete_args.output_path, "Predicted depth output path");
    complete->add_option("--output-raw", complete_args.output_raw_path,
                         "Additional lossless output (.adpf)");
    complete->add_option("--uncertainty", complete_args.uncertainty_path,
                         "Residual uncertainty map output path");
    complete->add_option("--uncertainty-norm", complete_args.uncertainty_norm,
                         "'image' or a positive dataset-wide normalization constant")
        ->capture_default_str();
    complete->add_option("--method", complete_args.method,
                         "anchord | no-patch | no-smooth | affine | inpaint")
        ->capture_default_str();
    complete->add_option("--summary", complete_args.summary_path, "Run summary output path");
    complete_args.solver.attach(complete);

    EvalArgs eval_args;
    auto* eval = app.add_subcommand("eval", "Evaluate a prediction against ground truth");
    eval->set_config("--config");
    eval->add_option("--pred", eval_args.pred_path, "Prediction (.png or .adpf)")->required();
    eval->add_option("--gt", eval_args.gt_path, "Ground truth (.png or .adpf)")->required();
    eval->add_option("--mask", eval_args.mask_path, "Object mask PNG");
    eval->add_option("--report", eval_args.report_path, "Text report path (default stdout)");
    eval->add_option("--json", eval_args.json_path, "JSON report path");
    eval->add_option("--invalid-pred", eval_args.invalid_pred, "skip | penalize")
        ->capture_default_str();

    BenchArgs bench_args;
    auto* bench = app.add_subcommand("bench", "Benchmark methods on a dataset or synthetic suite");
    bench->set_config("--config");
    bench->add_option("--dataset", bench_args.dataset_dir, "Dataset directory");
    bench->add_option("--synthetic", bench_args.synthetic_count, "Number of synthetic scenes");
    bench->add_option("--scene-seed", bench_args.scene_seed, "Base seed for synthetic scenes")
        ->capture_default_str();
    bench->add_option("--methods", bench_args.methods_csv, "Comma-separated method list")
        ->capture_default_str();
    bench->add_option("--report", bench_args.report_path, "Text report path (default stdout)");
    bench->add_option("--json", bench_args.json_path, "JSON report path");
    bench->add_option("--invalid-pred", bench_args.invalid_pred, "skip | penalize")
        ->capture_default_str();
    bench->add_option("--threads", bench_args.threads, "Worker threads across frames")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    bench_args.solver.attach(bench);

    SweepArgs sweep_args;
    auto* sweep = app.add_subcommand("sweep", "Sweep lambda_mde x lambda_sen and report full MAE");
    sweep->set_config("--config");
    sweep->add_option("--dataset", sweep_args.dataset_dir, "Dataset directory");
    sweep->add_option("--synthetic", sweep_args.synthetic_count, "Number of synthetic scenes");
    sweep->add_option("--scene-seed", sweep_args.scene_seed, "Base seed for synthetic scenes")
        ->capture_default_str();
    sweep->add_option("--lambda-mde-grid", sweep_args.lambda_mde_grid, "CSV grid for lambda_mde")
        ->capture_default_str();
    sweep->add_option("--lambda-sen-grid", sweep_args.lambda_sen_grid, "CSV grid for lambda_sen")
        ->capture_default_str();
    sweep->add_option("--report", sweep_args.report_path, "Text report path (default stdout)");
    sweep->add_option("--json", sweep_args.json_path, "JSON report path");
    sweep->add_option("--threads", sweep_args.threads, "Worker threads across frames")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sweep_args.solver.attach(sweep);

    SynthArgs synth_args;
    auto* synth = app.add_subcommand("synth", "Generate synthetic scenes to disk");
    synth->set_config("--config");
    synth->add_option("--out", synth_args.out_dir, "Output directory")->required();
    synth->add_option("--count", synth_args.count, "Number of scenes")->capture_default_str();
    synth->add_option("--seed", synth_args.seed, "Base seed")->capture_default_str();
    synth->add_option("--format", synth_args.format, "png | raw")->capture_default_str();
    synth->add_option("--width", synth_args.params.width, "Scene width")->capture_default_str();
    synth->add_option("--height", synth_args.params.height, "Scene height")->capture_default_str();
    synth->add_option("--hole-fraction", synth_args.params.hole_fraction,
                      "Fraction of object pixels invalidated")
        ->capture_default_str();
    synth->add_option("--corrupt-fraction", synth_args.params.corrupt_fraction,
                      "Fraction of object pixels biased too deep")
        ->capture_default_str();
    synth->add_option("--sigma-sen", synth_args.params.sigma_sen, "Sensor noise stddev (m)")
        ->capture_default_str();
    synth->add_option("--sigma-mde", synth_args.params.sigma_mde, "Prior noise stddev")
        ->capture_default_str();
    synth->add_option("--min-objects", synth_args.params.min_objects, "Minimum object count")
        ->capture_default_str();
    synth->add_option("--max-objects", synth_args.params.max_objects, "Maximum object count")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (complete->parsed()) return run_complete_cmd(complete_args);
        if (eval->parsed()) return run_eval_cmd(eval_args);
        if (bench->parsed()) return run_bench_cmd(bench_args);
        if (sweep->parsed()) return run_sweep_cmd(sweep_args);
        if (synth->parsed()) return run_synth_cmd(synth_args);
    } catch (const anchord::InputError& e) {
        std::cerr << "error: " << e.error_class() << ": " << e.what() << std::endl;
        return 1;
    } catch (const anchord::NumericError& e) {
        std::cerr << "error: " << e.error_class() << ": " << e.what() << std::endl;
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << std::endl;
        return 2;
    }
    return 0;
}
