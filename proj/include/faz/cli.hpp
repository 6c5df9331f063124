#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "faz/config.hpp"
#include "faz/error.hpp"
#include "faz/evaluation.hpp"
#include "faz/image_io.hpp"
#include "faz/overlay.hpp"
#include "faz/pipeline.hpp"
#include "faz/synth.hpp"
#include "faz/version.hpp"

namespace faz::cli {

// Exit status contract: 0 success, 1 usage error, 2 i/o or format error,
// 3 localization failure (segment only).
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kIoError = 2;
inline constexpr int kLocalizationFailed = 3;

namespace cli_detail {

inline PipelineConfig resolve_config(const std::string& explicit_path) {
    if (!explicit_path.empty()) return load_config(explicit_path);
    if (std::filesystem::exists("faz.conf")) return load_config("faz.conf");
    return PipelineConfig{};
}

inline nlohmann::json result_json(const std::string& image_path, const GrayImage& img,
                                  double size_mm, const FazResult* result) {
    nlohmann::json j;
    j["image"] = image_path;
    j["width"] = img.width();
    j["height"] = img.height();
    j["size_mm"] = size_mm;
    if (result) {
        j["status"] = "ok";
        j["area_px"] = result->area_px;
        j["area_mm2"] = result->area_mm2;
        j["centroid"] = {result->centroid_row, result->centroid_col};
    } else {
        j["status"] = "localization_failed";
    }
    return j;
}

inline void emit_json(const nlohmann::json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw IoError("cannot open for writing: " + out_path);
        out << j.dump(2) << "\n";
    }
}

inline void dump_stage_trace(const StageTrace& trace, const FazResult& result,
                             const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create debug directory " + dir);
    auto p = [&](const char* name) { return (fs::path(dir) / name).string(); };

    save_gray(trace.top_hat, p("00_tophat.png"));
    // Gradient magnitude rescaled so the strongest response maps to 255.
    float peak = 0.0f;
    for (float m : trace.canny_trace.magnitude) peak = std::max(peak, m);
    GrayImage grad(trace.top_hat.width(), trace.top_hat.height());
    if (peak > 0.0f)
        for (std::size_t i = 0; i < grad.size(); ++i)
            grad.data()[i] = static_cast<std::uint8_t>(
                255.0f * trace.canny_trace.magnitude[i] / peak + 0.5f);
    save_gray(grad, p("01_gradient.png"));
    save_mask(trace.edges, p("02_edges.png"));
    save_mask(trace.candidates_mask, p("03_candidates.png"));
    save_mask(trace.kept_mask, p("04_filtered.png"));
    save_mask(trace.selected_mask, p("05_selected.png"));
    save_mask(trace.seed, p("06_seed.png"));
    for (std::size_t s = 0; s < trace.grow_sweeps.size(); ++s) {
        char name[48];
        std::snprintf(name, sizeof name, "07_grow_sweep_%03zu.png", s);
        save_mask(trace.grow_sweeps[s], p(name));
    }
    save_mask(result.mask, p("08_final.png"));

    nlohmann::json diag = nlohmann::json::array();
    for (const auto& d : result.diagnostics)
        diag.push_back({{"stage", d.stage},
                        {"in", d.in_count},
                        {"out", d.out_count},
                        {"millis", d.millis}});
    std::ofstream out(fs::path(dir) / "diagnostics.json", std::ios::binary);
    out << diag.dump(2) << "\n";
}

}  // namespace cli_detail

/// Parses argv and runs one subcommand; returns the process exit status.
inline int run(int argc, const char* const* argv) {
    CLI::App app{"Foveal avascular zone segmentation for OCT-A images"};
    app.set_version_flag("--version", std::string("faz ") + kVersion);
    app.require_subcommand(1);

    // segment
    auto* segment = app.add_subcommand("segment", "Segment the FAZ in one image");
    std::string seg_input, seg_config, seg_out_mask, seg_out_json, seg_debug_dir, seg_overlay;
    double seg_size_mm = 0.0;  // 0: take the config value
    segment->add_option("input", seg_input, "Input image (PNG or binary PGM)")->required();
    segment->add_option("--config", seg_config, "Pipeline config file");
    segment->add_option("--size-mm", seg_size_mm, "Physical extent of one image side")
        ->check(CLI::PositiveNumber);
    segment->add_option("--out-mask", seg_out_mask, "Write the segmentation mask PNG here");
    segment->add_option("--out-json", seg_out_json, "Write the JSON result here");
    segment->add_option("--debug-dir", seg_debug_dir, "Dump per-stage intermediates");
    segment->add_option("--overlay", seg_overlay, "Write an RGB overlay with the contour");

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "Batch-evaluate against ground truth");
    std::string eval_manifest, eval_config, eval_json, eval_csv;
    int eval_threads = 1;
    evaluate->add_option("--manifest", eval_manifest, "Dataset manifest CSV")->required();
    evaluate->add_option("--config", eval_config, "Pipeline config file");
    evaluate->add_option("--report-json", eval_json, "Write the JSON report here");
    evaluate->add_option("--report-csv", eval_csv, "Write the per-image CSV here");
    evaluate->add_option("--threads", eval_threads, "Worker threads")
        ->check(CLI::PositiveNumber);

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a synthetic validation suite");
    std::string synth_dir, synth_artifacts = "off";
    int synth_n = 20, synth_width = 320, synth_height = 320;
    std::uint64_t synth_seed = 1;
    double synth_size_mm = 3.0;
    synth->add_option("--out-dir", synth_dir, "Output directory")->required();
    synth->add_option("--n", synth_n, "Number of images")->check(CLI::PositiveNumber);
    synth->add_option("--seed", synth_seed, "Master seed");
    synth->add_option("--artifacts", synth_artifacts, "Border-strip artifacts on half the suite")
        ->check(CLI::IsMember({"on", "off"}));
    synth->add_option("--size-mm", synth_size_mm, "Extent recorded in the manifest")
        ->check(CLI::PositiveNumber);
    synth->add_option("--width", synth_width)->check(CLI::PositiveNumber);
    synth->add_option("--height", synth_height)->check(CLI::PositiveNumber);

    // overlay
    auto* overlay_cmd = app.add_subcommand("overlay", "Burn a mask contour into an image");
    std::string ov_input, ov_mask, ov_out;
    overlay_cmd->add_option("input", ov_input, "Input image")->required();
    overlay_cmd->add_option("--mask", ov_mask, "Mask PNG")->required();
    overlay_cmd->add_option("--out", ov_out, "Output RGB PNG")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (segment->parsed()) {
            PipelineConfig cfg = cli_detail::resolve_config(seg_config);
            if (seg_size_mm > 0.0) cfg.size_mm = seg_size_mm;
            const GrayImage img = load_grayscale(seg_input);
            StageTrace trace;
            try {
                const FazResult result =
                    extract_faz(img, cfg, seg_debug_dir.empty() ? nullptr : &trace);
                if (!seg_out_mask.empty()) save_mask(result.mask, seg_out_mask);
                if (!seg_overlay.empty()) overlay(img, result.mask, seg_overlay);
                if (!seg_debug_dir.empty())
                    cli_detail::dump_stage_trace(trace, result, seg_debug_dir);
                cli_detail::emit_json(
                    cli_detail::result_json(seg_input, img, cfg.size_mm, &result),
                    seg_out_json);
            } catch (const LocalizationFailed& e) {
                std::cerr << "faz: " << e.what() << "\n";
                cli_detail::emit_json(
                    cli_detail::result_json(seg_input, img, cfg.size_mm, nullptr),
                    seg_out_json);
                return kLocalizationFailed;
            }
        } else if (evaluate->parsed()) {
            const PipelineConfig cfg = cli_detail::resolve_config(eval_config);
            const DatasetManifest manifest = load_manifest(eval_manifest);
            const EvalReport report = batch_evaluate(manifest, cfg, eval_threads);
            if (!eval_json.empty()) write_report_json(report, eval_json);
            if (!eval_csv.empty()) write_report_csv(report, eval_csv);
            if (eval_json.empty() && eval_csv.empty())
                std::cout << report_to_json(report).dump(2) << "\n";
        } else if (synth->parsed()) {
            SynthSpec base;
            base.width = synth_width;
            base.height = synth_height;
            base.center_row = synth_height / 2.0;
            base.center_col = synth_width / 2.0;
            generate_suite(synth_n, base, synth_seed, synth_dir, synth_artifacts == "on",
                           synth_size_mm);
        } else if (overlay_cmd->parsed()) {
            overlay(load_grayscale(ov_input), load_mask(ov_mask), ov_out);
        }
    } catch (const Error& e) {
        std::cerr << "faz: " << e.what() << "\n";
        return kIoError;
    } catch (const std::exception& e) {
        std::cerr << "faz: " << e.what() << "\n";
        return kIoError;
    }
    return kOk;
}

}  // namespace faz::cli
