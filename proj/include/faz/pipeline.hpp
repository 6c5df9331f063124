#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "faz/candidates.hpp"
#include "faz/canny.hpp"
#include "faz/config.hpp"
#include "faz/error.hpp"
#include "faz/image.hpp"
#include "faz/morphology.hpp"
#include "faz/region_grow.hpp"

namespace faz {

/// Per-stage record: foreground/candidate counts in and out, wall time.
struct StageDiag {
    std::string stage;
    long long in_count = 0;
    long long out_count = 0;
    double millis = 0.0;
};

struct FazResult {
    BinaryMask mask;
    double centroid_row = 0.0;  // recomputed on the final mask
    double centroid_col = 0.0;
    long long area_px = 0;
    double area_mm2 = 0.0;
    // Centroid of the preliminary (pre-grow) candidate, the quantity the
    // localization gold standard was originally defined on.
    double seed_centroid_row = 0.0;
    double seed_centroid_col = 0.0;
    GrowStats grow_stats;
    std::vector<StageDiag> diagnostics;
};

/// Intermediate products of one run, captured only when requested (debug
/// dumps, figures).
struct StageTrace {
    GrayImage top_hat;
    CannyTrace canny_trace;
    BinaryMask edges;
    BinaryMask candidates_mask;  // union of all extracted candidates
    BinaryMask kept_mask;        // union of candidates surviving the filters
    BinaryMask selected_mask;    // the chosen preliminary candidate
    BinaryMask seed;
    std::vector<BinaryMask> grow_sweeps;
};

/// area_px * size_mm^2 / (width * height).
inline double area_mm2(long long area_px, int width, int height, const PhysicalExtent& extent) {
    if (width <= 0 || height <= 0)
        throw DimensionMismatch("area_mm2 requires positive dimensions");
    return static_cast<double>(area_px) * extent.size_mm * extent.size_mm /
           (static_cast<double>(width) * static_cast<double>(height));
}

/// Full chain: top-hat -> canny -> candidate extraction -> false-positive
/// filtering -> perimeter selection -> seed erosion -> region growing.
/// Region growing reads the original intensities; the top-hat image only
/// drives edge detection. Throws LocalizationFailed when no usable candidate
/// survives.
inline FazResult extract_faz(const GrayImage& img, const PipelineConfig& cfg,
                             StageTrace* trace = nullptr) {
    cfg.validate();
    FazResult result;
    using clock = std::chrono::steady_clock;
    auto stamp = [&](const char* stage, clock::time_point t0, long long in_count,
                     long long out_count) {
        const double ms =
            std::chrono::duration<double, std::milli>(clock::now() - t0).count();
        result.diagnostics.push_back({stage, in_count, out_count, ms});
    };

    try {
        auto t0 = clock::now();
        const GrayImage enhanced = white_top_hat(img, StructuringElement::disc(cfg.tophat_se));
        stamp("top_hat", t0, static_cast<long long>(img.size()),
              static_cast<long long>(enhanced.size()));

        t0 = clock::now();
        const BinaryMask edges =
            canny(enhanced, cfg.canny, trace ? &trace->canny_trace : nullptr);
        stamp("canny", t0, static_cast<long long>(enhanced.size()),
              static_cast<long long>(edges.count()));

        t0 = clock::now();
        const std::vector<Candidate> cands =
            extract_candidates(edges, StructuringElement::disc(cfg.closure_se),
                               StructuringElement::disc(cfg.opening_se));
        stamp("extract_candidates", t0, static_cast<long long>(edges.count()),
              static_cast<long long>(cands.size()));

        t0 = clock::now();
        const std::vector<Candidate> kept =
            filter_false_positives(cands, cfg.filter, img.width(), img.height());
        stamp("filter_false_positives", t0, static_cast<long long>(cands.size()),
              static_cast<long long>(kept.size()));

        t0 = clock::now();
        const Candidate& faz = select_faz(kept, img.width(), img.height());
        result.seed_centroid_row = faz.centroid_row;
        result.seed_centroid_col = faz.centroid_col;
        stamp("select_faz", t0, static_cast<long long>(kept.size()), 1);

        t0 = clock::now();
        const BinaryMask seed =
            erode_seed(faz, StructuringElement::disc(cfg.seed_erosion_se), img.width(),
                       img.height());
        stamp("erode_seed", t0, faz.area_px, static_cast<long long>(seed.count()));

        GrowObserver sweep_observer;
        if (trace) {
            trace->top_hat = enhanced;
            trace->edges = edges;
            trace->candidates_mask = BinaryMask(img.width(), img.height());
            for (const auto& c : cands)
                for (const auto& [r, q] : c.pixels) trace->candidates_mask.set(r, q, true);
            trace->kept_mask = BinaryMask(img.width(), img.height());
            for (const auto& c : kept)
                for (const auto& [r, q] : c.pixels) trace->kept_mask.set(r, q, true);
            trace->selected_mask = rasterize(faz, img.width(), img.height());
            trace->seed = seed;
            sweep_observer = [trace](int, const BinaryMask& region) {
                trace->grow_sweeps.push_back(region);
            };
        }

        t0 = clock::now();
        result.mask = grow(img, seed, cfg.grow, &result.grow_stats,
                           trace ? &sweep_observer : nullptr);
        stamp("grow", t0, static_cast<long long>(seed.count()),
              static_cast<long long>(result.mask.count()));
    } catch (const DegenerateImage& e) {
        throw LocalizationFailed(e.what());
    } catch (const NoCandidates& e) {
        throw LocalizationFailed(e.what());
    } catch (const AllCandidatesRejected& e) {
        throw LocalizationFailed(e.what());
    }

    long long sum_r = 0, sum_c = 0;
    for (int r = 0; r < result.mask.height(); ++r)
        for (int c = 0; c < result.mask.width(); ++c)
            if (result.mask.at(r, c)) {
                sum_r += r;
                sum_c += c;
                ++result.area_px;
            }
    result.centroid_row = static_cast<double>(sum_r) / result.area_px;
    result.centroid_col = static_cast<double>(sum_c) / result.area_px;
    result.area_mm2 = area_mm2(result.area_px, img.width(), img.height(),
                               PhysicalExtent(cfg.size_mm));
    return result;
}

}  // namespace faz
