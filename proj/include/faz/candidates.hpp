#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "faz/error.hpp"
#include "faz/image.hpp"
#include "faz/morphology.hpp"

namespace faz {

/// One maximal 8-connected foreground component with cached geometry.
struct Candidate {
    std::vector<std::pair<int, int>> pixels;  // (row, col), row-major order
    long long area_px = 0;
    long long perimeter_px = 0;
    double centroid_row = 0.0;
    double centroid_col = 0.0;
    int min_row = 0, min_col = 0, max_row = 0, max_col = 0;

    long long bbox_area() const {
        return static_cast<long long>(max_row - min_row + 1) * (max_col - min_col + 1);
    }
    double solidity() const {
        return static_cast<double>(area_px) / static_cast<double>(bbox_area());
    }
};

/// Count of boundary pixels: members with at least one 4-neighbor outside the
/// candidate (the image border counts as outside).
inline long long perimeter(const Candidate& c) { return c.perimeter_px; }

/// Rasterizes a candidate into a full-frame mask.
inline BinaryMask rasterize(const Candidate& c, int width, int height) {
    BinaryMask mask(width, height);
    for (const auto& [r, q] : c.pixels) mask.set(r, q, true);
    return mask;
}

/// Partition of the foreground into maximal 8-connected components, ordered
/// by (min_row, min_col) of their bounding boxes.
inline std::vector<Candidate> connected_components(const BinaryMask& mask) {
    const int w = mask.width(), h = mask.height();
    std::vector<int> label(mask.size(), -1);
    std::vector<Candidate> out;

    std::vector<std::size_t> stack;
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            const std::size_t i = static_cast<std::size_t>(r) * w + c;
            if (!mask.data()[i] || label[i] >= 0) continue;
            const int id = static_cast<int>(out.size());
            out.emplace_back();
            label[i] = id;
            stack.push_back(i);
            while (!stack.empty()) {
                const std::size_t j = stack.back();
                stack.pop_back();
                const int jr = static_cast<int>(j / w), jc = static_cast<int>(j % w);
                for (int dr = -1; dr <= 1; ++dr)
                    for (int dc = -1; dc <= 1; ++dc) {
                        const int nr = jr + dr, nc = jc + dc;
                        if (nr < 0 || nr >= h || nc < 0 || nc >= w) continue;
                        const std::size_t n = static_cast<std::size_t>(nr) * w + nc;
                        if (mask.data()[n] && label[n] < 0) {
                            label[n] = id;
                            stack.push_back(n);
                        }
                    }
            }
        }

    // Gather members in row-major order so pixel lists are deterministic.
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            const int id = label[static_cast<std::size_t>(r) * w + c];
            if (id >= 0) out[static_cast<std::size_t>(id)].pixels.emplace_back(r, c);
        }

    for (auto& cand : out) {
        cand.area_px = static_cast<long long>(cand.pixels.size());
        cand.min_row = cand.max_row = cand.pixels.front().first;
        cand.min_col = cand.max_col = cand.pixels.front().second;
        long long sum_r = 0, sum_c = 0;
        for (const auto& [r, c] : cand.pixels) {
            sum_r += r;
            sum_c += c;
            cand.min_row = std::min(cand.min_row, r);
            cand.max_row = std::max(cand.max_row, r);
            cand.min_col = std::min(cand.min_col, c);
            cand.max_col = std::max(cand.max_col, c);
        }
        cand.centroid_row = static_cast<double>(sum_r) / static_cast<double>(cand.area_px);
        cand.centroid_col = static_cast<double>(sum_c) / static_cast<double>(cand.area_px);
        // A 4-adjacent foreground pixel is always in the same 8-connected
        // component, so "outside the candidate" reduces to "outside the mask".
        for (const auto& [r, c] : cand.pixels) {
            const bool exposed = r == 0 || !mask.at(r - 1, c) || r == h - 1 ||
                                 !mask.at(r + 1, c) || c == 0 || !mask.at(r, c - 1) ||
                                 c == w - 1 || !mask.at(r, c + 1);
            if (exposed) ++cand.perimeter_px;
        }
    }

    std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
        if (a.min_row != b.min_row) return a.min_row < b.min_row;
        if (a.min_col != b.min_col) return a.min_col < b.min_col;
        return a.pixels.front() < b.pixels.front();
    });
    return out;
}

/// Thresholds realizing the "peripheral and disperse candidates are
/// discarded" rule.
struct FilterRules {
    double border_margin_frac = 0.10;  // centroid closer than this to a border => peripheral
    double min_solidity = 0.35;        // area / bbox-area below this => disperse
    long long min_area_px = 30;        // absolute noise floor at 320x320, scaled by W*H/320^2

    void validate() const {
        if (!(border_margin_frac > 0.0 && border_margin_frac < 0.5))
            throw ConfigError("border_margin_frac must lie in (0, 0.5)");
        if (!(min_solidity > 0.0 && min_solidity <= 1.0))
            throw ConfigError("min_solidity must lie in (0, 1]");
        if (min_area_px < 0) throw ConfigError("min_area_px must be non-negative");
    }
};

/// close -> invert -> open -> connected components. The returned set holds
/// every enclosed region of the edge map, including the background component
/// (removed downstream by the peripheral rules).
inline std::vector<Candidate> extract_candidates(const BinaryMask& edges,
                                                 const StructuringElement& closure_se,
                                                 const StructuringElement& opening_se) {
    const BinaryMask closed = close(edges, closure_se);
    const BinaryMask opened = open(invert(closed), opening_se);
    std::vector<Candidate> cands = connected_components(opened);
    if (cands.empty()) throw NoCandidates();
    return cands;
}

/// Drops peripheral candidates (centroid inside the border margin, or
/// bounding box touching three or more image borders) and disperse ones
/// (solidity or area beneath the floor). Order preserved. Throws
/// AllCandidatesRejected when nothing survives.
inline std::vector<Candidate> filter_false_positives(const std::vector<Candidate>& cands,
                                                     const FilterRules& rules, int width,
                                                     int height) {
    rules.validate();
    const double margin_r = rules.border_margin_frac * height;
    const double margin_c = rules.border_margin_frac * width;
    const double min_area = static_cast<double>(rules.min_area_px) *
                            (static_cast<double>(width) * height) / (320.0 * 320.0);

    std::vector<Candidate> kept;
    for (const auto& c : cands) {
        const bool peripheral = c.centroid_row < margin_r ||
                                c.centroid_row > height - margin_r ||
                                c.centroid_col < margin_c ||
                                c.centroid_col > width - margin_c;
        const int borders_touched = (c.min_row == 0) + (c.min_col == 0) +
                                    (c.max_row == height - 1) + (c.max_col == width - 1);
        const bool disperse = c.solidity() < rules.min_solidity ||
                              static_cast<double>(c.area_px) < min_area;
        if (!peripheral && borders_touched < 3 && !disperse) kept.push_back(c);
    }
    if (kept.empty()) throw AllCandidatesRejected();
    return kept;
}

/// The candidate with the largest perimeter; ties fall back to larger area,
/// then to the centroid closest to the image center.
inline const Candidate& select_faz(const std::vector<Candidate>& cands, int width,
                                   int height) {
    if (cands.empty()) throw Error("select_faz requires a nonempty candidate list");
    const double center_r = (height - 1) / 2.0;
    const double center_c = (width - 1) / 2.0;
    auto center_dist2 = [&](const Candidate& c) {
        const double dr = c.centroid_row - center_r, dc = c.centroid_col - center_c;
        return dr * dr + dc * dc;
    };
    const Candidate* best = &cands.front();
    for (const auto& c : cands) {
        if (c.perimeter_px > best->perimeter_px ||
            (c.perimeter_px == best->perimeter_px && c.area_px > best->area_px) ||
            (c.perimeter_px == best->perimeter_px && c.area_px == best->area_px &&
             center_dist2(c) < center_dist2(*best)))
            best = &c;
    }
    return *best;
}

}  // namespace faz
