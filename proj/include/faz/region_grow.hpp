#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "faz/candidates.hpp"
#include "faz/error.hpp"
#include "faz/image.hpp"
#include "faz/morphology.hpp"

namespace faz {

struct GrowParams {
    double tolerance_frac = 0.30;  // accept band is ARV * (1 +- tolerance)
    int connectivity = 8;          // 4 or 8
    int max_iterations = 1000;     // safety valve, not an error when hit
    int recompute_period = 0;      // 0: refresh ARV once per sweep; N>0: every N accepted pixels
    double band_floor = 5.0;       // minimum band half-width in gray levels

    void validate() const {
        if (!(tolerance_frac > 0.0 && tolerance_frac < 1.0))
            throw ConfigError("grow tolerance must lie in (0, 1)");
        if (connectivity != 4 && connectivity != 8)
            throw ConfigError("grow connectivity must be 4 or 8");
        if (max_iterations < 1) throw ConfigError("grow max_iterations must be >= 1");
        if (recompute_period < 0) throw ConfigError("grow recompute_period must be >= 0");
        if (band_floor < 0.0) throw ConfigError("grow band_floor must be >= 0");
    }
};

struct GrowStats {
    int iterations = 0;
    long long added = 0;
    long long deleted = 0;
    long long retained_by_exception = 0;  // final pixels outside the final band
    bool hit_max_iterations = false;
    double final_arv = 0.0;
};

namespace grow_detail {

struct Band {
    double lo, hi;
    bool contains(double v) const { return v >= lo && v <= hi; }
};

inline Band band_around(double arv, const GrowParams& p) {
    // Multiplicative tolerance collapses near ARV = 0; the floor keeps the
    // band usable over dark regions.
    const double half = std::max(p.tolerance_frac * arv, p.band_floor);
    return {arv - half, arv + half};
}

inline const std::pair<int, int>* neighbor_offsets(int connectivity, int& n) {
    static constexpr std::pair<int, int> k4[] = {{-1, 0}, {0, -1}, {0, 1}, {1, 0}};
    static constexpr std::pair<int, int> k8[] = {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1},
                                                 {0, 1},   {1, -1}, {1, 0},  {1, 1}};
    n = connectivity == 4 ? 4 : 8;
    return connectivity == 4 ? k4 : k8;
}

// True when every region-neighbor of p stays reachable after removing p,
// i.e. p is not an articulation pixel of the region graph. Fast local test
// first (neighbors already linked through the 3x3 ring around p), full
// search only when the ring is inconclusive.
inline bool removal_keeps_connectivity(const std::vector<std::uint8_t>& region, int w, int h,
                                       int pr, int pc, int connectivity) {
    int noff;
    const auto* offs = neighbor_offsets(connectivity, noff);
    int neighbors[8], count = 0;
    for (int k = 0; k < noff; ++k) {
        const int nr = pr + offs[k].first, nc = pc + offs[k].second;
        if (nr < 0 || nr >= h || nc < 0 || nc >= w) continue;
        if (region[static_cast<std::size_t>(nr) * w + nc]) neighbors[count++] = nr * w + nc;
    }
    if (count <= 1) return true;

    // Ring test: union the 3x3 ring cells that are in the region and see if
    // the region-neighbors land in a single cluster.
    int ring[8], rn = 0;
    for (int dr = -1; dr <= 1; ++dr)
        for (int dc = -1; dc <= 1; ++dc) {
            if (dr == 0 && dc == 0) continue;
            const int nr = pr + dr, nc = pc + dc;
            if (nr < 0 || nr >= h || nc < 0 || nc >= w) continue;
            if (region[static_cast<std::size_t>(nr) * w + nc]) ring[rn++] = nr * w + nc;
        }
    int cluster[8];
    for (int i = 0; i < rn; ++i) cluster[i] = i;
    auto find = [&](int i) {
        while (cluster[i] != i) i = cluster[i] = cluster[cluster[i]];
        return i;
    };
    for (int i = 0; i < rn; ++i)
        for (int j = i + 1; j < rn; ++j) {
            const int dr = std::abs(ring[i] / w - ring[j] / w);
            const int dc = std::abs(ring[i] % w - ring[j] % w);
            const bool adj = connectivity == 8 ? (dr <= 1 && dc <= 1)
                                               : (dr + dc == 1);
            if (adj) cluster[find(i)] = find(j);
        }
    bool one_cluster = true;
    int root = -1;
    for (int i = 0; i < rn && one_cluster; ++i) {
        bool is_neighbor = false;
        for (int k = 0; k < count; ++k) is_neighbor |= ring[i] == neighbors[k];
        if (!is_neighbor) continue;
        if (root < 0)
            root = find(i);
        else if (find(i) != root)
            one_cluster = false;
    }
    if (one_cluster) return true;

    // Full flood from one neighbor across region minus p.
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(w) * h, 0);
    std::vector<int> stack{neighbors[0]};
    seen[static_cast<std::size_t>(neighbors[0])] = 1;
    const int pidx = pr * w + pc;
    while (!stack.empty()) {
        const int j = stack.back();
        stack.pop_back();
        const int jr = j / w, jc = j % w;
        for (int k = 0; k < noff; ++k) {
            const int nr = jr + offs[k].first, nc = jc + offs[k].second;
            if (nr < 0 || nr >= h || nc < 0 || nc >= w) continue;
            const int n = nr * w + nc;
            if (n == pidx || seen[static_cast<std::size_t>(n)]) continue;
            if (!region[static_cast<std::size_t>(n)]) continue;
            seen[static_cast<std::size_t>(n)] = 1;
            stack.push_back(n);
        }
    }
    for (int k = 1; k < count; ++k)
        if (!seen[static_cast<std::size_t>(neighbors[k])]) return false;
    return true;
}

}  // namespace grow_detail

/// Called after each sweep with the sweep index and the current region.
using GrowObserver = std::function<void(int, const BinaryMask&)>;

/// Region growing with deletion: each sweep recomputes the average region
/// value, adds frontier pixels whose intensity falls inside the tolerance
/// band, then removes in-region pixels that fall outside it — unless removal
/// would disconnect the region from the seed centroid's component. Runs to a
/// fixed point or params.max_iterations.
inline BinaryMask grow(const GrayImage& img, const BinaryMask& seed, const GrowParams& params,
                       GrowStats* stats = nullptr, const GrowObserver* observer = nullptr) {
    params.validate();
    if (img.width() != seed.width() || img.height() != seed.height())
        throw DimensionMismatch("image and seed differ in size");
    const int w = img.width(), h = img.height();

    // Anchor: the seed pixel nearest the seed centroid (row-major tie-break).
    long long sum_r = 0, sum_c = 0, seed_n = 0;
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            if (seed.at(r, c)) {
                sum_r += r;
                sum_c += c;
                ++seed_n;
            }
    if (seed_n == 0) throw EmptySeed();
    const double cen_r = static_cast<double>(sum_r) / seed_n;
    const double cen_c = static_cast<double>(sum_c) / seed_n;
    int anchor = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            if (seed.at(r, c)) {
                const double d = (r - cen_r) * (r - cen_r) + (c - cen_c) * (c - cen_c);
                if (d < best_d) {
                    best_d = d;
                    anchor = r * w + c;
                }
            }

    std::vector<std::uint8_t> region(seed.data());
    double intensity_sum = 0.0;
    long long region_n = 0;
    for (std::size_t i = 0; i < region.size(); ++i)
        if (region[i]) {
            intensity_sum += img.data()[i];
            ++region_n;
        }

    int noff;
    const auto* offs = grow_detail::neighbor_offsets(params.connectivity, noff);
    GrowStats local;
    GrowStats& st = stats ? *stats : local;
    st = GrowStats{};

    for (int sweep = 0; sweep < params.max_iterations; ++sweep) {
        ++st.iterations;
        auto band = grow_detail::band_around(intensity_sum / region_n, params);
        long long changed = 0;

        // Addition phase: frontier decided against this sweep's snapshot.
        const std::vector<std::uint8_t> snapshot = region;
        long long accepted_since_refresh = 0;
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c) {
                const std::size_t i = static_cast<std::size_t>(r) * w + c;
                if (snapshot[i]) continue;
                bool frontier = false;
                for (int k = 0; k < noff && !frontier; ++k) {
                    const int nr = r + offs[k].first, nc = c + offs[k].second;
                    frontier = nr >= 0 && nr < h && nc >= 0 && nc < w &&
                               snapshot[static_cast<std::size_t>(nr) * w + nc];
                }
                if (!frontier || !band.contains(img.data()[i])) continue;
                region[i] = 1;
                intensity_sum += img.data()[i];
                ++region_n;
                ++st.added;
                ++changed;
                if (params.recompute_period > 0 &&
                    ++accepted_since_refresh % params.recompute_period == 0)
                    band = grow_detail::band_around(intensity_sum / region_n, params);
            }

        // Deletion phase: sequential in row-major order so the
        // connectivity veto is deterministic.
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c) {
                const std::size_t i = static_cast<std::size_t>(r) * w + c;
                if (!region[i] || band.contains(img.data()[i])) continue;
                if (static_cast<int>(i) == anchor) continue;
                if (region_n <= 1) continue;
                if (!grow_detail::removal_keeps_connectivity(region, w, h, r, c,
                                                             params.connectivity))
                    continue;
                region[i] = 0;
                intensity_sum -= img.data()[i];
                --region_n;
                ++st.deleted;
                ++changed;
            }

        if (observer && *observer) {
            BinaryMask snapshot_mask(w, h);
            snapshot_mask.data().assign(region.begin(), region.end());
            (*observer)(sweep, snapshot_mask);
        }
        if (changed == 0) break;
        if (sweep == params.max_iterations - 1) st.hit_max_iterations = true;
    }

    st.final_arv = intensity_sum / region_n;
    const auto final_band = grow_detail::band_around(st.final_arv, params);
    BinaryMask out(w, h);
    for (std::size_t i = 0; i < region.size(); ++i)
        if (region[i]) {
            out.data()[i] = 1;
            if (!final_band.contains(img.data()[i])) ++st.retained_by_exception;
        }
    return out;
}

/// Rasterizes the candidate and erodes it once so the grow seed starts inside
/// the true region; an erosion that empties the mask falls back to the single
/// member pixel nearest the candidate centroid.
inline BinaryMask erode_seed(const Candidate& cand, const StructuringElement& se, int width,
                             int height) {
    BinaryMask mask = erode(rasterize(cand, width, height), se);
    if (mask.count() > 0) return mask;

    double best_d = std::numeric_limits<double>::infinity();
    std::pair<int, int> best = cand.pixels.front();
    for (const auto& [r, c] : cand.pixels) {
        const double d = (r - cand.centroid_row) * (r - cand.centroid_row) +
                         (c - cand.centroid_col) * (c - cand.centroid_col);
        if (d < best_d) {
            best_d = d;
            best = {r, c};
        }
    }
    BinaryMask fallback(width, height);
    fallback.set(best.first, best.second, true);
    return fallback;
}

}  // namespace faz
