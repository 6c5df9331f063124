#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "faz/error.hpp"
#include "faz/image.hpp"
#include "faz/image_io.hpp"

namespace faz {

/// 64-bit linear congruential generator (MMIX constants: state = state *
/// 6364136223846793005 + 1442695040888963407). Doubles take the top 53 bits.
/// Self-contained so generated suites replay identically everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ = state_ * 6364136223846793005ULL + 1442695040888963407ULL;
        return state_;
    }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double range(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int range_int(int lo, int hi) {  // inclusive bounds
        return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u = uniform(), v = uniform();
        if (u <= 0.0) u = 0x1.0p-53;
        const double mag = std::sqrt(-2.0 * std::log(u));
        spare_ = mag * std::sin(2.0 * M_PI * v);
        have_spare_ = true;
        return mag * std::cos(2.0 * M_PI * v);
    }

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// OCT-A-like scene: a dark roughened ellipse (the avascular zone), a closed
/// capillary ring hugging it, and a web of radial and circumferential vessels
/// filling the rest of the frame.
struct SynthSpec {
    int width = 320;
    int height = 320;

    double center_row = 160.0;
    double center_col = 160.0;
    double radius_row = 30.0;
    double radius_col = 30.0;
    double roughness_amp = 0.05;  // radial boundary perturbation, fraction of radius
    int roughness_lobes = 5;
    double roughness_phase = 0.0;

    int vessel_count = 18;          // primary radial vessels leaving the ring
    double vessel_curvature = 0.5;  // angular wiggle of the radial vessels
    double vessel_width_min = 2.0;
    double vessel_width_max = 3.5;
    int vessel_brightness_min = 190;
    int vessel_brightness_max = 250;

    int faz_level = 60;
    int background_level = 130;
    double noise_sigma = 8.0;

    bool artifact_strip = false;  // dark band along one border (capture error)
    int artifact_side = 0;        // 0 top, 1 right, 2 bottom, 3 left
    double artifact_frac = 0.14;
    int artifact_level = 35;

    std::uint64_t rng_seed = 1;

    void validate() const {
        if (width < 32 || height < 32) throw InvalidSpec("frame must be at least 32x32");
        if (radius_row < 4.0 || radius_col < 4.0) throw InvalidSpec("radii must be >= 4 px");
        if (!(roughness_amp >= 0.0 && roughness_amp < 0.3))
            throw InvalidSpec("roughness amplitude must lie in [0, 0.3)");
        const double grow_r = radius_row * (1.0 + roughness_amp);
        const double grow_c = radius_col * (1.0 + roughness_amp);
        if (center_row - grow_r < 0.2 * height || center_row + grow_r > 0.8 * height ||
            center_col - grow_c < 0.2 * width || center_col + grow_c > 0.8 * width)
            throw InvalidSpec("avascular ellipse must stay inside the central 60% of the frame");
        if (vessel_brightness_min <= faz_level + 3.0 * noise_sigma)
            throw InvalidSpec("vessel brightness must exceed interior level + 3*noise_sigma");
        if (vessel_brightness_max < vessel_brightness_min || vessel_brightness_max > 255)
            throw InvalidSpec("vessel brightness range is malformed");
        if (vessel_width_min < 1.0 || vessel_width_max < vessel_width_min)
            throw InvalidSpec("vessel width range is malformed");
        if (vessel_count < 8) throw InvalidSpec("need at least 8 radial vessels");
        if (noise_sigma < 0.0) throw InvalidSpec("noise sigma must be >= 0");
        if (artifact_frac < 0.0 || artifact_frac > 0.2)
            throw InvalidSpec("artifact strip fraction must lie in [0, 0.2]");
        if (artifact_side < 0 || artifact_side > 3) throw InvalidSpec("artifact side out of range");
    }
};

struct SynthOutput {
    GrayImage image;
    BinaryMask gt;       // exact rasterized avascular zone
    BinaryMask vessels;  // every painted vessel pixel (pre-noise, pre-artifact)
};

namespace synth_detail {

// Normalized elliptical radius and the roughened boundary value at a pixel.
struct Shape {
    const SynthSpec& spec;
    double s(double r, double c) const {
        const double dr = (r - spec.center_row) / spec.radius_row;
        const double dc = (c - spec.center_col) / spec.radius_col;
        return std::sqrt(dr * dr + dc * dc);
    }
    double boundary(double r, double c) const {
        const double theta = std::atan2(r - spec.center_row, c - spec.center_col);
        return 1.0 + spec.roughness_amp *
                         std::cos(spec.roughness_lobes * theta + spec.roughness_phase);
    }
    bool inside(double r, double c) const { return s(r, c) <= boundary(r, c); }
};

}  // namespace synth_detail

/// Deterministic render of a SynthSpec. The ground-truth mask is exactly the
/// rasterized avascular shape (pixel centers).
inline SynthOutput generate(const SynthSpec& spec) {
    spec.validate();
    const int w = spec.width, h = spec.height;
    synth_detail::Shape shape{spec};
    Rng rng(spec.rng_seed);

    SynthOutput out{GrayImage(w, h, static_cast<std::uint8_t>(spec.background_level)),
                    BinaryMask(w, h), BinaryMask(w, h)};

    // Avascular interior.
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            if (shape.inside(r, c)) {
                out.gt.set(r, c, true);
                out.image.at(r, c) = static_cast<std::uint8_t>(spec.faz_level);
            }

    const double rmin = std::min(spec.radius_row, spec.radius_col);
    const double gap_s = 2.0 / rmin;       // protective gap between zone and ring
    const double ring_w_s = 3.5 / rmin;    // ring thickness in normalized units

    auto stamp = [&](double pr, double pc, double radius, int level) {
        const int r0 = std::max(0, static_cast<int>(std::floor(pr - radius)));
        const int r1 = std::min(h - 1, static_cast<int>(std::ceil(pr + radius)));
        const int c0 = std::max(0, static_cast<int>(std::floor(pc - radius)));
        const int c1 = std::min(w - 1, static_cast<int>(std::ceil(pc + radius)));
        for (int r = r0; r <= r1; ++r)
            for (int c = c0; c <= c1; ++c) {
                if ((r - pr) * (r - pr) + (c - pc) * (c - pc) > radius * radius) continue;
                // Never let vasculature bleed into the zone or its gap.
                if (shape.s(r, c) < shape.boundary(r, c) + gap_s) continue;
                out.image.at(r, c) = static_cast<std::uint8_t>(level);
                out.vessels.set(r, c, true);
            }
    };

    // Closed capillary ring around the zone: guarantees enclosure.
    const int ring_level = spec.vessel_brightness_max;
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            const double sv = shape.s(r, c);
            const double b = shape.boundary(r, c);
            if (sv >= b + gap_s && sv <= b + gap_s + ring_w_s) {
                out.image.at(r, c) = static_cast<std::uint8_t>(ring_level);
                out.vessels.set(r, c, true);
            }
        }

    const double r_ring = rmin * (1.0 + spec.roughness_amp) + 2.0 + 3.5;
    const double r_max = 0.5 * std::hypot(w, h) + 4.0;

    // Radial vessels: primaries leave the ring, secondaries start mid-field
    // so the angular spacing of the web stays roughly constant.
    auto draw_radial = [&](double phi0, double t_start, Rng& vr) {
        const double width = vr.range(spec.vessel_width_min, spec.vessel_width_max);
        const int level = vr.range_int(spec.vessel_brightness_min, spec.vessel_brightness_max);
        const double wig_phase = vr.range(0.0, 2.0 * M_PI);
        const double wig_freq = vr.range(0.02, 0.05);
        for (double t = t_start; t <= r_max; t += 0.6) {
            const double phi =
                phi0 + spec.vessel_curvature * 0.06 * std::sin(wig_freq * t + wig_phase);
            const double pr = spec.center_row + t * std::sin(phi);
            const double pc = spec.center_col + t * std::cos(phi);
            stamp(pr, pc, width / 2.0, level);
        }
    };
    for (int i = 0; i < spec.vessel_count; ++i) {
        const double jitter = rng.range(-0.25, 0.25) * 2.0 * M_PI / spec.vessel_count;
        draw_radial(2.0 * M_PI * i / spec.vessel_count + jitter, r_ring * 0.9, rng);
    }
    for (int i = 0; i < spec.vessel_count; ++i) {
        const double jitter = rng.range(-0.25, 0.25) * 2.0 * M_PI / spec.vessel_count;
        draw_radial(2.0 * M_PI * (i + 0.5) / spec.vessel_count + jitter,
                    std::min(95.0, r_ring + 30.0), rng);
    }

    // Circumferential vessels every ~26 px of radius.
    for (double rho = r_ring + rng.range(14.0, 20.0); rho <= r_max; rho += rng.range(22.0, 28.0)) {
        const double width = rng.range(spec.vessel_width_min, spec.vessel_width_max);
        const int level = rng.range_int(spec.vessel_brightness_min, spec.vessel_brightness_max);
        const double wig_phase = rng.range(0.0, 2.0 * M_PI);
        const int wig_lobes = rng.range_int(3, 7);
        const double wig_amp = rng.range(0.0, 2.5);
        const double dtheta = 0.6 / rho;
        for (double theta = 0.0; theta < 2.0 * M_PI; theta += dtheta) {
            const double rr = rho + wig_amp * std::sin(wig_lobes * theta + wig_phase);
            const double pr = spec.center_row + rr * std::sin(theta);
            const double pc = spec.center_col + rr * std::cos(theta);
            if (pr < -4 || pr > h + 4 || pc < -4 || pc > w + 4) continue;
            stamp(pr, pc, width / 2.0, level);
        }
    }

    // Capture-error strip: a dark band along one border, wiping whatever it
    // covers, vasculature included.
    if (spec.artifact_strip) {
        const int t_rows = static_cast<int>(std::lround(spec.artifact_frac * h));
        const int t_cols = static_cast<int>(std::lround(spec.artifact_frac * w));
        int r0 = 0, r1 = h - 1, c0 = 0, c1 = w - 1;
        if (spec.artifact_side == 0) r1 = t_rows - 1;
        if (spec.artifact_side == 1) c0 = w - t_cols;
        if (spec.artifact_side == 2) r0 = h - t_rows;
        if (spec.artifact_side == 3) c1 = t_cols - 1;
        for (int r = std::max(0, r0); r <= std::min(h - 1, r1); ++r)
            for (int c = std::max(0, c0); c <= std::min(w - 1, c1); ++c) {
                out.image.at(r, c) = static_cast<std::uint8_t>(spec.artifact_level);
                out.vessels.set(r, c, false);
            }
    }

    if (spec.noise_sigma > 0.0) {
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c) {
                const double v = out.image.at(r, c) + spec.noise_sigma * rng.gaussian();
                out.image.at(r, c) =
                    static_cast<std::uint8_t>(std::clamp<long>(std::lround(v), 0, 255));
            }
    }
    return out;
}

struct SuiteEntry {
    std::string image_path;
    std::string gt_path;
    SynthSpec spec;
};

/// Renders n jittered variants of base_spec into out_dir together with an
/// evaluation manifest (manifest.csv) and a bookkeeping file (suite.json).
/// With artifacts enabled, every other entry gets a border strip.
inline std::vector<SuiteEntry> generate_suite(int n, const SynthSpec& base, std::uint64_t seed,
                                              const std::string& out_dir, bool artifacts,
                                              double size_mm) {
    if (n < 1) throw InvalidSpec("suite size must be >= 1");
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create directory " + out_dir);

    Rng master(seed);
    std::vector<SuiteEntry> entries;
    nlohmann::json suite = nlohmann::json::array();

    for (int i = 0; i < n; ++i) {
        SynthSpec spec = base;
        spec.rng_seed = master.next();
        Rng jitter(master.next());
        spec.center_row = base.height * (0.5 + jitter.range(-0.04, 0.04));
        spec.center_col = base.width * (0.5 + jitter.range(-0.04, 0.04));
        const double scale = jitter.range(0.8, 1.3);
        spec.radius_row = base.radius_row * scale * jitter.range(0.85, 1.15);
        spec.radius_col = base.radius_col * scale * jitter.range(0.85, 1.15);
        spec.roughness_lobes = jitter.range_int(3, 7);
        spec.roughness_phase = jitter.range(0.0, 2.0 * M_PI);
        spec.vessel_count = base.vessel_count + jitter.range_int(-3, 4);
        spec.artifact_strip = artifacts && i % 2 == 1;
        spec.artifact_side = jitter.range_int(0, 3);

        const SynthOutput rendered = generate(spec);

        char stem[32];
        std::snprintf(stem, sizeof stem, "synth_%04d", i);
        SuiteEntry entry{(fs::path(out_dir) / (std::string(stem) + ".png")).string(),
                         (fs::path(out_dir) / (std::string(stem) + "_gt.png")).string(), spec};
        save_gray(rendered.image, entry.image_path);
        save_mask(rendered.gt, entry.gt_path);
        entries.push_back(entry);

        suite.push_back({{"image", std::string(stem) + ".png"},
                         {"gt", std::string(stem) + "_gt.png"},
                         {"seed", spec.rng_seed},
                         {"artifact", spec.artifact_strip},
                         {"center", {spec.center_row, spec.center_col}},
                         {"radii", {spec.radius_row, spec.radius_col}},
                         {"vessel_count", spec.vessel_count},
                         {"noise_sigma", spec.noise_sigma}});
    }

    std::ofstream manifest(fs::path(out_dir) / "manifest.csv", std::ios::binary);
    if (!manifest) throw IoError("cannot write manifest.csv in " + out_dir);
    manifest << "image,gt1,gt2,size_mm,depth,cohort\n";
    for (int i = 0; i < n; ++i) {
        char stem[32];
        std::snprintf(stem, sizeof stem, "synth_%04d", i);
        manifest << stem << ".png," << stem << "_gt.png,," << size_mm
                 << ",superficial,healthy\n";
    }

    std::ofstream meta(fs::path(out_dir) / "suite.json", std::ios::binary);
    if (!meta) throw IoError("cannot write suite.json in " + out_dir);
    meta << suite.dump(2) << "\n";
    return entries;
}

}  // namespace faz
