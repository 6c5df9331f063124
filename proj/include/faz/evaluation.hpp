#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "faz/error.hpp"
#include "faz/image.hpp"
#include "faz/image_io.hpp"
#include "faz/pipeline.hpp"

namespace faz {

/// |A intersect B| / |A union B|. Two empty masks agree perfectly (1.0); an
/// empty mask against a nonempty one scores 0.
inline double jaccard(const BinaryMask& a, const BinaryMask& b) {
    if (!a.same_dims(b)) throw DimensionMismatch("jaccard requires identical dimensions");
    long long inter = 0, uni = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const bool av = a.data()[i] != 0, bv = b.data()[i] != 0;
        inter += av && bv;
        uni += av || bv;
    }
    if (uni == 0) return 1.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

/// Sample covariance over the product of sample standard deviations.
inline double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size())
        throw LengthMismatch("pearson requires series of equal length");
    if (xs.size() < 2) throw LengthMismatch("pearson requires at least 2 samples");
    const std::size_t n = xs.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) throw ConstantSeries();
    return sxy / std::sqrt(sxx * syy);
}

/// True iff the mask pixel at the rounded centroid is ground-truth
/// foreground. Rounding is half-down on both coordinates (2.5 -> 2).
inline bool localization_hit(const FazResult& result, const BinaryMask& gt) {
    if (!result.mask.same_dims(gt))
        throw DimensionMismatch("localization_hit requires identical dimensions");
    const int r = static_cast<int>(std::ceil(result.centroid_row - 0.5));
    const int c = static_cast<int>(std::ceil(result.centroid_col - 0.5));
    if (!gt.in_bounds(r, c)) return false;
    return gt.at(r, c);
}

// --- dataset manifest --------------------------------------------------------

struct ManifestEntry {
    std::string label;  // the image field exactly as written in the manifest
    std::string image;  // resolved path
    std::string gt1;
    std::string gt2;  // may be empty: only one expert annotated this image
    double size_mm = 3.0;
    std::string depth;   // superficial | deep
    std::string cohort;  // healthy | diabetic
};

struct DatasetManifest {
    std::vector<ManifestEntry> entries;
};

/// CSV manifest with header image,gt1,gt2,size_mm,depth,cohort. Relative
/// paths resolve against the manifest's own directory; every referenced file
/// must exist.
inline DatasetManifest load_manifest(const std::string& path) {
    namespace fs = std::filesystem;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ManifestError("cannot open " + path);
    const fs::path base = fs::path(path).parent_path();

    auto resolve = [&](const std::string& p) {
        if (p.empty()) return p;
        fs::path fp(p);
        if (fp.is_relative()) fp = base / fp;
        return fp.string();
    };
    auto split = [](const std::string& line) {
        std::vector<std::string> fields;
        std::string cur;
        for (char ch : line) {
            if (ch == ',') {
                fields.push_back(cur);
                cur.clear();
            } else if (ch != '\r') {
                cur.push_back(ch);
            }
        }
        fields.push_back(cur);
        return fields;
    };

    std::string line;
    if (!std::getline(in, line)) throw ManifestError(path + ": empty file");
    if (split(line) != std::vector<std::string>{"image", "gt1", "gt2", "size_mm", "depth",
                                                "cohort"})
        throw ManifestError(path + ": bad header, expected image,gt1,gt2,size_mm,depth,cohort");

    DatasetManifest manifest;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto fields = split(line);
        const std::string where = path + ":" + std::to_string(lineno);
        if (fields.size() != 6) throw ManifestError(where + ": expected 6 fields");
        ManifestEntry e;
        e.label = fields[0];
        e.image = resolve(fields[0]);
        e.gt1 = resolve(fields[1]);
        e.gt2 = resolve(fields[2]);
        try {
            e.size_mm = std::stod(fields[3]);
        } catch (const std::exception&) {
            throw ManifestError(where + ": bad size_mm '" + fields[3] + "'");
        }
        if (!(e.size_mm > 0.0)) throw ManifestError(where + ": size_mm must be positive");
        e.depth = fields[4];
        e.cohort = fields[5];
        if (e.depth != "superficial" && e.depth != "deep")
            throw ManifestError(where + ": depth must be superficial or deep");
        if (e.cohort != "healthy" && e.cohort != "diabetic")
            throw ManifestError(where + ": cohort must be healthy or diabetic");
        if (e.image.empty() || e.gt1.empty())
            throw ManifestError(where + ": image and gt1 are required");
        for (const std::string& f : {e.image, e.gt1, e.gt2})
            if (!f.empty() && !fs::exists(f))
                throw ManifestError(where + ": missing file " + f);
        manifest.entries.push_back(std::move(e));
    }
    if (manifest.entries.empty()) throw ManifestError(path + ": no entries");
    return manifest;
}

// --- report ------------------------------------------------------------------

struct JaccardStats {
    int n = 0;
    double mean = 0.0, min = 0.0, max = 0.0;
};

struct PairingStats {
    std::optional<double> pearson_r;
    std::optional<JaccardStats> jaccard;
};

struct SubgroupReport {
    double size_mm = 0.0;
    std::string depth;
    std::string cohort;
    int total = 0;
    int hits = 0;
    PairingStats system_vs_expert1;
    PairingStats system_vs_expert2;
    PairingStats expert1_vs_expert2;
};

struct ImageRow {
    std::string image;
    double size_mm = 0.0;
    std::string depth;
    std::string cohort;
    std::string status;  // ok | localization_failed
    bool hit = false;
    long long area_px = 0;
    double area_mm2 = 0.0;
    double centroid_row = 0.0;
    double centroid_col = 0.0;
    std::optional<double> area_expert1_mm2;
    std::optional<double> area_expert2_mm2;
    std::optional<double> jaccard_sys_e1;
    std::optional<double> jaccard_sys_e2;
    std::optional<double> jaccard_e1_e2;
};

struct EvalReport {
    int total = 0;
    int hits = 0;
    std::vector<SubgroupReport> subgroups;
    std::vector<ImageRow> rows;
};

/// Runs the pipeline over every manifest entry (optionally across threads)
/// and aggregates the localization, correlation and overlap statistics per
/// (size_mm, depth, cohort) subgroup. Localization failures count toward hit
/// totals but are excluded from every correlation/overlap pairing.
inline EvalReport batch_evaluate(const DatasetManifest& manifest, const PipelineConfig& cfg,
                                 int threads = 1) {
    if (manifest.entries.empty()) throw ManifestError("manifest has no entries");
    cfg.validate();
    const std::size_t n = manifest.entries.size();
    std::vector<ImageRow> rows(n);
    std::vector<std::optional<std::string>> failures(n);

    auto process = [&](std::size_t i) {
        const ManifestEntry& entry = manifest.entries[i];
        ImageRow row;
        // Rows carry the manifest's own naming so reports do not depend on
        // where the dataset happens to live.
        row.image = entry.label;
        row.size_mm = entry.size_mm;
        row.depth = entry.depth;
        row.cohort = entry.cohort;

        const GrayImage img = load_grayscale(entry.image);
        const BinaryMask gt1 = load_mask(entry.gt1);
        if (gt1.width() != img.width() || gt1.height() != img.height())
            throw ManifestError(entry.image + ": gt1 dimensions differ from image");
        std::optional<BinaryMask> gt2;
        if (!entry.gt2.empty()) {
            gt2 = load_mask(entry.gt2);
            if (!gt2->same_dims(gt1))
                throw ManifestError(entry.image + ": gt2 dimensions differ from image");
        }

        PipelineConfig entry_cfg = cfg;
        entry_cfg.size_mm = entry.size_mm;
        const PhysicalExtent extent(entry.size_mm);
        row.area_expert1_mm2 =
            area_mm2(static_cast<long long>(gt1.count()), img.width(), img.height(), extent);
        if (gt2)
            row.area_expert2_mm2 = area_mm2(static_cast<long long>(gt2->count()), img.width(),
                                            img.height(), extent);

        try {
            const FazResult result = extract_faz(img, entry_cfg);
            row.status = "ok";
            row.hit = localization_hit(result, gt1);
            row.area_px = result.area_px;
            row.area_mm2 = result.area_mm2;
            row.centroid_row = result.centroid_row;
            row.centroid_col = result.centroid_col;
            row.jaccard_sys_e1 = jaccard(result.mask, gt1);
            if (gt2) {
                row.jaccard_sys_e2 = jaccard(result.mask, *gt2);
                row.jaccard_e1_e2 = jaccard(gt1, *gt2);
            }
        } catch (const LocalizationFailed&) {
            row.status = "localization_failed";
        }
        rows[i] = std::move(row);
    };

    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) process(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        std::mutex fail_mutex;
        std::exception_ptr first_error;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                    try {
                        process(i);
                    } catch (...) {
                        std::lock_guard<std::mutex> lock(fail_mutex);
                        if (!first_error) first_error = std::current_exception();
                    }
                }
            });
        for (auto& th : pool) th.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    // Aggregation runs in manifest order, so the report does not depend on
    // the worker count.
    EvalReport report;
    report.total = static_cast<int>(n);
    std::map<std::tuple<double, std::string, std::string>, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < n; ++i)
        groups[{rows[i].size_mm, rows[i].depth, rows[i].cohort}].push_back(i);

    auto jaccard_stats = [](const std::vector<double>& vals) -> std::optional<JaccardStats> {
        if (vals.empty()) return std::nullopt;
        JaccardStats js;
        js.n = static_cast<int>(vals.size());
        js.min = js.max = vals.front();
        double sum = 0.0;
        for (double v : vals) {
            sum += v;
            js.min = std::min(js.min, v);
            js.max = std::max(js.max, v);
        }
        js.mean = sum / static_cast<double>(vals.size());
        return js;
    };
    auto try_pearson = [](const std::vector<double>& xs,
                          const std::vector<double>& ys) -> std::optional<double> {
        try {
            return pearson(xs, ys);
        } catch (const Error&) {
            return std::nullopt;  // too few points or a constant series
        }
    };

    for (const auto& [key, idxs] : groups) {
        SubgroupReport sg;
        sg.size_mm = std::get<0>(key);
        sg.depth = std::get<1>(key);
        sg.cohort = std::get<2>(key);
        sg.total = static_cast<int>(idxs.size());

        std::vector<double> sys_area, e1_area_s, e2_area_s, e1_area_pair, e2_area_pair;
        std::vector<double> j_se1, j_se2, j_e12;
        for (std::size_t i : idxs) {
            const ImageRow& row = rows[i];
            sg.hits += row.hit;
            if (row.status != "ok") continue;  // failures drop out of every pairing
            if (row.jaccard_sys_e1) j_se1.push_back(*row.jaccard_sys_e1);
            if (row.jaccard_sys_e2) j_se2.push_back(*row.jaccard_sys_e2);
            if (row.jaccard_e1_e2) j_e12.push_back(*row.jaccard_e1_e2);
            sys_area.push_back(row.area_mm2);
            e1_area_s.push_back(*row.area_expert1_mm2);
            if (row.area_expert2_mm2) {
                e2_area_s.push_back(*row.area_expert2_mm2);
                e1_area_pair.push_back(*row.area_expert1_mm2);
                e2_area_pair.push_back(*row.area_expert2_mm2);
            }
        }
        sg.system_vs_expert1.pearson_r = try_pearson(sys_area, e1_area_s);
        sg.system_vs_expert1.jaccard = jaccard_stats(j_se1);
        if (!e2_area_s.empty()) {
            std::vector<double> sys_with_e2;
            for (std::size_t i : idxs)
                if (rows[i].status == "ok" && rows[i].area_expert2_mm2)
                    sys_with_e2.push_back(rows[i].area_mm2);
            sg.system_vs_expert2.pearson_r = try_pearson(sys_with_e2, e2_area_s);
            sg.system_vs_expert2.jaccard = jaccard_stats(j_se2);
            sg.expert1_vs_expert2.pearson_r = try_pearson(e1_area_pair, e2_area_pair);
            sg.expert1_vs_expert2.jaccard = jaccard_stats(j_e12);
        }
        report.hits += sg.hits;
        report.subgroups.push_back(std::move(sg));
    }

    std::sort(rows.begin(), rows.end(),
              [](const ImageRow& a, const ImageRow& b) { return a.image < b.image; });
    report.rows = std::move(rows);
    return report;
}

// --- serialization -----------------------------------------------------------

namespace eval_detail {

inline nlohmann::json pairing_json(const PairingStats& p) {
    nlohmann::json j;
    j["pearson_r"] = p.pearson_r ? nlohmann::json(*p.pearson_r) : nlohmann::json(nullptr);
    if (p.jaccard)
        j["jaccard"] = {{"n", p.jaccard->n},
                        {"mean", p.jaccard->mean},
                        {"min", p.jaccard->min},
                        {"max", p.jaccard->max}};
    else
        j["jaccard"] = nullptr;
    return j;
}

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

}  // namespace eval_detail

inline nlohmann::json report_to_json(const EvalReport& report) {
    nlohmann::json j;
    j["total"] = report.total;
    j["hits"] = report.hits;
    j["subgroups"] = nlohmann::json::array();
    for (const auto& sg : report.subgroups) {
        nlohmann::json g;
        g["size_mm"] = sg.size_mm;
        g["depth"] = sg.depth;
        g["cohort"] = sg.cohort;
        g["total"] = sg.total;
        g["hits"] = sg.hits;
        g["system_vs_expert1"] = eval_detail::pairing_json(sg.system_vs_expert1);
        g["system_vs_expert2"] = eval_detail::pairing_json(sg.system_vs_expert2);
        g["expert1_vs_expert2"] = eval_detail::pairing_json(sg.expert1_vs_expert2);
        j["subgroups"].push_back(std::move(g));
    }
    j["images"] = nlohmann::json::array();
    for (const auto& row : report.rows) {
        nlohmann::json r;
        r["image"] = row.image;
        r["size_mm"] = row.size_mm;
        r["depth"] = row.depth;
        r["cohort"] = row.cohort;
        r["status"] = row.status;
        r["hit"] = row.hit;
        if (row.status == "ok") {
            r["area_px"] = row.area_px;
            r["area_mm2"] = row.area_mm2;
            r["centroid"] = {row.centroid_row, row.centroid_col};
        }
        auto opt = [](const std::optional<double>& v) {
            return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
        };
        r["area_expert1_mm2"] = opt(row.area_expert1_mm2);
        r["area_expert2_mm2"] = opt(row.area_expert2_mm2);
        r["jaccard_sys_e1"] = opt(row.jaccard_sys_e1);
        r["jaccard_sys_e2"] = opt(row.jaccard_sys_e2);
        r["jaccard_e1_e2"] = opt(row.jaccard_e1_e2);
        j["images"].push_back(std::move(r));
    }
    return j;
}

inline void write_report_json(const EvalReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << report_to_json(report).dump(2) << "\n";
}

inline void write_report_csv(const EvalReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "image,size_mm,depth,cohort,status,hit,area_px,area_mm2,centroid_row,"
           "centroid_col,area_expert1_mm2,area_expert2_mm2,jaccard_sys_e1,jaccard_sys_e2,"
           "jaccard_e1_e2\n";
    auto opt = [](const std::optional<double>& v) {
        return v ? eval_detail::fmt(*v) : std::string();
    };
    for (const auto& row : report.rows) {
        out << row.image << ',' << eval_detail::fmt(row.size_mm) << ',' << row.depth << ','
            << row.cohort << ',' << row.status << ',' << (row.hit ? 1 : 0) << ',';
        if (row.status == "ok")
            out << row.area_px << ',' << eval_detail::fmt(row.area_mm2) << ','
                << eval_detail::fmt(row.centroid_row) << ','
                << eval_detail::fmt(row.centroid_col);
        else
            out << ",,,";
        out << ',' << opt(row.area_expert1_mm2) << ',' << opt(row.area_expert2_mm2) << ','
            << opt(row.jaccard_sys_e1) << ',' << opt(row.jaccard_sys_e2) << ','
            << opt(row.jaccard_e1_e2) << '\n';
    }
}

}  // namespace faz
