#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "faz/candidates.hpp"
#include "oracles.hpp"

using namespace faz;

namespace {

BinaryMask ring_mask(int n, double cr, double cc, double r_in, double r_out) {
    BinaryMask m(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            const double d = std::hypot(r - cr, c - cc);
            if (d >= r_in && d <= r_out) m.set(r, c, true);
        }
    return m;
}

Candidate fake_candidate(long long perimeter, long long area, double cr, double cc) {
    Candidate c;
    c.pixels = {{static_cast<int>(cr), static_cast<int>(cc)}};
    c.perimeter_px = perimeter;
    c.area_px = area;
    c.centroid_row = cr;
    c.centroid_col = cc;
    c.min_row = c.max_row = static_cast<int>(cr);
    c.min_col = c.max_col = static_cast<int>(cc);
    return c;
}

}  // namespace

TEST_CASE("connected components basics", "[candidates]") {
    REQUIRE(connected_components(BinaryMask(6, 6)).empty());

    const auto full = connected_components(BinaryMask(4, 4, true));
    REQUIRE(full.size() == 1);
    REQUIRE(full[0].area_px == 16);
    REQUIRE(full[0].min_row == 0);
    REQUIRE(full[0].max_col == 3);

    BinaryMask diag(5, 5);
    diag.set(2, 2, true);
    diag.set(3, 3, true);
    REQUIRE(connected_components(diag).size() == 1);  // 8-connectivity
}

TEST_CASE("connected components match the flood-fill oracle", "[candidates][oracle]") {
    oracle::TestRng rng(41);
    for (int trial = 0; trial < 20; ++trial) {
        const BinaryMask m = oracle::random_mask(20, 20, 0.35, rng);
        const auto cands = connected_components(m);
        const auto [labels, count] = oracle::ref_label(m, 8);
        REQUIRE(static_cast<int>(cands.size()) == count);

        // Disjoint cover of the foreground, each candidate one oracle label.
        std::set<std::pair<int, int>> seen;
        long long total = 0;
        for (const auto& c : cands) {
            REQUIRE(c.area_px == static_cast<long long>(c.pixels.size()));
            total += c.area_px;
            std::set<int> label_ids;
            for (const auto& [r, q] : c.pixels) {
                REQUIRE(!seen.count({r, q}));
                seen.insert({r, q});
                label_ids.insert(labels[static_cast<std::size_t>(r) * 20 + q]);
            }
            REQUIRE(label_ids.size() == 1);
            REQUIRE(c.centroid_row >= c.min_row);
            REQUIRE(c.centroid_row <= c.max_row);
            REQUIRE(c.centroid_col >= c.min_col);
            REQUIRE(c.centroid_col <= c.max_col);
        }
        REQUIRE(total == static_cast<long long>(m.count()));

        // Deterministic bbox ordering.
        for (std::size_t i = 1; i < cands.size(); ++i)
            REQUIRE(std::pair(cands[i - 1].min_row, cands[i - 1].min_col) <=
                    std::pair(cands[i].min_row, cands[i].min_col));
    }
}

TEST_CASE("perimeter", "[candidates]") {
    BinaryMask one(7, 7);
    one.set(3, 3, true);
    REQUIRE(perimeter(connected_components(one)[0]) == 1);

    BinaryMask sq3(9, 9);
    for (int r = 3; r <= 5; ++r)
        for (int c = 3; c <= 5; ++c) sq3.set(r, c, true);
    REQUIRE(perimeter(connected_components(sq3)[0]) == 8);

    BinaryMask sq10(14, 14);
    for (int r = 2; r < 12; ++r)
        for (int c = 2; c < 12; ++c) sq10.set(r, c, true);
    const auto cands = connected_components(sq10);
    REQUIRE(perimeter(cands[0]) == oracle::ref_perimeter(sq10));
    REQUIRE(perimeter(cands[0]) == 36);
}

TEST_CASE("perimeter bounded by area", "[candidates][property]") {
    oracle::TestRng rng(42);
    for (int trial = 0; trial < 20; ++trial) {
        const BinaryMask m = oracle::random_mask(16, 16, 0.4, rng);
        for (const auto& c : connected_components(m)) {
            REQUIRE(c.perimeter_px <= c.area_px);
            bool has_interior = false;
            const BinaryMask alone = rasterize(c, 16, 16);
            for (const auto& [r, q] : c.pixels) {
                const bool interior = r > 0 && r < 15 && q > 0 && q < 15 &&
                                      alone.at(r - 1, q) && alone.at(r + 1, q) &&
                                      alone.at(r, q - 1) && alone.at(r, q + 1);
                has_interior |= interior;
            }
            REQUIRE((c.perimeter_px == c.area_px) == !has_interior);
        }
    }
}

TEST_CASE("extract candidates from a hollow ring", "[candidates]") {
    const auto closure = StructuringElement::disc(5);
    const auto opening = StructuringElement::disc(7);

    const BinaryMask edges = ring_mask(64, 31.5, 31.5, 13.0, 15.0);
    const auto cands = extract_candidates(edges, closure, opening);

    // The hole shows up as a candidate strictly inside the ring; the
    // unbounded outside is also present (dropped later by the filters).
    int interior_count = 0;
    for (const auto& c : cands)
        if (c.min_row > 16 && c.max_row < 47 && c.min_col > 16 && c.max_col < 47) {
            ++interior_count;
            const double d = std::hypot(c.centroid_row - 31.5, c.centroid_col - 31.5);
            REQUIRE(d < 2.0);
        }
    REQUIRE(interior_count == 1);
}

TEST_CASE("empty edge mask inverts to one full-frame candidate", "[candidates]") {
    const auto cands = extract_candidates(BinaryMask(40, 40), StructuringElement::disc(5),
                                          StructuringElement::disc(7));
    REQUIRE(cands.size() == 1);
    REQUIRE(cands[0].area_px == 40 * 40);
    REQUIRE(cands[0].min_row == 0);
    REQUIRE(cands[0].max_row == 39);
}

TEST_CASE("nested rings yield the annulus gap and the inner disc", "[candidates]") {
    const int n = 48;
    // The outer ring runs past the frame corners, so no outside region exists.
    BinaryMask edges = ring_mask(n, 23.5, 23.5, 8.0, 10.0);
    const BinaryMask outer = ring_mask(n, 23.5, 23.5, 20.0, 34.0);
    for (std::size_t i = 0; i < edges.size(); ++i)
        if (outer.data()[i]) edges.data()[i] = 1;

    const auto cands = extract_candidates(edges, StructuringElement::disc(5),
                                          StructuringElement::disc(7));

    // The inner disc contains the center, the annulus a mid-radius probe.
    bool found_disc = false, found_annulus = false;
    for (const auto& c : cands) {
        const BinaryMask m = rasterize(c, n, n);
        if (m.at(23, 23)) found_disc = true;
        if (m.at(23, 23 - 15)) found_annulus = true;
    }
    REQUIRE(found_disc);
    REQUIRE(found_annulus);
    REQUIRE(cands.size() == 2);
}

TEST_CASE("no candidates error", "[candidates][errors]") {
    REQUIRE_THROWS_AS(extract_candidates(BinaryMask(16, 16, true),
                                         StructuringElement::disc(5),
                                         StructuringElement::disc(7)),
                      NoCandidates);
}

TEST_CASE("false positive filter", "[candidates]") {
    FilterRules rules;  // margin 0.10, solidity 0.35, area 30 at 320x320

    SECTION("border hugger is peripheral") {
        BinaryMask m(320, 320);
        for (int r = 100; r < 180; ++r)
            for (int c = 2; c < 20; ++c) m.set(r, c, true);  // centroid col ~10.5 < 32
        BinaryMask central(320, 320);
        for (int r = 140; r < 180; ++r)
            for (int c = 140; c < 180; ++c) central.set(r, c, true);
        for (std::size_t i = 0; i < m.size(); ++i)
            if (central.data()[i]) m.data()[i] = 1;

        const auto kept = filter_false_positives(connected_components(m), rules, 320, 320);
        REQUIRE(kept.size() == 1);
        REQUIRE(kept[0].centroid_col > 100.0);
    }

    SECTION("solid disc is kept, rasterized solidity is near pi/4") {
        BinaryMask m(320, 320);
        for (int r = 0; r < 320; ++r)
            for (int c = 0; c < 320; ++c)
                if (std::hypot(r - 160.0, c - 160.0) <= 40.0) m.set(r, c, true);
        const auto cands = connected_components(m);
        REQUIRE(cands.size() == 1);
        REQUIRE(cands[0].solidity() > 0.7);  // pi/4 up to rasterization
        REQUIRE(filter_false_positives(cands, rules, 320, 320).size() == 1);
    }

    SECTION("one-pixel-wide zigzag is disperse") {
        BinaryMask m(320, 320);
        for (int i = 0; i < 60; ++i) m.set(130 + i, 130 + i, true);  // solidity ~1/60
        const auto cands = connected_components(m);
        REQUIRE(cands[0].solidity() < 0.05);
        REQUIRE_THROWS_AS(filter_false_positives(cands, rules, 320, 320),
                          AllCandidatesRejected);
    }

    SECTION("full frame touches all four borders") {
        const auto cands = connected_components(BinaryMask(320, 320, true));
        REQUIRE_THROWS_AS(filter_false_positives(cands, rules, 320, 320),
                          AllCandidatesRejected);
    }

    SECTION("area floor scales with resolution") {
        BinaryMask m(160, 160);  // quarter the pixel count -> floor becomes 7.5
        for (int r = 80; r < 83; ++r)
            for (int c = 80; c < 83; ++c) m.set(r, c, true);  // 9 px block
        const auto kept = filter_false_positives(connected_components(m), rules, 160, 160);
        REQUIRE(kept.size() == 1);
        REQUIRE_THROWS_AS(
            filter_false_positives(connected_components(m), FilterRules{0.10, 0.35, 40}, 160,
                                   160),
            AllCandidatesRejected);
    }

    SECTION("subset and idempotence") {
        oracle::TestRng rng(43);
        const BinaryMask m = oracle::random_mask(64, 64, 0.2, rng);
        const auto cands = connected_components(m);
        std::vector<Candidate> kept;
        try {
            kept = filter_false_positives(cands, FilterRules{0.05, 0.2, 1}, 64, 64);
        } catch (const AllCandidatesRejected&) {
            return;
        }
        REQUIRE(kept.size() <= cands.size());
        const auto again = filter_false_positives(kept, FilterRules{0.05, 0.2, 1}, 64, 64);
        REQUIRE(again.size() == kept.size());
    }
}

TEST_CASE("faz selection by perimeter", "[candidates]") {
    const auto only = fake_candidate(25, 40, 50, 50);
    REQUIRE(select_faz({only}, 100, 100).perimeter_px == 25);

    REQUIRE(select_faz({fake_candidate(40, 80, 30, 30), fake_candidate(12, 200, 60, 60)}, 100,
                       100)
                .perimeter_px == 40);

    // Documented tie-breaks: area first, then distance to the image center.
    REQUIRE(select_faz({fake_candidate(36, 60, 30, 30), fake_candidate(36, 100, 70, 70)}, 100,
                       100)
                .area_px == 100);
    REQUIRE(select_faz({fake_candidate(36, 100, 10, 10), fake_candidate(36, 100, 49, 49)}, 100,
                       100)
                .centroid_row == 49.0);
}

TEST_CASE("selection agrees with exhaustive scan", "[candidates][property]") {
    oracle::TestRng rng(44);
    for (int trial = 0; trial < 20; ++trial) {
        const BinaryMask m = oracle::random_mask(32, 32, 0.3, rng);
        const auto cands = connected_components(m);
        if (cands.empty()) continue;
        const Candidate& pick = select_faz(cands, 32, 32);
        long long best = 0;
        bool found = false;
        for (const auto& c : cands) {
            best = std::max(best, c.perimeter_px);
            found |= &c == &pick;
        }
        REQUIRE(found);
        REQUIRE(pick.perimeter_px == best);
    }
}
