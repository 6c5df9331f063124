#include <catch2/catch_amalgamated.hpp>

#include "faz/morphology.hpp"
#include "oracles.hpp"

using namespace faz;

namespace {

std::vector<StructuringElement> test_elements() {
    // Mix of the pipeline defaults, a rectangle, and an asymmetric kernel so
    // the reflected-dilation convention gets exercised.
    std::vector<StructuringElement> ses{
        StructuringElement::disc(3), StructuringElement::disc(5),
        StructuringElement::disc(9), StructuringElement::rect(3, 3),
        StructuringElement::rect(1, 5)};
    ses.push_back(StructuringElement::from_hits(3, 3,
                                                {1, 1, 0,  //
                                                 0, 1, 0,  //
                                                 0, 0, 1}));
    return ses;
}

bool subset(const BinaryMask& a, const BinaryMask& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a.data()[i] && !b.data()[i]) return false;
    return true;
}

}  // namespace

TEST_CASE("structuring element construction", "[morphology]") {
    const auto disc5 = StructuringElement::disc(5);
    int hits = 0;
    for (int r = 0; r < 5; ++r)
        for (int c = 0; c < 5; ++c) hits += disc5.hit(r, c);
    REQUIRE(hits == 21);  // 5x5 minus the four corners
    REQUIRE(disc5.hit(2, 2));

    REQUIRE_THROWS_AS(StructuringElement::rect(2, 3), ConfigError);
    REQUIRE_THROWS_AS(StructuringElement::from_hits(3, 1, {1, 0, 1}), ConfigError);  // anchor off
    REQUIRE_THROWS_AS(StructuringElement::from_hits(1, 1, {0}), ConfigError);
}

TEST_CASE("erode basics", "[morphology]") {
    BinaryMask single(9, 9);
    single.set(4, 4, true);
    REQUIRE(erode(single, StructuringElement::rect(3, 3)).count() == 0);

    const BinaryMask full(6, 7, true);
    REQUIRE(erode(full, StructuringElement::rect(1, 1)) == full);

    // 5x5 square centered in 9x9 erodes to the 3x3 core.
    BinaryMask square(9, 9);
    for (int r = 2; r <= 6; ++r)
        for (int c = 2; c <= 6; ++c) square.set(r, c, true);
    const BinaryMask eroded = erode(square, StructuringElement::rect(3, 3));
    REQUIRE(eroded == oracle::ref_erode(square, StructuringElement::rect(3, 3)));
    REQUIRE(eroded.count() == 9);
    for (int r = 3; r <= 5; ++r)
        for (int c = 3; c <= 5; ++c) REQUIRE(eroded.at(r, c));
}

TEST_CASE("dilate basics", "[morphology]") {
    BinaryMask single(9, 9);
    single.set(4, 4, true);
    const BinaryMask grown = dilate(single, StructuringElement::rect(3, 3));
    REQUIRE(grown.count() == 9);
    for (int r = 3; r <= 5; ++r)
        for (int c = 3; c <= 5; ++c) REQUIRE(grown.at(r, c));

    REQUIRE(dilate(BinaryMask(8, 8), StructuringElement::disc(5)).count() == 0);
}

TEST_CASE("open and close fixed points", "[morphology]") {
    const BinaryMask full(16, 16, true);
    const BinaryMask empty(16, 16);
    for (const auto& se : test_elements()) {
        REQUIRE(open(full, se) == full);
        REQUIRE(close(empty, se) == empty);
    }
}

TEST_CASE("open and close idempotence", "[morphology][property]") {
    oracle::TestRng rng(101);
    for (int trial = 0; trial < 10; ++trial) {
        const BinaryMask m = oracle::random_mask(16, 16, 0.45, rng);
        for (const auto& se : test_elements()) {
            const BinaryMask opened = open(m, se);
            REQUIRE(open(opened, se) == opened);
            const BinaryMask closed = close(m, se);
            REQUIRE(close(closed, se) == closed);
        }
    }
}

TEST_CASE("white top-hat", "[morphology]") {
    const GrayImage flat(12, 12, 77);
    for (const auto& se : test_elements()) {
        const GrayImage th = white_top_hat(flat, se);
        for (auto v : th.data()) REQUIRE(v == 0);
    }

    // A lone peak survives in full; a plateau wider than the element dies.
    GrayImage peak(11, 11, 0);
    peak.at(5, 5) = 255;
    const auto se3 = StructuringElement::rect(3, 3);
    const GrayImage th_peak = white_top_hat(peak, se3);
    REQUIRE(th_peak == oracle::ref_top_hat(peak, se3));
    REQUIRE(th_peak == peak);  // the opening removes the peak entirely

    GrayImage plateau(15, 15, 10);
    for (int r = 4; r <= 10; ++r)
        for (int c = 4; c <= 10; ++c) plateau.at(r, c) = 200;
    const GrayImage th_plateau = white_top_hat(plateau, se3);
    REQUIRE(th_plateau == oracle::ref_top_hat(plateau, se3));
    for (int r = 5; r <= 9; ++r)
        for (int c = 5; c <= 9; ++c) REQUIRE(th_plateau.at(r, c) == 0);
}

TEST_CASE("all operators bit-match the brute-force reference", "[morphology][oracle]") {
    oracle::TestRng rng(202);
    for (int trial = 0; trial < 25; ++trial) {
        const GrayImage g = oracle::random_gray(16, 16, rng);
        const BinaryMask m = oracle::random_mask(16, 16, 0.5, rng);
        for (const auto& se : test_elements()) {
            REQUIRE(erode(g, se) == oracle::ref_erode(g, se));
            REQUIRE(dilate(g, se) == oracle::ref_dilate(g, se));
            REQUIRE(open(g, se) == oracle::ref_open(g, se));
            REQUIRE(close(g, se) == oracle::ref_close(g, se));
            REQUIRE(white_top_hat(g, se) == oracle::ref_top_hat(g, se));
            REQUIRE(erode(m, se) == oracle::ref_erode(m, se));
            REQUIRE(dilate(m, se) == oracle::ref_dilate(m, se));
            REQUIRE(open(m, se) == oracle::ref_open(m, se));
            REQUIRE(close(m, se) == oracle::ref_close(m, se));
        }
    }
}

TEST_CASE("duality of erosion and dilation", "[morphology][property]") {
    oracle::TestRng rng(303);
    const std::vector<StructuringElement> symmetric{
        StructuringElement::disc(3), StructuringElement::disc(5), StructuringElement::rect(3, 3)};
    for (int trial = 0; trial < 10; ++trial) {
        const BinaryMask m = oracle::random_mask(14, 14, 0.5, rng);
        for (const auto& se : symmetric) {
            // Neutral-element borders keep the duality exact everywhere.
            REQUIRE(erode(invert(m), se) == invert(dilate(m, se)));
        }
    }
}

TEST_CASE("monotonicity", "[morphology][property]") {
    oracle::TestRng rng(404);
    for (int trial = 0; trial < 10; ++trial) {
        const BinaryMask m1 = oracle::random_mask(14, 14, 0.3, rng);
        BinaryMask m2 = m1;
        for (int extra = 0; extra < 20; ++extra)
            m2.set(rng.below(14), rng.below(14), true);
        for (const auto& se : test_elements()) {
            REQUIRE(subset(erode(m1, se), erode(m2, se)));
            REQUIRE(subset(dilate(m1, se), dilate(m2, se)));
        }
    }
}

TEST_CASE("open below identity below close", "[morphology][property]") {
    oracle::TestRng rng(505);
    for (int trial = 0; trial < 10; ++trial) {
        const GrayImage g = oracle::random_gray(14, 14, rng);
        const BinaryMask m = oracle::random_mask(14, 14, 0.5, rng);
        for (const auto& se : test_elements()) {
            const GrayImage og = open(g, se), cg = close(g, se);
            for (std::size_t i = 0; i < g.size(); ++i) {
                REQUIRE(og.data()[i] <= g.data()[i]);
                REQUIRE(g.data()[i] <= cg.data()[i]);
            }
            REQUIRE(subset(open(m, se), m));
            REQUIRE(subset(m, close(m, se)));
            // top-hat is exactly img - open(img); the difference never
            // saturates because opening is anti-extensive
            const GrayImage th = white_top_hat(g, se);
            for (std::size_t i = 0; i < g.size(); ++i)
                REQUIRE(static_cast<int>(th.data()[i]) ==
                        static_cast<int>(g.data()[i]) - static_cast<int>(og.data()[i]));
        }
    }
}
