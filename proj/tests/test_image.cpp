#include <catch2/catch_amalgamated.hpp>

#include <fstream>

#include "faz/image.hpp"
#include "faz/image_io.hpp"
#include "oracles.hpp"
#include "temp_dir.hpp"

using namespace faz;

namespace {

void write_bytes(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_CASE("pgm loads verbatim", "[image][io]") {
    testutil::TempDir tmp("pgm");
    const std::string path = tmp.file("t.pgm");
    std::string bytes = "P5\n2 2\n255\n";
    bytes.push_back('\0');
    bytes.push_back(static_cast<char>(128));
    bytes.push_back(static_cast<char>(255));
    bytes.push_back(static_cast<char>(64));
    write_bytes(path, bytes);

    const GrayImage img = load_grayscale(path);
    REQUIRE(img.width() == 2);
    REQUIRE(img.height() == 2);
    REQUIRE(img.data() == std::vector<std::uint8_t>{0, 128, 255, 64});
}

TEST_CASE("pgm comments and whitespace", "[image][io]") {
    testutil::TempDir tmp("pgm");
    const std::string path = tmp.file("t.pgm");
    std::string bytes = "P5 # a comment\n# another\n 3\t1 #c\n255 ";
    bytes.push_back(static_cast<char>(7));
    bytes.push_back(static_cast<char>(8));
    bytes.push_back(static_cast<char>(9));
    write_bytes(path, bytes);
    const GrayImage img = load_grayscale(path);
    REQUIRE(img.width() == 3);
    REQUIRE(img.data() == std::vector<std::uint8_t>{7, 8, 9});
}

TEST_CASE("white png round-trips", "[image][io]") {
    testutil::TempDir tmp("png");
    const std::string path = tmp.file("white.png");
    save_gray(GrayImage(320, 320, 255), path);
    const GrayImage img = load_grayscale(path);
    REQUIRE(img.width() == 320);
    REQUIRE(img.height() == 320);
    for (auto v : img.data()) REQUIRE(v == 255);
}

TEST_CASE("rgb png converts through bt601 luma", "[image][io]") {
    testutil::TempDir tmp("png");
    const std::string path = tmp.file("red.png");
    // One red pixel: round(0.299*255) = 76.
    save_rgb(1, 1, {255, 0, 0}, path);
    REQUIRE(load_grayscale(path).at(0, 0) == 76);

    const std::string green = tmp.file("g.png");
    save_rgb(1, 1, {0, 255, 0}, green);
    REQUIRE(load_grayscale(green).at(0, 0) == 150);  // round(0.587*255) = 149.685 -> 150
}

TEST_CASE("image io errors", "[image][io][errors]") {
    testutil::TempDir tmp("ioerr");
    REQUIRE_THROWS_AS(load_grayscale(tmp.file("nope.png")), FileNotFound);

    const std::string garbage = tmp.file("garbage.bin");
    write_bytes(garbage, "this is not an image at all");
    REQUIRE_THROWS_AS(load_grayscale(garbage), UnsupportedFormat);

    const std::string truncated = tmp.file("trunc.pgm");
    write_bytes(truncated, "P5\n4 4\n255\nxx");
    REQUIRE_THROWS_AS(load_grayscale(truncated), CorruptImage);

    const std::string deep = tmp.file("deep.pgm");
    write_bytes(deep, "P5\n1 1\n65535\n\0\0");
    REQUIRE_THROWS_AS(load_grayscale(deep), UnsupportedFormat);
}

TEST_CASE("invert", "[image]") {
    REQUIRE(invert(GrayImage(4, 3, 0)) == GrayImage(4, 3, 255));
    GrayImage one(1, 1, 100);
    REQUIRE(invert(one).at(0, 0) == 155);

    oracle::TestRng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const GrayImage img = oracle::random_gray(17, 9, rng);
        REQUIRE(invert(invert(img)) == img);
    }
}

TEST_CASE("mean intensity", "[image]") {
    REQUIRE(mean_intensity(GrayImage(5, 5, 128)) == 128.0);
    REQUIRE(mean_intensity(GrayImage(2, 1, std::vector<std::uint8_t>{0, 255})) == 127.5);
    const GrayImage tri(3, 1, std::vector<std::uint8_t>{10, 20, 40});
    REQUIRE_THAT(mean_intensity(tri), Catch::Matchers::WithinAbs((10.0 + 20.0 + 40.0) / 3.0, 1e-9));

    oracle::TestRng rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        const GrayImage img = oracle::random_gray(13, 7, rng);
        REQUIRE_THAT(mean_intensity(invert(img)),
                     Catch::Matchers::WithinAbs(255.0 - mean_intensity(img), 1e-9));
    }
}

TEST_CASE("mask round-trip", "[image][io]") {
    testutil::TempDir tmp("mask");

    BinaryMask empty(8, 8);
    save_mask(empty, tmp.file("empty.png"));
    const GrayImage black = load_grayscale(tmp.file("empty.png"));
    for (auto v : black.data()) REQUIRE(v == 0);

    BinaryMask full(8, 8, true);
    save_mask(full, tmp.file("full.png"));
    const GrayImage white = load_grayscale(tmp.file("full.png"));
    for (auto v : white.data()) REQUIRE(v == 255);

    oracle::TestRng rng(13);
    const BinaryMask mask = oracle::random_mask(31, 17, 0.4, rng);
    save_mask(mask, tmp.file("rand.png"));
    REQUIRE(load_mask(tmp.file("rand.png")) == mask);
}

TEST_CASE("gray png load-save-load identity", "[image][io]") {
    testutil::TempDir tmp("gray");
    oracle::TestRng rng(14);
    const GrayImage img = oracle::random_gray(41, 23, rng);
    save_gray(img, tmp.file("a.png"));
    const GrayImage again = load_grayscale(tmp.file("a.png"));
    REQUIRE(again == img);
    save_gray(again, tmp.file("b.png"));
    REQUIRE(load_grayscale(tmp.file("b.png")) == img);
}
