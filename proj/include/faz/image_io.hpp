#pragma once

#include <png.h>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "faz/error.hpp"
#include "faz/image.hpp"

namespace faz {
namespace io_detail {

struct FileHandle {
    std::FILE* f = nullptr;
    explicit FileHandle(const std::string& path, const char* mode)
        : f(std::fopen(path.c_str(), mode)) {}
    ~FileHandle() {
        if (f) std::fclose(f);
    }
    FileHandle(const FileHandle&) = delete;
    FileHandle& operator=(const FileHandle&) = delete;
};

struct PngReader {
    png_structp png = nullptr;
    png_infop info = nullptr;
    PngReader() {
        png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
        if (png) info = png_create_info_struct(png);
    }
    ~PngReader() { png_destroy_read_struct(&png, &info, nullptr); }
};

struct PngWriter {
    png_structp png = nullptr;
    png_infop info = nullptr;
    PngWriter() {
        png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
        if (png) info = png_create_info_struct(png);
    }
    ~PngWriter() { png_destroy_write_struct(&png, &info); }
};

// BT.601 luma, round-half-up, integer-exact.
inline std::uint8_t luma(unsigned r, unsigned g, unsigned b) {
    return static_cast<std::uint8_t>((299u * r + 587u * g + 114u * b + 500u) / 1000u);
}

inline GrayImage load_png(const std::string& path) {
    FileHandle fh(path, "rb");
    if (!fh.f) throw FileNotFound(path);

    PngReader rd;
    if (!rd.png || !rd.info) throw IoError("libpng initialization failed");

    std::vector<std::uint8_t> interleaved;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(rd.png)))
        throw CorruptImage(path);

    png_init_io(rd.png, fh.f);
    png_read_info(rd.png, rd.info);

    const png_uint_32 w = png_get_image_width(rd.png, rd.info);
    const png_uint_32 h = png_get_image_height(rd.png, rd.info);
    const int depth = png_get_bit_depth(rd.png, rd.info);
    const int color = png_get_color_type(rd.png, rd.info);
    if (depth == 16) throw UnsupportedFormat(path + ": 16-bit PNG");
    if (w == 0 || h == 0) throw CorruptImage(path + ": zero-sized PNG");

    // Normalize everything to 8-bit gray or RGB samples.
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(rd.png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(rd.png);
    if (png_get_valid(rd.png, rd.info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(rd.png);
    png_set_strip_alpha(rd.png);
    png_read_update_info(rd.png, rd.info);

    const int channels = png_get_channels(rd.png, rd.info);
    if (channels != 1 && channels != 3)
        throw UnsupportedFormat(path + ": expected grayscale or RGB PNG");

    interleaved.resize(static_cast<std::size_t>(w) * h * channels);
    rows.resize(h);
    for (png_uint_32 r = 0; r < h; ++r)
        rows[r] = interleaved.data() + static_cast<std::size_t>(r) * w * channels;
    png_read_image(rd.png, rows.data());
    png_read_end(rd.png, nullptr);

    GrayImage img(static_cast<int>(w), static_cast<int>(h));
    if (channels == 1) {
        std::memcpy(img.data().data(), interleaved.data(), img.size());
    } else {
        for (std::size_t i = 0; i < img.size(); ++i)
            img.data()[i] = luma(interleaved[3 * i], interleaved[3 * i + 1],
                                 interleaved[3 * i + 2]);
    }
    return img;
}

inline GrayImage load_pgm(const std::string& path) {
    FileHandle fh(path, "rb");
    if (!fh.f) throw FileNotFound(path);

    // Header: "P5" <ws> width <ws> height <ws> maxval <single ws> raster.
    // '#' starts a comment running to end of line.
    auto next_token = [&]() -> long {
        int c = std::fgetc(fh.f);
        while (c != EOF) {
            if (c == '#') {
                while (c != EOF && c != '\n') c = std::fgetc(fh.f);
            } else if (std::isspace(c)) {
                c = std::fgetc(fh.f);
                continue;
            } else {
                break;
            }
            c = std::fgetc(fh.f);
        }
        if (c == EOF) throw CorruptImage(path + ": truncated PGM header");
        long value = 0;
        bool any = false;
        while (c != EOF && std::isdigit(c)) {
            value = value * 10 + (c - '0');
            if (value > 1000000) throw CorruptImage(path + ": absurd PGM header value");
            any = true;
            c = std::fgetc(fh.f);
        }
        if (!any) throw CorruptImage(path + ": malformed PGM header");
        if (c != EOF) std::ungetc(c, fh.f);
        return value;
    };

    char magic[2];
    if (std::fread(magic, 1, 2, fh.f) != 2 || magic[0] != 'P' || magic[1] != '5')
        throw UnsupportedFormat(path + ": not a binary PGM");
    const long w = next_token();
    const long h = next_token();
    const long maxval = next_token();
    if (w <= 0 || h <= 0) throw CorruptImage(path + ": non-positive PGM dimensions");
    if (maxval <= 0 || maxval > 255)
        throw UnsupportedFormat(path + ": PGM maxval outside [1,255]");
    std::fgetc(fh.f);  // the single whitespace byte before the raster

    GrayImage img(static_cast<int>(w), static_cast<int>(h));
    if (std::fread(img.data().data(), 1, img.size(), fh.f) != img.size())
        throw CorruptImage(path + ": truncated PGM raster");
    return img;
}

inline void write_png(const std::string& path, int width, int height, int channels,
                      const std::uint8_t* data) {
    FileHandle fh(path, "wb");
    if (!fh.f) throw IoError("cannot open for writing: " + path);

    PngWriter wr;
    if (!wr.png || !wr.info) throw IoError("libpng initialization failed");

    std::vector<png_bytep> rows(static_cast<std::size_t>(height));
    if (setjmp(png_jmpbuf(wr.png)))
        throw IoError("png write failed: " + path);

    png_init_io(wr.png, fh.f);
    png_set_IHDR(wr.png, wr.info, static_cast<png_uint_32>(width),
                 static_cast<png_uint_32>(height), 8,
                 channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(wr.png, wr.info);
    for (int r = 0; r < height; ++r)
        rows[r] = const_cast<png_bytep>(data + static_cast<std::size_t>(r) * width * channels);
    png_write_image(wr.png, rows.data());
    png_write_end(wr.png, nullptr);
}

}  // namespace io_detail

/// Loads a PNG (8-bit grayscale or RGB) or binary PGM (P5) raster.
/// Color inputs are converted to luma with BT.601 weights, round-half-up.
inline GrayImage load_grayscale(const std::string& path) {
    {
        io_detail::FileHandle fh(path, "rb");
        if (!fh.f) throw FileNotFound(path);
        unsigned char sig[8] = {};
        const std::size_t n = std::fread(sig, 1, 8, fh.f);
        if (n >= 2 && sig[0] == 'P' && sig[1] == '5') {
            // fallthrough to the PGM reader below
        } else if (n == 8 && png_sig_cmp(sig, 0, 8) == 0) {
            return io_detail::load_png(path);
        } else {
            throw UnsupportedFormat(path + ": expected PNG or binary PGM");
        }
    }
    return io_detail::load_pgm(path);
}

/// Writes a mask as an 8-bit grayscale PNG, foreground 255 / background 0.
inline void save_mask(const BinaryMask& mask, const std::string& path) {
    std::vector<std::uint8_t> bytes(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i)
        bytes[i] = mask.data()[i] ? 255 : 0;
    io_detail::write_png(path, mask.width(), mask.height(), 1, bytes.data());
}

/// Reads a mask back from an 8-bit raster; any nonzero pixel is foreground.
inline BinaryMask load_mask(const std::string& path) {
    const GrayImage img = load_grayscale(path);
    BinaryMask mask(img.width(), img.height());
    for (std::size_t i = 0; i < img.size(); ++i)
        mask.data()[i] = img.data()[i] ? 1 : 0;
    return mask;
}

/// Writes a grayscale image as an 8-bit PNG (debug dumps, synthetic data).
inline void save_gray(const GrayImage& img, const std::string& path) {
    io_detail::write_png(path, img.width(), img.height(), 1, img.data().data());
}

/// Writes an interleaved 8-bit RGB buffer as a PNG.
inline void save_rgb(int width, int height, const std::vector<std::uint8_t>& rgb,
                     const std::string& path) {
    if (rgb.size() != static_cast<std::size_t>(width) * height * 3)
        throw DimensionMismatch("rgb buffer does not match width*height*3");
    io_detail::write_png(path, width, height, 3, rgb.data());
}

}  // namespace faz
