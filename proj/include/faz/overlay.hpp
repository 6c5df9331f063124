#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "faz/error.hpp"
#include "faz/image.hpp"
#include "faz/image_io.hpp"

namespace faz {

/// Writes the image as RGB with the mask contour burned in (1 px, blue).
/// Contour pixels are mask members with a 4-neighbor outside the mask; the
/// image border counts as outside.
inline void overlay(const GrayImage& img, const BinaryMask& mask, const std::string& out_path) {
    if (img.width() != mask.width() || img.height() != mask.height())
        throw DimensionMismatch("overlay requires matching image and mask");
    const int w = img.width(), h = img.height();
    std::vector<std::uint8_t> rgb(static_cast<std::size_t>(w) * h * 3);
    for (std::size_t i = 0; i < img.size(); ++i)
        rgb[3 * i] = rgb[3 * i + 1] = rgb[3 * i + 2] = img.data()[i];
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            if (!mask.at(r, c)) continue;
            const bool contour = r == 0 || !mask.at(r - 1, c) || r == h - 1 ||
                                 !mask.at(r + 1, c) || c == 0 || !mask.at(r, c - 1) ||
                                 c == w - 1 || !mask.at(r, c + 1);
            if (contour) {
                const std::size_t i = (static_cast<std::size_t>(r) * w + c) * 3;
                rgb[i] = 30;
                rgb[i + 1] = 90;
                rgb[i + 2] = 255;
            }
        }
    save_rgb(w, h, rgb, out_path);
}

}  // namespace faz
