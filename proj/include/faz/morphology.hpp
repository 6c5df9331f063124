#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "faz/error.hpp"
#include "faz/image.hpp"

namespace faz {

/// Flat structuring element: odd-sized boolean kernel anchored at its center.
class StructuringElement {
public:
    static StructuringElement disc(int size) {
        // Discrete Euclidean ball of radius size/2 sampled at cell centers:
        // (dr, dc) is a hit iff 4*(dr^2 + dc^2) <= size^2.
        StructuringElement se;
        se.width_ = se.height_ = size;
        se.hits_.assign(static_cast<std::size_t>(size) * size, 0);
        const int c = size / 2;
        for (int r = 0; r < size; ++r)
            for (int q = 0; q < size; ++q) {
                const int dr = r - c, dc = q - c;
                if (4 * (dr * dr + dc * dc) <= size * size)
                    se.hits_[static_cast<std::size_t>(r) * size + q] = 1;
            }
        se.validate();
        return se;
    }

    static StructuringElement rect(int width, int height) {
        StructuringElement se;
        se.width_ = width;
        se.height_ = height;
        se.hits_.assign(static_cast<std::size_t>(width) * height, 1);
        se.validate();
        return se;
    }

    static StructuringElement from_hits(int width, int height, std::vector<std::uint8_t> hits) {
        StructuringElement se;
        se.width_ = width;
        se.height_ = height;
        se.hits_ = std::move(hits);
        if (se.hits_.size() != static_cast<std::size_t>(width) * height)
            throw ConfigError("structuring element hit buffer does not match dimensions");
        se.validate();
        return se;
    }

    int width() const { return width_; }
    int height() const { return height_; }
    bool hit(int r, int c) const { return hits_[static_cast<std::size_t>(r) * width_ + c] != 0; }

    /// Hit offsets (dr, dc) relative to the anchor, row-major order.
    std::vector<std::pair<int, int>> offsets() const {
        std::vector<std::pair<int, int>> out;
        out.reserve(hits_.size());
        for (int r = 0; r < height_; ++r)
            for (int c = 0; c < width_; ++c)
                if (hit(r, c)) out.emplace_back(r - height_ / 2, c - width_ / 2);
        return out;
    }

private:
    void validate() const {
        if (width_ < 1 || height_ < 1 || width_ % 2 == 0 || height_ % 2 == 0)
            throw ConfigError("structuring element dimensions must be odd and >= 1");
        if (std::find(hits_.begin(), hits_.end(), 1) == hits_.end())
            throw ConfigError("structuring element needs at least one hit");
        if (!hit(height_ / 2, width_ / 2))
            throw ConfigError("structuring element anchor cell must be a hit");
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> hits_;
};

// Border handling is neutral-element padding: out-of-bounds probes are simply
// ignored (gray min -> 255, gray max -> 0, binary all -> true, binary any ->
// false). Dilation probes the reflected element (p - o), which for the
// symmetric default kernels coincides with p + o and keeps opening
// anti-extensive and closing extensive for arbitrary elements.

namespace morph_detail {

template <bool Erode>
inline GrayImage gray_morph(const GrayImage& img, const StructuringElement& se) {
    const auto offs = se.offsets();
    const int w = img.width(), h = img.height();
    GrayImage out(w, h);
    const std::uint8_t* src = img.data().data();
    std::uint8_t* dst = out.data().data();
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            int acc = Erode ? 255 : 0;
            for (const auto& [dr, dc] : offs) {
                const int pr = Erode ? r + dr : r - dr;
                const int pc = Erode ? c + dc : c - dc;
                if (pr < 0 || pr >= h || pc < 0 || pc >= w) continue;
                const int v = src[static_cast<std::size_t>(pr) * w + pc];
                if (Erode)
                    acc = v < acc ? v : acc;
                else
                    acc = v > acc ? v : acc;
            }
            dst[static_cast<std::size_t>(r) * w + c] = static_cast<std::uint8_t>(acc);
        }
    }
    return out;
}

template <bool Erode>
inline BinaryMask binary_morph(const BinaryMask& mask, const StructuringElement& se) {
    const auto offs = se.offsets();
    const int w = mask.width(), h = mask.height();
    BinaryMask out(w, h);
    const std::uint8_t* src = mask.data().data();
    std::uint8_t* dst = out.data().data();
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            bool acc = Erode;
            for (const auto& [dr, dc] : offs) {
                const int pr = Erode ? r + dr : r - dr;
                const int pc = Erode ? c + dc : c - dc;
                if (pr < 0 || pr >= h || pc < 0 || pc >= w) continue;
                const bool v = src[static_cast<std::size_t>(pr) * w + pc] != 0;
                if (Erode) {
                    if (!v) { acc = false; break; }
                } else {
                    if (v) { acc = true; break; }
                }
            }
            dst[static_cast<std::size_t>(r) * w + c] = acc ? 1 : 0;
        }
    }
    return out;
}

}  // namespace morph_detail

inline GrayImage erode(const GrayImage& img, const StructuringElement& se) {
    return morph_detail::gray_morph<true>(img, se);
}
inline GrayImage dilate(const GrayImage& img, const StructuringElement& se) {
    return morph_detail::gray_morph<false>(img, se);
}
inline BinaryMask erode(const BinaryMask& mask, const StructuringElement& se) {
    return morph_detail::binary_morph<true>(mask, se);
}
inline BinaryMask dilate(const BinaryMask& mask, const StructuringElement& se) {
    return morph_detail::binary_morph<false>(mask, se);
}

inline GrayImage open(const GrayImage& img, const StructuringElement& se) {
    return dilate(erode(img, se), se);
}
inline GrayImage close(const GrayImage& img, const StructuringElement& se) {
    return erode(dilate(img, se), se);
}
inline BinaryMask open(const BinaryMask& mask, const StructuringElement& se) {
    return dilate(erode(mask, se), se);
}
inline BinaryMask close(const BinaryMask& mask, const StructuringElement& se) {
    return erode(dilate(mask, se), se);
}

/// img - open(img, se), saturating at 0. Enhances bright structures smaller
/// than the structuring element.
inline GrayImage white_top_hat(const GrayImage& img, const StructuringElement& se) {
    const GrayImage opened = open(img, se);
    GrayImage out(img.width(), img.height());
    for (std::size_t i = 0; i < img.size(); ++i) {
        const int d = static_cast<int>(img.data()[i]) - static_cast<int>(opened.data()[i]);
        out.data()[i] = static_cast<std::uint8_t>(d > 0 ? d : 0);
    }
    return out;
}

}  // namespace faz
