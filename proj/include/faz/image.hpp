#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "faz/error.hpp"

namespace faz {

/// Dense 8-bit single-channel raster, row-major.
/// Immutable by convention once a pipeline stage has produced it.
class GrayImage {
public:
    GrayImage() = default;
    GrayImage(int width, int height, std::uint8_t fill = 0)
        : width_(width), height_(height),
          data_(static_cast<std::size_t>(check_dims(width, height)), fill) {}
    GrayImage(int width, int height, std::vector<std::uint8_t> data)
        : width_(width), height_(height), data_(std::move(data)) {
        if (data_.size() != static_cast<std::size_t>(check_dims(width, height)))
            throw DimensionMismatch("pixel buffer does not match width*height");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return data_.size(); }

    std::uint8_t at(int row, int col) const {
        return data_[static_cast<std::size_t>(row) * width_ + col];
    }
    std::uint8_t& at(int row, int col) {
        return data_[static_cast<std::size_t>(row) * width_ + col];
    }
    bool in_bounds(int row, int col) const {
        return row >= 0 && row < height_ && col >= 0 && col < width_;
    }

    const std::vector<std::uint8_t>& data() const { return data_; }
    std::vector<std::uint8_t>& data() { return data_; }

    bool operator==(const GrayImage& o) const = default;

private:
    static long long check_dims(int width, int height) {
        if (width <= 0 || height <= 0)
            throw DimensionMismatch("image dimensions must be positive");
        return static_cast<long long>(width) * height;
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> data_;
};

/// Same-shaped boolean raster (true = foreground).
class BinaryMask {
public:
    BinaryMask() = default;
    BinaryMask(int width, int height, bool fill = false)
        : width_(width), height_(height),
          data_(static_cast<std::size_t>(check_dims(width, height)), fill ? 1 : 0) {}

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return data_.size(); }

    bool at(int row, int col) const {
        return data_[static_cast<std::size_t>(row) * width_ + col] != 0;
    }
    void set(int row, int col, bool v) {
        data_[static_cast<std::size_t>(row) * width_ + col] = v ? 1 : 0;
    }
    bool in_bounds(int row, int col) const {
        return row >= 0 && row < height_ && col >= 0 && col < width_;
    }

    std::size_t count() const {
        std::size_t n = 0;
        for (auto v : data_) n += v;
        return n;
    }

    bool same_dims(const BinaryMask& o) const {
        return width_ == o.width_ && height_ == o.height_;
    }

    const std::vector<std::uint8_t>& data() const { return data_; }
    std::vector<std::uint8_t>& data() { return data_; }

    bool operator==(const BinaryMask& o) const = default;

private:
    static long long check_dims(int width, int height) {
        if (width <= 0 || height <= 0)
            throw DimensionMismatch("mask dimensions must be positive");
        return static_cast<long long>(width) * height;
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> data_;  // 0/1 per cell
};

/// Millimeters covered by one image side (3 or 6 in the usual captures).
struct PhysicalExtent {
    double size_mm = 3.0;

    explicit PhysicalExtent(double mm = 3.0) : size_mm(mm) {
        if (!(size_mm > 0.0)) throw ConfigError("physical extent must be positive");
    }
};

/// Pixelwise 255 - p.
inline GrayImage invert(const GrayImage& img) {
    GrayImage out(img.width(), img.height());
    const auto& src = img.data();
    auto& dst = out.data();
    for (std::size_t i = 0; i < src.size(); ++i)
        dst[i] = static_cast<std::uint8_t>(255 - src[i]);
    return out;
}

/// Logical complement of a mask.
inline BinaryMask invert(const BinaryMask& mask) {
    BinaryMask out(mask.width(), mask.height());
    for (std::size_t i = 0; i < mask.size(); ++i)
        out.data()[i] = mask.data()[i] ? 0 : 1;
    return out;
}

/// Arithmetic mean of all pixels, in [0, 255].
inline double mean_intensity(const GrayImage& img) {
    unsigned long long sum = 0;
    for (auto v : img.data()) sum += v;
    return static_cast<double>(sum) / static_cast<double>(img.size());
}

}  // namespace faz
