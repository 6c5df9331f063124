#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "faz/error.hpp"
#include "faz/image.hpp"

namespace faz {

/// Hysteresis thresholds are proportional to the input's mean intensity,
/// which is what makes the detector adapt across captures.
struct CannyParams {
    double sigma = 1.4;
    double low_factor = 0.66;
    double high_factor = 1.33;

    void validate() const {
        if (!(sigma > 0.0)) throw ConfigError("canny sigma must be positive");
        if (!(low_factor > 0.0 && low_factor < high_factor))
            throw ConfigError("canny factors must satisfy 0 < low < high");
    }
};

/// Optional insight into a canny() run: raw L2 gradient magnitude per pixel
/// (zero on the 1-pixel frame border) and the thresholds actually used.
struct CannyTrace {
    std::vector<float> magnitude;
    double low = 0.0;
    double high = 0.0;
};

/// (low, high) = (low_factor, high_factor) * mean_intensity(img).
/// Throws DegenerateImage for an all-black input.
inline std::pair<double, double> adaptive_thresholds(const GrayImage& img,
                                                     const CannyParams& params) {
    params.validate();
    const double mean = mean_intensity(img);
    if (mean == 0.0) throw DegenerateImage("mean intensity is zero");
    return {params.low_factor * mean, params.high_factor * mean};
}

namespace canny_detail {

inline std::vector<float> gaussian_blur(const GrayImage& img, double sigma) {
    const int w = img.width(), h = img.height();
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<float> kernel(static_cast<std::size_t>(radius) + 1);
    double sum = 0.0;
    for (int i = 0; i <= radius; ++i) {
        kernel[i] = static_cast<float>(std::exp(-(static_cast<double>(i) * i) /
                                                (2.0 * sigma * sigma)));
        sum += (i == 0 ? 1.0 : 2.0) * kernel[i];
    }
    for (auto& k : kernel) k = static_cast<float>(k / sum);

    auto clamp = [](int v, int hi) { return v < 0 ? 0 : (v > hi ? hi : v); };

    // Separable convolution, replicated border.
    std::vector<float> tmp(img.size());
    for (int r = 0; r < h; ++r) {
        const std::uint8_t* row = img.data().data() + static_cast<std::size_t>(r) * w;
        for (int c = 0; c < w; ++c) {
            float acc = kernel[0] * row[c];
            for (int i = 1; i <= radius; ++i)
                acc += kernel[i] * (row[clamp(c - i, w - 1)] + row[clamp(c + i, w - 1)]);
            tmp[static_cast<std::size_t>(r) * w + c] = acc;
        }
    }
    std::vector<float> out(img.size());
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            float acc = kernel[0] * tmp[static_cast<std::size_t>(r) * w + c];
            for (int i = 1; i <= radius; ++i)
                acc += kernel[i] *
                       (tmp[static_cast<std::size_t>(clamp(r - i, h - 1)) * w + c] +
                        tmp[static_cast<std::size_t>(clamp(r + i, h - 1)) * w + c]);
            out[static_cast<std::size_t>(r) * w + c] = acc;
        }
    return out;
}

}  // namespace canny_detail

/// Canny edge detection: Gaussian blur, 3x3 Sobel, 4-sector non-maximum
/// suppression, double-threshold hysteresis (8-connected). Thresholds come
/// from adaptive_thresholds. The 1-pixel frame border carries no gradient
/// support and never fires.
inline BinaryMask canny(const GrayImage& img, const CannyParams& params,
                        CannyTrace* trace = nullptr) {
    const int w = img.width(), h = img.height();
    if (w < 3 || h < 3) throw ImageTooSmall("canny needs at least 3x3");
    const auto [low, high] = adaptive_thresholds(img, params);

    const std::vector<float> blurred = canny_detail::gaussian_blur(img, params.sigma);

    std::vector<float> gx(img.size(), 0.0f), gy(img.size(), 0.0f), mag(img.size(), 0.0f);
    auto b = [&](int r, int c) { return blurred[static_cast<std::size_t>(r) * w + c]; };
    for (int r = 1; r < h - 1; ++r)
        for (int c = 1; c < w - 1; ++c) {
            const std::size_t i = static_cast<std::size_t>(r) * w + c;
            gx[i] = (b(r - 1, c + 1) + 2.0f * b(r, c + 1) + b(r + 1, c + 1)) -
                    (b(r - 1, c - 1) + 2.0f * b(r, c - 1) + b(r + 1, c - 1));
            gy[i] = (b(r + 1, c - 1) + 2.0f * b(r + 1, c) + b(r + 1, c + 1)) -
                    (b(r - 1, c - 1) + 2.0f * b(r - 1, c) + b(r - 1, c + 1));
            mag[i] = std::sqrt(gx[i] * gx[i] + gy[i] * gy[i]);
        }

    // Non-maximum suppression quantized to 4 sectors. Ties on a 2-wide ridge
    // plateau are broken toward the first pixel in scan order (strict test
    // against the earlier neighbor, non-strict against the later one).
    constexpr float kTan22 = 0.41421356f;
    constexpr float kTan67 = 2.41421356f;
    std::vector<std::uint8_t> survives(img.size(), 0);
    for (int r = 1; r < h - 1; ++r)
        for (int c = 1; c < w - 1; ++c) {
            const std::size_t i = static_cast<std::size_t>(r) * w + c;
            const float m = mag[i];
            if (m <= 0.0f) continue;
            const float ax = std::fabs(gx[i]), ay = std::fabs(gy[i]);
            int ar, ac;  // offset toward the "later" neighbor
            if (ay <= ax * kTan22) {
                ar = 0, ac = 1;
            } else if (ay >= ax * kTan67) {
                ar = 1, ac = 0;
            } else if ((gx[i] > 0.0f) == (gy[i] > 0.0f)) {
                ar = 1, ac = 1;
            } else {
                ar = 1, ac = -1;
            }
            const float before = mag[static_cast<std::size_t>(r - ar) * w + (c - ac)];
            const float after = mag[static_cast<std::size_t>(r + ar) * w + (c + ac)];
            if (m > before && m >= after) survives[i] = 1;
        }

    // Hysteresis: seed from strong survivors, flood through weak ones.
    BinaryMask edges(w, h);
    std::vector<std::size_t> stack;
    for (int r = 1; r < h - 1; ++r)
        for (int c = 1; c < w - 1; ++c) {
            const std::size_t i = static_cast<std::size_t>(r) * w + c;
            if (survives[i] && mag[i] >= high && !edges.data()[i]) {
                edges.data()[i] = 1;
                stack.push_back(i);
                while (!stack.empty()) {
                    const std::size_t j = stack.back();
                    stack.pop_back();
                    const int jr = static_cast<int>(j / w), jc = static_cast<int>(j % w);
                    for (int dr = -1; dr <= 1; ++dr)
                        for (int dc = -1; dc <= 1; ++dc) {
                            const int nr = jr + dr, nc = jc + dc;
                            if (nr < 0 || nr >= h || nc < 0 || nc >= w) continue;
                            const std::size_t n = static_cast<std::size_t>(nr) * w + nc;
                            if (!edges.data()[n] && survives[n] && mag[n] >= low) {
                                edges.data()[n] = 1;
                                stack.push_back(n);
                            }
                        }
                }
            }
        }

    if (trace) {
        trace->magnitude = std::move(mag);
        trace->low = low;
        trace->high = high;
    }
    return edges;
}

}  // namespace faz
