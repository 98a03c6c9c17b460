#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "lod2/core.hpp"

namespace lod2 {

/// 8-bit three-band raster, row-major, top-to-bottom, interleaved RGB.
struct RasterRGB {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> samples;  // width*height*3

    RasterRGB() = default;
    RasterRGB(int w, int h) : width(w), height(h), samples(static_cast<size_t>(w) * h * 3, 0) {}

    std::uint8_t& at(int col, int row, int band) {
        return samples[(static_cast<size_t>(row) * width + col) * 3 + band];
    }
    std::uint8_t at(int col, int row, int band) const {
        return samples[(static_cast<size_t>(row) * width + col) * 3 + band];
    }
    bool inside(int col, int row) const {
        return col >= 0 && col < width && row >= 0 && row < height;
    }
    /// Grayscale intensity, mean of the three bands.
    double gray(int col, int row) const {
        size_t i = (static_cast<size_t>(row) * width + col) * 3;
        return (samples[i] + samples[i + 1] + samples[i + 2]) / 3.0;
    }
};

/// Single-band float raster (heights in meters), row-major, top-to-bottom.
struct RasterF32 {
    int width = 0;
    int height = 0;
    std::vector<float> samples;
    float nodata = -9999.0f;

    RasterF32() = default;
    RasterF32(int w, int h, float fill = 0.0f)
        : width(w), height(h), samples(static_cast<size_t>(w) * h, fill) {}

    float& at(int col, int row) { return samples[static_cast<size_t>(row) * width + col]; }
    float at(int col, int row) const { return samples[static_cast<size_t>(row) * width + col]; }
    bool inside(int col, int row) const {
        return col >= 0 && col < width && row >= 0 && row < height;
    }
    bool valid(int col, int row) const {
        float v = at(col, row);
        return v != nodata && std::isfinite(v);
    }
};

/// Binary/label mask, 8-bit single band.
struct Mask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> samples;

    Mask() = default;
    Mask(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), samples(static_cast<size_t>(w) * h, fill) {}

    std::uint8_t& at(int col, int row) { return samples[static_cast<size_t>(row) * width + col]; }
    std::uint8_t at(int col, int row) const {
        return samples[static_cast<size_t>(row) * width + col];
    }
    bool inside(int col, int row) const {
        return col >= 0 && col < width && row >= 0 && row < height;
    }
    bool set(int col, int row) const { return inside(col, row) && at(col, row) != 0; }

    size_t count_set() const {
        size_t n = 0;
        for (auto v : samples) n += (v != 0);
        return n;
    }
};

/// Integer pixel rectangle [x0,x1) x [y0,y1).
struct PixelBox {
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0;

    int width() const { return x1 - x0; }
    int height() const { return y1 - y0; }
    bool empty() const { return x1 <= x0 || y1 <= y0; }
};

}  // namespace lod2
