#pragma once

#include <algorithm>
#include <cmath>

#include "lod2/raster.hpp"

namespace lod2 {

/// Pixel-count IoU of two binary masks.
inline double iou2(const Mask& pred, const Mask& ref) {
    if (pred.width != ref.width || pred.height != ref.height)
        throw DimensionMismatch("mask dimensions differ");
    size_t inter = 0, uni = 0, ref_set = 0;
    for (size_t i = 0; i < pred.samples.size(); ++i) {
        bool p = pred.samples[i] != 0, r = ref.samples[i] != 0;
        ref_set += r;
        if (p && r) ++inter;
        if (p || r) ++uni;
    }
    if (ref_set == 0) throw EmptyReference("reference mask is empty");
    return uni ? static_cast<double>(inter) / uni : 1.0;
}

/// Column-voxel 3D IoU of two height fields over a common grid. Each cell
/// contributes floor((h - z_ground)/voxel_h) occupied voxels from z_ground
/// upward; the IoU is sum(min)/sum(max) over cells where either column is
/// occupied.
inline double iou3(const RasterF32& pred, const RasterF32& ref, double z_ground,
                   double voxel_h = 0.5) {
    if (pred.width != ref.width || pred.height != ref.height)
        throw DimensionMismatch("height field dimensions differ");
    auto columns = [&](const RasterF32& f, int c, int r) -> long {
        if (!f.valid(c, r)) return 0;
        double h = f.at(c, r) - z_ground;
        if (h <= 0.0) return 0;
        return static_cast<long>(std::floor(h / voxel_h + 1e-12));
    };
    long num = 0, den = 0;
    bool ref_any = false;
    for (int r = 0; r < pred.height; ++r)
        for (int c = 0; c < pred.width; ++c) {
            long np = columns(pred, c, r);
            long nr = columns(ref, c, r);
            ref_any |= (nr > 0);
            num += std::min(np, nr);
            den += std::max(np, nr);
        }
    if (!ref_any) throw EmptyReference("reference height field has no occupied columns");
    return den ? static_cast<double>(num) / den : 1.0;
}

}  // namespace lod2
