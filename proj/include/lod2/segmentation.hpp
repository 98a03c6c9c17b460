#pragma once

#include <vector>

#include "lod2/raster.hpp"

namespace lod2 {

/// One 8-connected building-mask component. The mask patch is cropped to the
/// bounding box; (bbox.x0, bbox.y0) is its offset into the scene.
struct BuildingSegment {
    int id = 0;
    Mask mask;      // patch, 1 = building
    PixelBox bbox;  // location of the patch in the scene raster
    size_t area_px = 0;

    bool set_scene(int col, int row) const {
        return mask.set(col - bbox.x0, row - bbox.y0);
    }
};

/// Label 8-connected components of a binary mask. Ids are assigned in
/// raster-scan order of each component's first pixel; components smaller
/// than min_area are dropped.
inline std::vector<BuildingSegment> connected_components(const Mask& binary,
                                                         size_t min_area = 50) {
    std::vector<int> label(binary.samples.size(), 0);
    std::vector<BuildingSegment> out;
    std::vector<std::pair<int, int>> stack;
    int next_id = 0;

    for (int row = 0; row < binary.height; ++row) {
        for (int col = 0; col < binary.width; ++col) {
            size_t idx = static_cast<size_t>(row) * binary.width + col;
            if (binary.samples[idx] == 0 || label[idx] != 0) continue;
            int id = ++next_id;
            PixelBox bb{col, row, col + 1, row + 1};
            std::vector<std::pair<int, int>> pixels;
            stack.clear();
            stack.push_back({col, row});
            label[idx] = id;
            while (!stack.empty()) {
                auto [c, r] = stack.back();
                stack.pop_back();
                pixels.push_back({c, r});
                bb.x0 = std::min(bb.x0, c); bb.x1 = std::max(bb.x1, c + 1);
                bb.y0 = std::min(bb.y0, r); bb.y1 = std::max(bb.y1, r + 1);
                for (int dr = -1; dr <= 1; ++dr) {
                    for (int dc = -1; dc <= 1; ++dc) {
                        int nc = c + dc, nr = r + dr;
                        if (!binary.inside(nc, nr)) continue;
                        size_t ni = static_cast<size_t>(nr) * binary.width + nc;
                        if (binary.samples[ni] != 0 && label[ni] == 0) {
                            label[ni] = id;
                            stack.push_back({nc, nr});
                        }
                    }
                }
            }
            if (pixels.size() < min_area) continue;
            BuildingSegment seg;
            seg.id = static_cast<int>(out.size()) + 1;
            seg.bbox = bb;
            seg.area_px = pixels.size();
            seg.mask = Mask(bb.width(), bb.height());
            for (auto [c, r] : pixels) seg.mask.at(c - bb.x0, r - bb.y0) = 1;
            out.push_back(std::move(seg));
        }
    }
    return out;
}

namespace detail {

inline Mask erode3(const Mask& m) {
    Mask out(m.width, m.height);
    for (int r = 0; r < m.height; ++r)
        for (int c = 0; c < m.width; ++c) {
            bool all = true;
            for (int dr = -1; dr <= 1 && all; ++dr)
                for (int dc = -1; dc <= 1 && all; ++dc)
                    if (!m.set(c + dc, r + dr)) all = false;
            out.at(c, r) = all ? 1 : 0;
        }
    return out;
}

inline Mask dilate3(const Mask& m) {
    Mask out(m.width, m.height);
    for (int r = 0; r < m.height; ++r)
        for (int c = 0; c < m.width; ++c) {
            bool any = false;
            for (int dr = -1; dr <= 1 && !any; ++dr)
                for (int dc = -1; dc <= 1 && !any; ++dc)
                    if (m.set(c + dc, r + dr)) any = true;
            out.at(c, r) = any ? 1 : 0;
        }
    return out;
}

}  // namespace detail

/// Non-learned substitute for a classification map: threshold the DSM above
/// ground and open with a 3x3 element to suppress speckle.
inline Mask fallback_segmentation(const RasterF32& dsm, double ground_height_m,
                                  double min_height_m = 2.0) {
    Mask m(dsm.width, dsm.height);
    for (int r = 0; r < dsm.height; ++r)
        for (int c = 0; c < dsm.width; ++c)
            if (dsm.valid(c, r) && dsm.at(c, r) - ground_height_m > min_height_m)
                m.at(c, r) = 1;
    return detail::dilate3(detail::erode3(m));
}

}  // namespace lod2
