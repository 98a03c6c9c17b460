#pragma once

#include <optional>
#include <vector>

#include "lod2/formats.hpp"
#include "lod2/geotransform.hpp"
#include "lod2/rectangle.hpp"

namespace lod2 {

struct RoadSegmentRef {
    size_t polyline = 0;
    size_t segment = 0;  // index of the segment's first vertex
    Vec2 a, b;           // world coordinates
    double distance_m = 0.0;
};

namespace detail {

inline double point_to_segment_m(Vec2 p, Vec2 a, Vec2 b) {
    Vec2 ab = b - a;
    double len2 = dot(ab, ab);
    double t = len2 > 0.0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
    return norm(p - (a + ab * t));
}

}  // namespace detail

/// Find the road polyline segment nearest the rectangle center (world
/// coordinates), or none when farther than d_max_m. Ties break toward the
/// lowest (polyline index, segment index).
inline std::optional<RoadSegmentRef> nearest_road_segment(const OrientedRect& rect,
                                                          const RoadNetwork& roads,
                                                          const GeoTransform& geo,
                                                          double d_max_m = 30.0) {
    Vec2 center = pixel_to_world(geo, {rect.cx, rect.cy});
    std::optional<RoadSegmentRef> best;
    for (size_t pi = 0; pi < roads.polylines.size(); ++pi) {
        const auto& poly = roads.polylines[pi];
        for (size_t si = 0; si + 1 < poly.size(); ++si) {
            double d = detail::point_to_segment_m(center, poly[si], poly[si + 1]);
            if (d > d_max_m) continue;
            if (!best || d < best->distance_m)
                best = RoadSegmentRef{pi, si, poly[si], poly[si + 1], d};
        }
    }
    return best;
}

/// Road direction expressed in the pixel frame (so it is comparable with
/// rectangle theta even under axis flips in the georeference).
inline double road_angle_in_pixels(const RoadSegmentRef& road, const GeoTransform& geo) {
    Vec2 pa = world_to_pixel(geo, road.a);
    Vec2 pb = world_to_pixel(geo, road.b);
    return fold_pi(std::atan2(pb.y - pa.y, pb.x - pa.x));
}

/// Snap a rectangle's orientation to a road direction when they differ by
/// less than tol_deg modulo 90, re-fitting the extent to the source mask
/// pixels along the new axes. mask_points are input-frame pixel centers of
/// the rectangle's footprint.
inline OrientedRect snap_rect_orientation(const OrientedRect& rect, double road_angle_px,
                                          double tol_deg = 10.0,
                                          const std::vector<Vec2>& mask_points = {}) {
    double delta = angdiff_mod90(rect.theta, road_angle_px);
    if (delta >= deg2rad(tol_deg)) return rect;

    // mod-90 representative of the road angle nearest the original theta
    double base = fold_half_pi(road_angle_px);
    double best = base;
    for (int k = 0; k < 4; ++k) {
        double cand = fold_pi(base + k * kPi / 2.0);
        if (angdiff_mod180(cand, rect.theta) < angdiff_mod180(best, rect.theta)) best = cand;
    }

    OrientedRect out = rect;
    out.theta = fold_pi(best);
    if (!mask_points.empty()) {
        double c = std::cos(out.theta), s = std::sin(out.theta);
        double umin = 1e18, umax = -1e18, vmin = 1e18, vmax = -1e18;
        for (const Vec2& p : mask_points) {
            double u = p.x * c + p.y * s;
            double v = -p.x * s + p.y * c;
            umin = std::min(umin, u); umax = std::max(umax, u);
            vmin = std::min(vmin, v); vmax = std::max(vmax, v);
        }
        double uc = (umin + umax) / 2.0, vc = (vmin + vmax) / 2.0;
        out.cx = uc * c - vc * s;
        out.cy = uc * s + vc * c;
        out.len = (umax - umin) + 1.0;  // pixel centers to full extent
        out.wid = (vmax - vmin) + 1.0;
        if (out.wid > out.len) {
            std::swap(out.len, out.wid);
            out.theta = fold_pi(out.theta + kPi / 2.0);
        }
    }
    return out;
}

}  // namespace lod2
