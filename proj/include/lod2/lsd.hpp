#pragma once

#include <algorithm>
#include <vector>

#include "lod2/polygon.hpp"
#include "lod2/raster.hpp"

namespace lod2 {

/// Straight image line detected in the orthophoto.
struct ImageLine {
    Vec2 point;    // centroid, pixel coordinates
    double angle;  // line direction, radians in [0, pi)
    double length; // pixels
};

struct LsdParams {
    double angle_tol_rad = deg2rad(22.5);
    double grad_threshold = 5.0;  // gradient magnitude gate, 0-255 scale
    double min_length_px = 10.0;
    double min_density = 0.7;
};

/// Simplified line-segment detection: grayscale gradient, region growing of
/// pixels with agreeing gradient orientation, least-squares line per region.
/// The usual a-contrario validation is replaced by a region density gate.
inline std::vector<ImageLine> detect_image_line_segments(const RasterRGB& ortho,
                                                         const PixelBox& region,
                                                         const LsdParams& params = {}) {
    PixelBox box{std::max(0, region.x0), std::max(0, region.y0),
                 std::min(ortho.width, region.x1), std::min(ortho.height, region.y1)};
    if (box.empty()) return {};
    const int w = box.width(), h = box.height();

    // 2x2 gradient (as in LSD): value at (c,r) uses the quad {c,c+1}x{r,r+1}
    std::vector<double> gmag(static_cast<size_t>(w) * h, 0.0);
    std::vector<double> gang(static_cast<size_t>(w) * h, 0.0);  // level-line angle
    for (int r = 0; r + 1 < h; ++r) {
        for (int c = 0; c + 1 < w; ++c) {
            double a = ortho.gray(box.x0 + c, box.y0 + r);
            double b = ortho.gray(box.x0 + c + 1, box.y0 + r);
            double d = ortho.gray(box.x0 + c, box.y0 + r + 1);
            double e = ortho.gray(box.x0 + c + 1, box.y0 + r + 1);
            double gx = (b + e - a - d) * 0.5;
            double gy = (d + e - a - b) * 0.5;
            size_t i = static_cast<size_t>(r) * w + c;
            gmag[i] = std::hypot(gx, gy);
            gang[i] = std::atan2(gx, -gy);  // perpendicular to gradient
        }
    }

    // seeds sorted by decreasing gradient magnitude
    std::vector<int> order;
    order.reserve(gmag.size());
    for (int i = 0; i < static_cast<int>(gmag.size()); ++i)
        if (gmag[i] > params.grad_threshold) order.push_back(i);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return gmag[a] > gmag[b]; });

    std::vector<char> used(gmag.size(), 0);
    std::vector<ImageLine> out;
    std::vector<int> stack, member;

    for (int seed : order) {
        if (used[seed]) continue;
        double ref = gang[seed];
        double sx = 0.0, sy = 0.0;
        member.clear();
        stack.clear();
        stack.push_back(seed);
        used[seed] = 1;
        while (!stack.empty()) {
            int i = stack.back();
            stack.pop_back();
            member.push_back(i);
            int c = i % w, r = i / w;
            sx += std::cos(2.0 * gang[i]);
            sy += std::sin(2.0 * gang[i]);
            ref = 0.5 * std::atan2(sy, sx);
            for (int dr = -1; dr <= 1; ++dr) {
                for (int dc = -1; dc <= 1; ++dc) {
                    int nc = c + dc, nr = r + dr;
                    if (nc < 0 || nc >= w || nr < 0 || nr >= h) continue;
                    int ni = nr * w + nc;
                    if (used[ni] || gmag[ni] <= params.grad_threshold) continue;
                    if (angdiff_mod180(gang[ni], ref) > params.angle_tol_rad) continue;
                    used[ni] = 1;
                    stack.push_back(ni);
                }
            }
        }
        if (member.size() < 5) continue;

        // weighted PCA line fit over region pixels
        double wsum = 0.0, mx = 0.0, my = 0.0;
        for (int i : member) {
            double wt = gmag[i];
            wsum += wt;
            mx += wt * (i % w);
            my += wt * (i / w);
        }
        mx /= wsum;
        my /= wsum;
        double sxx = 0.0, syy = 0.0, sxy = 0.0;
        for (int i : member) {
            double wt = gmag[i];
            double dx = (i % w) - mx, dy = (i / w) - my;
            sxx += wt * dx * dx;
            syy += wt * dy * dy;
            sxy += wt * dx * dy;
        }
        double axis = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
        Vec2 dir{std::cos(axis), std::sin(axis)};
        double tmin = 1e18, tmax = -1e18, umin = 1e18, umax = -1e18;
        for (int i : member) {
            Vec2 p{static_cast<double>(i % w) - mx, static_cast<double>(i / w) - my};
            double t = dot(p, dir);
            double u = cross(dir, p);
            tmin = std::min(tmin, t); tmax = std::max(tmax, t);
            umin = std::min(umin, u); umax = std::max(umax, u);
        }
        double length = tmax - tmin;
        double width = std::max(1.0, umax - umin);
        double density = static_cast<double>(member.size()) / std::max(1.0, length * width);
        if (length < params.min_length_px || density < params.min_density) continue;
        out.push_back({{mx + box.x0 + 0.5, my + box.y0 + 0.5}, fold_pi(axis), length});
    }
    return out;
}

/// Rotate polygon edges onto detected image lines when the line is within
/// 5 px perpendicular distance and 10 degrees of the edge; rotation is about
/// the edge midpoint and the ring is re-closed by line intersection.
inline Polygon regularize_with_image_lines(const Polygon& ring,
                                           const std::vector<ImageLine>& lines,
                                           double dist_tol_px = 5.0,
                                           double angle_tol_deg = 10.0) {
    if (lines.empty()) return ring;
    const auto& v = ring.vertices;
    if (v.size() < 3) throw DegeneratePolygon("ring has fewer than 3 vertices");

    std::vector<detail::EdgeLine> out;
    for (size_t i = 0; i < v.size(); ++i) {
        Vec2 a = v[i], b = v[(i + 1) % v.size()];
        double len = norm(b - a);
        if (len < 1e-12) continue;
        double raw = std::atan2(b.y - a.y, b.x - a.x);
        Vec2 mid = (a + b) * 0.5;
        double best_dist = dist_tol_px;
        double snapped = raw;
        for (const ImageLine& l : lines) {
            if (angdiff_mod180(raw, l.angle) > deg2rad(angle_tol_deg)) continue;
            Vec2 d{std::cos(l.angle), std::sin(l.angle)};
            double dist = std::fabs(cross(d, mid - l.point));
            if (dist <= best_dist) {
                best_dist = dist;
                // mod-180 representative of the line angle nearest the edge direction
                snapped = l.angle;
                for (int k = -2; k <= 2; ++k)
                    if (std::fabs(raw - (l.angle + k * kPi)) < std::fabs(raw - snapped))
                        snapped = l.angle + k * kPi;
            }
        }
        out.push_back({mid, snapped, len});
    }
    detail::merge_parallel_runs(out, 1e-6);
    return detail::close_ring(std::move(out));
}

}  // namespace lod2
