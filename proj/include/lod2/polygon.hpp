#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "lod2/core.hpp"
#include "lod2/segmentation.hpp"

namespace lod2 {

/// Closed vertex ring in pixel coordinates (col,row); the closing edge
/// last->first is implicit. Counter-clockwise means positive shoelace area
/// in (col,row) axes.
struct Polygon {
    std::vector<Vec2> vertices;

    size_t size() const { return vertices.size(); }
    const Vec2& operator[](size_t i) const { return vertices[i]; }

    double signed_area() const {
        double a = 0.0;
        for (size_t i = 0; i < vertices.size(); ++i) {
            const Vec2& p = vertices[i];
            const Vec2& q = vertices[(i + 1) % vertices.size()];
            a += p.x * q.y - q.x * p.y;
        }
        return 0.5 * a;
    }
    double area() const { return std::fabs(signed_area()); }

    void ensure_ccw() {
        if (signed_area() < 0.0) std::reverse(vertices.begin(), vertices.end());
    }
};

/// Building main orientations folded modulo 90 degrees, radians in [0, pi/2).
struct OrientationSet {
    std::vector<double> angles;
    size_t dominant = 0;

    double dominant_angle() const { return angles[dominant]; }
};

// ---- boundary tracing ------------------------------------------------------

namespace detail {

// 8-neighborhood in clockwise order (screen coordinates, y down), starting W.
inline constexpr int kMooreDx[8] = {-1, -1, 0, 1, 1, 1, 0, -1};
inline constexpr int kMooreDy[8] = {0, -1, -1, -1, 0, 1, 1, 1};

}  // namespace detail

/// Moore-neighbor trace of a segment's outer contour through pixel centers,
/// in scene coordinates, counter-clockwise. Interior holes are ignored.
/// Degenerate footprints (under 3 distinct contour points) expand to the
/// pixel-corner ring of the bounding box.
inline Polygon trace_boundary(const BuildingSegment& seg) {
    const Mask& m = seg.mask;
    int sx = -1, sy = -1;
    for (int r = 0; r < m.height && sx < 0; ++r)
        for (int c = 0; c < m.width; ++c)
            if (m.at(c, r)) { sx = c; sy = r; break; }
    if (sx < 0) throw DegeneratePolygon("empty segment mask");

    std::vector<Vec2> pts;
    int px = sx, py = sy;
    int backtrack = 0;  // index of the neighbor we entered from (W for the start)
    int start_dir = -1;
    for (;;) {
        int found = -1;
        for (int k = 0; k < 8; ++k) {
            int dir = (backtrack + k) % 8;
            int nx = px + detail::kMooreDx[dir];
            int ny = py + detail::kMooreDy[dir];
            if (m.set(nx, ny)) { found = dir; break; }
        }
        if (found < 0) break;  // isolated pixel
        if (pts.empty()) {
            pts.push_back({static_cast<double>(px), static_cast<double>(py)});
            start_dir = found;
        } else if (px == sx && py == sy && found == start_dir) {
            break;  // Jacob's stopping criterion
        } else {
            pts.push_back({static_cast<double>(px), static_cast<double>(py)});
        }
        px += detail::kMooreDx[found];
        py += detail::kMooreDy[found];
        // next scan starts just after the reversed entry direction
        backtrack = (found + 5) % 8;
        if (pts.size() > m.samples.size() * 4 + 8) break;  // safety bound
    }
    if (pts.empty()) pts.push_back({static_cast<double>(sx), static_cast<double>(sy)});

    // collapse immediate duplicates
    std::vector<Vec2> ring;
    for (const Vec2& p : pts)
        if (ring.empty() || norm(p - ring.back()) > 1e-12) ring.push_back(p);
    while (ring.size() > 1 && norm(ring.front() - ring.back()) < 1e-12) ring.pop_back();

    auto ring_area = [&] {
        Polygon tmp;
        tmp.vertices = ring;
        return tmp.area();
    };
    Polygon poly;
    if (ring.size() < 3 || ring_area() < 0.5) {  // collinear or single-pixel footprints
        double x0 = ring.front().x, x1 = x0, y0 = ring.front().y, y1 = y0;
        for (const Vec2& p : ring) {
            x0 = std::min(x0, p.x); x1 = std::max(x1, p.x);
            y0 = std::min(y0, p.y); y1 = std::max(y1, p.y);
        }
        poly.vertices = {{x0 - 0.5, y0 - 0.5}, {x1 + 0.5, y0 - 0.5},
                         {x1 + 0.5, y1 + 0.5}, {x0 - 0.5, y1 + 0.5}};
    } else {
        poly.vertices = std::move(ring);
    }
    for (Vec2& p : poly.vertices) { p.x += seg.bbox.x0; p.y += seg.bbox.y0; }
    poly.ensure_ccw();
    return poly;
}

// ---- Douglas-Peucker -------------------------------------------------------

namespace detail {

inline double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    Vec2 ab = b - a;
    double len2 = dot(ab, ab);
    if (len2 < 1e-300) return norm(p - a);
    double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return norm(p - (a + ab * t));
}

inline void dp_recurse(const std::vector<Vec2>& pts, size_t lo, size_t hi,
                       double eps, std::vector<char>& keep) {
    if (hi <= lo + 1) return;
    double dmax = -1.0;
    size_t imax = lo;
    for (size_t i = lo + 1; i < hi; ++i) {
        double d = point_segment_distance(pts[i], pts[lo], pts[hi]);
        if (d > dmax) { dmax = d; imax = i; }
    }
    if (dmax > eps) {
        keep[imax] = 1;
        dp_recurse(pts, lo, imax, eps, keep);
        dp_recurse(pts, imax, hi, eps, keep);
    }
}

}  // namespace detail

/// Douglas-Peucker on a closed ring. Anchors are vertex 0 and the vertex
/// farthest from it; each arc is simplified independently.
inline Polygon simplify_dp(const Polygon& ring, double epsilon_px = 2.0) {
    if (epsilon_px <= 0.0) throw InvalidParams("epsilon must be positive");
    const auto& v = ring.vertices;
    if (v.size() < 3) throw DegeneratePolygon("ring has fewer than 3 vertices");

    size_t far_i = 1;
    double far_d = -1.0;
    for (size_t i = 1; i < v.size(); ++i) {
        double d = norm(v[i] - v[0]);
        if (d > far_d) { far_d = d; far_i = i; }
    }

    // unroll the ring so both anchor arcs are contiguous
    std::vector<Vec2> un(v.begin(), v.end());
    un.push_back(v[0]);
    std::vector<char> keep(un.size(), 0);
    keep[0] = keep[far_i] = keep[un.size() - 1] = 1;
    detail::dp_recurse(un, 0, far_i, epsilon_px, keep);
    detail::dp_recurse(un, far_i, un.size() - 1, epsilon_px, keep);

    Polygon out;
    for (size_t i = 0; i + 1 < un.size(); ++i)
        if (keep[i]) out.vertices.push_back(un[i]);
    // drop collinear survivors at the anchors
    auto collinear = [](const Vec2& a, const Vec2& b, const Vec2& c) {
        return std::fabs(cross(b - a, c - a)) < 1e-9 * (norm(b - a) + norm(c - b) + 1.0);
    };
    for (size_t i = 0; i < out.vertices.size() && out.vertices.size() > 3;) {
        size_t n = out.vertices.size();
        if (collinear(out.vertices[(i + n - 1) % n], out.vertices[i],
                      out.vertices[(i + 1) % n]))
            out.vertices.erase(out.vertices.begin() + static_cast<long>(i));
        else
            ++i;
    }
    if (out.vertices.size() < 3)
        throw DegeneratePolygon("simplification left fewer than 3 vertices");
    return out;
}

// ---- main orientation histogram --------------------------------------------

/// Length-weighted histogram of edge directions folded mod 90 degrees into
/// 5-degree bins. Every bin run with summed length >= T_l yields one
/// orientation (length-weighted centroid); the strongest bin is always kept.
inline OrientationSet estimate_main_orientations(const Polygon& ring, double T_l = 90.0,
                                                 double bin_deg = 5.0) {
    const int nbins = static_cast<int>(std::round(90.0 / bin_deg));
    std::vector<double> wsum(nbins, 0.0), asum(nbins, 0.0);
    const auto& v = ring.vertices;
    for (size_t i = 0; i < v.size(); ++i) {
        Vec2 e = v[(i + 1) % v.size()] - v[i];
        double len = norm(e);
        if (len < 1e-12) continue;
        double a = fold_half_pi(std::atan2(e.y, e.x));
        int b = std::min(nbins - 1, static_cast<int>(rad2deg(a) / bin_deg));
        wsum[b] += len;
        asum[b] += a * len;
    }

    int strongest = 0;
    for (int b = 1; b < nbins; ++b)
        if (wsum[b] > wsum[strongest]) strongest = b;

    std::vector<char> qual(nbins, 0);
    for (int b = 0; b < nbins; ++b) qual[b] = (wsum[b] >= T_l);
    qual[strongest] = 1;

    // merge circular runs of adjacent qualifying bins
    OrientationSet out;
    double dominant_weight = -1.0;
    std::vector<char> seen(nbins, 0);
    for (int b = 0; b < nbins; ++b) {
        if (!qual[b] || seen[b]) continue;
        int start = b;
        while (qual[(start + nbins - 1) % nbins] && (start + nbins - 1) % nbins != b)
            start = (start + nbins - 1) % nbins;
        double w = 0.0, a = 0.0;
        bool has_strongest = false;
        int k = start;
        double base = start * deg2rad(bin_deg);
        for (;;) {
            seen[k] = 1;
            if (k == strongest) has_strongest = true;
            // unwrap bin angles relative to the run start
            double rel = std::fmod(asum[k] / std::max(wsum[k], 1e-300) - base + kPi / 2.0,
                                   kPi / 2.0);
            if (wsum[k] > 0.0) { w += wsum[k]; a += (base + rel) * wsum[k]; }
            int nk = (k + 1) % nbins;
            if (!qual[nk] || seen[nk]) break;
            k = nk;
        }
        double angle = w > 0.0 ? fold_half_pi(a / w) : base;
        out.angles.push_back(angle);
        if (has_strongest && w > dominant_weight) {
            dominant_weight = w;
            out.dominant = out.angles.size() - 1;
        }
    }
    return out;
}

// ---- line snapping and short-edge absorption --------------------------------

namespace detail {

struct EdgeLine {
    Vec2 pt;       // a point on the line (edge midpoint)
    double angle;  // direction, radians
    double len;    // accumulated edge length
};

inline Vec2 line_dir(const EdgeLine& e) { return {std::cos(e.angle), std::sin(e.angle)}; }

/// Perpendicular offset between two parallel lines.
inline double parallel_offset(const EdgeLine& a, const EdgeLine& b) {
    Vec2 d = line_dir(a);
    return std::fabs(cross(d, b.pt - a.pt));
}

inline bool parallel(const EdgeLine& a, const EdgeLine& b) {
    return angdiff_mod180(a.angle, b.angle) < 1e-9;
}

inline std::optional<Vec2> line_intersection(const EdgeLine& a, const EdgeLine& b) {
    Vec2 da = line_dir(a), db = line_dir(b);
    double den = cross(da, db);
    if (std::fabs(den) < 1e-9) return std::nullopt;
    double t = cross(b.pt - a.pt, db) / den;
    return a.pt + da * t;
}

inline EdgeLine weighted_merge(const EdgeLine& a, const EdgeLine& b) {
    double w = a.len + b.len;
    EdgeLine out;
    out.angle = a.angle;  // callers only merge parallel lines
    out.pt = (a.pt * a.len + b.pt * b.len) * (1.0 / std::max(w, 1e-300));
    out.len = w;
    return out;
}

/// Merge adjacent parallel lines closer than tol; modifies in place.
inline void merge_parallel_runs(std::vector<EdgeLine>& lines, double tol) {
    bool changed = true;
    while (changed && lines.size() > 1) {
        changed = false;
        for (size_t i = 0; i < lines.size() && lines.size() > 1; ++i) {
            size_t j = (i + 1) % lines.size();
            if (parallel(lines[i], lines[j]) && parallel_offset(lines[i], lines[j]) <= tol) {
                lines[i] = weighted_merge(lines[i], lines[j]);
                lines.erase(lines.begin() + static_cast<long>(j));
                changed = true;
                break;
            }
        }
    }
}

/// Rebuild the vertex ring by intersecting consecutive lines. Adjacent
/// parallel lines with a real offset get a perpendicular connector.
inline Polygon close_ring(std::vector<EdgeLine> lines) {
    for (size_t i = 0; i < lines.size() && lines.size() >= 2;) {
        size_t j = (i + 1) % lines.size();
        if (i != j && parallel(lines[i], lines[j])) {
            EdgeLine conn;
            conn.angle = fold_pi(lines[i].angle + kPi / 2.0);
            conn.pt = (lines[i].pt + lines[j].pt) * 0.5;
            conn.len = parallel_offset(lines[i], lines[j]);
            lines.insert(lines.begin() + static_cast<long>(i) + 1, conn);
            i += 2;
        } else {
            ++i;
        }
    }
    if (lines.size() < 3) throw DegeneratePolygon("fewer than 3 lines remain");
    Polygon out;
    for (size_t i = 0; i < lines.size(); ++i) {
        auto p = line_intersection(lines[i], lines[(i + 1) % lines.size()]);
        if (!p) throw DegeneratePolygon("parallel adjacent lines cannot be intersected");
        out.vertices.push_back(*p);
    }
    // rotate so the vertex closing edge i ends edge i (vertex k joins line k, k+1);
    // shift by one so vertices pair with their leading edge
    std::rotate(out.vertices.begin(), out.vertices.end() - 1, out.vertices.end());
    if (out.area() < 1e-9) throw DegeneratePolygon("ring collapsed to zero area");
    out.ensure_ccw();
    return out;
}

}  // namespace detail

/// Snap every edge to the nearest main orientation (rotation about the edge
/// midpoint), merge consecutive near-collinear edges, and absorb edges
/// shorter than T_l into their neighbors. Steps between far-apart parallel
/// lines are kept as perpendicular joints.
inline Polygon snap_and_merge_lines(const Polygon& ring, const OrientationSet& orients,
                                    double T_l = 90.0, double merge_offset_px = 3.0) {
    const auto& v = ring.vertices;
    if (v.size() < 3) throw DegeneratePolygon("ring has fewer than 3 vertices");

    std::vector<detail::EdgeLine> lines;
    for (size_t i = 0; i < v.size(); ++i) {
        Vec2 a = v[i], b = v[(i + 1) % v.size()];
        double len = norm(b - a);
        if (len < 1e-12) continue;
        double raw = std::atan2(b.y - a.y, b.x - a.x);
        double best = raw;
        double bestd = 1e18;
        for (double o : orients.angles) {
            for (int k = 0; k < 4; ++k) {
                double cand = o + k * kPi / 2.0;
                double d = angdiff_mod180(raw, cand);
                if (d < bestd) { bestd = d; best = fold_pi(cand); }
            }
        }
        lines.push_back({(a + b) * 0.5, best, len});
    }

    detail::merge_parallel_runs(lines, merge_offset_px);

    // absorb short edges, shortest first
    for (;;) {
        if (lines.size() <= 3) break;
        size_t pick = lines.size();
        double pick_len = T_l;
        for (size_t i = 0; i < lines.size(); ++i) {
            if (lines[i].len >= T_l) continue;
            size_t p = (i + lines.size() - 1) % lines.size();
            size_t n = (i + 1) % lines.size();
            bool par = detail::parallel(lines[p], lines[n]);
            if (par && detail::parallel_offset(lines[p], lines[n]) > merge_offset_px)
                continue;  // genuine step, keep it
            if (lines[i].len < pick_len) { pick_len = lines[i].len; pick = i; }
        }
        if (pick == lines.size()) break;
        lines.erase(lines.begin() + static_cast<long>(pick));
        detail::merge_parallel_runs(lines, merge_offset_px);
    }

    return detail::close_ring(std::move(lines));
}

}  // namespace lod2
