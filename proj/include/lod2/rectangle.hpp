#pragma once

#include <algorithm>
#include <queue>
#include <vector>

#include "lod2/core.hpp"
#include "lod2/raster.hpp"

namespace lod2 {

/// Oriented rectangle in pixel coordinates; len runs along theta, len >= wid.
struct OrientedRect {
    double cx = 0.0, cy = 0.0;
    double len = 0.0, wid = 0.0;
    double theta = 0.0;  // [0, pi)

    double area() const { return len * wid; }

    /// Local frame: u along theta in [-len/2, len/2], v across.
    Vec2 to_local(Vec2 p) const {
        Vec2 d = p - Vec2{cx, cy};
        double c = std::cos(theta), s = std::sin(theta);
        return {d.x * c + d.y * s, -d.x * s + d.y * c};
    }
    Vec2 to_global(Vec2 local) const {
        double c = std::cos(theta), s = std::sin(theta);
        return {cx + local.x * c - local.y * s, cy + local.x * s + local.y * c};
    }
    bool contains(Vec2 p) const {
        Vec2 l = to_local(p);
        return std::fabs(l.x) <= len / 2.0 && std::fabs(l.y) <= wid / 2.0;
    }
    Vec2 corner(int i) const {  // 0..3 counter-clockwise in local frame
        static const double sx[4] = {-0.5, 0.5, 0.5, -0.5};
        static const double sy[4] = {-0.5, -0.5, 0.5, 0.5};
        return to_global({sx[i] * len, sy[i] * wid});
    }
};

/// Axis-aligned rectangle [x0,x1) x [y0,y1) in the rotated working frame.
struct AxisRect {
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0;

    int width() const { return x1 - x0; }
    int height() const { return y1 - y0; }
    long area() const { return static_cast<long>(width()) * height(); }
    bool empty() const { return x1 <= x0 || y1 <= y0; }
};

/// Merge decision features for a pair of adjacent rectangles (Eq.-style rule).
struct MergeFeatures {
    double c_mean_a[3] = {0, 0, 0};
    double c_mean_b[3] = {0, 0, 0};
    double h_mean_a = 0.0, h_mean_b = 0.0;
    double edge_gap_max = 0.0;

    double color_diff() const {
        return (std::fabs(c_mean_a[0] - c_mean_b[0]) + std::fabs(c_mean_a[1] - c_mean_b[1]) +
                std::fabs(c_mean_a[2] - c_mean_b[2])) / 3.0;
    }
    double height_diff() const { return std::fabs(h_mean_a - h_mean_b); }
};

/// Adjacent rectangles merge only when all three conditions hold strictly.
inline bool should_merge(const MergeFeatures& f, double T_d, double T_h1, double T_h2) {
    return f.color_diff() < T_d && f.height_diff() < T_h1 && f.edge_gap_max < T_h2;
}

// ---- rotation into the axis-aligned working frame ---------------------------

/// Rotation that maps the input frame into an axis-aligned working frame where
/// the building's dominant orientation runs along +x.
struct RotationFrame {
    double theta = 0.0;  // dominant orientation in the input frame
    Vec2 center_in;      // rotation pivot (mask centroid), input pixels
    Vec2 center_out;     // pivot location in the rotated raster
    int out_width = 0, out_height = 0;

    Vec2 to_input(Vec2 p_rot) const {
        Vec2 d = p_rot - center_out;
        double c = std::cos(theta), s = std::sin(theta);
        return {center_in.x + d.x * c - d.y * s, center_in.y + d.x * s + d.y * c};
    }
    Vec2 to_rotated(Vec2 p_in) const {
        Vec2 d = p_in - center_in;
        double c = std::cos(theta), s = std::sin(theta);
        return {center_out.x + d.x * c + d.y * s, center_out.y - d.x * s + d.y * c};
    }
};

inline RotationFrame make_rotation_frame(int width, int height, double theta_dominant,
                                         Vec2 centroid) {
    RotationFrame f;
    f.theta = theta_dominant;
    f.center_in = centroid;
    double c = std::cos(theta_dominant), s = std::sin(theta_dominant);
    double xmin = 1e18, xmax = -1e18, ymin = 1e18, ymax = -1e18;
    const Vec2 corners[4] = {{-0.5, -0.5},
                             {width - 0.5, -0.5},
                             {width - 0.5, height - 0.5},
                             {-0.5, height - 0.5}};
    for (const Vec2& p : corners) {
        Vec2 d = p - centroid;
        double rx = d.x * c + d.y * s;
        double ry = -d.x * s + d.y * c;
        xmin = std::min(xmin, rx); xmax = std::max(xmax, rx);
        ymin = std::min(ymin, ry); ymax = std::max(ymax, ry);
    }
    f.out_width = std::max(1, static_cast<int>(std::round(xmax - xmin)));
    f.out_height = std::max(1, static_cast<int>(std::round(ymax - ymin)));
    f.center_out = {-xmin - 0.5, -ymin - 0.5};
    return f;
}

/// Nearest-neighbor rotation of a mask about its centroid so that
/// theta_dominant becomes the +x axis. Returns the rotated mask and the
/// frame needed to map rectangle corners back.
inline std::pair<Mask, RotationFrame> rotate_mask_to_axis(const Mask& mask,
                                                          double theta_dominant) {
    double sx = 0.0, sy = 0.0;
    size_t n = 0;
    for (int r = 0; r < mask.height; ++r)
        for (int c = 0; c < mask.width; ++c)
            if (mask.at(c, r)) { sx += c; sy += r; ++n; }
    Vec2 centroid = n ? Vec2{sx / n, sy / n}
                      : Vec2{mask.width / 2.0, mask.height / 2.0};
    RotationFrame f = make_rotation_frame(mask.width, mask.height, theta_dominant, centroid);
    Mask out(f.out_width, f.out_height);
    if (std::fabs(theta_dominant) < 1e-12) {  // identity fast path
        return {mask, make_rotation_frame(mask.width, mask.height, 0.0, centroid)};
    }
    // 2x2 supersampling keeps rotated edges straight instead of jagged,
    // which matters for the inner-rectangle cover downstream
    for (int r = 0; r < out.height; ++r) {
        for (int c = 0; c < out.width; ++c) {
            int hits = 0;
            for (int sr = 0; sr < 2; ++sr)
                for (int sc = 0; sc < 2; ++sc) {
                    Vec2 p = f.to_input({c - 0.25 + 0.5 * sc, r - 0.25 + 0.5 * sr});
                    if (mask.set(static_cast<int>(std::lround(p.x)),
                                 static_cast<int>(std::lround(p.y))))
                        ++hits;
                }
            if (hits >= 2) out.at(c, r) = 1;
        }
    }
    return {std::move(out), f};
}

inline RasterF32 rotate_dsm(const RasterF32& dsm, const RotationFrame& f) {
    RasterF32 out(f.out_width, f.out_height, dsm.nodata);
    out.nodata = dsm.nodata;
    for (int r = 0; r < out.height; ++r)
        for (int c = 0; c < out.width; ++c) {
            Vec2 p = f.to_input({static_cast<double>(c), static_cast<double>(r)});
            int ic = static_cast<int>(std::lround(p.x));
            int ir = static_cast<int>(std::lround(p.y));
            if (dsm.inside(ic, ir)) out.at(c, r) = dsm.at(ic, ir);
        }
    return out;
}

inline RasterRGB rotate_rgb(const RasterRGB& img, const RotationFrame& f) {
    RasterRGB out(f.out_width, f.out_height);
    for (int r = 0; r < out.height; ++r)
        for (int c = 0; c < out.width; ++c) {
            Vec2 p = f.to_input({static_cast<double>(c), static_cast<double>(r)});
            int ic = static_cast<int>(std::lround(p.x));
            int ir = static_cast<int>(std::lround(p.y));
            if (img.inside(ic, ir))
                for (int b = 0; b < 3; ++b) out.at(c, r, b) = img.at(ic, ir, b);
        }
    return out;
}

// ---- gradient pre-split ------------------------------------------------------

/// Remove pixels under steep DSM gradients (split curtains), relabel the rest
/// by 4-connected components, then hand curtain pixels to the nearest label.
/// Returns a label raster (0 = background, labels from 1).
inline std::vector<int> gradient_presplit(const Mask& mask, const RasterF32& dsm,
                                          double grad_threshold_m_per_px = 1.0) {
    const int w = mask.width, h = mask.height;
    std::vector<int> labels(static_cast<size_t>(w) * h, 0);
    std::vector<char> curtain(static_cast<size_t>(w) * h, 0);

    auto height_at = [&](int c, int r) {
        c = std::clamp(c, 0, w - 1);
        r = std::clamp(r, 0, h - 1);
        return dsm.valid(c, r) ? static_cast<double>(dsm.at(c, r)) : 0.0;
    };
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            if (!mask.at(c, r)) continue;
            double gx = (height_at(c + 1, r) - height_at(c - 1, r)) * 0.5;
            double gy = (height_at(c, r + 1) - height_at(c, r - 1)) * 0.5;
            if (std::hypot(gx, gy) > grad_threshold_m_per_px)
                curtain[static_cast<size_t>(r) * w + c] = 1;
        }

    // 4-connected relabel of the kept pixels
    int next = 0;
    std::vector<std::pair<int, int>> stack;
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            size_t i = static_cast<size_t>(r) * w + c;
            if (!mask.at(c, r) || curtain[i] || labels[i]) continue;
            int id = ++next;
            stack.push_back({c, r});
            labels[i] = id;
            while (!stack.empty()) {
                auto [cc, cr] = stack.back();
                stack.pop_back();
                const int dc[4] = {1, -1, 0, 0}, dr[4] = {0, 0, 1, -1};
                for (int k = 0; k < 4; ++k) {
                    int nc = cc + dc[k], nr = cr + dr[k];
                    if (nc < 0 || nc >= w || nr < 0 || nr >= h) continue;
                    size_t ni = static_cast<size_t>(nr) * w + nc;
                    if (mask.at(nc, nr) && !curtain[ni] && !labels[ni]) {
                        labels[ni] = id;
                        stack.push_back({nc, nr});
                    }
                }
            }
        }

    // curtain pixels join the nearest label (multi-source BFS from labeled pixels)
    std::queue<std::pair<int, int>> bfs;
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            if (labels[static_cast<size_t>(r) * w + c]) bfs.push({c, r});
    while (!bfs.empty()) {
        auto [c, r] = bfs.front();
        bfs.pop();
        int id = labels[static_cast<size_t>(r) * w + c];
        const int dc[4] = {1, -1, 0, 0}, dr[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
            int nc = c + dc[k], nr = r + dr[k];
            if (nc < 0 || nc >= w || nr < 0 || nr >= h) continue;
            size_t ni = static_cast<size_t>(nr) * w + nc;
            if (mask.at(nc, nr) && curtain[ni] && !labels[ni]) {
                labels[ni] = id;
                bfs.push({nc, nr});
            }
        }
    }
    // isolated all-curtain components (no seed label): give each its own label
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            size_t i = static_cast<size_t>(r) * w + c;
            if (!mask.at(c, r) || labels[i]) continue;
            int id = ++next;
            stack.push_back({c, r});
            labels[i] = id;
            while (!stack.empty()) {
                auto [cc, cr] = stack.back();
                stack.pop_back();
                const int dc[4] = {1, -1, 0, 0}, dr[4] = {0, 0, 1, -1};
                for (int k = 0; k < 4; ++k) {
                    int nc = cc + dc[k], nr = cr + dr[k];
                    if (nc < 0 || nc >= w || nr < 0 || nr >= h) continue;
                    size_t ni = static_cast<size_t>(nr) * w + nc;
                    if (mask.at(nc, nr) && !labels[ni]) {
                        labels[ni] = id;
                        stack.push_back({nc, nr});
                    }
                }
            }
        }
    return labels;
}

// ---- maximal inner rectangles ------------------------------------------------

namespace detail {

/// Largest all-ones axis-aligned rectangle (histogram stack scan).
inline AxisRect largest_rectangle(const Mask& m) {
    const int w = m.width, h = m.height;
    std::vector<int> hist(w, 0);
    AxisRect best;
    long best_area = 0;
    std::vector<int> stk;
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) hist[c] = m.at(c, r) ? hist[c] + 1 : 0;
        stk.clear();
        for (int c = 0; c <= w; ++c) {
            int cur = (c < w) ? hist[c] : 0;
            while (!stk.empty() && hist[stk.back()] >= cur) {
                int ht = hist[stk.back()];
                stk.pop_back();
                int left = stk.empty() ? 0 : stk.back() + 1;
                long area = static_cast<long>(ht) * (c - left);
                if (area > best_area) {
                    best_area = area;
                    best = {left, r - ht + 1, c, r + 1};
                }
            }
            stk.push_back(c);
        }
    }
    return best;
}

/// 2x2 majority pooling (a coarse cell is set when >= 2 of its pixels are).
inline Mask pool_majority(const Mask& m) {
    Mask out((m.width + 1) / 2, (m.height + 1) / 2);
    for (int r = 0; r < out.height; ++r)
        for (int c = 0; c < out.width; ++c) {
            int n = 0;
            for (int dr = 0; dr < 2; ++dr)
                for (int dc = 0; dc < 2; ++dc)
                    if (m.set(c * 2 + dc, r * 2 + dr)) ++n;
            out.at(c, r) = (n >= 2) ? 1 : 0;
        }
    return out;
}

inline bool col_all_set(const Mask& m, int c, int y0, int y1) {
    if (c < 0 || c >= m.width) return false;
    for (int r = y0; r < y1; ++r)
        if (!m.at(c, r)) return false;
    return true;
}

inline bool row_all_set(const Mask& m, int r, int x0, int x1) {
    if (r < 0 || r >= m.height) return false;
    for (int c = x0; c < x1; ++c)
        if (!m.at(c, r)) return false;
    return true;
}

/// Exact largest inner rectangle within a small window around rc, then grown
/// greedily outside the window.
inline AxisRect refine_rect(const Mask& m, AxisRect rc, int margin = 2) {
    AxisRect win{std::clamp(rc.x0 - margin, 0, m.width),
                 std::clamp(rc.y0 - margin, 0, m.height),
                 std::clamp(rc.x1 + margin, 0, m.width),
                 std::clamp(rc.y1 + margin, 0, m.height)};
    if (win.empty()) return {};
    Mask crop(win.width(), win.height());
    for (int r = 0; r < crop.height; ++r)
        for (int c = 0; c < crop.width; ++c)
            crop.at(c, r) = m.at(win.x0 + c, win.y0 + r);
    AxisRect best = largest_rectangle(crop);
    if (best.empty()) return best;
    rc = AxisRect{best.x0 + win.x0, best.y0 + win.y0, best.x1 + win.x0, best.y1 + win.y0};
    while (col_all_set(m, rc.x0 - 1, rc.y0, rc.y1)) --rc.x0;
    while (col_all_set(m, rc.x1, rc.y0, rc.y1)) ++rc.x1;
    while (row_all_set(m, rc.y0 - 1, rc.x0, rc.x1)) --rc.y0;
    while (row_all_set(m, rc.y1, rc.x0, rc.x1)) ++rc.y1;
    return rc;
}

inline void clear_rect(Mask& m, const AxisRect& rc) {
    for (int r = std::max(0, rc.y0); r < std::min(m.height, rc.y1); ++r)
        for (int c = std::max(0, rc.x0); c < std::min(m.width, rc.x1); ++c)
            m.at(c, r) = 0;
}

}  // namespace detail

struct InnerRectParams {
    double coverage_stop = 0.95;
    long min_rect_area_px = 4;
    int min_side_px = 3;  // non-first rectangles thinner than this are slivers
    int pyramid_levels = 3;
    int min_coarse_dim = 16;  // do not downsample below this
};

/// Cover an axis-aligned binary mask with maximal inner rectangles using a
/// coarse-to-fine pyramid: extract the largest all-ones rectangle on the
/// coarsest level, refine its sides on each finer level, clear, repeat.
inline std::vector<AxisRect> extract_max_inner_rectangles(const Mask& mask,
                                                          const InnerRectParams& params = {}) {
    if (mask.count_set() == 0) return {};

    std::vector<Mask> levels;
    levels.push_back(mask);
    while (static_cast<int>(levels.size()) < params.pyramid_levels &&
           std::min(levels.back().width, levels.back().height) >= 2 * params.min_coarse_dim)
        levels.push_back(detail::pool_majority(levels.back()));

    const size_t total = levels.front().count_set();
    size_t covered = 0;
    std::vector<AxisRect> out;
    for (;;) {
        AxisRect coarse = detail::largest_rectangle(levels.back());
        if (coarse.empty()) break;
        AxisRect rc = coarse;
        detail::clear_rect(levels.back(), coarse);
        for (size_t li = levels.size() - 1; li-- > 0;) {
            rc = AxisRect{rc.x0 * 2, rc.y0 * 2, rc.x1 * 2, rc.y1 * 2};
            rc = detail::refine_rect(levels[li], rc);
            if (rc.empty()) break;
            detail::clear_rect(levels[li], rc);
        }
        if (rc.empty()) continue;  // refinement found nothing left on the fine level
        if (!out.empty() && rc.area() < params.min_rect_area_px) break;
        if (!out.empty() && std::min(rc.width(), rc.height()) < params.min_side_px) continue;
        covered += static_cast<size_t>(rc.area());
        out.push_back(rc);
        if (static_cast<double>(covered) >= params.coverage_stop * total) break;
    }
    return out;
}

// ---- merge features and Eq.-style merging ------------------------------------

namespace detail {

struct SharedEdge {
    bool vertical = false;  // boundary runs parallel to y (sides face in x)
    int boundary = 0;       // integer cell index of the first cell on side b
    int lo = 0, hi = 0;     // positions along the edge [lo, hi)
    bool a_first = true;    // a lies on the low-coordinate side
};

inline bool find_shared_edge(const AxisRect& a, const AxisRect& b, SharedEdge& e) {
    int dx = std::max(a.x0, b.x0) - std::min(a.x1, b.x1);  // >0 gap, <=0 contact/overlap
    int dy = std::max(a.y0, b.y0) - std::min(a.y1, b.y1);
    int oy0 = std::max(a.y0, b.y0), oy1 = std::min(a.y1, b.y1);
    int ox0 = std::max(a.x0, b.x0), ox1 = std::min(a.x1, b.x1);
    bool x_touch = dx <= 1 && dx >= -std::min(a.width(), b.width()) / 2 && oy1 - oy0 >= 1;
    bool y_touch = dy <= 1 && dy >= -std::min(a.height(), b.height()) / 2 && ox1 - ox0 >= 1;
    if (x_touch && (!y_touch || dx >= dy)) {
        e.vertical = true;
        e.a_first = a.x0 <= b.x0;
        e.boundary = e.a_first ? (a.x1 + b.x0) / 2 : (b.x1 + a.x0) / 2;
        e.lo = oy0; e.hi = oy1;
        return true;
    }
    if (y_touch) {
        e.vertical = false;
        e.a_first = a.y0 <= b.y0;
        e.boundary = e.a_first ? (a.y1 + b.y0) / 2 : (b.y1 + a.y0) / 2;
        e.lo = ox0; e.hi = ox1;
        return true;
    }
    return false;
}

inline double side_window_mean(const RasterF32& dsm, const SharedEdge& e, int pos,
                               bool low_side, int depth) {
    double sum = 0.0;
    int n = 0;
    for (int d = 1; d <= depth; ++d) {
        int off = low_side ? e.boundary - d : e.boundary + d - 1;
        int c = e.vertical ? off : pos;
        int r = e.vertical ? pos : off;
        if (dsm.inside(c, r) && dsm.valid(c, r)) {
            sum += dsm.at(c, r);
            ++n;
        }
    }
    return n ? sum / n : 0.0;
}

}  // namespace detail

/// Max over positions along the shared edge of |mean_a - mean_b| where each
/// mean is taken over a 3-px-deep window on that rectangle's side. Meters.
inline double compute_edge_gap(const AxisRect& a, const AxisRect& b, const RasterF32& dsm,
                               int depth_px = 3) {
    detail::SharedEdge e;
    if (!detail::find_shared_edge(a, b, e))
        throw NotAdjacent("rectangles do not share an edge");
    double worst = 0.0;
    for (int pos = e.lo; pos < e.hi; ++pos) {
        double ma = detail::side_window_mean(dsm, e, pos, e.a_first, depth_px);
        double mb = detail::side_window_mean(dsm, e, pos, !e.a_first, depth_px);
        worst = std::max(worst, std::fabs(ma - mb));
    }
    return worst;
}

inline MergeFeatures compute_merge_features(const AxisRect& a, const AxisRect& b,
                                            const RasterF32& dsm, const RasterRGB& ortho,
                                            int edge_depth_px = 3) {
    auto rect_stats = [&](const AxisRect& rc, double cmean[3], double& hmean) {
        double cs[3] = {0, 0, 0};
        double hs = 0.0;
        long nc = 0, nh = 0;
        for (int r = std::max(0, rc.y0); r < std::min(dsm.height, rc.y1); ++r)
            for (int c = std::max(0, rc.x0); c < std::min(dsm.width, rc.x1); ++c) {
                if (ortho.inside(c, r)) {
                    for (int bnd = 0; bnd < 3; ++bnd) cs[bnd] += ortho.at(c, r, bnd);
                    ++nc;
                }
                if (dsm.valid(c, r)) {
                    hs += dsm.at(c, r);
                    ++nh;
                }
            }
        for (int bnd = 0; bnd < 3; ++bnd) cmean[bnd] = nc ? cs[bnd] / nc : 0.0;
        hmean = nh ? hs / nh : 0.0;
    };
    MergeFeatures f;
    rect_stats(a, f.c_mean_a, f.h_mean_a);
    rect_stats(b, f.c_mean_b, f.h_mean_b);
    f.edge_gap_max = compute_edge_gap(a, b, dsm, edge_depth_px);
    return f;
}

/// Merge adjacent rectangle pairs that pass the three-way threshold test,
/// replacing each merged pair by the bounding rectangle of its union.
/// Pairs are scanned in ascending (i, j) order; repeats to a fixed point.
inline std::vector<AxisRect> merge_adjacent_rects(std::vector<AxisRect> rects,
                                                  const RasterF32& dsm,
                                                  const RasterRGB& ortho, double T_d,
                                                  double T_h1, double T_h2) {
    bool merged = true;
    size_t guard = rects.size() + 1;
    while (merged && guard-- > 0) {
        merged = false;
        for (size_t i = 0; i < rects.size() && !merged; ++i) {
            for (size_t j = i + 1; j < rects.size() && !merged; ++j) {
                detail::SharedEdge e;
                if (!detail::find_shared_edge(rects[i], rects[j], e)) continue;
                MergeFeatures f = compute_merge_features(rects[i], rects[j], dsm, ortho);
                if (!should_merge(f, T_d, T_h1, T_h2)) continue;
                rects[i] = AxisRect{std::min(rects[i].x0, rects[j].x0),
                                    std::min(rects[i].y0, rects[j].y0),
                                    std::max(rects[i].x1, rects[j].x1),
                                    std::max(rects[i].y1, rects[j].y1)};
                rects.erase(rects.begin() + static_cast<long>(j));
                merged = true;
            }
        }
    }
    return rects;
}

/// Map an axis-aligned working-frame rectangle back to an oriented rectangle
/// in the input pixel frame.
inline OrientedRect to_oriented(const AxisRect& rc, const RotationFrame& f) {
    OrientedRect r;
    Vec2 center_rot{(rc.x0 + rc.x1) / 2.0 - 0.5, (rc.y0 + rc.y1) / 2.0 - 0.5};
    Vec2 c = f.to_input(center_rot);
    r.cx = c.x;
    r.cy = c.y;
    r.len = rc.width();
    r.wid = rc.height();
    r.theta = fold_pi(f.theta);
    if (r.wid > r.len) {
        std::swap(r.len, r.wid);
        r.theta = fold_pi(r.theta + kPi / 2.0);
    }
    return r;
}

}  // namespace lod2
