#pragma once

#include <algorithm>
#include <array>
#include <limits>
#include <vector>

#include "lod2/core.hpp"
#include "lod2/raster.hpp"
#include "lod2/rectangle.hpp"
#include "lod2/segmentation.hpp"

namespace lod2 {

enum class RoofKind { Flat, Gable, Hip, Pyramid, Mansard };

inline const char* roof_kind_name(RoofKind k) {
    switch (k) {
        case RoofKind::Flat: return "flat";
        case RoofKind::Gable: return "gable";
        case RoofKind::Hip: return "hip";
        case RoofKind::Pyramid: return "pyramid";
        case RoofKind::Mansard: return "mansard";
    }
    return "?";
}

/// Tie-break order: prefer fewer effective parameters.
inline int roof_simplicity(RoofKind k) {
    switch (k) {
        case RoofKind::Flat: return 0;
        case RoofKind::Gable: return 1;
        case RoofKind::Pyramid: return 2;
        case RoofKind::Hip: return 3;
        case RoofKind::Mansard: return 4;
    }
    return 5;
}

/// Roof parameters in meters. hipl insets the ridge along the rectangle
/// length; hipw (mansard only) insets across the width.
struct RoofParams {
    double z_ridge = 0.0;
    double z_eave = 0.0;
    double hipl = 0.0;
    double hipw = 0.0;
};

struct RoofModel {
    OrientedRect rect;
    RoofKind kind = RoofKind::Flat;
    RoofParams params;
    double rmse = 0.0;
    double z_ground = 0.0;
};

namespace detail {

inline double slope_ratio(double num, double den) {
    if (den <= 0.0) return std::numeric_limits<double>::infinity();
    return num / den;
}

/// Normalized roof profile s(x,y) in the rectangle's local frame
/// (x in [0,L], y in [0,W], meters); height = z_eave + (z_ridge-z_eave)*clamp01(s).
inline double roof_profile(RoofKind kind, double x, double y, double L, double W,
                           double hipl, double hipw) {
    double s;
    switch (kind) {
        case RoofKind::Flat:
            s = 0.0;
            break;
        case RoofKind::Gable:
            s = std::min(slope_ratio(y, W / 2.0), slope_ratio(W - y, W / 2.0));
            break;
        case RoofKind::Hip:
            s = std::min(std::min(slope_ratio(y, W / 2.0), slope_ratio(W - y, W / 2.0)),
                         std::min(slope_ratio(x, hipl), slope_ratio(L - x, hipl)));
            break;
        case RoofKind::Pyramid:
            s = std::min(std::min(slope_ratio(y, W / 2.0), slope_ratio(W - y, W / 2.0)),
                         std::min(slope_ratio(x, L / 2.0), slope_ratio(L - x, L / 2.0)));
            break;
        case RoofKind::Mansard:
            s = std::min({1.0, slope_ratio(x, hipl), slope_ratio(L - x, hipl),
                          slope_ratio(y, hipw), slope_ratio(W - y, hipw)});
            break;
        default:
            s = 0.0;
    }
    return std::clamp(s, 0.0, 1.0);
}

inline void validate_roof_params(RoofKind kind, const RoofParams& p, double L, double W) {
    if (p.z_ridge < p.z_eave) throw InvalidParams("z_ridge must be >= z_eave");
    if (p.hipl < 0.0 || p.hipl > L / 2.0 + 1e-9)
        throw InvalidParams("hipl must be in [0, len/2]");
    if (p.hipw < 0.0 || p.hipw > W / 2.0 + 1e-9)
        throw InvalidParams("hipw must be in [0, wid/2]");
    if (kind == RoofKind::Flat && p.z_ridge != p.z_eave)
        throw InvalidParams("flat roof requires z_ridge == z_eave");
    if (kind == RoofKind::Gable && p.hipl != 0.0)
        throw InvalidParams("gable roof requires hipl == 0");
}

inline double roof_height(RoofKind kind, const RoofParams& p, double x, double y,
                          double L, double W) {
    double s = roof_profile(kind, x, y, L, W, p.hipl, p.hipw);
    return p.z_eave + (p.z_ridge - p.z_eave) * s;
}

}  // namespace detail

/// Model height field sampled over the rectangle's pixel-frame bounding box;
/// cells outside the footprint hold nodata. gsd converts pixels to meters.
inline RasterF32 synthesize_roof_height(RoofKind kind, const RoofParams& params,
                                        const OrientedRect& rect, double gsd = 1.0) {
    double L = rect.len * gsd, W = rect.wid * gsd;
    detail::validate_roof_params(kind, params, L, W);

    double xmin = 1e18, xmax = -1e18, ymin = 1e18, ymax = -1e18;
    for (int i = 0; i < 4; ++i) {
        Vec2 c = rect.corner(i);
        xmin = std::min(xmin, c.x); xmax = std::max(xmax, c.x);
        ymin = std::min(ymin, c.y); ymax = std::max(ymax, c.y);
    }
    int x0 = static_cast<int>(std::floor(xmin)), y0 = static_cast<int>(std::floor(ymin));
    int x1 = static_cast<int>(std::ceil(xmax)) + 1, y1 = static_cast<int>(std::ceil(ymax)) + 1;
    RasterF32 out(std::max(1, x1 - x0), std::max(1, y1 - y0), -9999.0f);
    out.nodata = -9999.0f;
    for (int r = 0; r < out.height; ++r)
        for (int c = 0; c < out.width; ++c) {
            Vec2 p{static_cast<double>(x0 + c), static_cast<double>(y0 + r)};
            if (!rect.contains(p)) continue;
            Vec2 l = rect.to_local(p);
            double x = (l.x + rect.len / 2.0) * gsd;
            double y = (l.y + rect.wid / 2.0) * gsd;
            out.at(c, r) = static_cast<float>(detail::roof_height(kind, params, x, y, L, W));
        }
    return out;
}

// ---- exhaustive fitting ------------------------------------------------------

struct SearchGrid {
    double z_step_m = 0.25;
    int inset_steps = 5;  // hipl/hipw candidates at k*L/10, k = 0..5 / 1..5
    double gsd = 1.0;     // meters per pixel
};

namespace detail {

inline double percentile(std::vector<double> v, double q) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    double pos = q / 100.0 * (v.size() - 1);
    size_t lo = static_cast<size_t>(pos);
    size_t hi = std::min(lo + 1, v.size() - 1);
    double t = pos - lo;
    return v[lo] * (1.0 - t) + v[hi] * t;
}

struct FootprintCell {
    double x, y;  // local meters, x in [0,L], y in [0,W]
    double d;     // DSM height
};

inline std::vector<FootprintCell> footprint_cells(const OrientedRect& rect,
                                                  const RasterF32& dsm, double gsd) {
    std::vector<FootprintCell> cells;
    double xmin = 1e18, xmax = -1e18, ymin = 1e18, ymax = -1e18;
    for (int i = 0; i < 4; ++i) {
        Vec2 c = rect.corner(i);
        xmin = std::min(xmin, c.x); xmax = std::max(xmax, c.x);
        ymin = std::min(ymin, c.y); ymax = std::max(ymax, c.y);
    }
    int x0 = std::max(0, static_cast<int>(std::floor(xmin)));
    int y0 = std::max(0, static_cast<int>(std::floor(ymin)));
    int x1 = std::min(dsm.width - 1, static_cast<int>(std::ceil(xmax)));
    int y1 = std::min(dsm.height - 1, static_cast<int>(std::ceil(ymax)));
    for (int r = y0; r <= y1; ++r)
        for (int c = x0; c <= x1; ++c) {
            Vec2 p{static_cast<double>(c), static_cast<double>(r)};
            if (!rect.contains(p) || !dsm.valid(c, r)) continue;
            Vec2 l = rect.to_local(p);
            cells.push_back({(l.x + rect.len / 2.0) * gsd, (l.y + rect.wid / 2.0) * gsd,
                             static_cast<double>(dsm.at(c, r))});
        }
    return cells;
}

/// Per-cell profile classification for one shape configuration, reduced to the
/// sums needed to evaluate the squared error as a quadratic in (z_eave, rise).
struct ProfileSums {
    double n0 = 0, sd0 = 0, sdd0 = 0;             // cells with s <= 0
    double n1 = 0, sd1 = 0, sdd1 = 0;             // cells with s >= 1
    double nm = 0, ss = 0, sss = 0;               // mid cells: count, sum s, sum s^2
    double sdm = 0, sddm = 0, ssd = 0;            // mid cells: sum d, sum d^2, sum s*d

    double sse(double ze, double r) const {
        double zr = ze + r;
        double e0 = n0 * ze * ze - 2.0 * ze * sd0 + sdd0;
        double e1 = n1 * zr * zr - 2.0 * zr * sd1 + sdd1;
        double em = nm * ze * ze + r * r * sss + 2.0 * ze * r * ss - 2.0 * ze * sdm -
                    2.0 * r * ssd + sddm;
        return e0 + e1 + em;
    }
};

inline ProfileSums accumulate_profile(RoofKind kind, const std::vector<FootprintCell>& cells,
                                      double L, double W, double hipl, double hipw,
                                      double d_shift) {
    ProfileSums ps;
    for (const auto& c : cells) {
        double s = roof_profile(kind, c.x, c.y, L, W, hipl, hipw);
        double d = c.d - d_shift;
        if (s <= 0.0) {
            ps.n0 += 1; ps.sd0 += d; ps.sdd0 += d * d;
        } else if (s >= 1.0) {
            ps.n1 += 1; ps.sd1 += d; ps.sdd1 += d * d;
        } else {
            ps.nm += 1; ps.ss += s; ps.sss += s * s;
            ps.sdm += d; ps.sddm += d * d; ps.ssd += s * d;
        }
    }
    return ps;
}

}  // namespace detail

/// Recompute the model's RMSE against the DSM directly, cell by cell.
inline double roof_rmse(const RoofModel& model, const RasterF32& dsm, double gsd = 1.0) {
    auto cells = detail::footprint_cells(model.rect, dsm, gsd);
    if (cells.empty()) throw InsufficientData("no valid DSM cells under rectangle");
    double L = model.rect.len * gsd, W = model.rect.wid * gsd;
    double sse = 0.0;
    for (const auto& c : cells) {
        double h = detail::roof_height(model.kind, model.params, c.x, c.y, L, W);
        sse += (h - c.d) * (h - c.d);
    }
    return std::sqrt(sse / cells.size());
}

/// Exhaustive search over the five roof kinds and a percentile-bounded
/// parameter grid, minimizing RMSE against the DSM. Ties break toward the
/// simpler kind, then the smaller parameters.
inline RoofModel fit_roof(const OrientedRect& rect, const RasterF32& dsm,
                          const SearchGrid& grid = {}) {
    const double gsd = grid.gsd;
    auto cells = detail::footprint_cells(rect, dsm, gsd);
    if (cells.size() < 16)
        throw InsufficientData("rectangle covers fewer than 16 valid DSM cells");

    const double L = rect.len * gsd, W = rect.wid * gsd;
    std::vector<double> heights;
    heights.reserve(cells.size());
    for (const auto& c : cells) heights.push_back(c.d);
    const double p0 = detail::percentile(heights, 0.0);
    const double p50 = detail::percentile(heights, 50.0);
    const double p100 = detail::percentile(heights, 100.0);
    const double shift = p50;  // center heights to limit cancellation

    auto make_range = [&](double lo, double hi) {
        std::vector<double> v;
        for (double z = lo; z < hi - 1e-9; z += grid.z_step_m) v.push_back(z);
        v.push_back(hi);
        return v;
    };
    const std::vector<double> ze_values = make_range(p0, p50);
    const std::vector<double> zr_values = make_range(p50, p100);

    std::vector<double> hipl_values{0.0};
    std::vector<double> hipw_values;
    for (int k = 1; k <= grid.inset_steps; ++k) {
        hipl_values.push_back(L * k / (2.0 * grid.inset_steps));
        hipw_values.push_back(W * k / (2.0 * grid.inset_steps));
    }

    struct Candidate {
        double rmse2 = std::numeric_limits<double>::infinity();
        int simplicity = 99;
        RoofKind kind = RoofKind::Flat;
        RoofParams params;

        bool better_than(const Candidate& o) const {
            // near-ties in fit error go to the simpler shape: extra roof
            // parameters must buy a meaningful error reduction, not just
            // absorb measurement noise
            double tol = 0.04 * std::max(rmse2, o.rmse2);
            if (std::fabs(rmse2 - o.rmse2) > tol) return rmse2 < o.rmse2;
            if (simplicity != o.simplicity) return simplicity < o.simplicity;
            if (rmse2 != o.rmse2) return rmse2 < o.rmse2;
            if (params.z_ridge != o.params.z_ridge) return params.z_ridge < o.params.z_ridge;
            if (params.z_eave != o.params.z_eave) return params.z_eave < o.params.z_eave;
            if (params.hipl != o.params.hipl) return params.hipl < o.params.hipl;
            return params.hipw < o.params.hipw;
        }
    };
    Candidate best;

    auto consider_shape = [&](RoofKind kind, double hipl, double hipw) {
        auto ps = detail::accumulate_profile(kind, cells, L, W, hipl, hipw, shift);
        auto consider = [&](double ze, double zr) {
            Candidate c;
            c.rmse2 = std::max(0.0, ps.sse(ze - shift, zr - ze)) / cells.size();
            c.simplicity = roof_simplicity(kind);
            c.kind = kind;
            c.params = {zr, ze, hipl, hipw};
            if (c.better_than(best)) best = c;
        };
        if (kind == RoofKind::Flat) {
            for (double ze : ze_values) consider(ze, ze);
            for (double zr : zr_values) consider(zr, zr);
        } else {
            for (double ze : ze_values)
                for (double zr : zr_values)
                    if (zr >= ze) consider(ze, zr);
        }
    };

    consider_shape(RoofKind::Flat, 0.0, 0.0);
    consider_shape(RoofKind::Gable, 0.0, 0.0);
    consider_shape(RoofKind::Pyramid, 0.0, 0.0);
    for (double hipl : hipl_values) consider_shape(RoofKind::Hip, hipl, 0.0);
    for (double hipl : hipl_values)
        for (double hipw : hipw_values) consider_shape(RoofKind::Mansard, hipl, hipw);

    RoofModel model;
    model.rect = rect;
    model.kind = best.kind;
    model.params = best.params;
    if (model.kind == RoofKind::Flat) model.params.z_ridge = model.params.z_eave;
    model.rmse = roof_rmse(model, dsm, gsd);
    return model;
}

/// Ground elevation around a segment: 5th percentile of valid DSM values in
/// a 3-px exterior ring; falls back to the footprint minimum at raster edges.
inline double estimate_base_height(const BuildingSegment& seg, const RasterF32& dsm,
                                   int ring_px = 3) {
    std::vector<double> ring;
    for (int r = seg.bbox.y0 - ring_px; r < seg.bbox.y1 + ring_px; ++r)
        for (int c = seg.bbox.x0 - ring_px; c < seg.bbox.x1 + ring_px; ++c) {
            if (!dsm.inside(c, r) || !dsm.valid(c, r)) continue;
            if (seg.set_scene(c, r)) continue;
            bool near = false;
            for (int dr = -ring_px; dr <= ring_px && !near; ++dr)
                for (int dc = -ring_px; dc <= ring_px && !near; ++dc)
                    if (seg.set_scene(c + dc, r + dr)) near = true;
            if (near) ring.push_back(dsm.at(c, r));
        }
    if (!ring.empty()) return detail::percentile(ring, 5.0);
    double mn = std::numeric_limits<double>::infinity();
    for (int r = seg.bbox.y0; r < seg.bbox.y1; ++r)
        for (int c = seg.bbox.x0; c < seg.bbox.x1; ++c)
            if (seg.set_scene(c, r) && dsm.inside(c, r) && dsm.valid(c, r))
                mn = std::min(mn, static_cast<double>(dsm.at(c, r)));
    return std::isfinite(mn) ? mn : 0.0;
}

}  // namespace lod2
