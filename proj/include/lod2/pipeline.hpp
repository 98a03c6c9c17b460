#pragma once

#include <atomic>
#include <chrono>
#include <cstdio>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "lod2/config.hpp"
#include "lod2/lsd.hpp"
#include "lod2/mesh.hpp"
#include "lod2/metrics.hpp"
#include "lod2/polygon.hpp"
#include "lod2/rectangle.hpp"
#include "lod2/roads.hpp"
#include "lod2/roof.hpp"
#include "lod2/scene.hpp"
#include "lod2/segmentation.hpp"
#include "lod2/simplify.hpp"
#include "lod2/stage_io.hpp"

namespace lod2 {

struct PipelineSummary {
    size_t buildings = 0;
    size_t regular_count = 0;
    size_t irregular_count = 0;
    size_t total_faces = 0;
};

namespace detail {

/// Everything carried from stage to stage for one building segment.
struct SegmentState {
    BuildingSegment seg;
    Polygon traced;       // scene frame, after simplification (mesh fallback)
    Polygon polygon;      // scene frame, snapped and regularized
    OrientationSet orients;
    std::vector<OrientedRect> rects;    // scene frame
    std::vector<OrientedRect> refined;  // scene frame; == rects without roads
    double iou_rects = 0.0;
    bool irregular = false;
    double z_ground = 0.0;
    std::vector<RoofModel> models;  // empty on the irregular path
    TriMesh mesh;
};

/// Run fn(i) for i in [0, n) on up to `jobs` threads. The first failure is
/// reported with its index; results must be written to index-addressed slots
/// so the worker count cannot affect outputs.
template <typename Fn>
inline void parallel_for(size_t n, int jobs, Fn&& fn) {
    int workers = static_cast<int>(std::min<size_t>(std::max(jobs, 1), n));
    if (workers <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::mutex err_mutex;
    std::string first_error;
    size_t first_error_index = 0;
    bool failed = false;
    auto body = [&] {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lk(err_mutex);
                if (!failed || i < first_error_index) {
                    failed = true;
                    first_error_index = i;
                    first_error = e.what();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (failed) throw Error(first_error);
}

inline Polygon bbox_polygon(const PixelBox& bb) {
    Polygon p;
    p.vertices = {{bb.x0 - 0.5, bb.y0 - 0.5},
                  {bb.x1 - 0.5, bb.y0 - 0.5},
                  {bb.x1 - 0.5, bb.y1 - 0.5},
                  {bb.x0 - 0.5, bb.y1 - 0.5}};
    p.ensure_ccw();
    return p;
}

struct StageTimer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    void report(const char* stage) {
        auto t1 = std::chrono::steady_clock::now();
        double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        std::fprintf(stderr, "[timing] %-12s %.1f ms\n", stage, ms);
        t0 = t1;
    }
};

inline void progress(const char* stage, int id, size_t total) {
    std::fprintf(stderr, "[%s] segment %d/%zu\n", stage, id, total);
}

}  // namespace detail

/// Run the full reconstruction chain: segmentation, polygon extraction,
/// rectangle decomposition, optional road-based orientation refinement, roof
/// fitting, and mesh export. Every stage's artifacts land under output_dir;
/// timings and progress go to standard error, so outputs stay byte-stable.
inline PipelineSummary run_pipeline(const Scene& scene, const Config& raw_config,
                                    const std::string& output_dir) {
    std::vector<std::string> warnings;
    const Config cfg = validate_config(raw_config, &warnings);
    for (const auto& w : warnings) std::fprintf(stderr, "[warning] %s\n", w.c_str());
    if (scene.width() > 5000 || scene.height() > 5000)
        throw InputTooLarge("scene is " + std::to_string(scene.width()) + "x" +
                            std::to_string(scene.height()) + ", limit is 5000x5000");

    const double gsd = scene.geo ? std::fabs(scene.geo->pixel_size_x) : 1.0;
    std::filesystem::create_directories(output_dir);
    detail::StageTimer timer;

    // ---- segmentation --------------------------------------------------------
    Mask building_mask;
    if (scene.classmap) {
        building_mask = *scene.classmap;
    } else {
        std::vector<double> hs;
        hs.reserve(scene.dsm.samples.size());
        for (int r = 0; r < scene.dsm.height; ++r)
            for (int c = 0; c < scene.dsm.width; ++c)
                if (scene.dsm.valid(c, r)) hs.push_back(scene.dsm.at(c, r));
        double ground = detail::percentile(hs, 5.0);
        building_mask = fallback_segmentation(scene.dsm, ground, cfg.fallback_min_height_m);
    }
    auto segments = connected_components(building_mask, cfg.min_area_px);
    const size_t n = segments.size();

    std::vector<detail::SegmentState> st(n);
    for (size_t i = 0; i < n; ++i) st[i].seg = std::move(segments[i]);

    {
        std::vector<StageArtifact> arts;
        for (const auto& s : st) arts.push_back({s.seg.id, s.seg.mask});
        persist_stage(output_dir, "segment", arts);
    }
    timer.report("segmentation");

    auto wrap = [&](size_t i, const char* stage, auto&& fn) {
        try {
            fn();
        } catch (const std::exception& e) {
            throw Error(std::string(stage) + ", segment " + std::to_string(st[i].seg.id) +
                        ": " + e.what());
        }
    };

    // ---- polygon extraction ---------------------------------------------------
    detail::parallel_for(n, cfg.jobs, [&](size_t i) {
        wrap(i, "polygon", [&] {
            detail::progress("polygon", st[i].seg.id, n);
            auto& s = st[i];
            Polygon ring = trace_boundary(s.seg);
            try {
                s.traced = simplify_dp(ring, cfg.epsilon_dp_px);
            } catch (const DegeneratePolygon&) {
                s.traced = detail::bbox_polygon(s.seg.bbox);
            }
            s.orients = estimate_main_orientations(s.traced, cfg.T_l);
            try {
                s.polygon = snap_and_merge_lines(s.traced, s.orients, cfg.T_l,
                                                 cfg.merge_offset_px);
            } catch (const DegeneratePolygon&) {
                s.polygon = s.traced;
            }
            PixelBox box{s.seg.bbox.x0 - 5, s.seg.bbox.y0 - 5, s.seg.bbox.x1 + 5,
                         s.seg.bbox.y1 + 5};
            auto lines = detect_image_line_segments(scene.ortho, box);
            try {
                s.polygon = regularize_with_image_lines(s.polygon, lines);
            } catch (const DegeneratePolygon&) {
                // keep the snapped polygon
            }
        });
    });
    {
        std::vector<StageArtifact> polys, orients;
        for (const auto& s : st) {
            polys.push_back({s.seg.id, s.polygon});
            orients.push_back({s.seg.id, s.orients});
        }
        persist_stage(output_dir, "polygon", polys);
        persist_stage(output_dir, "orientation", orients);
    }
    timer.report("polygon");

    // ---- rectangle decomposition ----------------------------------------------
    detail::parallel_for(n, cfg.jobs, [&](size_t i) {
        wrap(i, "rectangle", [&] {
            detail::progress("rectangle", st[i].seg.id, n);
            auto& s = st[i];
            const PixelBox& bb = s.seg.bbox;
            const int bw = bb.width(), bh = bb.height();

            RasterF32 dsm_patch(bw, bh, -9999.0f);
            RasterRGB ortho_patch(bw, bh);
            for (int r = 0; r < bh; ++r)
                for (int c = 0; c < bw; ++c) {
                    if (!s.seg.mask.at(c, r)) continue;
                    int sc = bb.x0 + c, sr = bb.y0 + r;
                    if (scene.dsm.valid(sc, sr)) dsm_patch.at(c, r) = scene.dsm.at(sc, sr);
                    for (int b = 0; b < 3; ++b)
                        ortho_patch.at(c, r, b) = scene.ortho.at(sc, sr, b);
                }

            auto [rot_mask, frame] = rotate_mask_to_axis(s.seg.mask, s.orients.dominant_angle());
            RasterF32 rot_dsm = rotate_dsm(dsm_patch, frame);
            RasterRGB rot_ortho = rotate_rgb(ortho_patch, frame);

            auto labels = gradient_presplit(rot_mask, rot_dsm, cfg.grad_threshold_m_per_px);
            int max_label = 0;
            for (int l : labels) max_label = std::max(max_label, l);

            InnerRectParams ip;
            ip.coverage_stop = cfg.coverage_stop;
            std::vector<AxisRect> axis_rects;
            for (int l = 1; l <= max_label; ++l) {
                Mask lm(rot_mask.width, rot_mask.height);
                for (size_t k = 0; k < labels.size(); ++k)
                    if (labels[k] == l) lm.samples[k] = 1;
                for (const AxisRect& rc : extract_max_inner_rectangles(lm, ip))
                    axis_rects.push_back(rc);
            }
            axis_rects = merge_adjacent_rects(std::move(axis_rects), rot_dsm, rot_ortho,
                                              cfg.T_d, cfg.T_h1, cfg.T_h2);

            std::vector<OrientedRect> patch_rects;
            for (const AxisRect& rc : axis_rects) patch_rects.push_back(to_oriented(rc, frame));
            s.iou_rects = patch_rects.empty() ? 0.0 : iou_rects_vs_mask(patch_rects, s.seg.mask);

            s.rects = patch_rects;
            for (auto& r : s.rects) {
                r.cx += bb.x0;
                r.cy += bb.y0;
            }
            s.refined = s.rects;
        });
    });
    {
        std::vector<StageArtifact> arts;
        for (const auto& s : st) arts.push_back({s.seg.id, s.rects});
        persist_stage(output_dir, "rectangle", arts);
    }
    timer.report("rectangle");

    // ---- orientation refinement (optional) -------------------------------------
    if (scene.roads && scene.geo) {
        detail::parallel_for(n, cfg.jobs, [&](size_t i) {
            wrap(i, "refinement", [&] {
                detail::progress("refinement", st[i].seg.id, n);
                auto& s = st[i];
                for (auto& rect : s.refined) {
                    auto road = nearest_road_segment(rect, *scene.roads, *scene.geo,
                                                     cfg.road_d_max_m);
                    if (!road) continue;
                    double ang = road_angle_in_pixels(*road, *scene.geo);
                    std::vector<Vec2> pts;
                    for (int r = 0; r < s.seg.mask.height; ++r)
                        for (int c = 0; c < s.seg.mask.width; ++c) {
                            if (!s.seg.mask.at(c, r)) continue;
                            Vec2 p{static_cast<double>(s.seg.bbox.x0 + c),
                                   static_cast<double>(s.seg.bbox.y0 + r)};
                            if (rect.contains(p)) pts.push_back(p);
                        }
                    rect = snap_rect_orientation(rect, ang, cfg.road_tol_deg, pts);
                }
            });
        });
        std::vector<StageArtifact> arts;
        for (const auto& s : st) arts.push_back({s.seg.id, s.refined});
        persist_stage(output_dir, "refined", arts);
        timer.report("refinement");
    }

    // ---- roof fitting -----------------------------------------------------------
    detail::parallel_for(n, cfg.jobs, [&](size_t i) {
        wrap(i, "fitting", [&] {
            detail::progress("fitting", st[i].seg.id, n);
            auto& s = st[i];
            s.z_ground = estimate_base_height(s.seg, scene.dsm);
            s.irregular = irregular_decision(s.iou_rects, static_cast<long>(s.seg.area_px),
                                             cfg.iou_thresh, cfg.area_thresh_px) ==
                          ShapeClass::Irregular;
            if (s.irregular) return;

            SearchGrid grid;
            grid.z_step_m = cfg.z_step_m;
            grid.gsd = gsd;
            for (const auto& rect : s.refined) {
                try {
                    RoofModel m = fit_roof(rect, scene.dsm, grid);
                    m.z_ground = std::min(s.z_ground, m.params.z_eave);
                    s.models.push_back(m);
                } catch (const InsufficientData&) {
                    // rectangle too small to fit; skip it
                }
            }
            if (s.models.empty()) s.irregular = true;
        });
    });
    {
        std::vector<StageArtifact> arts;
        for (const auto& s : st) arts.push_back({s.seg.id, s.models});
        persist_stage(output_dir, "roof", arts);
    }
    timer.report("fitting");

    // ---- mesh export -------------------------------------------------------------
    detail::parallel_for(n, cfg.jobs, [&](size_t i) {
        wrap(i, "mesh", [&] {
            detail::progress("mesh", st[i].seg.id, n);
            auto& s = st[i];
            if (!s.irregular) {
                for (const auto& m : s.models) {
                    TriMesh part = model_to_mesh(m, scene.geo, gsd);
                    int base = static_cast<int>(s.mesh.vertices.size());
                    s.mesh.vertices.insert(s.mesh.vertices.end(), part.vertices.begin(),
                                           part.vertices.end());
                    for (auto f : part.faces)
                        s.mesh.faces.push_back({f[0] + base, f[1] + base, f[2] + base});
                }
                return;
            }
            TriMesh m;
            try {
                m = dsm_to_mesh(scene.dsm, s.traced, s.z_ground);
            } catch (const EmptyFootprint&) {
                // footprint too thin to triangulate; fall back to a flat box
                RoofModel flat;
                flat.rect = {(s.seg.bbox.x0 + s.seg.bbox.x1) / 2.0 - 0.5,
                             (s.seg.bbox.y0 + s.seg.bbox.y1) / 2.0 - 0.5,
                             static_cast<double>(std::max(s.seg.bbox.width(),
                                                          s.seg.bbox.height())),
                             static_cast<double>(std::min(s.seg.bbox.width(),
                                                          s.seg.bbox.height())),
                             s.seg.bbox.width() >= s.seg.bbox.height() ? 0.0 : kPi / 2.0};
                std::vector<double> hs;
                for (int r = s.seg.bbox.y0; r < s.seg.bbox.y1; ++r)
                    for (int c = s.seg.bbox.x0; c < s.seg.bbox.x1; ++c)
                        if (s.seg.set_scene(c, r) && scene.dsm.valid(c, r))
                            hs.push_back(scene.dsm.at(c, r));
                double top = hs.empty() ? s.z_ground : detail::percentile(hs, 50.0);
                top = std::max(top, s.z_ground);
                flat.kind = RoofKind::Flat;
                flat.params = {top, top, 0.0, 0.0};
                flat.z_ground = s.z_ground;
                s.mesh = model_to_mesh(flat, scene.geo, gsd);
                return;
            }
            m = simplify_mesh(m, cfg.max_faces);
            if (scene.geo)
                for (auto& v : m.vertices) {
                    Vec2 w = pixel_to_world(*scene.geo, {v.x, v.y});
                    v.x = w.x;
                    v.y = w.y;
                }
            s.mesh = std::move(m);
        });
    });
    {
        std::vector<StageArtifact> arts;
        for (const auto& s : st) arts.push_back({s.seg.id, s.mesh});
        persist_stage(output_dir, "mesh", arts);
    }

    // merged scene mesh
    {
        auto f = detail::open_out(output_dir + "/scene.obj", false);
        int base = 0;
        for (const auto& s : st) append_obj(f, s.mesh, base);
        if (!f) throw IoFailure("write failed: " + output_dir + "/scene.obj");
    }
    timer.report("mesh");

    PipelineSummary summary;
    summary.buildings = n;
    for (const auto& s : st) {
        if (s.irregular)
            ++summary.irregular_count;
        else
            ++summary.regular_count;
        summary.total_faces += s.mesh.faces.size();
    }
    {
        nlohmann::ordered_json j;
        j["buildings"] = summary.buildings;
        j["regular"] = summary.regular_count;
        j["irregular"] = summary.irregular_count;
        j["total_faces"] = summary.total_faces;
        auto f = detail::open_out(output_dir + "/summary.json", false);
        f << j.dump(2) << "\n";
        if (!f) throw IoFailure("write failed: " + output_dir + "/summary.json");
    }
    return summary;
}

}  // namespace lod2
