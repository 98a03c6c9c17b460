#pragma once

#include <cstdio>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "lod2/formats.hpp"
#include "lod2/mesh.hpp"
#include "lod2/polygon.hpp"
#include "lod2/rectangle.hpp"
#include "lod2/roof.hpp"

namespace lod2 {

/// One persistable per-segment artifact. The alternative chosen selects the
/// file format: mask -> PGM, polygon/orientations/rectangles -> CSV,
/// roof models -> JSON, mesh -> OBJ, raster -> ASC.
using StagePayload = std::variant<Mask, Polygon, OrientationSet, std::vector<OrientedRect>,
                                  std::vector<RoofModel>, TriMesh, RasterF32>;

struct StageArtifact {
    int segment_id = 0;
    StagePayload payload;
};

namespace detail {

inline std::string fmt6(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

inline void write_polygon_csv(const std::string& path, const Polygon& poly) {
    auto f = open_out(path, false);
    f << "index,x,y\n";
    for (size_t i = 0; i < poly.vertices.size(); ++i)
        f << i << "," << fmt6(poly.vertices[i].x) << "," << fmt6(poly.vertices[i].y) << "\n";
    if (!f) throw IoFailure("write failed: " + path);
}

inline void write_orientations_csv(const std::string& path, const OrientationSet& o) {
    auto f = open_out(path, false);
    f << "index,angle_deg,dominant\n";
    for (size_t i = 0; i < o.angles.size(); ++i)
        f << i << "," << fmt6(rad2deg(o.angles[i])) << "," << (i == o.dominant ? 1 : 0)
          << "\n";
    if (!f) throw IoFailure("write failed: " + path);
}

inline void write_rects_csv(const std::string& path, const std::vector<OrientedRect>& rects) {
    auto f = open_out(path, false);
    f << "id,cx,cy,len,wid,theta_deg\n";
    for (size_t i = 0; i < rects.size(); ++i) {
        const auto& r = rects[i];
        f << i + 1 << "," << fmt6(r.cx) << "," << fmt6(r.cy) << "," << fmt6(r.len) << ","
          << fmt6(r.wid) << "," << fmt6(rad2deg(r.theta)) << "\n";
    }
    if (!f) throw IoFailure("write failed: " + path);
}

inline nlohmann::ordered_json roof_to_json(const RoofModel& m) {
    nlohmann::ordered_json j;
    j["cx"] = m.rect.cx;
    j["cy"] = m.rect.cy;
    j["len"] = m.rect.len;
    j["wid"] = m.rect.wid;
    j["theta_deg"] = rad2deg(m.rect.theta);
    j["kind"] = roof_kind_name(m.kind);
    j["z_ridge"] = m.params.z_ridge;
    j["z_eave"] = m.params.z_eave;
    j["hipl"] = m.params.hipl;
    j["hipw"] = m.params.hipw;
    j["rmse"] = m.rmse;
    j["z_ground"] = m.z_ground;
    return j;
}

inline void write_roofs_json(const std::string& path, const std::vector<RoofModel>& models) {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& m : models) j.push_back(roof_to_json(m));
    auto f = open_out(path, false);
    f << j.dump(2) << "\n";
    if (!f) throw IoFailure("write failed: " + path);
}

}  // namespace detail

/// Persist a stage's artifacts as `<stage>_<segment_id>.<ext>` files under
/// output_dir. Deterministic naming and content; returns the file list.
inline std::vector<std::string> persist_stage(const std::string& output_dir,
                                              const std::string& stage_name,
                                              const std::vector<StageArtifact>& artifacts) {
    namespace fs = std::filesystem;
    fs::create_directories(output_dir);
    std::vector<std::string> files;
    for (const auto& art : artifacts) {
        char idbuf[16];
        std::snprintf(idbuf, sizeof(idbuf), "%06d", art.segment_id);
        std::string stem = output_dir + "/" + stage_name + "_" + idbuf;
        std::visit(
            [&](const auto& payload) {
                using T = std::decay_t<decltype(payload)>;
                if constexpr (std::is_same_v<T, Mask>) {
                    files.push_back(stem + ".pgm");
                    write_pgm(files.back(), payload);
                } else if constexpr (std::is_same_v<T, Polygon>) {
                    files.push_back(stem + ".csv");
                    detail::write_polygon_csv(files.back(), payload);
                } else if constexpr (std::is_same_v<T, OrientationSet>) {
                    files.push_back(stem + ".csv");
                    detail::write_orientations_csv(files.back(), payload);
                } else if constexpr (std::is_same_v<T, std::vector<OrientedRect>>) {
                    files.push_back(stem + ".csv");
                    detail::write_rects_csv(files.back(), payload);
                } else if constexpr (std::is_same_v<T, std::vector<RoofModel>>) {
                    files.push_back(stem + ".json");
                    detail::write_roofs_json(files.back(), payload);
                } else if constexpr (std::is_same_v<T, TriMesh>) {
                    files.push_back(stem + ".obj");
                    write_obj(files.back(), payload);
                } else if constexpr (std::is_same_v<T, RasterF32>) {
                    files.push_back(stem + ".asc");
                    write_asc(files.back(), payload);
                }
            },
            art.payload);
    }
    return files;
}

}  // namespace lod2
