#pragma once

#include <optional>
#include <string>

#include "lod2/formats.hpp"

namespace lod2 {

/// Co-registered scene inputs. All rasters share dimensions; roads require
/// a georeference to be projectable into the pixel frame.
struct Scene {
    RasterRGB ortho;
    RasterF32 dsm;
    std::optional<Mask> classmap;  // normalized: building = 1
    std::optional<GeoTransform> geo;
    std::optional<RoadNetwork> roads;

    int width() const { return ortho.width; }
    int height() const { return ortho.height; }
};

inline Scene load_scene(const std::string& ortho_path,
                        const std::string& dsm_path,
                        const std::string& classmap_path = {},
                        const std::string& roads_path = {},
                        const std::string& worldfile_path = {}) {
    Scene s;
    s.ortho = read_ppm(ortho_path);
    s.dsm = read_asc(dsm_path);
    if (s.dsm.width != s.ortho.width || s.dsm.height != s.ortho.height)
        throw DimensionMismatch("orthophoto is " + std::to_string(s.ortho.width) + "x" +
                                std::to_string(s.ortho.height) + " but DSM is " +
                                std::to_string(s.dsm.width) + "x" +
                                std::to_string(s.dsm.height));
    if (!classmap_path.empty()) {
        Mask cm = read_pgm(classmap_path);
        if (cm.width != s.ortho.width || cm.height != s.ortho.height)
            throw DimensionMismatch("classification map dimensions differ from orthophoto");
        // Building may be labeled 1 or 255; anything else nonzero is invalid.
        for (size_t i = 0; i < cm.samples.size(); ++i) {
            auto v = cm.samples[i];
            if (v == 255) cm.samples[i] = 1;
            else if (v != 0 && v != 1)
                throw MalformedFile(classmap_path + ": class value " + std::to_string(v) +
                                        " (expected 0, 1, or 255)",
                                    static_cast<long>(i));
        }
        s.classmap = std::move(cm);
    }
    if (!worldfile_path.empty()) s.geo = read_worldfile(worldfile_path);
    if (!roads_path.empty()) {
        if (!s.geo)
            throw MissingGeoref("road vectors are in world coordinates; a world file is required");
        s.roads = read_wkt_roads(roads_path);
    }
    return s;
}

}  // namespace lod2
