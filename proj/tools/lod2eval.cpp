// Scores a reconstruction against reference data: pixel IoU of footprint
// masks and column-voxel IoU of height fields. Emits one CSV row.

#include <cstdio>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "lod2/lod2.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Reconstruction evaluation (IOU2 / IOU3)"};
    std::string scene = "scene", pred_mask, ref_mask, pred_dsm, ref_dsm, out;
    double z_ground = 0.0, voxel = 0.5;
    app.add_option("--scene", scene, "Scene label for the report row");
    app.add_option("--pred-mask", pred_mask, "Predicted footprint mask (PGM)")->required();
    app.add_option("--ref-mask", ref_mask, "Reference footprint mask (PGM)")->required();
    app.add_option("--pred-dsm", pred_dsm, "Predicted height field (ASC)")->required();
    app.add_option("--ref-dsm", ref_dsm, "Reference height field (ASC)")->required();
    app.add_option("--z-ground", z_ground, "Ground elevation, m")->required();
    app.add_option("--voxel", voxel, "Voxel height, m");
    app.add_option("--out", out, "Report CSV path (default: stdout)");
    CLI11_PARSE(app, argc, argv);

    try {
        double i2 = lod2::iou2(lod2::read_pgm(pred_mask), lod2::read_pgm(ref_mask));
        double i3 = lod2::iou3(lod2::read_asc(pred_dsm), lod2::read_asc(ref_dsm), z_ground,
                               voxel);
        char row[256];
        std::snprintf(row, sizeof(row), "%s,%.6f,%.6f\n", scene.c_str(), i2, i3);
        if (out.empty()) {
            std::printf("scene,IOU2,IOU3\n%s", row);
        } else {
            auto f = lod2::detail::open_out(out, false);
            f << "scene,IOU2,IOU3\n" << row;
            if (!f) throw lod2::IoFailure("write failed: " + out);
        }
        return 0;
    } catch (const std::exception& e) {
        nlohmann::json j;
        j["error"] = e.what();
        std::fprintf(stderr, "%s\n", j.dump().c_str());
        return 1;
    }
}
