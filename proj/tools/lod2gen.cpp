// Command-line entry point for the reconstruction pipeline: loads the input
// rasters (and optional classmap / roads / world file), runs all stages, and
// writes every intermediate plus per-building and merged OBJ meshes.

#include <cstdio>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "lod2/lod2.hpp"

int main(int argc, char** argv) {
    CLI::App app{"LoD-2 building model reconstruction from orthophoto + DSM"};

    std::string ortho, dsm, classmap, roads, worldfile, out;
    lod2::Config cfg;

    app.add_option("--ortho", ortho, "Orthophoto (PPM, P6)")->required();
    app.add_option("--dsm", dsm, "Surface model (ESRI ASCII grid)")->required();
    app.add_option("--classmap", classmap, "Building classification map (PGM, P5)");
    app.add_option("--roads", roads, "Road vectors (WKT LINESTRING per line)");
    app.add_option("--worldfile", worldfile, "6-line world file");
    app.add_option("--out", out, "Output directory")->required();

    app.add_option("--tl", cfg.T_l, "Line-length threshold, px [45, 150]");
    app.add_option("--td", cfg.T_d, "Color-difference threshold [6, 20]");
    app.add_option("--th1", cfg.T_h1, "Mean-height threshold, m [0.5, 1.5]");
    app.add_option("--th2", cfg.T_h2, "Edge height-gap threshold, m [0.1, 0.3]");

    app.add_option("--epsilon-dp", cfg.epsilon_dp_px, "Polygon simplification tolerance, px");
    app.add_option("--merge-offset", cfg.merge_offset_px, "Collinear line merge offset, px");
    app.add_option("--grad-threshold", cfg.grad_threshold_m_per_px,
                   "DSM gradient pre-split threshold, m/px");
    app.add_option("--coverage-stop", cfg.coverage_stop, "Rectangle coverage stop fraction");
    app.add_option("--road-dmax", cfg.road_d_max_m, "Road association distance, m");
    app.add_option("--road-tol", cfg.road_tol_deg, "Road snap tolerance, deg");
    app.add_option("--z-step", cfg.z_step_m, "Roof fit height step, m");
    app.add_option("--iou-thresh", cfg.iou_thresh, "Irregular gate IoU threshold");
    app.add_option("--area-thresh", cfg.area_thresh_px, "Irregular gate area threshold, px");
    app.add_option("--max-faces", cfg.max_faces, "Face budget for irregular meshes");
    app.add_option("--min-area", cfg.min_area_px, "Minimum segment area, px");
    app.add_option("--jobs", cfg.jobs, "Worker threads per stage");

    CLI11_PARSE(app, argc, argv);

    try {
        lod2::Scene scene = lod2::load_scene(ortho, dsm, classmap, roads, worldfile);
        lod2::PipelineSummary s = lod2::run_pipeline(scene, cfg, out);
        nlohmann::ordered_json j;
        j["buildings"] = s.buildings;
        j["regular"] = s.regular_count;
        j["irregular"] = s.irregular_count;
        j["total_faces"] = s.total_faces;
        std::printf("%s\n", j.dump().c_str());
        return 0;
    } catch (const std::exception& e) {
        nlohmann::json j;
        j["error"] = e.what();
        std::fprintf(stderr, "%s\n", j.dump().c_str());
        return 1;
    }
}
