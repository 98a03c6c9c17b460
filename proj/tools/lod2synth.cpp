// Generates a ground-truth test scene from a JSON building script: DSM grid,
// flat-shaded orthophoto, exact classmap, per-building footprints, and the
// true roof models.

#include <cstdio>
#include <fstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "lod2/lod2.hpp"

namespace {

lod2::RoofKind kind_from_name(const std::string& name) {
    if (name == "flat") return lod2::RoofKind::Flat;
    if (name == "gable") return lod2::RoofKind::Gable;
    if (name == "hip") return lod2::RoofKind::Hip;
    if (name == "pyramid") return lod2::RoofKind::Pyramid;
    if (name == "mansard") return lod2::RoofKind::Mansard;
    throw lod2::InvalidParams("unknown roof kind: " + name);
}

lod2::SyntheticSceneSpec parse_spec(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw lod2::IoFailure("cannot open for reading: " + path);
    nlohmann::json j = nlohmann::json::parse(f);

    lod2::SyntheticSceneSpec spec;
    spec.width = j.value("width", spec.width);
    spec.height = j.value("height", spec.height);
    spec.gsd_m = j.value("gsd_m", spec.gsd_m);
    spec.ground_z = j.value("ground_z", spec.ground_z);
    spec.noise_sigma_m = j.value("noise_sigma_m", spec.noise_sigma_m);
    spec.seed = j.value("seed", spec.seed);
    if (j.contains("ground_color"))
        for (int i = 0; i < 3; ++i) spec.ground_color[i] = j["ground_color"][i];
    for (const auto& bj : j.value("buildings", nlohmann::json::array())) {
        lod2::SyntheticBuilding b;
        b.rect.cx = bj.at("cx");
        b.rect.cy = bj.at("cy");
        b.rect.len = bj.at("len");
        b.rect.wid = bj.at("wid");
        b.rect.theta = lod2::deg2rad(bj.value("theta_deg", 0.0));
        b.kind = kind_from_name(bj.at("kind"));
        b.params.z_ridge = bj.at("z_ridge");
        b.params.z_eave = bj.at("z_eave");
        b.params.hipl = bj.value("hipl", 0.0);
        b.params.hipw = bj.value("hipw", 0.0);
        if (bj.contains("color"))
            for (int i = 0; i < 3; ++i) b.color[i] = bj["color"][i];
        spec.buildings.push_back(b);
    }
    return spec;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Synthetic ground-truth scene generator"};
    std::string spec_path, out;
    bool worldfile = false;
    app.add_option("--spec", spec_path, "Scene script (JSON)")->required();
    app.add_option("--out", out, "Output directory")->required();
    app.add_flag("--worldfile", worldfile, "Also write a world file (0.5 m GSD at origin 0,0)");
    CLI11_PARSE(app, argc, argv);

    try {
        lod2::SyntheticSceneSpec spec = parse_spec(spec_path);
        lod2::SyntheticScene sc = lod2::generate_scene(spec);

        std::filesystem::create_directories(out);
        lod2::write_ppm(out + "/ortho.ppm", sc.scene.ortho);
        lod2::write_asc(out + "/dsm.asc", sc.scene.dsm);
        lod2::write_pgm(out + "/classmap.pgm", *sc.scene.classmap);
        if (worldfile) {
            lod2::GeoTransform geo;
            geo.pixel_size_x = spec.gsd_m;
            geo.pixel_size_y = -spec.gsd_m;
            lod2::write_worldfile(out + "/scene.wld", geo);
        }

        std::vector<lod2::StageArtifact> truth, footprints;
        for (size_t i = 0; i < sc.models.size(); ++i) {
            truth.push_back({static_cast<int>(i) + 1,
                             std::vector<lod2::RoofModel>{sc.models[i]}});
            footprints.push_back({static_cast<int>(i) + 1, sc.footprints[i]});
        }
        lod2::persist_stage(out, "truth", truth);
        lod2::persist_stage(out, "footprint", footprints);

        std::printf("{\"buildings\": %zu}\n", sc.models.size());
        return 0;
    } catch (const std::exception& e) {
        nlohmann::json j;
        j["error"] = e.what();
        std::fprintf(stderr, "%s\n", j.dump().c_str());
        return 1;
    }
}
