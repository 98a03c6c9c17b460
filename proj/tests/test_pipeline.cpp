#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "lod2/pipeline.hpp"
#include "lod2/synthetic.hpp"

using namespace lod2;
namespace fs = std::filesystem;

namespace {

std::string fresh_dir(const std::string& name) {
    fs::path d = fs::temp_directory_path() / "lod2_pipe_tests" / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d.string();
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// filename -> file bytes for a whole output tree
std::map<std::string, std::string> tree_bytes(const std::string& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = slurp(e.path().string());
    return out;
}

SyntheticScene demo_scene() {
    SyntheticSceneSpec spec;
    spec.width = 200;
    spec.height = 160;
    spec.gsd_m = 0.5;
    spec.ground_z = 100.0;
    spec.noise_sigma_m = 0.05;
    spec.seed = 5;
    spec.buildings.push_back(
        {{50, 45, 56, 30, deg2rad(10.0)}, RoofKind::Gable, {111.0, 108.0, 0, 0}, {200, 60, 60}});
    spec.buildings.push_back(
        {{140, 50, 48, 32, deg2rad(75.0)}, RoofKind::Hip, {112.0, 108.0, 4.8, 0}, {60, 60, 200}});
    spec.buildings.push_back(
        {{60, 120, 40, 26, 0.0}, RoofKind::Flat, {108.0, 108.0, 0, 0}, {60, 200, 60}});
    return generate_scene(spec);
}

GeoTransform demo_geo() {
    GeoTransform g;
    g.pixel_size_x = 0.5;
    g.pixel_size_y = -0.5;
    g.origin_x = 30000.0;
    g.origin_y = 40000.0;
    return g;
}

}  // namespace

TEST_CASE("the pipeline writes the full stage manifest and a coherent summary") {
    SyntheticScene syn = demo_scene();
    syn.scene.geo = demo_geo();
    std::string dir = fresh_dir("manifest");
    PipelineSummary sum = run_pipeline(syn.scene, Config{}, dir);

    REQUIRE(sum.buildings == 3);
    REQUIRE(sum.regular_count == 3);
    REQUIRE(sum.irregular_count == 0);
    REQUIRE(sum.total_faces > 0);

    for (const char* stem : {"segment_000001.pgm", "polygon_000001.csv",
                             "orientation_000001.csv", "rectangle_000001.csv",
                             "roof_000001.json", "mesh_000001.obj"})
        REQUIRE(fs::exists(fs::path(dir) / stem));
    REQUIRE(fs::exists(fs::path(dir) / "mesh_000003.obj"));
    REQUIRE(fs::exists(fs::path(dir) / "scene.obj"));
    REQUIRE(fs::exists(fs::path(dir) / "summary.json"));
    // no roads: no refinement artifacts
    REQUIRE_FALSE(fs::exists(fs::path(dir) / "refined_000001.csv"));

    auto j = nlohmann::json::parse(slurp(dir + "/summary.json"));
    REQUIRE(j["buildings"] == 3);
    REQUIRE(j["regular"] == 3);
    REQUIRE(j["irregular"] == 0);
    REQUIRE(j["total_faces"] == sum.total_faces);

    // fitted roofs recover the scripted kinds
    std::map<std::string, int> kinds;
    for (int id = 1; id <= 3; ++id) {
        char name[32];
        std::snprintf(name, sizeof(name), "/roof_%06d.json", id);
        auto roofs = nlohmann::json::parse(slurp(dir + name));
        REQUIRE(roofs.is_array());
        REQUIRE_FALSE(roofs.empty());
        for (const auto& r : roofs) kinds[r["kind"]]++;
    }
    REQUIRE(kinds["gable"] >= 1);
    REQUIRE(kinds["hip"] >= 1);
    REQUIRE(kinds["flat"] >= 1);

    // the merged mesh is watertight per part and georeferenced
    TriMesh merged = read_obj(dir + "/scene.obj");
    REQUIRE_FALSE(merged.vertices.empty());
    for (const auto& v : merged.vertices) {
        REQUIRE(v.x >= 30000.0);
        REQUIRE(v.x <= 30100.0);
        REQUIRE(v.y <= 40000.0);
        REQUIRE(v.y >= 39920.0);
    }
}

TEST_CASE("reruns and worker counts produce byte-identical output trees") {
    SyntheticScene syn = demo_scene();
    std::string d1 = fresh_dir("det_seq");
    std::string d2 = fresh_dir("det_rerun");
    std::string d4 = fresh_dir("det_par");

    Config seq;
    seq.jobs = 1;
    Config par;
    par.jobs = 4;
    run_pipeline(syn.scene, seq, d1);
    run_pipeline(syn.scene, seq, d2);
    run_pipeline(syn.scene, par, d4);

    auto t1 = tree_bytes(d1);
    REQUIRE_FALSE(t1.empty());
    REQUIRE(t1 == tree_bytes(d2));
    REQUIRE(t1 == tree_bytes(d4));
}

TEST_CASE("distant roads leave the rectangle stage untouched") {
    SyntheticScene syn = demo_scene();
    syn.scene.geo = demo_geo();
    RoadNetwork roads;
    // far outside the 30 m gate for every building
    roads.polylines.push_back({{30000.0, 41000.0}, {30200.0, 41000.0}});
    syn.scene.roads = roads;

    std::string dir = fresh_dir("roads_far");
    run_pipeline(syn.scene, Config{}, dir);
    for (int id = 1; id <= 3; ++id) {
        char a[40], b[40];
        std::snprintf(a, sizeof(a), "/rectangle_%06d.csv", id);
        std::snprintf(b, sizeof(b), "/refined_%06d.csv", id);
        REQUIRE(fs::exists(dir + b));
        REQUIRE(slurp(dir + a) == slurp(dir + b));
    }
}

TEST_CASE("a nearby road snaps a slightly skewed rectangle") {
    SyntheticScene syn = demo_scene();
    syn.scene.geo = demo_geo();
    // building 3 (flat, axis aligned at theta 0) sits near y-pixel 120;
    // a horizontal road 10 px south of it in pixel space
    RoadNetwork roads;
    double wy = 40000.0 - 0.5 * 140.0;
    roads.polylines.push_back({{30000.0, wy}, {30100.0, wy}});
    syn.scene.roads = roads;

    std::string dir = fresh_dir("roads_near");
    run_pipeline(syn.scene, Config{}, dir);
    std::string refined = slurp(dir + "/refined_000003.csv");
    REQUIRE_FALSE(refined.empty());
    // the snapped orientation is exactly the road's 0 degrees
    REQUIRE(refined.find(",0.000000\n") != std::string::npos);
}

TEST_CASE("invalid thresholds are rejected before any work happens") {
    SyntheticScene syn = demo_scene();
    std::string dir = fresh_dir("badcfg");
    fs::remove_all(dir);
    Config cfg;
    cfg.T_d = 25.0;
    try {
        run_pipeline(syn.scene, cfg, dir);
        FAIL("expected ConfigOutOfRange");
    } catch (const ConfigOutOfRange& e) {
        std::string msg = e.what();
        REQUIRE(msg.find("T_d") != std::string::npos);
        REQUIRE(msg.find("[6, 20]") != std::string::npos);
    }
    REQUIRE_FALSE(fs::exists(dir));  // nothing was written
}

TEST_CASE("oversized scenes are rejected up front") {
    Scene scene;
    scene.ortho = RasterRGB(5001, 2);
    scene.dsm = RasterF32(5001, 2, 100.0f);
    std::string dir = fresh_dir("toolarge");
    REQUIRE_THROWS_AS(run_pipeline(scene, Config{}, dir), InputTooLarge);
}

TEST_CASE("without a classmap the height fallback still finds buildings") {
    SyntheticScene syn = demo_scene();
    syn.scene.classmap.reset();
    std::string dir = fresh_dir("fallback");
    PipelineSummary sum = run_pipeline(syn.scene, Config{}, dir);
    REQUIRE(sum.buildings == 3);
}

TEST_CASE("an empty scene runs to completion with zero buildings") {
    SyntheticSceneSpec spec;
    spec.width = 64;
    spec.height = 64;
    SyntheticScene syn = generate_scene(spec);
    std::string dir = fresh_dir("empty");
    PipelineSummary sum = run_pipeline(syn.scene, Config{}, dir);
    REQUIRE(sum.buildings == 0);
    REQUIRE(fs::exists(dir + "/summary.json"));
    REQUIRE(fs::exists(dir + "/scene.obj"));
}
