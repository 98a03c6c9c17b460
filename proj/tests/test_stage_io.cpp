#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lod2/stage_io.hpp"

using namespace lod2;
namespace fs = std::filesystem;

namespace {

std::string fresh_dir(const std::string& name) {
    fs::path d = fs::temp_directory_path() / "lod2_stage_tests" / name;
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

}  // namespace

TEST_CASE("artifact files are named by stage and zero-padded segment id") {
    std::string dir = fresh_dir("naming");
    Mask m(4, 4);
    m.at(1, 1) = 1;
    auto files = persist_stage(dir, "segment", {{7, m}, {12345, m}});
    REQUIRE(files.size() == 2);
    REQUIRE(fs::path(files[0]).filename() == "segment_000007.pgm");
    REQUIRE(fs::path(files[1]).filename() == "segment_012345.pgm");
    REQUIRE(fs::exists(files[0]));
    REQUIRE(fs::exists(files[1]));
}

TEST_CASE("each payload type selects its file format") {
    std::string dir = fresh_dir("formats");

    Polygon poly;
    poly.vertices = {{0.5, 1.5}, {10, 1.5}, {10, 8}};
    OrientationSet orients;
    orients.angles = {0.0, deg2rad(45.0)};
    orients.dominant = 1;
    std::vector<OrientedRect> rects{{5, 5, 10, 4, deg2rad(30.0)}};
    RoofModel model;
    model.rect = rects[0];
    model.kind = RoofKind::Gable;
    model.params = {110.0, 107.0, 0.0, 0.0};
    model.rmse = 0.05;
    model.z_ground = 100.0;
    TriMesh mesh = model_to_mesh(model);
    RasterF32 grid(3, 2, 1.5f);

    auto f1 = persist_stage(dir, "polygon", {{1, poly}});
    auto f2 = persist_stage(dir, "orientation", {{1, orients}});
    auto f3 = persist_stage(dir, "rectangle", {{1, rects}});
    auto f4 = persist_stage(dir, "roof", {{1, std::vector<RoofModel>{model}}});
    auto f5 = persist_stage(dir, "mesh", {{1, mesh}});
    auto f6 = persist_stage(dir, "height", {{1, grid}});

    REQUIRE(fs::path(f1[0]).extension() == ".csv");
    REQUIRE(fs::path(f2[0]).extension() == ".csv");
    REQUIRE(fs::path(f3[0]).extension() == ".csv");
    REQUIRE(fs::path(f4[0]).extension() == ".json");
    REQUIRE(fs::path(f5[0]).extension() == ".obj");
    REQUIRE(fs::path(f6[0]).extension() == ".asc");

    // CSV headers and 1-based rectangle ids
    std::string polygon_csv = slurp(f1[0]);
    REQUIRE(polygon_csv.rfind("index,x,y\n", 0) == 0);
    REQUIRE(polygon_csv.find("0,0.500000,1.500000") != std::string::npos);

    std::string orient_csv = slurp(f2[0]);
    REQUIRE(orient_csv.rfind("index,angle_deg,dominant\n", 0) == 0);
    REQUIRE(orient_csv.find("1,45.000000,1") != std::string::npos);

    std::string rect_csv = slurp(f3[0]);
    REQUIRE(rect_csv.rfind("id,cx,cy,len,wid,theta_deg\n", 0) == 0);
    REQUIRE(rect_csv.find("\n1,5.000000") != std::string::npos);

    // roof records carry the full parameter set
    auto j = nlohmann::json::parse(slurp(f4[0]));
    REQUIRE(j.is_array());
    REQUIRE(j[0]["kind"] == "gable");
    REQUIRE(j[0]["z_ridge"] == 110.0);
    REQUIRE(j[0]["z_eave"] == 107.0);
    REQUIRE(j[0]["theta_deg"] == Catch::Approx(30.0));
    REQUIRE(j[0]["rmse"] == Catch::Approx(0.05));
    REQUIRE(j[0]["z_ground"] == 100.0);

    // obj and asc payloads round-trip through their format readers
    TriMesh mesh_back = read_obj(f5[0]);
    REQUIRE(mesh_back.faces == mesh.faces);
    RasterF32 grid_back = read_asc(f6[0]);
    REQUIRE(grid_back.width == 3);
    REQUIRE(grid_back.at(2, 1) == Catch::Approx(1.5).margin(1e-4));
}

TEST_CASE("persisting the same artifacts twice is byte-identical") {
    std::string dir_a = fresh_dir("rerun_a");
    std::string dir_b = fresh_dir("rerun_b");
    Polygon poly;
    poly.vertices = {{1.25, 2.5}, {7.75, 2.5}, {7.75, 9.125}, {1.25, 9.125}};
    std::vector<OrientedRect> rects{{4.5, 5.8125, 6.5, 6.625, 0.0}};
    for (const auto& dir : {dir_a, dir_b}) {
        persist_stage(dir, "polygon", {{3, poly}});
        persist_stage(dir, "rectangle", {{3, rects}});
    }
    REQUIRE(slurp(dir_a + "/polygon_000003.csv") == slurp(dir_b + "/polygon_000003.csv"));
    REQUIRE(slurp(dir_a + "/rectangle_000003.csv") == slurp(dir_b + "/rectangle_000003.csv"));
}

TEST_CASE("an empty artifact list creates the directory and nothing else") {
    std::string dir = fresh_dir("empty");
    fs::remove_all(dir);
    auto files = persist_stage(dir, "roof", {});
    REQUIRE(files.empty());
    REQUIRE(fs::exists(dir));
    REQUIRE(fs::is_empty(dir));
}
