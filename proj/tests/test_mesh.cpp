#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <random>
#include <sstream>

#include "lod2/mesh.hpp"
#include "lod2/simplify.hpp"

using namespace lod2;

namespace {

std::string tmp_path(const std::string& name) {
    auto d = std::filesystem::temp_directory_path() / "lod2_mesh_tests";
    std::filesystem::create_directories(d);
    return (d / name).string();
}

RoofModel make_model(RoofKind kind, RoofParams p, OrientedRect rect, double zg) {
    RoofModel m;
    m.rect = rect;
    m.kind = kind;
    m.params = p;
    m.z_ground = zg;
    return m;
}

}  // namespace

TEST_CASE("parametric meshes are watertight with positive volume") {
    OrientedRect rect{50, 50, 40, 20, deg2rad(25.0)};
    std::vector<RoofModel> models{
        make_model(RoofKind::Flat, {108, 108, 0, 0}, rect, 100),
        make_model(RoofKind::Gable, {112, 108, 0, 0}, rect, 100),
        make_model(RoofKind::Hip, {112, 108, 5, 0}, rect, 100),
        make_model(RoofKind::Pyramid, {112, 108, 0, 0}, rect, 100),
        make_model(RoofKind::Mansard, {112, 108, 5, 3}, rect, 100),
    };
    for (const auto& m : models) {
        TriMesh mesh = model_to_mesh(m);
        INFO(roof_kind_name(m.kind));
        REQUIRE(mesh.watertight());
        REQUIRE(mesh.signed_volume() > 0.0);
    }
}

TEST_CASE("flat box volume is exact") {
    OrientedRect rect{10, 10, 20, 10, 0.0};
    TriMesh mesh = model_to_mesh(make_model(RoofKind::Flat, {105, 105, 0, 0}, rect, 100));
    REQUIRE(mesh.signed_volume() == Catch::Approx(20.0 * 10.0 * 5.0).epsilon(1e-9));
}

TEST_CASE("gable prism volume matches the closed form") {
    OrientedRect rect{0, 0, 30, 12, 0.0};
    // prism: base box + triangular ridge section = L*W*(ze-zg) + L*W*(zr-ze)/2
    TriMesh mesh = model_to_mesh(make_model(RoofKind::Gable, {110, 106, 0, 0}, rect, 100));
    REQUIRE(mesh.signed_volume() ==
            Catch::Approx(30 * 12 * 6 + 30 * 12 * 4 / 2.0).epsilon(1e-9));
}

TEST_CASE("meshing validates the model") {
    OrientedRect rect{0, 0, 10, 5, 0.0};
    REQUIRE_THROWS_AS(model_to_mesh(make_model(RoofKind::Flat, {105, 105, 0, 0}, rect, 106)),
                      InvalidModel);  // eave below ground
    OrientedRect empty{0, 0, 0, 0, 0.0};
    REQUIRE_THROWS_AS(model_to_mesh(make_model(RoofKind::Flat, {105, 105, 0, 0}, empty, 100)),
                      InvalidModel);
}

TEST_CASE("a georeference maps mesh vertices to world coordinates") {
    OrientedRect rect{10, 10, 8, 4, 0.0};
    GeoTransform geo;
    geo.pixel_size_x = 0.5;
    geo.pixel_size_y = -0.5;
    geo.origin_x = 1000;
    geo.origin_y = 2000;
    TriMesh mesh =
        model_to_mesh(make_model(RoofKind::Flat, {105, 105, 0, 0}, rect, 100), geo);
    REQUIRE(mesh.watertight());
    REQUIRE(mesh.signed_volume() > 0.0);  // winding fixed under the axis flip
    for (const auto& v : mesh.vertices) {
        REQUIRE(v.x >= 1000.0);
        REQUIRE(v.x <= 1010.0);
        REQUIRE(v.y <= 2000.0);
    }
}

TEST_CASE("irregular gate decision table") {
    REQUIRE(irregular_decision(0.60, 6000) == ShapeClass::Irregular);
    REQUIRE(irregular_decision(0.60, 4000) == ShapeClass::Regular);
    REQUIRE(irregular_decision(0.70, 6000) == ShapeClass::Regular);
    // strict boundaries
    REQUIRE(irregular_decision(0.65, 6000) == ShapeClass::Regular);
    REQUIRE(irregular_decision(0.60, 5000) == ShapeClass::Regular);
}

TEST_CASE("rectangle/mask IoU matches set algebra on an axis case") {
    Mask m(20, 20);
    for (int r = 5; r < 15; ++r)
        for (int c = 5; c < 15; ++c) m.at(c, r) = 1;
    // rectangle covering exactly the same 10x10 pixel centers
    std::vector<OrientedRect> rects{{9.5, 9.5, 10.0, 10.0, 0.0}};
    REQUIRE(iou_rects_vs_mask(rects, m) == Catch::Approx(1.0));

    std::vector<OrientedRect> half{{7.0, 9.5, 5.0, 10.0, 0.0}};
    REQUIRE(iou_rects_vs_mask(half, m) == Catch::Approx(0.5));

    REQUIRE_THROWS_AS(iou_rects_vs_mask({}, Mask(4, 4)), EmptyInputs);
}

TEST_CASE("dsm meshing of a flat plateau gives the prism volume") {
    RasterF32 dsm(30, 30, 110.0f);
    Polygon poly;
    poly.vertices = {{4.5, 4.5}, {24.5, 4.5}, {24.5, 24.5}, {4.5, 24.5}};
    TriMesh mesh = dsm_to_mesh(dsm, poly, 100.0);
    REQUIRE(mesh.watertight());
    // pixel centers 5..24 are strictly inside -> 19x19 full cells, height 10
    REQUIRE(mesh.signed_volume() == Catch::Approx(19.0 * 19.0 * 10.0).epsilon(1e-6));
}

TEST_CASE("dsm meshing requires an interior cell") {
    RasterF32 dsm(10, 10, 105.0f);
    Polygon sliver;
    sliver.vertices = {{1, 1}, {8, 1.2}, {1, 1.4}};
    REQUIRE_THROWS_AS(dsm_to_mesh(dsm, sliver, 100.0), EmptyFootprint);
}

TEST_CASE("simplification respects the face budget and stays watertight") {
    // bumpy surface over a square footprint -> thousands of faces
    RasterF32 dsm(60, 60, 110.0f);
    for (int r = 0; r < 60; ++r)
        for (int c = 0; c < 60; ++c)
            dsm.at(c, r) = 110.0f + 2.0f * std::sin(c * 0.4f) * std::cos(r * 0.3f);
    Polygon poly;
    poly.vertices = {{2, 2}, {57, 2}, {57, 57}, {2, 57}};
    TriMesh full = dsm_to_mesh(dsm, poly, 100.0);
    REQUIRE(full.faces.size() > 1000);

    TriMesh slim = simplify_mesh(full, 1000);
    REQUIRE(slim.faces.size() < 1000);
    REQUIRE(slim.watertight());
    REQUIRE(slim.signed_volume() ==
            Catch::Approx(full.signed_volume()).epsilon(0.05));
}

TEST_CASE("meshes under budget pass through unchanged") {
    OrientedRect rect{10, 10, 10, 6, 0.0};
    TriMesh mesh = model_to_mesh(make_model(RoofKind::Gable, {108, 105, 0, 0}, rect, 100));
    TriMesh out = simplify_mesh(mesh, 1000);
    REQUIRE(out.faces.size() == mesh.faces.size());
    REQUIRE(out.vertices.size() == mesh.vertices.size());
}

TEST_CASE("obj round trip preserves geometry and 1-based indexing") {
    OrientedRect rect{10, 10, 14, 8, deg2rad(40.0)};
    TriMesh mesh = model_to_mesh(make_model(RoofKind::Hip, {109, 106, 3, 0}, rect, 100));
    auto p = tmp_path("roundtrip.obj");
    write_obj(p, mesh);
    TriMesh back = read_obj(p);
    REQUIRE(back.vertices.size() == mesh.vertices.size());
    REQUIRE(back.faces == mesh.faces);
    REQUIRE(back.signed_volume() == Catch::Approx(mesh.signed_volume()).margin(1e-3));

    // the file itself is v/f only with 1-based indices
    std::ifstream f(p);
    std::string line;
    int min_index = 1 << 30;
    while (std::getline(f, line)) {
        REQUIRE((line.rfind("v ", 0) == 0 || line.rfind("f ", 0) == 0));
        if (line.rfind("f ", 0) == 0) {
            std::istringstream ss(line.substr(2));
            int a, b, c;
            ss >> a >> b >> c;
            min_index = std::min({min_index, a, b, c});
        }
    }
    REQUIRE(min_index == 1);
}

TEST_CASE("append_obj offsets face indices per part") {
    OrientedRect rect{10, 10, 10, 6, 0.0};
    TriMesh part = model_to_mesh(make_model(RoofKind::Flat, {104, 104, 0, 0}, rect, 100));
    auto p = tmp_path("merged.obj");
    {
        std::ofstream f(p);
        int base = 0;
        append_obj(f, part, base);
        append_obj(f, part, base);
        REQUIRE(base == static_cast<int>(part.vertices.size()) * 2);
    }
    TriMesh merged = read_obj(p);
    REQUIRE(merged.vertices.size() == part.vertices.size() * 2);
    REQUIRE(merged.faces.size() == part.faces.size() * 2);
    REQUIRE(merged.signed_volume() == Catch::Approx(2.0 * part.signed_volume()).margin(1e-6));
}
