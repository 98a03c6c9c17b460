#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "lod2/formats.hpp"
#include "lod2/scene.hpp"

namespace fs = std::filesystem;
using namespace lod2;

namespace {

std::string tmp_path(const std::string& name) {
    static const std::string dir = [] {
        auto d = fs::temp_directory_path() / "lod2_fmt_tests";
        fs::create_directories(d);
        return d.string();
    }();
    return dir + "/" + name;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    f << text;
}

}  // namespace

TEST_CASE("ppm round trip preserves every byte") {
    std::mt19937 rng(1);
    RasterRGB img(17, 9);
    for (auto& s : img.samples) s = static_cast<std::uint8_t>(rng());
    auto p = tmp_path("rt.ppm");
    write_ppm(p, img);
    RasterRGB back = read_ppm(p);
    REQUIRE(back.width == img.width);
    REQUIRE(back.height == img.height);
    REQUIRE(back.samples == img.samples);
}

TEST_CASE("ppm rejects wrong magic and truncated data") {
    auto bad = tmp_path("bad.ppm");
    write_text(bad, "P5\n2 2\n255\nxxxx");
    REQUIRE_THROWS_AS(read_ppm(bad), MalformedFile);

    auto trunc = tmp_path("trunc.ppm");
    write_text(trunc, "P6\n4 4\n255\nshort");
    try {
        read_ppm(trunc);
        FAIL("expected MalformedFile");
    } catch (const MalformedFile& e) {
        REQUIRE(e.offset > 0);  // offset points into the pixel block
    }
}

TEST_CASE("ppm accepts comments in the header") {
    auto p = tmp_path("comment.ppm");
    write_text(p, "P6\n# a comment\n2 1\n255\nabcdef");
    RasterRGB img = read_ppm(p);
    REQUIRE(img.width == 2);
    REQUIRE(img.at(0, 0, 0) == 'a');
}

TEST_CASE("pgm round trip and maxval validation") {
    Mask m(5, 4);
    m.at(2, 1) = 255;
    m.at(4, 3) = 7;
    auto p = tmp_path("rt.pgm");
    write_pgm(p, m);
    REQUIRE(read_pgm(p).samples == m.samples);

    auto bad = tmp_path("maxval.pgm");
    write_text(bad, "P5\n2 2\n65535\n....");
    REQUIRE_THROWS_AS(read_pgm(bad), MalformedFile);
}

TEST_CASE("ascii grid round trips within 1e-4") {
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> h(50.0, 400.0);
    RasterF32 g(13, 7);
    for (auto& s : g.samples) s = static_cast<float>(h(rng));
    g.at(3, 2) = g.nodata;
    auto p = tmp_path("rt.asc");
    write_asc(p, g);
    RasterF32 back = read_asc(p);
    REQUIRE(back.width == g.width);
    REQUIRE(back.height == g.height);
    REQUIRE(back.nodata == g.nodata);
    for (size_t i = 0; i < g.samples.size(); ++i)
        REQUIRE(std::fabs(back.samples[i] - g.samples[i]) <= 1e-4);
    REQUIRE_FALSE(back.valid(3, 2));
}

TEST_CASE("ascii grid header errors carry byte offsets") {
    auto bad = tmp_path("bad.asc");
    write_text(bad, "ncols 2\nnrows 2\nbogus_key 1\n1 2\n3 4\n");
    REQUIRE_THROWS_AS(read_asc(bad), MalformedFile);

    auto trunc = tmp_path("trunc.asc");
    write_text(trunc, "ncols 3\nnrows 3\n1 2 3\n4 5\n");
    try {
        read_asc(trunc);
        FAIL("expected MalformedFile");
    } catch (const MalformedFile& e) {
        REQUIRE(e.offset >= 16);
    }
}

TEST_CASE("world file round trip and world/pixel inversion to 1e-9") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> sz(0.1, 2.0), rot(-0.05, 0.05), org(-1e5, 1e5);
    for (int trial = 0; trial < 20; ++trial) {
        GeoTransform g;
        g.pixel_size_x = sz(rng);
        g.pixel_size_y = -sz(rng);
        g.rot_x = rot(rng);
        g.rot_y = rot(rng);
        g.origin_x = org(rng);
        g.origin_y = org(rng);
        auto p = tmp_path("rt.wld");
        write_worldfile(p, g);
        GeoTransform back = read_worldfile(p);
        REQUIRE(back.pixel_size_x == Catch::Approx(g.pixel_size_x).margin(1e-10));
        REQUIRE(back.origin_y == Catch::Approx(g.origin_y).margin(1e-9));

        std::uniform_real_distribution<double> px(-500.0, 500.0);
        for (int i = 0; i < 50; ++i) {
            Vec2 p0{px(rng), px(rng)};
            Vec2 p1 = world_to_pixel(back, pixel_to_world(back, p0));
            REQUIRE(std::fabs(p1.x - p0.x) < 1e-9);
            REQUIRE(std::fabs(p1.y - p0.y) < 1e-9);
        }
    }
}

TEST_CASE("world file with fewer than six lines is rejected") {
    auto p = tmp_path("short.wld");
    write_text(p, "0.5\n0\n0\n-0.5\n");
    REQUIRE_THROWS_AS(read_worldfile(p), MalformedFile);
}

TEST_CASE("singular georeference is rejected") {
    REQUIRE_THROWS_AS(world_to_pixel(GeoTransform{0, 0, 0, 0, 0, 0}, Vec2{1, 1}),
                      SingularTransform);
    auto p = tmp_path("singular.wld");
    write_text(p, "0\n0\n0\n0\n10\n20\n");
    REQUIRE_THROWS_AS(read_worldfile(p), MalformedFile);
}

TEST_CASE("wkt roads parse and validate") {
    auto p = tmp_path("roads.wkt");
    write_text(p, "LINESTRING (0 0, 10 0, 10 5)\n\nLINESTRING (3.5 -2, 4 7)\n");
    RoadNetwork net = read_wkt_roads(p);
    REQUIRE(net.polylines.size() == 2);
    REQUIRE(net.polylines[0].size() == 3);
    REQUIRE(net.polylines[1][0].x == Catch::Approx(3.5));

    write_text(p, "POINT (1 2)\n");
    REQUIRE_THROWS_AS(read_wkt_roads(p), MalformedFile);
    write_text(p, "LINESTRING (1 2)\n");
    REQUIRE_THROWS_AS(read_wkt_roads(p), MalformedFile);
    write_text(p, "LINESTRING (1 2, 1 2, 3 4)\n");
    REQUIRE_THROWS_AS(read_wkt_roads(p), MalformedFile);
}

TEST_CASE("load_scene validates dimensions and class values") {
    RasterRGB img(8, 6);
    RasterF32 dsm(8, 6, 100.0f);
    auto pi = tmp_path("s.ppm");
    auto pd = tmp_path("s.asc");
    write_ppm(pi, img);
    write_asc(pd, dsm);

    SECTION("classmap 255 normalizes to 1") {
        Mask cm(8, 6);
        cm.at(1, 1) = 255;
        auto pc = tmp_path("s.pgm");
        write_pgm(pc, cm);
        Scene s = load_scene(pi, pd, pc);
        REQUIRE(s.classmap->at(1, 1) == 1);
    }
    SECTION("unexpected class value is malformed") {
        Mask cm(8, 6);
        cm.at(2, 2) = 7;
        auto pc = tmp_path("s7.pgm");
        write_pgm(pc, cm);
        REQUIRE_THROWS_AS(load_scene(pi, pd, pc), MalformedFile);
    }
    SECTION("dsm size mismatch") {
        RasterF32 small(4, 3, 100.0f);
        auto ps = tmp_path("small.asc");
        write_asc(ps, small);
        REQUIRE_THROWS_AS(load_scene(pi, ps), DimensionMismatch);
    }
    SECTION("roads require a georeference") {
        auto pr = tmp_path("s.wkt");
        write_text(pr, "LINESTRING (0 0, 1 1)\n");
        REQUIRE_THROWS_AS(load_scene(pi, pd, "", pr, ""), MissingGeoref);
    }
}
