#include <catch2/catch_amalgamated.hpp>

#include "lod2/roads.hpp"

using namespace lod2;

namespace {

GeoTransform north_up(double gsd = 0.5, double ox = 1000.0, double oy = 2000.0) {
    GeoTransform g;
    g.pixel_size_x = gsd;
    g.pixel_size_y = -gsd;
    g.origin_x = ox;
    g.origin_y = oy;
    return g;
}

}  // namespace

TEST_CASE("nearest road segment respects the distance gate") {
    GeoTransform geo = north_up();
    RoadNetwork roads;
    roads.polylines.push_back({{1000, 1990}, {1050, 1990}});   // 10 m south of origin row
    roads.polylines.push_back({{1000, 1900}, {1050, 1900}});   // 100 m away

    OrientedRect rect{0, 0, 10, 6, 0.0};  // pixel (0,0) -> world (1000, 2000)
    auto hit = nearest_road_segment(rect, roads, geo, 30.0);
    REQUIRE(hit.has_value());
    REQUIRE(hit->polyline == 0);
    REQUIRE(hit->distance_m == Catch::Approx(10.0));

    REQUIRE_FALSE(nearest_road_segment(rect, roads, geo, 5.0).has_value());
}

TEST_CASE("ties break toward the lowest polyline and segment index") {
    GeoTransform geo = north_up(1.0, 0.0, 0.0);
    RoadNetwork roads;
    roads.polylines.push_back({{-5, 10}, {5, 10}});
    roads.polylines.push_back({{-5, -10}, {5, -10}});  // same distance from the center

    OrientedRect rect{0, 0, 4, 4, 0.0};
    auto hit = nearest_road_segment(rect, roads, geo, 30.0);
    REQUIRE(hit.has_value());
    REQUIRE(hit->polyline == 0);
}

TEST_CASE("road angle is expressed in the pixel frame under a y flip") {
    GeoTransform geo = north_up(0.5, 0.0, 0.0);  // y axis flips world -> pixel
    RoadSegmentRef road;
    road.a = {0.0, 0.0};
    road.b = {10.0, 10.0};  // 45 degrees in world coordinates
    double ang = road_angle_in_pixels(road, geo);
    // world north-east becomes pixel south-east: -45 degrees, folded to 135
    REQUIRE(rad2deg(ang) == Catch::Approx(135.0).margin(1e-9));
}

TEST_CASE("rectangle orientation snaps only within tolerance") {
    OrientedRect rect{50, 50, 40, 20, deg2rad(5.0)};

    OrientedRect same = snap_rect_orientation(rect, deg2rad(30.0), 10.0, {});
    REQUIRE(same.theta == rect.theta);  // 25 degrees apart: untouched

    OrientedRect snapped = snap_rect_orientation(rect, deg2rad(2.0), 10.0, {});
    REQUIRE(rad2deg(snapped.theta) == Catch::Approx(2.0).margin(1e-9));
}

TEST_CASE("snapping picks the mod-90 representative nearest the rectangle") {
    OrientedRect rect{50, 50, 40, 20, deg2rad(88.0)};
    // road at 1 degree: mod-90 difference is 3 degrees; nearest representative is 91
    OrientedRect out = snap_rect_orientation(rect, deg2rad(1.0), 10.0, {});
    REQUIRE(rad2deg(out.theta) == Catch::Approx(91.0).margin(1e-9));
}

TEST_CASE("snapping refits the extent from mask pixels") {
    // pixels of an axis-aligned 21x11 block; rectangle starts slightly rotated
    std::vector<Vec2> pts;
    for (int r = 40; r <= 50; ++r)
        for (int c = 30; c <= 50; ++c) pts.push_back({static_cast<double>(c), static_cast<double>(r)});
    OrientedRect rect{40.2, 44.8, 22.5, 12.5, deg2rad(4.0)};
    OrientedRect out = snap_rect_orientation(rect, 0.0, 10.0, pts);
    REQUIRE(out.theta == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(out.cx == Catch::Approx(40.0).margin(1e-9));
    REQUIRE(out.cy == Catch::Approx(45.0).margin(1e-9));
    REQUIRE(out.len == Catch::Approx(21.0).margin(1e-9));
    REQUIRE(out.wid == Catch::Approx(11.0).margin(1e-9));
}
