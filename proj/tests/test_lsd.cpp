#include <catch2/catch_amalgamated.hpp>

#include "lod2/lsd.hpp"

using namespace lod2;

namespace {

// two-tone image split by the line through (cx,cy), with a 3 px soft edge
// (binary steps alias the quantized gradient; real imagery is band limited)
RasterRGB split_image(int w, int h, double cx, double cy, double line_angle) {
    RasterRGB img(w, h);
    double nx = -std::sin(line_angle), ny = std::cos(line_angle);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            double side = (c - cx) * nx + (r - cy) * ny;
            double t = std::clamp(side / 1.5, -1.0, 1.0);  // ramp over 3 px
            auto v = static_cast<std::uint8_t>(130.0 + 90.0 * t);
            for (int b = 0; b < 3; ++b) img.at(c, r, b) = v;
        }
    return img;
}

}  // namespace

TEST_CASE("a straight intensity edge is detected at the right angle") {
    for (double deg : {0.0, 30.0, 63.0, 90.0, 120.0}) {
        RasterRGB img = split_image(64, 64, 32, 32, deg2rad(deg));
        auto lines = detect_image_line_segments(img, {0, 0, 64, 64});
        REQUIRE_FALSE(lines.empty());
        // the longest line follows the split
        const ImageLine* best = &lines[0];
        for (const auto& l : lines)
            if (l.length > best->length) best = &l;
        REQUIRE(rad2deg(angdiff_mod180(best->angle, deg2rad(deg))) < 3.0);
        REQUIRE(best->length > 30.0);
    }
}

TEST_CASE("a flat image produces no lines") {
    RasterRGB img(32, 32);
    for (auto& s : img.samples) s = 128;
    REQUIRE(detect_image_line_segments(img, {0, 0, 32, 32}).empty());
}

TEST_CASE("an empty or out-of-range region produces no lines") {
    RasterRGB img = split_image(32, 32, 16, 16, 0.0);
    REQUIRE(detect_image_line_segments(img, {10, 10, 10, 20}).empty());
    REQUIRE_FALSE(detect_image_line_segments(img, {-50, -50, 500, 500}).empty());
}

TEST_CASE("regularization rotates a nearby edge onto the detected line") {
    // square ring slightly rotated; a detected line at exactly 0 degrees nearby
    Polygon ring;
    ring.vertices = {{0, 0.5}, {40, -0.5}, {40.5, 40}, {-0.5, 40.5}};
    std::vector<ImageLine> lines{{{20, 0}, 0.0, 40.0}};
    Polygon out = regularize_with_image_lines(ring, lines, 5.0, 10.0);
    REQUIRE(out.vertices.size() == 4);
    // the bottom edge is now exactly horizontal
    double best = 1e18;
    for (size_t i = 0; i < out.vertices.size(); ++i) {
        Vec2 a = out.vertices[i], b = out.vertices[(i + 1) % out.vertices.size()];
        if (std::min(a.y, b.y) < 5.0)
            best = std::min(best, std::fabs(a.y - b.y));
    }
    REQUIRE(best < 1e-9);
}

TEST_CASE("regularization leaves far or misaligned edges alone") {
    Polygon ring;
    ring.vertices = {{0, 0}, {40, 0}, {40, 40}, {0, 40}};
    // line 20 px away and line at 45 degrees: neither applies
    std::vector<ImageLine> lines{{{20, 20}, 0.0, 40.0}, {{20, 1}, deg2rad(45.0), 40.0}};
    Polygon out = regularize_with_image_lines(ring, lines, 5.0, 10.0);
    REQUIRE(out.area() == Catch::Approx(ring.area()).margin(1e-6));
}

TEST_CASE("no detected lines returns the ring unchanged") {
    Polygon ring;
    ring.vertices = {{0, 0}, {10, 0}, {10, 10}};
    Polygon out = regularize_with_image_lines(ring, {}, 5.0, 10.0);
    REQUIRE(out.vertices.size() == 3);
}
