#pragma once

#include <cmath>

#include "lod2/core.hpp"

namespace lod2 {

/// World-file affine georeference. Maps pixel (col,row) of the top-left
/// pixel *center* to world coordinates:
///   wx = pixel_size_x*col + rot_y*row + origin_x
///   wy = rot_x*col + pixel_size_y*row + origin_y
/// Field order follows the 6-line world file: A, D, B, E, C, F.
struct GeoTransform {
    double pixel_size_x = 1.0;  // A
    double rot_x = 0.0;         // D
    double rot_y = 0.0;         // B
    double pixel_size_y = -1.0; // E (negative for north-up)
    double origin_x = 0.0;      // C
    double origin_y = 0.0;      // F

    double det() const { return pixel_size_x * pixel_size_y - rot_y * rot_x; }
};

inline Vec2 pixel_to_world(const GeoTransform& g, Vec2 px) {
    return {g.pixel_size_x * px.x + g.rot_y * px.y + g.origin_x,
            g.rot_x * px.x + g.pixel_size_y * px.y + g.origin_y};
}

inline Vec2 world_to_pixel(const GeoTransform& g, Vec2 w) {
    double d = g.det();
    if (std::fabs(d) < 1e-300)
        throw SingularTransform("georeference linear part is not invertible");
    double dx = w.x - g.origin_x;
    double dy = w.y - g.origin_y;
    return {(g.pixel_size_y * dx - g.rot_y * dy) / d,
            (-g.rot_x * dx + g.pixel_size_x * dy) / d};
}

}  // namespace lod2
