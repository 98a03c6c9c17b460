#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace lod2 {

// ---- error types ----------------------------------------------------------

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error { using Error::Error; };
struct MissingGeoref     : Error { using Error::Error; };
struct MalformedFile     : Error {
    MalformedFile(const std::string& what, long byte_offset)
        : Error(what + " (byte " + std::to_string(byte_offset) + ")"),
          offset(byte_offset) {}
    long offset;
};
struct SingularTransform : Error { using Error::Error; };
struct IoFailure         : Error { using Error::Error; };
struct DegeneratePolygon : Error { using Error::Error; };
struct NotAdjacent       : Error { using Error::Error; };
struct InvalidParams     : Error { using Error::Error; };
struct InsufficientData  : Error { using Error::Error; };
struct InvalidModel      : Error { using Error::Error; };
struct EmptyFootprint    : Error { using Error::Error; };
struct EmptyInputs       : Error { using Error::Error; };
struct EmptyReference    : Error { using Error::Error; };
struct OverlapError      : Error { using Error::Error; };
struct ConfigOutOfRange  : Error { using Error::Error; };
struct InputTooLarge     : Error { using Error::Error; };

// ---- small geometry -------------------------------------------------------

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }

constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

/// Fold an angle into [0, pi) (undirected line angle).
inline double fold_pi(double a) {
    a = std::fmod(a, kPi);
    if (a < 0.0) a += kPi;
    return a;
}

/// Fold an angle into [0, pi/2) (orientation modulo 90 degrees).
inline double fold_half_pi(double a) {
    a = std::fmod(a, kPi / 2.0);
    if (a < 0.0) a += kPi / 2.0;
    return a;
}

/// Smallest absolute difference between two orientations modulo 90 degrees.
inline double angdiff_mod90(double a, double b) {
    double d = std::fabs(fold_half_pi(a) - fold_half_pi(b));
    return std::min(d, kPi / 2.0 - d);
}

/// Smallest absolute difference between two line angles modulo 180 degrees.
inline double angdiff_mod180(double a, double b) {
    double d = std::fabs(fold_pi(a) - fold_pi(b));
    return std::min(d, kPi - d);
}

}  // namespace lod2
