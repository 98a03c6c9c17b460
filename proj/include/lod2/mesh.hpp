#pragma once

#include <array>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lod2/core.hpp"
#include "lod2/geotransform.hpp"
#include "lod2/polygon.hpp"
#include "lod2/rectangle.hpp"
#include "lod2/roof.hpp"

namespace lod2 {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

/// Indexed triangle mesh; vertices in world coordinates when georeferenced.
struct TriMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> faces;

    double signed_volume() const {
        double v = 0.0;
        for (const auto& f : faces)
            v += dot(vertices[f[0]], cross(vertices[f[1]], vertices[f[2]]));
        return v / 6.0;
    }

    void flip_winding() {
        for (auto& f : faces) std::swap(f[1], f[2]);
    }

    /// Every edge incident to exactly two faces.
    bool watertight() const {
        std::map<std::pair<int, int>, int> edges;
        for (const auto& f : faces)
            for (int k = 0; k < 3; ++k) {
                int a = f[k], b = f[(k + 1) % 3];
                edges[{std::min(a, b), std::max(a, b)}]++;
            }
        for (const auto& [e, n] : edges)
            if (n != 2) return false;
        return !faces.empty();
    }
};

namespace detail {

/// Builds a mesh with vertex welding and zero-area face rejection.
struct MeshBuilder {
    TriMesh mesh;
    std::map<std::array<long long, 3>, int> welded;

    int vertex(const Vec3& p) {
        std::array<long long, 3> key{static_cast<long long>(std::llround(p.x * 1e6)),
                                     static_cast<long long>(std::llround(p.y * 1e6)),
                                     static_cast<long long>(std::llround(p.z * 1e6))};
        auto it = welded.find(key);
        if (it != welded.end()) return it->second;
        int id = static_cast<int>(mesh.vertices.size());
        mesh.vertices.push_back(p);
        welded.emplace(key, id);
        return id;
    }

    void tri(int a, int b, int c) {
        if (a == b || b == c || a == c) return;
        Vec3 n = cross(mesh.vertices[b] - mesh.vertices[a],
                       mesh.vertices[c] - mesh.vertices[a]);
        if (norm(n) < 1e-9) return;
        mesh.faces.push_back({a, b, c});
    }

    /// Triangle oriented so its normal points away from `center`.
    void tri_outward(int a, int b, int c, const Vec3& center) {
        if (a == b || b == c || a == c) return;
        Vec3 n = cross(mesh.vertices[b] - mesh.vertices[a],
                       mesh.vertices[c] - mesh.vertices[a]);
        if (norm(n) < 1e-9) return;
        Vec3 fc = (mesh.vertices[a] + mesh.vertices[b] + mesh.vertices[c]) * (1.0 / 3.0);
        if (dot(n, fc - center) >= 0.0)
            mesh.faces.push_back({a, b, c});
        else
            mesh.faces.push_back({a, c, b});
    }

    void quad_outward(int a, int b, int c, int d, const Vec3& center) {
        tri_outward(a, b, c, center);
        tri_outward(a, c, d, center);
    }
};

}  // namespace detail

// ---- regular/irregular gate ---------------------------------------------------

/// Pixel IoU between the union of rasterized rectangles and the segment mask.
/// Rectangles and mask share the same pixel frame as `mask`.
inline double iou_rects_vs_mask(const std::vector<OrientedRect>& rects, const Mask& mask) {
    size_t inter = 0, uni = 0;
    bool any_rect = false;
    for (int r = 0; r < mask.height; ++r)
        for (int c = 0; c < mask.width; ++c) {
            bool in_rect = false;
            for (const auto& rc : rects)
                if (rc.contains({static_cast<double>(c), static_cast<double>(r)})) {
                    in_rect = true;
                    break;
                }
            bool in_mask = mask.at(c, r) != 0;
            any_rect |= in_rect;
            if (in_rect && in_mask) ++inter;
            if (in_rect || in_mask) ++uni;
        }
    if (uni == 0 && !any_rect) throw EmptyInputs("both rectangle union and mask are empty");
    return uni ? static_cast<double>(inter) / uni : 0.0;
}

enum class ShapeClass { Regular, Irregular };

/// A building is irregular when the rectangle/mask IoU is strictly below the
/// IoU gate AND the mask area strictly exceeds the area gate.
inline ShapeClass irregular_decision(double iou, long area_px, double iou_thresh = 0.65,
                                     long area_thresh = 5000) {
    return (iou < iou_thresh && area_px > area_thresh) ? ShapeClass::Irregular
                                                       : ShapeClass::Regular;
}

// ---- parametric model meshing ---------------------------------------------------

/// Watertight mesh for a fitted roof model: roof facets, vertical walls down
/// to z_ground, flat bottom. x,y from the rectangle pose (optionally mapped
/// through the georeference), z in meters.
inline TriMesh model_to_mesh(const RoofModel& model,
                             const std::optional<GeoTransform>& geo = std::nullopt,
                             double gsd = 1.0) {
    const OrientedRect& rect = model.rect;
    if (rect.len <= 0.0 || rect.wid <= 0.0) throw InvalidModel("empty rectangle");
    const RoofParams& p = model.params;
    if (p.z_ridge < p.z_eave) throw InvalidModel("z_ridge below z_eave");
    if (p.z_eave < model.z_ground) throw InvalidModel("eave below ground");

    const double zg = model.z_ground, ze = p.z_eave, zr = p.z_ridge;
    const double hl = p.hipl / gsd;  // insets back to pixel units
    const double hw = p.hipw / gsd;
    const double L = rect.len, W = rect.wid;

    auto at = [&](double u, double v, double z) {
        Vec2 g = rect.to_global({u, v});
        return Vec3{g.x, g.y, z};
    };

    detail::MeshBuilder mb;
    Vec3 center = at(0, 0, (zg + zr) / 2.0);

    // base and eave rings, local CCW order
    const double su[4] = {-0.5, 0.5, 0.5, -0.5};
    const double sv[4] = {-0.5, -0.5, 0.5, 0.5};
    int B[4], E[4];
    for (int i = 0; i < 4; ++i) {
        B[i] = mb.vertex(at(su[i] * L, sv[i] * W, zg));
        E[i] = mb.vertex(at(su[i] * L, sv[i] * W, ze));
    }
    for (int i = 0; i < 4; ++i) {  // walls
        int j = (i + 1) % 4;
        mb.quad_outward(B[i], B[j], E[j], E[i], center);
    }
    mb.quad_outward(B[0], B[1], B[2], B[3], center);  // bottom

    switch (model.kind) {
        case RoofKind::Flat: {
            mb.quad_outward(E[0], E[1], E[2], E[3], center);
            break;
        }
        case RoofKind::Gable: {
            int R0 = mb.vertex(at(-L / 2.0, 0.0, zr));
            int R1 = mb.vertex(at(L / 2.0, 0.0, zr));
            mb.quad_outward(E[0], E[1], R1, R0, center);
            mb.quad_outward(E[3], E[2], R1, R0, center);
            mb.tri_outward(E[0], E[3], R0, center);
            mb.tri_outward(E[1], E[2], R1, center);
            break;
        }
        case RoofKind::Hip:
        case RoofKind::Pyramid: {
            double inset = model.kind == RoofKind::Pyramid ? L / 2.0 : hl;
            int R0 = mb.vertex(at(-L / 2.0 + inset, 0.0, zr));
            int R1 = mb.vertex(at(L / 2.0 - inset, 0.0, zr));
            mb.quad_outward(E[0], E[1], R1, R0, center);
            mb.quad_outward(E[3], E[2], R1, R0, center);
            mb.tri_outward(E[0], E[3], R0, center);
            mb.tri_outward(E[1], E[2], R1, center);
            break;
        }
        case RoofKind::Mansard: {
            double tu = std::max(0.0, L / 2.0 - hl);
            double tv = std::max(0.0, W / 2.0 - hw);
            int T[4];
            for (int i = 0; i < 4; ++i) T[i] = mb.vertex(at(su[i] * 2.0 * tu, sv[i] * 2.0 * tv, zr));
            mb.quad_outward(T[0], T[1], T[2], T[3], center);
            for (int i = 0; i < 4; ++i) {
                int j = (i + 1) % 4;
                mb.quad_outward(E[i], E[j], T[j], T[i], center);
            }
            break;
        }
    }

    TriMesh mesh = std::move(mb.mesh);
    if (geo)
        for (auto& v : mesh.vertices) {
            Vec2 w = pixel_to_world(*geo, {v.x, v.y});
            v.x = w.x;
            v.y = w.y;
        }
    if (mesh.signed_volume() < 0.0) mesh.flip_winding();
    return mesh;
}

// ---- direct DSM meshing -----------------------------------------------------

namespace detail {

inline bool point_in_polygon(const Polygon& poly, Vec2 p) {
    bool in = false;
    const auto& v = poly.vertices;
    for (size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
        if ((v[i].y > p.y) != (v[j].y > p.y) &&
            p.x < (v[j].x - v[i].x) * (p.y - v[i].y) / (v[j].y - v[i].y) + v[i].x)
            in = !in;
    }
    return in;
}

}  // namespace detail

/// Triangulate the DSM surface inside a polygon footprint (two triangles per
/// grid cell whose four pixel-center corners all lie inside), with vertical
/// boundary walls and a fanned bottom at z_ground.
inline TriMesh dsm_to_mesh(const RasterF32& dsm, const Polygon& polygon, double z_ground) {
    double xmin = 1e18, xmax = -1e18, ymin = 1e18, ymax = -1e18;
    for (const Vec2& p : polygon.vertices) {
        xmin = std::min(xmin, p.x); xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y); ymax = std::max(ymax, p.y);
    }
    int x0 = std::max(0, static_cast<int>(std::floor(xmin)));
    int y0 = std::max(0, static_cast<int>(std::floor(ymin)));
    int x1 = std::min(dsm.width - 1, static_cast<int>(std::ceil(xmax)));
    int y1 = std::min(dsm.height - 1, static_cast<int>(std::ceil(ymax)));

    auto inside = [&](int c, int r) {
        return c >= x0 && c <= x1 && r >= y0 && r <= y1 && dsm.valid(c, r) &&
               detail::point_in_polygon(polygon, {static_cast<double>(c), static_cast<double>(r)});
    };

    detail::MeshBuilder mb;
    auto top = [&](int c, int r) {
        return mb.vertex({static_cast<double>(c), static_cast<double>(r),
                          static_cast<double>(dsm.at(c, r))});
    };

    // top faces: wind so the boundary loop below comes out consistently
    std::map<std::pair<int, int>, int> edge_use;
    std::map<std::pair<int, int>, std::pair<int, int>> directed;  // boundary chaining
    size_t cells = 0;
    for (int r = y0; r < y1; ++r)
        for (int c = x0; c < x1; ++c) {
            if (!(inside(c, r) && inside(c + 1, r) && inside(c, r + 1) && inside(c + 1, r + 1)))
                continue;
            ++cells;
            int a = top(c, r), b = top(c + 1, r), d = top(c + 1, r + 1), e = top(c, r + 1);
            mb.tri(a, b, d);
            mb.tri(a, d, e);
        }
    if (cells == 0) throw EmptyFootprint("no grid cell lies fully inside the polygon");

    size_t top_faces = mb.mesh.faces.size();
    for (size_t fi = 0; fi < top_faces; ++fi)
        for (int k = 0; k < 3; ++k) {
            int a = mb.mesh.faces[fi][k], b = mb.mesh.faces[fi][(k + 1) % 3];
            edge_use[{std::min(a, b), std::max(a, b)}]++;
        }
    // directed boundary edges, as oriented in their single face
    for (size_t fi = 0; fi < top_faces; ++fi)
        for (int k = 0; k < 3; ++k) {
            int a = mb.mesh.faces[fi][k], b = mb.mesh.faces[fi][(k + 1) % 3];
            if (edge_use[{std::min(a, b), std::max(a, b)}] == 1) directed[{a, b}] = {a, b};
        }

    // walls
    std::map<int, int> next_of;
    for (const auto& [e, _] : directed) next_of[e.first] = e.second;
    for (const auto& [e, _] : directed) {
        int a = e.first, b = e.second;
        const Vec3& pa = mb.mesh.vertices[a];
        const Vec3& pb = mb.mesh.vertices[b];
        int ag = mb.vertex({pa.x, pa.y, z_ground});
        int bg = mb.vertex({pb.x, pb.y, z_ground});
        mb.tri(b, a, ag);
        mb.tri(b, ag, bg);
    }

    // bottom: fan each boundary loop at z_ground
    std::map<int, bool> visited;
    for (const auto& [start, _] : next_of) {
        if (visited[start]) continue;
        std::vector<int> loop;
        int cur = start;
        while (!visited[cur]) {
            visited[cur] = true;
            loop.push_back(cur);
            auto it = next_of.find(cur);
            if (it == next_of.end()) break;
            cur = it->second;
        }
        if (loop.size() < 3) continue;
        std::vector<int> ground;
        ground.reserve(loop.size());
        for (int vi : loop) {
            const Vec3& p = mb.mesh.vertices[vi];
            ground.push_back(mb.vertex({p.x, p.y, z_ground}));
        }
        // plain fan, keeping zero-area triangles: they add no volume but are
        // needed so boundary edges along straight runs pair up with the walls
        for (size_t i = 1; i + 1 < ground.size(); ++i) {
            int a = ground[0], b = ground[i + 1], c2 = ground[i];
            if (a != b && b != c2 && a != c2) mb.mesh.faces.push_back({a, b, c2});
        }
    }

    TriMesh mesh = std::move(mb.mesh);
    if (mesh.signed_volume() < 0.0) mesh.flip_winding();
    return mesh;
}

// ---- OBJ serialization ------------------------------------------------------

inline void write_obj(const std::string& path, const TriMesh& mesh) {
    std::ofstream f(path);
    if (!f) throw IoFailure("cannot open for writing: " + path);
    char buf[128];
    for (const auto& v : mesh.vertices) {
        std::snprintf(buf, sizeof(buf), "v %.6f %.6f %.6f\n", v.x, v.y, v.z);
        f << buf;
    }
    for (const auto& fc : mesh.faces)
        f << "f " << fc[0] + 1 << " " << fc[1] + 1 << " " << fc[2] + 1 << "\n";
    if (!f) throw IoFailure("write failed: " + path);
}

inline void append_obj(std::ostream& f, const TriMesh& mesh, int& vertex_base) {
    char buf[128];
    for (const auto& v : mesh.vertices) {
        std::snprintf(buf, sizeof(buf), "v %.6f %.6f %.6f\n", v.x, v.y, v.z);
        f << buf;
    }
    for (const auto& fc : mesh.faces)
        f << "f " << fc[0] + 1 + vertex_base << " " << fc[1] + 1 + vertex_base << " "
          << fc[2] + 1 + vertex_base << "\n";
    vertex_base += static_cast<int>(mesh.vertices.size());
}

inline TriMesh read_obj(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoFailure("cannot open for reading: " + path);
    TriMesh mesh;
    std::string tag;
    while (f >> tag) {
        if (tag == "v") {
            Vec3 v;
            f >> v.x >> v.y >> v.z;
            mesh.vertices.push_back(v);
        } else if (tag == "f") {
            std::array<int, 3> fc{};
            f >> fc[0] >> fc[1] >> fc[2];
            for (auto& i : fc) --i;
            mesh.faces.push_back(fc);
        } else {
            std::string rest;
            std::getline(f, rest);
        }
    }
    return mesh;
}

}  // namespace lod2
