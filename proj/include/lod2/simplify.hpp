#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <queue>
#include <set>
#include <vector>

#include "lod2/mesh.hpp"

namespace lod2 {

namespace detail {

/// Symmetric 4x4 quadric, upper triangle stored.
struct Quadric {
    double m[10] = {0};

    void add_plane(double a, double b, double c, double d, double w = 1.0) {
        m[0] += w * a * a; m[1] += w * a * b; m[2] += w * a * c; m[3] += w * a * d;
        m[4] += w * b * b; m[5] += w * b * c; m[6] += w * b * d;
        m[7] += w * c * c; m[8] += w * c * d;
        m[9] += w * d * d;
    }
    Quadric& operator+=(const Quadric& o) {
        for (int i = 0; i < 10; ++i) m[i] += o.m[i];
        return *this;
    }
    double eval(const Vec3& p) const {
        return m[0] * p.x * p.x + 2 * m[1] * p.x * p.y + 2 * m[2] * p.x * p.z +
               2 * m[3] * p.x + m[4] * p.y * p.y + 2 * m[5] * p.y * p.z + 2 * m[6] * p.y +
               m[7] * p.z * p.z + 2 * m[8] * p.z + m[9];
    }
    /// Solve for the error-minimizing point; false when near-singular.
    bool optimum(Vec3& out) const {
        double a[3][4] = {{m[0], m[1], m[2], -m[3]},
                          {m[1], m[4], m[5], -m[6]},
                          {m[2], m[5], m[7], -m[8]}};
        for (int col = 0; col < 3; ++col) {
            int piv = col;
            for (int r = col + 1; r < 3; ++r)
                if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
            if (std::fabs(a[piv][col]) < 1e-9) return false;
            std::swap(a[piv], a[col]);
            for (int r = 0; r < 3; ++r) {
                if (r == col) continue;
                double f = a[r][col] / a[col][col];
                for (int k = col; k < 4; ++k) a[r][k] -= f * a[col][k];
            }
        }
        out = {a[0][3] / a[0][0], a[1][3] / a[1][1], a[2][3] / a[2][2]};
        return true;
    }
};

}  // namespace detail

/// Greedy quadric-error edge collapse until the face count is under
/// max_faces. Collapses that flip a surviving face normal are rejected;
/// boundary edges carry a stiff constraint quadric. Meshes already under
/// budget are returned unchanged.
inline TriMesh simplify_mesh(const TriMesh& input, size_t max_faces = 1000) {
    if (input.faces.size() < max_faces) return input;

    std::vector<Vec3> verts = input.vertices;
    std::vector<std::array<int, 3>> faces = input.faces;
    std::vector<char> face_dead(faces.size(), 0);
    std::vector<detail::Quadric> q(verts.size());
    std::vector<std::set<int>> vfaces(verts.size());

    auto face_plane = [&](size_t fi, double& a, double& b, double& c, double& d,
                          double& area) {
        const auto& f = faces[fi];
        Vec3 n = cross(verts[f[1]] - verts[f[0]], verts[f[2]] - verts[f[0]]);
        area = norm(n) / 2.0;
        if (area < 1e-12) { a = b = c = d = 0; return; }
        n = n * (1.0 / (2.0 * area));
        a = n.x; b = n.y; c = n.z;
        d = -dot(n, verts[f[0]]);
    };

    std::map<std::pair<int, int>, int> edge_count;
    for (size_t fi = 0; fi < faces.size(); ++fi) {
        double a, b, c, d, area;
        face_plane(fi, a, b, c, d, area);
        for (int k = 0; k < 3; ++k) {
            q[faces[fi][k]].add_plane(a, b, c, d, area);
            vfaces[faces[fi][k]].insert(static_cast<int>(fi));
            int u = faces[fi][k], v = faces[fi][(k + 1) % 3];
            edge_count[{std::min(u, v), std::max(u, v)}]++;
        }
    }
    // boundary constraint: a stiff plane through the edge, perpendicular to its face
    for (size_t fi = 0; fi < faces.size(); ++fi) {
        for (int k = 0; k < 3; ++k) {
            int u = faces[fi][k], v = faces[fi][(k + 1) % 3];
            if (edge_count[{std::min(u, v), std::max(u, v)}] != 1) continue;
            Vec3 e = verts[v] - verts[u];
            double a, b, c, d, area;
            face_plane(fi, a, b, c, d, area);
            Vec3 n = cross(e, Vec3{a, b, c});
            double len = norm(n);
            if (len < 1e-12) continue;
            n = n * (1.0 / len);
            double pd = -dot(n, verts[u]);
            double w = 1e3 * dot(e, e);
            q[u].add_plane(n.x, n.y, n.z, pd, w);
            q[v].add_plane(n.x, n.y, n.z, pd, w);
        }
    }

    struct Cand {
        double cost;
        int u, v;
        long stamp;
        Vec3 target;
        bool operator>(const Cand& o) const { return cost > o.cost; }
    };
    std::priority_queue<Cand, std::vector<Cand>, std::greater<Cand>> heap;
    std::vector<long> version(verts.size(), 0);

    auto best_target = [&](int u, int v) {
        detail::Quadric sum = q[u];
        sum += q[v];
        Vec3 cands[4];
        int n = 0;
        if (sum.optimum(cands[n])) ++n;
        cands[n++] = verts[u];
        cands[n++] = verts[v];
        cands[n++] = (verts[u] + verts[v]) * 0.5;
        Vec3 best = cands[0];
        double bc = sum.eval(cands[0]);
        for (int i = 1; i < n; ++i) {
            double cc = sum.eval(cands[i]);
            if (cc < bc) { bc = cc; best = cands[i]; }
        }
        return std::make_pair(bc, best);
    };

    auto push_edges_of = [&](int u) {
        std::set<int> nbrs;
        for (int fi : vfaces[u])
            for (int k = 0; k < 3; ++k)
                if (faces[fi][k] != u) nbrs.insert(faces[fi][k]);
        for (int v : nbrs) {
            auto [cost, target] = best_target(u, v);
            heap.push({cost, u, v, version[u] + version[v], target});
        }
    };
    for (int u = 0; u < static_cast<int>(verts.size()); ++u) push_edges_of(u);

    size_t live_faces = faces.size();
    while (live_faces >= max_faces && !heap.empty()) {
        Cand c = heap.top();
        heap.pop();
        if (version[c.u] + version[c.v] != c.stamp) continue;
        if (vfaces[c.u].empty() || vfaces[c.v].empty()) continue;

        // reject collapses that flip any surviving face
        bool ok = true;
        auto check_flip = [&](int w0) {
            for (int fi : vfaces[w0]) {
                const auto& f = faces[fi];
                bool has_u = f[0] == c.u || f[1] == c.u || f[2] == c.u;
                bool has_v = f[0] == c.v || f[1] == c.v || f[2] == c.v;
                if (has_u && has_v) continue;  // face vanishes
                Vec3 p[3], pn[3];
                for (int k = 0; k < 3; ++k) {
                    p[k] = verts[f[k]];
                    pn[k] = (f[k] == c.u || f[k] == c.v) ? c.target : verts[f[k]];
                }
                Vec3 n0 = cross(p[1] - p[0], p[2] - p[0]);
                Vec3 n1 = cross(pn[1] - pn[0], pn[2] - pn[0]);
                if (dot(n0, n1) <= 0.0 || norm(n1) < 1e-12) { ok = false; return; }
            }
        };
        check_flip(c.u);
        if (ok) check_flip(c.v);
        if (!ok) continue;

        // collapse v into u at the target position
        verts[c.u] = c.target;
        q[c.u] += q[c.v];
        for (int fi : std::vector<int>(vfaces[c.v].begin(), vfaces[c.v].end())) {
            auto& f = faces[fi];
            bool has_u = f[0] == c.u || f[1] == c.u || f[2] == c.u;
            if (has_u) {
                if (!face_dead[fi]) { face_dead[fi] = 1; --live_faces; }
                for (int k = 0; k < 3; ++k) vfaces[f[k]].erase(fi);
            } else {
                for (int k = 0; k < 3; ++k)
                    if (f[k] == c.v) f[k] = c.u;
                vfaces[c.u].insert(fi);
            }
        }
        vfaces[c.v].clear();
        ++version[c.u];
        ++version[c.v];
        push_edges_of(c.u);
    }

    TriMesh out;
    std::vector<int> remap(verts.size(), -1);
    for (size_t fi = 0; fi < faces.size(); ++fi) {
        if (face_dead[fi]) continue;
        std::array<int, 3> nf{};
        for (int k = 0; k < 3; ++k) {
            int v = faces[fi][k];
            if (remap[v] < 0) {
                remap[v] = static_cast<int>(out.vertices.size());
                out.vertices.push_back(verts[v]);
            }
            nf[k] = remap[v];
        }
        out.faces.push_back(nf);
    }
    return out;
}

}  // namespace lod2
