#pragma once

#include <array>
#include <random>
#include <vector>

#include "lod2/roof.hpp"
#include "lod2/scene.hpp"

namespace lod2 {

struct SyntheticBuilding {
    OrientedRect rect;
    RoofKind kind = RoofKind::Flat;
    RoofParams params;                       // meters, relative to world zero
    std::array<std::uint8_t, 3> color{180, 60, 60};
};

struct SyntheticSceneSpec {
    int width = 512;
    int height = 512;
    double gsd_m = 0.5;
    double ground_z = 100.0;
    std::array<std::uint8_t, 3> ground_color{90, 110, 80};
    double noise_sigma_m = 0.0;
    unsigned seed = 1;
    std::vector<SyntheticBuilding> buildings;
};

struct SyntheticScene {
    Scene scene;              // DSM with noise, flat-shaded ortho, exact classmap
    RasterF32 dsm_clean;      // noise-free reference surface
    std::vector<RoofModel> models;     // ground truth, ids follow spec order
    std::vector<Mask> footprints;      // exact per-building masks, scene sized
};

namespace detail {

/// Straightforward per-pixel roof height, written independently of the
/// library's profile evaluator so it can serve as an oracle for fitting.
inline bool naive_roof_height(const SyntheticBuilding& b, double px, double py, double gsd,
                              double& out) {
    double ct = std::cos(b.rect.theta), st = std::sin(b.rect.theta);
    double dx = px - b.rect.cx, dy = py - b.rect.cy;
    double u = dx * ct + dy * st;
    double v = -dx * st + dy * ct;
    if (std::fabs(u) > b.rect.len / 2.0 || std::fabs(v) > b.rect.wid / 2.0) return false;
    double L = b.rect.len * gsd, W = b.rect.wid * gsd;
    double x = (u + b.rect.len / 2.0) * gsd;
    double y = (v + b.rect.wid / 2.0) * gsd;
    double ze = b.params.z_eave, zr = b.params.z_ridge;
    double hipl = b.params.hipl, hipw = b.params.hipw;
    auto ratio = [](double num, double den) {
        return den <= 0.0 ? std::numeric_limits<double>::infinity() : num / den;
    };
    double s = 0.0;
    switch (b.kind) {
        case RoofKind::Flat: s = 0.0; break;
        case RoofKind::Gable:
            s = std::min(ratio(y, W / 2.0), ratio(W - y, W / 2.0));
            break;
        case RoofKind::Hip:
            s = std::min(std::min(ratio(y, W / 2.0), ratio(W - y, W / 2.0)),
                         std::min(ratio(x, hipl), ratio(L - x, hipl)));
            break;
        case RoofKind::Pyramid:
            s = std::min(std::min(ratio(y, W / 2.0), ratio(W - y, W / 2.0)),
                         std::min(ratio(x, L / 2.0), ratio(L - x, L / 2.0)));
            break;
        case RoofKind::Mansard:
            s = std::min({1.0, ratio(x, hipl), ratio(L - x, hipl), ratio(y, hipw),
                          ratio(W - y, hipw)});
            break;
    }
    s = std::clamp(s, 0.0, 1.0);
    out = ze + (zr - ze) * s;
    return true;
}

}  // namespace detail

/// Generate a deterministic ground-truth scene from scripted buildings:
/// DSM = ground plane + roof surfaces (+ optional Gaussian noise), ortho =
/// flat per-building colors, classmap = exact footprints.
inline SyntheticScene generate_scene(const SyntheticSceneSpec& spec) {
    SyntheticScene out;
    const int w = spec.width, h = spec.height;
    out.scene.ortho = RasterRGB(w, h);
    out.dsm_clean = RasterF32(w, h, static_cast<float>(spec.ground_z));
    out.scene.classmap = Mask(w, h);
    Mask owner(w, h);  // building index + 1, for overlap detection

    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            for (int band = 0; band < 3; ++band)
                out.scene.ortho.at(c, r, band) = spec.ground_color[band];

    for (size_t bi = 0; bi < spec.buildings.size(); ++bi) {
        const auto& b = spec.buildings[bi];
        Mask fp(w, h);
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c) {
                double z;
                if (!detail::naive_roof_height(b, c, r, spec.gsd_m, z)) continue;
                if (owner.at(c, r) != 0)
                    throw OverlapError("buildings " + std::to_string(owner.at(c, r) - 1) +
                                       " and " + std::to_string(bi) + " overlap");
                owner.at(c, r) = static_cast<std::uint8_t>((bi % 254) + 1);
                fp.at(c, r) = 1;
                out.scene.classmap->at(c, r) = 1;
                out.dsm_clean.at(c, r) = static_cast<float>(z);
                for (int band = 0; band < 3; ++band)
                    out.scene.ortho.at(c, r, band) = b.color[band];
            }
        out.footprints.push_back(std::move(fp));
        RoofModel gt;
        gt.rect = b.rect;
        gt.kind = b.kind;
        gt.params = b.params;
        gt.z_ground = spec.ground_z;
        gt.rmse = 0.0;
        out.models.push_back(gt);
    }

    out.scene.dsm = out.dsm_clean;
    if (spec.noise_sigma_m > 0.0) {
        std::mt19937 rng(spec.seed);
        std::normal_distribution<double> noise(0.0, spec.noise_sigma_m);
        for (auto& v : out.scene.dsm.samples) v = static_cast<float>(v + noise(rng));
    }
    return out;
}

}  // namespace lod2
