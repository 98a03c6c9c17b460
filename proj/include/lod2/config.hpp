#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "lod2/core.hpp"

namespace lod2 {

/// Reconstruction parameters. The four headline thresholds are range-checked
/// against their documented intervals; the rest are engineering defaults that
/// only produce warnings when set far from their defaults.
struct Config {
    // headline thresholds, defaults {90, 10, 0.5, 0.1}
    double T_l = 90.0;   // px,  orientation / short-line threshold, [45, 150]
    double T_d = 10.0;   // RGB, rectangle color-difference gate,    [6, 20]
    double T_h1 = 0.5;   // m,   rectangle mean-height gate,         [0.5, 1.5]
    double T_h2 = 0.1;   // m,   shared-edge height-gap gate,        [0.1, 0.3]

    // polygon extraction
    double epsilon_dp_px = 2.0;
    double merge_offset_px = 3.0;

    // decomposition
    double grad_threshold_m_per_px = 1.0;
    double coverage_stop = 0.95;

    // road refinement
    double road_d_max_m = 30.0;
    double road_tol_deg = 10.0;

    // fitting
    double z_step_m = 0.25;

    // irregular gate and meshing
    double iou_thresh = 0.65;
    long area_thresh_px = 5000;
    size_t max_faces = 1000;

    // segmentation
    size_t min_area_px = 50;
    double fallback_min_height_m = 2.0;

    int jobs = 1;
};

struct RangeSpec {
    const char* name;
    double lo, hi;
    double Config::* field;
};

inline const std::vector<RangeSpec>& config_ranges() {
    static const std::vector<RangeSpec> r = {
        {"T_l", 45.0, 150.0, &Config::T_l},
        {"T_d", 6.0, 20.0, &Config::T_d},
        {"T_h1", 0.5, 1.5, &Config::T_h1},
        {"T_h2", 0.1, 0.3, &Config::T_h2},
    };
    return r;
}

/// Range-check the headline thresholds (inclusive bounds) and collect
/// warnings for engineering parameters far from their defaults.
inline Config validate_config(const Config& raw, std::vector<std::string>* warnings = nullptr) {
    for (const auto& rs : config_ranges()) {
        double v = raw.*(rs.field);
        if (!(v >= rs.lo && v <= rs.hi)) {
            char buf[128];
            std::snprintf(buf, sizeof(buf), "%s = %g out of range [%g, %g]", rs.name, v,
                          rs.lo, rs.hi);
            throw ConfigOutOfRange(buf);
        }
    }
    const Config def;
    auto warn_if_far = [&](const char* name, double v, double d) {
        if (warnings && d != 0.0 && (v < d / 4.0 || v > d * 4.0))
            warnings->push_back(std::string(name) + " = " + std::to_string(v) +
                                " is far from its default " + std::to_string(d));
    };
    warn_if_far("epsilon_dp_px", raw.epsilon_dp_px, def.epsilon_dp_px);
    warn_if_far("grad_threshold_m_per_px", raw.grad_threshold_m_per_px,
                def.grad_threshold_m_per_px);
    warn_if_far("road_d_max_m", raw.road_d_max_m, def.road_d_max_m);
    warn_if_far("road_tol_deg", raw.road_tol_deg, def.road_tol_deg);
    warn_if_far("z_step_m", raw.z_step_m, def.z_step_m);
    if (raw.epsilon_dp_px <= 0.0) throw ConfigOutOfRange("epsilon_dp_px must be positive");
    if (raw.jobs < 1) throw ConfigOutOfRange("jobs must be >= 1");
    return raw;
}

}  // namespace lod2
