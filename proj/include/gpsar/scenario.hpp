#ifndef GPSAR_SCENARIO_HPP
#define GPSAR_SCENARIO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "gpsar/analysis.hpp"
#include "gpsar/detection.hpp"
#include "gpsar/motion.hpp"
#include "gpsar/signal.hpp"

namespace gpsar {

struct MotionConfig {
    bool enabled = false;  // off: imaging runs on the ground-truth trajectory
    ImuSpec imu;
    StationSpec station;
    Transform t_bp;   // body -> prism
    Transform t_ba1;  // body -> antenna 1 (tx)
    Transform t_ba2;  // body -> antenna 2 (rx)
};

/// Full experiment description; JSON on disk (schema in the README).
struct Scenario {
    int version = 1;
    std::uint64_t seed = 0;
    RadarParams radar;
    std::vector<CircleSpec> apertures;
    Scene scene;
    GridSpec grid;
    MotionConfig motion;
    CfarParams cfar;
    double group_radius = 0.15;  // m
    int pad_factor = 16;
    std::vector<BoxRegion> boxes;  // depth-profile extraction regions

    void validate() const;  // throws std::invalid_argument naming the field
};

/// Parse from JSON text. Syntax errors surface with line/column; semantic
/// errors name the offending field. Unknown keys are rejected.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

/// Canonical JSON emission; parse(emit(s)) reproduces s.
std::string emit_scenario(const Scenario& scenario);

}  // namespace gpsar

#endif
