#ifndef GPSAR_ANALYSIS_HPP
#define GPSAR_ANALYSIS_HPP

#include <optional>
#include <string>
#include <vector>

#include "gpsar/imaging.hpp"

namespace gpsar {

/// Axis-aligned box on the ground plane, world coordinates.
struct BoxRegion {
    double cx = 0.0, cy = 0.0;  // m
    double hx = 0.25, hy = 0.25;  // m, half extents
};

struct TargetAmplitude {
    double amplitude_db = 0.0;  // relative to the supplied reference
    double x = 0.0, y = 0.0;    // m, location of the box maximum
};

struct DepthProfile {
    /// (z, amplitude) pairs, z strictly decreasing from z_top to z_bottom.
    std::vector<std::pair<double, double>> samples;  // m, dB
};

/// Maximum magnitude inside the box, regardless of target visibility.
/// reference is the linear magnitude mapped to 0 dB (e.g. the volume
/// maximum). Throws if the box does not overlap the grid.
TargetAmplitude extract_target_amplitude(const ComplexPlane& plane, const GridSpec& grid,
                                         const BoxRegion& box, double reference = 1.0);

/// Box maximum per focus plane, assembled over z.
DepthProfile depth_profile(const ImageVolume& volume, const BoxRegion& box);

/// z of the maximum amplitude; ties break toward shallower z.
double estimate_depth(const DepthProfile& profile);

/// Histogram of per-pixel dB magnitudes over [lo_db, hi_db); out-of-range
/// pixels clamp into the edge bins so counts always sum to the pixel count.
/// reference is the linear magnitude mapped to 0 dB.
std::vector<std::size_t> amplitude_histogram(const ComplexPlane& plane, int bins,
                                             double lo_db, double hi_db,
                                             double reference);

double volume_peak_magnitude(const ImageVolume& volume);

// CSV emitters
void write_depth_profile_csv(const std::string& path, const DepthProfile& profile);
void write_histogram_csv(const std::string& path, const std::vector<std::size_t>& counts,
                         double lo_db, double hi_db);

}  // namespace gpsar

#endif
