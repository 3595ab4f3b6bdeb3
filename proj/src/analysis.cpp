#include "gpsar/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace gpsar {

namespace {

struct IndexBox {
    int i0, i1, j0, j1;  // inclusive
};

IndexBox clip_box(const GridSpec& grid, const BoxRegion& box) {
    if (box.hx <= 0.0 || box.hy <= 0.0)
        throw std::invalid_argument("BoxRegion: half extents must be positive");
    const int i0 = static_cast<int>(std::ceil((box.cx - box.hx - grid.x0) / grid.dx));
    const int i1 = static_cast<int>(std::floor((box.cx + box.hx - grid.x0) / grid.dx));
    const int j0 = static_cast<int>(std::ceil((box.cy - box.hy - grid.y0) / grid.dy));
    const int j1 = static_cast<int>(std::floor((box.cy + box.hy - grid.y0) / grid.dy));
    IndexBox ib{std::max(i0, 0), std::min(i1, grid.nx - 1), std::max(j0, 0),
                std::min(j1, grid.ny - 1)};
    if (ib.i0 > ib.i1 || ib.j0 > ib.j1)
        throw std::invalid_argument("BoxRegion does not overlap the grid");
    return ib;
}

inline double to_db(double magnitude, double reference) {
    if (magnitude <= 0.0) return -std::numeric_limits<double>::infinity();
    return 20.0 * std::log10(magnitude / reference);
}

}  // namespace

TargetAmplitude extract_target_amplitude(const ComplexPlane& plane, const GridSpec& grid,
                                         const BoxRegion& box, double reference) {
    const IndexBox ib = clip_box(grid, box);
    double best = -1.0;
    int bi = ib.i0, bj = ib.j0;
    for (int j = ib.j0; j <= ib.j1; ++j)
        for (int i = ib.i0; i <= ib.i1; ++i) {
            const double m = std::abs(plane[static_cast<std::size_t>(j) * grid.nx + i]);
            if (m > best) { best = m; bi = i; bj = j; }
        }
    return {to_db(best, reference), grid.x(bi), grid.y(bj)};
}

DepthProfile depth_profile(const ImageVolume& volume, const BoxRegion& box) {
    const double reference = std::max(volume_peak_magnitude(volume),
                                      std::numeric_limits<double>::min());
    DepthProfile profile;
    profile.samples.reserve(volume.planes.size());
    for (std::size_t k = 0; k < volume.planes.size(); ++k) {
        const auto amp = extract_target_amplitude(volume.planes[k], volume.grid, box, reference);
        profile.samples.emplace_back(volume.grid.plane_z(static_cast<int>(k)), amp.amplitude_db);
    }
    return profile;
}

double estimate_depth(const DepthProfile& profile) {
    if (profile.samples.empty()) throw std::invalid_argument("estimate_depth: empty profile");
    // samples run shallow to deep; ">" keeps the shallower z on ties
    double best_z = profile.samples.front().first;
    double best_amp = profile.samples.front().second;
    for (const auto& [z, amp] : profile.samples)
        if (amp > best_amp) { best_amp = amp; best_z = z; }
    return best_z;
}

std::vector<std::size_t> amplitude_histogram(const ComplexPlane& plane, int bins,
                                             double lo_db, double hi_db, double reference) {
    if (bins < 2) throw std::invalid_argument("amplitude_histogram: bins must be >= 2");
    if (!(hi_db > lo_db)) throw std::invalid_argument("amplitude_histogram: empty range");
    std::vector<std::size_t> counts(static_cast<std::size_t>(bins), 0);
    const double scale = bins / (hi_db - lo_db);
    for (const auto& v : plane) {
        const double db = to_db(std::abs(v), reference);
        int b = static_cast<int>((db - lo_db) * scale);
        b = std::clamp(b, 0, bins - 1);
        ++counts[static_cast<std::size_t>(b)];
    }
    return counts;
}

double volume_peak_magnitude(const ImageVolume& volume) {
    double peak = 0.0;
    for (const auto& plane : volume.planes)
        for (const auto& v : plane) peak = std::max(peak, std::abs(v));
    return peak;
}

void write_depth_profile_csv(const std::string& path, const DepthProfile& profile) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "z_mm,amplitude_db\n";
    for (const auto& [z, amp] : profile.samples)
        out << z * 1000.0 << "," << amp << "\n";
}

void write_histogram_csv(const std::string& path, const std::vector<std::size_t>& counts,
                         double lo_db, double hi_db) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "bin_center_db,count\n";
    const double w = (hi_db - lo_db) / static_cast<double>(counts.size());
    for (std::size_t b = 0; b < counts.size(); ++b)
        out << lo_db + (static_cast<double>(b) + 0.5) * w << "," << counts[b] << "\n";
}

}  // namespace gpsar
