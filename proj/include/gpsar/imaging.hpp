#ifndef GPSAR_IMAGING_HPP
#define GPSAR_IMAGING_HPP

#include <complex>
#include <cstdint>
#include <vector>

#include "gpsar/signal.hpp"

namespace gpsar {

/// Ground grid plus focus-plane stack, z from z_top down to z_bottom.
struct GridSpec {
    double x0 = 0.0, y0 = 0.0;  // m, origin (center of pixel 0,0)
    double dx = 0.01, dy = 0.01;  // m
    int nx = 0, ny = 0;
    double z_top = 0.1, z_bottom = -0.2;  // m
    double dz = 0.005;  // m

    int plane_count() const;
    double plane_z(int k) const;  // k = 0 is z_top, descending
    double x(int i) const { return x0 + i * dx; }
    double y(int j) const { return y0 + j * dy; }
    void validate() const;
};

/// Row-major complex plane, index j * nx + i.
using ComplexPlane = std::vector<std::complex<double>>;

struct ImageVolume {
    GridSpec grid;
    std::vector<ComplexPlane> planes;  // z-descending, plane_count() entries
    double er = 1.0;
    std::vector<std::uint32_t> aperture_ids;
    std::uint64_t chirp_count = 0;
};

enum class InterpKernel { linear, nearest };

struct FocusOptions {
    int workers = 1;
    InterpKernel kernel = InterpKernel::linear;
    bool monostatic = false;  // collapse tx/rx to their midpoint
};

/// Refraction-corrected back-projection of one focus plane: per pixel the
/// profiles are sampled at the pixel's round-trip delay and summed with the
/// conjugate matched phase, in chirp-index order. Parallel over pixel rows;
/// the worker count never changes the result.
ComplexPlane backproject_plane(const std::vector<RangeProfile>& profiles,
                               const RadarParams& radar, const GridSpec& grid, double z0,
                               double interface_z, double er,
                               const FocusOptions& opts = {});

ImageVolume focus_volume(const std::vector<RangeProfile>& profiles, const RadarParams& radar,
                         const GridSpec& grid, double interface_z, double er,
                         const FocusOptions& opts = {});

/// Voxel-wise complex sum; grids and er must match.
ImageVolume coherent_sum(const std::vector<ImageVolume>& volumes);

struct PsfMetrics {
    double cross_range = 0.0;   // m, -3 dB width along y
    double ground_range = 0.0;  // m, -3 dB width along x
    double depth = 0.0;         // m, -3 dB width along z (0 for single plane)
    double pslr_db = 0.0;       // peak-to-sidelobe ratio over the peak plane
    int peak_i = 0, peak_j = 0, peak_k = 0;
    double peak_magnitude = 0.0;
};

/// -3 dB widths through the dominant local maximum near the hint, by linear
/// interpolation of the magnitude profiles along each axis. Throws if the
/// peak is flat or clipped by the grid edge.
PsfMetrics psf_metrics(const ImageVolume& volume, int hint_i, int hint_j, int hint_k);
PsfMetrics psf_metrics_plane(const ComplexPlane& plane, const GridSpec& grid,
                             int hint_i, int hint_j);

}  // namespace gpsar

#endif
