#include "gpsar/imaging.hpp"

#include <cmath>
#include <stdexcept>

#include "gpsar/parallel.hpp"
#include "gpsar/propagation.hpp"

namespace gpsar {

int GridSpec::plane_count() const {
    return static_cast<int>(std::round((z_top - z_bottom) / dz)) + 1;
}

double GridSpec::plane_z(int k) const { return z_top - k * dz; }

void GridSpec::validate() const {
    if (dx <= 0.0 || dy <= 0.0 || dz <= 0.0)
        throw std::invalid_argument("GridSpec: pitches must be positive");
    if (nx < 1 || ny < 1) throw std::invalid_argument("GridSpec: nx and ny must be >= 1");
    if (!(z_top >= z_bottom))
        throw std::invalid_argument("GridSpec: z_top must not lie below z_bottom");
}

namespace {

struct ChirpGeometry {
    Eigen::Vector3d tx, rx;
};

inline double one_way_delay(const Eigen::Vector3d& ant, double px, double py, double pz,
                            double interface_z, double inv_c0, double inv_c1, double* warm) {
    const double ddx = px - ant.x();
    const double ddy = py - ant.y();
    const double d = std::sqrt(ddx * ddx + ddy * ddy);
    if (pz >= interface_z) {
        const double dv = ant.z() - pz;
        return std::sqrt(d * d + dv * dv) * inv_c0;
    }
    return detail::fermat_delay(d, ant.z() - interface_z, interface_z - pz, inv_c0, inv_c1, warm);
}

}  // namespace

ComplexPlane backproject_plane(const std::vector<RangeProfile>& profiles,
                               const RadarParams& radar, const GridSpec& grid, double z0,
                               double interface_z, double er, const FocusOptions& opts) {
    if (profiles.empty()) throw std::invalid_argument("backproject_plane: no profiles");
    if (er < 1.0) throw std::invalid_argument("backproject_plane: er must be >= 1");
    grid.validate();

    const std::size_t n_chirps = profiles.size();
    std::vector<ChirpGeometry> geom(n_chirps);
    for (std::size_t n = 0; n < n_chirps; ++n) {
        geom[n].tx = profiles[n].tx_pose.transform.translation;
        geom[n].rx = profiles[n].rx_pose.transform.translation;
        if (opts.monostatic) {
            geom[n].tx = 0.5 * (geom[n].tx + geom[n].rx);
            geom[n].rx = geom[n].tx;
        }
    }

    const double inv_c0 = 1.0 / kSpeedOfLight;
    const double inv_c1 = std::sqrt(er) / kSpeedOfLight;
    const double two_pi_f0 = 2.0 * EIGEN_PI * radar.f0;
    const double pi_k = EIGEN_PI * radar.slope();
    const double two_pi_k_tc = 2.0 * EIGEN_PI * radar.slope() * radar.window_center_time();
    const bool nearest = opts.kernel == InterpKernel::nearest;

    ComplexPlane plane(static_cast<std::size_t>(grid.nx) * grid.ny, {0.0, 0.0});

    parallel_for(static_cast<std::size_t>(grid.ny), opts.workers, [&](std::size_t j) {
        const double py = grid.y(static_cast<int>(j));
        for (int i = 0; i < grid.nx; ++i) {
            const double px = grid.x(i);
            double warm_tx = -1.0, warm_rx = -1.0;
            std::complex<double> acc{0.0, 0.0};
            for (std::size_t n = 0; n < n_chirps; ++n) {
                const double dt =
                    one_way_delay(geom[n].tx, px, py, z0, interface_z, inv_c0, inv_c1, &warm_tx) +
                    one_way_delay(geom[n].rx, px, py, z0, interface_z, inv_c0, inv_c1, &warm_rx);

                std::complex<double> s;
                const RangeProfile& prof = profiles[n];
                if (nearest) {
                    const double pos = dt / prof.delay_per_bin;
                    const auto b = static_cast<std::size_t>(pos + 0.5);
                    if (b >= prof.bins.size()) continue;
                    s = {prof.bins[b].real(), prof.bins[b].imag()};
                } else {
                    s = sample_profile(prof, dt);
                }
                const double phi = two_pi_f0 * dt - pi_k * dt * dt + two_pi_k_tc * dt;
                acc += s * std::complex<double>(std::cos(phi), -std::sin(phi));
            }
            plane[j * static_cast<std::size_t>(grid.nx) + static_cast<std::size_t>(i)] = acc;
        }
    });
    return plane;
}

ImageVolume focus_volume(const std::vector<RangeProfile>& profiles, const RadarParams& radar,
                         const GridSpec& grid, double interface_z, double er,
                         const FocusOptions& opts) {
    ImageVolume volume;
    volume.grid = grid;
    volume.er = er;
    volume.chirp_count = profiles.size();
    const int n_planes = grid.plane_count();
    volume.planes.reserve(static_cast<std::size_t>(n_planes));
    for (int k = 0; k < n_planes; ++k)
        volume.planes.push_back(
            backproject_plane(profiles, radar, grid, grid.plane_z(k), interface_z, er, opts));
    return volume;
}

ImageVolume coherent_sum(const std::vector<ImageVolume>& volumes) {
    if (volumes.empty()) throw std::invalid_argument("coherent_sum: no volumes");
    const ImageVolume& first = volumes.front();
    ImageVolume out = first;
    for (std::size_t v = 1; v < volumes.size(); ++v) {
        const ImageVolume& in = volumes[v];
        const GridSpec &a = first.grid, &b = in.grid;
        const bool same = a.x0 == b.x0 && a.y0 == b.y0 && a.dx == b.dx && a.dy == b.dy &&
                          a.nx == b.nx && a.ny == b.ny && a.z_top == b.z_top &&
                          a.z_bottom == b.z_bottom && a.dz == b.dz;
        if (!same || in.er != first.er)
            throw std::invalid_argument("coherent_sum: mismatched grids or er");
        for (std::size_t k = 0; k < out.planes.size(); ++k)
            for (std::size_t p = 0; p < out.planes[k].size(); ++p)
                out.planes[k][p] += in.planes[k][p];
        out.chirp_count += in.chirp_count;
        out.aperture_ids.insert(out.aperture_ids.end(), in.aperture_ids.begin(),
                                in.aperture_ids.end());
    }
    return out;
}

namespace {

inline double mag_at(const ImageVolume& v, int i, int j, int k) {
    return std::abs(v.planes[static_cast<std::size_t>(k)]
                    [static_cast<std::size_t>(j) * v.grid.nx + static_cast<std::size_t>(i)]);
}

// -3 dB full width of a sampled 1D magnitude profile around index `peak`,
// linear interpolation at the half-power crossings. pitch is the sample
// spacing. Throws when a crossing leaves the sampled support.
double half_power_width(const std::vector<double>& prof, int peak, double pitch) {
    const double level = prof[static_cast<std::size_t>(peak)] / std::sqrt(2.0);
    double left = -1.0, right = -1.0;
    for (int i = peak; i > 0; --i) {
        const double a = prof[static_cast<std::size_t>(i)];
        const double b = prof[static_cast<std::size_t>(i - 1)];
        if (b < level) {
            left = (static_cast<double>(peak) - (static_cast<double>(i) - (level - a) / (b - a))) * pitch;
            break;
        }
    }
    for (int i = peak; i + 1 < static_cast<int>(prof.size()); ++i) {
        const double a = prof[static_cast<std::size_t>(i)];
        const double b = prof[static_cast<std::size_t>(i + 1)];
        if (b < level) {
            right = ((static_cast<double>(i) + (a - level) / (a - b)) - static_cast<double>(peak)) * pitch;
            break;
        }
    }
    if (left < 0.0 || right < 0.0)
        throw std::runtime_error("psf_metrics: half-power crossing clipped by the grid edge");
    return left + right;
}

}  // namespace

PsfMetrics psf_metrics(const ImageVolume& volume, int hint_i, int hint_j, int hint_k) {
    const GridSpec& g = volume.grid;
    const int n_planes = static_cast<int>(volume.planes.size());
    if (hint_i < 0 || hint_i >= g.nx || hint_j < 0 || hint_j >= g.ny || hint_k < 0 ||
        hint_k >= n_planes)
        throw std::invalid_argument("psf_metrics: hint outside the volume");

    // hill-climb to the containing local maximum
    int i = hint_i, j = hint_j, k = hint_k;
    for (;;) {
        double best = mag_at(volume, i, j, k);
        int bi = i, bj = j, bk = k;
        const int di[] = {1, -1, 0, 0, 0, 0};
        const int dj[] = {0, 0, 1, -1, 0, 0};
        const int dk[] = {0, 0, 0, 0, 1, -1};
        for (int t = 0; t < 6; ++t) {
            const int ni = i + di[t], nj = j + dj[t], nk = k + dk[t];
            if (ni < 0 || ni >= g.nx || nj < 0 || nj >= g.ny || nk < 0 || nk >= n_planes) continue;
            const double m = mag_at(volume, ni, nj, nk);
            if (m > best) { best = m; bi = ni; bj = nj; bk = nk; }
        }
        if (bi == i && bj == j && bk == k) break;
        i = bi; j = bj; k = bk;
    }

    PsfMetrics m;
    m.peak_i = i; m.peak_j = j; m.peak_k = k;
    m.peak_magnitude = mag_at(volume, i, j, k);
    if (m.peak_magnitude <= 0.0) throw std::runtime_error("psf_metrics: flat peak");

    std::vector<double> px(static_cast<std::size_t>(g.nx)), py(static_cast<std::size_t>(g.ny));
    for (int t = 0; t < g.nx; ++t) px[static_cast<std::size_t>(t)] = mag_at(volume, t, j, k);
    for (int t = 0; t < g.ny; ++t) py[static_cast<std::size_t>(t)] = mag_at(volume, i, t, k);
    m.ground_range = half_power_width(px, i, g.dx);
    m.cross_range = half_power_width(py, j, g.dy);

    if (n_planes > 1) {
        std::vector<double> pz(static_cast<std::size_t>(n_planes));
        for (int t = 0; t < n_planes; ++t) pz[static_cast<std::size_t>(t)] = mag_at(volume, i, j, t);
        m.depth = half_power_width(pz, k, g.dz);
    }

    // peak-to-sidelobe over the peak plane, mainlobe excluded
    const double excl = 2.0 * std::max(m.cross_range, m.ground_range);
    double side = 0.0;
    const ComplexPlane& plane = volume.planes[static_cast<std::size_t>(k)];
    for (int jj = 0; jj < g.ny; ++jj)
        for (int ii = 0; ii < g.nx; ++ii) {
            const double rx = (ii - i) * g.dx, ry = (jj - j) * g.dy;
            if (rx * rx + ry * ry <= excl * excl) continue;
            side = std::max(side, std::abs(plane[static_cast<std::size_t>(jj) * g.nx + ii]));
        }
    m.pslr_db = side > 0.0 ? 20.0 * std::log10(m.peak_magnitude / side)
                           : std::numeric_limits<double>::infinity();
    return m;
}

PsfMetrics psf_metrics_plane(const ComplexPlane& plane, const GridSpec& grid,
                             int hint_i, int hint_j) {
    // psf_metrics sizes the z axis from the plane list, so a one-plane volume
    // yields depth = 0
    ImageVolume v;
    v.grid = grid;
    v.planes.push_back(plane);
    return psf_metrics(v, hint_i, hint_j, 0);
}

}  // namespace gpsar
