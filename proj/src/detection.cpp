#include "gpsar/detection.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "gpsar/analysis.hpp"

namespace gpsar {

void CfarParams::validate() const {
    if (guard < 0) throw std::invalid_argument("CfarParams: guard must be >= 0");
    if (train < 1) throw std::invalid_argument("CfarParams: train must be >= 1");
    if (!(pfa > 0.0 && pfa < 1.0)) throw std::invalid_argument("CfarParams: pfa must lie in (0, 1)");
}

double CfarParams::threshold_factor(int n_train) const {
    const double nt = static_cast<double>(n_train);
    return nt * (std::pow(pfa, -1.0 / nt) - 1.0);
}

std::vector<std::uint8_t> ca_cfar_plane(const std::vector<double>& power, int nx, int ny,
                                        const CfarParams& params) {
    params.validate();
    const int win = params.guard + params.train;
    if (nx < 2 * win + 1 || ny < 2 * win + 1)
        throw std::invalid_argument("ca_cfar_plane: plane smaller than the CFAR window");
    if (power.size() != static_cast<std::size_t>(nx) * ny)
        throw std::invalid_argument("ca_cfar_plane: size mismatch");

    // summed-area table, (nx+1) x (ny+1)
    std::vector<double> sat(static_cast<std::size_t>(nx + 1) * (ny + 1), 0.0);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            sat[static_cast<std::size_t>(j + 1) * (nx + 1) + (i + 1)] =
                power[static_cast<std::size_t>(j) * nx + i] +
                sat[static_cast<std::size_t>(j) * (nx + 1) + (i + 1)] +
                sat[static_cast<std::size_t>(j + 1) * (nx + 1) + i] -
                sat[static_cast<std::size_t>(j) * (nx + 1) + i];

    auto box_sum = [&](int i0, int j0, int i1, int j1, int& count) {
        i0 = std::max(i0, 0); j0 = std::max(j0, 0);
        i1 = std::min(i1, nx - 1); j1 = std::min(j1, ny - 1);
        count = (i1 - i0 + 1) * (j1 - j0 + 1);
        return sat[static_cast<std::size_t>(j1 + 1) * (nx + 1) + (i1 + 1)] -
               sat[static_cast<std::size_t>(j0) * (nx + 1) + (i1 + 1)] -
               sat[static_cast<std::size_t>(j1 + 1) * (nx + 1) + i0] +
               sat[static_cast<std::size_t>(j0) * (nx + 1) + i0];
    };

    std::vector<std::uint8_t> mask(power.size(), 0);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            int n_outer = 0, n_inner = 0;
            const double outer = box_sum(i - win, j - win, i + win, j + win, n_outer);
            const double inner =
                box_sum(i - params.guard, j - params.guard, i + params.guard, j + params.guard, n_inner);
            const int n_train = n_outer - n_inner;
            if (n_train < 1) continue;  // degenerate corner of a tiny plane
            const double mean = (outer - inner) / static_cast<double>(n_train);
            const double alpha = params.threshold_factor(n_train);
            if (power[static_cast<std::size_t>(j) * nx + i] > alpha * mean)
                mask[static_cast<std::size_t>(j) * nx + i] = 1;
        }
    return mask;
}

std::vector<Detection> detect_volume(const ImageVolume& volume, const CfarParams& params) {
    const GridSpec& g = volume.grid;
    const double reference =
        std::max(volume_peak_magnitude(volume), std::numeric_limits<double>::min());
    std::vector<Detection> detections;
    for (std::size_t k = 0; k < volume.planes.size(); ++k) {
        const ComplexPlane& plane = volume.planes[k];
        std::vector<double> power(plane.size());
        for (std::size_t p = 0; p < plane.size(); ++p) power[p] = std::norm(plane[p]);
        const auto mask = ca_cfar_plane(power, g.nx, g.ny, params);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                if (mask[static_cast<std::size_t>(j) * g.nx + i]) {
                    Detection d;
                    d.x = g.x(i); d.y = g.y(j); d.z = g.plane_z(static_cast<int>(k));
                    d.i = i; d.j = j; d.plane_index = static_cast<int>(k);
                    d.amplitude_db = 20.0 * std::log10(
                        std::abs(plane[static_cast<std::size_t>(j) * g.nx + i]) / reference);
                    detections.push_back(d);
                }
    }
    return detections;
}

std::vector<TargetReport> group_detections(std::vector<Detection>& detections, double radius) {
    if (radius <= 0.0) throw std::invalid_argument("group_detections: radius must be positive");
    const std::size_t n = detections.size();
    for (auto& d : detections) d.group_id = -1;

    // spatial hash with cell size = radius; candidates live in the 27 neighbors
    const double cell = radius;
    auto key = [&](const Detection& d) {
        const auto cx = static_cast<std::int64_t>(std::floor(d.x / cell));
        const auto cy = static_cast<std::int64_t>(std::floor(d.y / cell));
        const auto cz = static_cast<std::int64_t>(std::floor(d.z / cell));
        return (cx * 73856093) ^ (cy * 19349663) ^ (cz * 83492791);
    };
    std::unordered_map<std::int64_t, std::vector<std::size_t>> grid;
    for (std::size_t a = 0; a < n; ++a) grid[key(detections[a])].push_back(a);

    auto close = [&](std::size_t a, std::size_t b) {
        const double dx = detections[a].x - detections[b].x;
        const double dy = detections[a].y - detections[b].y;
        const double dz = detections[a].z - detections[b].z;
        return dx * dx + dy * dy + dz * dz <= radius * radius;
    };

    std::vector<TargetReport> reports;
    std::vector<std::size_t> stack;
    for (std::size_t seed = 0; seed < n; ++seed) {
        if (detections[seed].group_id >= 0) continue;
        const int gid = static_cast<int>(reports.size());
        detections[seed].group_id = gid;
        stack.assign(1, seed);
        TargetReport report;
        report.amplitude_db = -std::numeric_limits<double>::infinity();
        while (!stack.empty()) {
            const std::size_t a = stack.back();
            stack.pop_back();
            const Detection& d = detections[a];
            ++report.member_count;
            if (d.amplitude_db > report.amplitude_db) {
                report.amplitude_db = d.amplitude_db;
                report.x = d.x; report.y = d.y; report.z = d.z;
            }
            const auto cx = static_cast<std::int64_t>(std::floor(d.x / cell));
            const auto cy = static_cast<std::int64_t>(std::floor(d.y / cell));
            const auto cz = static_cast<std::int64_t>(std::floor(d.z / cell));
            for (std::int64_t ox = -1; ox <= 1; ++ox)
                for (std::int64_t oy = -1; oy <= 1; ++oy)
                    for (std::int64_t oz = -1; oz <= 1; ++oz) {
                        const std::int64_t k = ((cx + ox) * 73856093) ^ ((cy + oy) * 19349663) ^
                                               ((cz + oz) * 83492791);
                        auto it = grid.find(k);
                        if (it == grid.end()) continue;
                        for (const std::size_t b : it->second) {
                            if (detections[b].group_id >= 0 || !close(a, b)) continue;
                            detections[b].group_id = gid;
                            stack.push_back(b);
                        }
                    }
        }
        reports.push_back(report);
    }
    return reports;
}

ScoreReport score_detections(const std::vector<TargetReport>& reports,
                             const std::vector<Eigen::Vector3d>& truth, double match_radius) {
    ScoreReport score;
    std::vector<bool> report_used(reports.size(), false);
    for (std::size_t t = 0; t < truth.size(); ++t) {
        bool hit = false;
        for (std::size_t r = 0; r < reports.size(); ++r) {
            const double dx = reports[r].x - truth[t].x();
            const double dy = reports[r].y - truth[t].y();
            if (dx * dx + dy * dy <= match_radius * match_radius) {
                hit = true;
                report_used[r] = true;
            }
        }
        if (hit) {
            ++score.detected;
            score.matched_truth.push_back(static_cast<int>(t));
        } else {
            ++score.missed;
        }
    }
    for (const bool used : report_used)
        if (!used) ++score.false_alarms;
    return score;
}

void write_detections_csv(const std::string& path, const std::vector<Detection>& detections) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "x_m,y_m,z_mm,amplitude_db,plane_index,group_id\n";
    for (const auto& d : detections)
        out << d.x << "," << d.y << "," << d.z * 1000.0 << "," << d.amplitude_db << ","
            << d.plane_index << "," << d.group_id << "\n";
}

}  // namespace gpsar
