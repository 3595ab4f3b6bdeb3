#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "gpsar/imaging.hpp"
#include "gpsar/pipeline.hpp"
#include "gpsar/propagation.hpp"

using namespace gpsar;

namespace {

struct SmallScene {
    RadarParams radar;
    std::vector<RangeProfile> profiles;
    Scene scene;
};

/// One small circle (r = 2 m, h = 2 m) over the given scene, compressed.
SmallScene make_small_scene(const Scene& scene, int pad_factor = 8) {
    SmallScene out;
    out.scene = scene;

    CircleSpec circle;
    circle.radius = 2.0;
    circle.height = 2.0;
    circle.speed = 0.4;
    circle.prf = 30.0;

    const std::vector<Pose> poses = circular_trajectory(circle);
    const double max_delay = 2.0 * (4.0 / kSpeedOfLight + 0.5 / wave_speed(scene.er));
    out.profiles.reserve(poses.size());
    for (std::size_t n = 0; n < poses.size(); ++n) {
        const RawChirp chirp =
            synthesize_chirp(out.radar, poses[n], poses[n], scene, chirp_seed(5, n));
        out.profiles.push_back(range_compress(out.radar, chirp, pad_factor, max_delay));
    }
    return out;
}

GridSpec patch_grid(double cx, double cy, int n, double pitch, double z_top,
                    double z_bottom, double dz) {
    GridSpec g;
    g.nx = g.ny = n;
    g.dx = g.dy = pitch;
    g.x0 = cx - (n - 1) * pitch / 2.0;
    g.y0 = cy - (n - 1) * pitch / 2.0;
    g.z_top = z_top;
    g.z_bottom = z_bottom;
    g.dz = dz;
    return g;
}

const SmallScene& buried_target_scene() {
    static const SmallScene cached = [] {
        Scene scene;
        scene.er = 8.0;
        scene.scatterers.push_back({{0.0, 0.0, -0.05}, 1.0, {}});
        return make_small_scene(scene);
    }();
    return cached;
}

std::size_t plane_argmax(const ComplexPlane& plane) {
    std::size_t best = 0;
    double best_mag = -1.0;
    for (std::size_t i = 0; i < plane.size(); ++i)
        if (std::abs(plane[i]) > best_mag) {
            best_mag = std::abs(plane[i]);
            best = i;
        }
    return best;
}

}  // namespace

TEST_CASE("grid plane bookkeeping") {
    GridSpec g;
    g.nx = g.ny = 16;
    CHECK(g.plane_count() == 61);  // +100 mm .. -200 mm at 5 mm steps
    CHECK(g.plane_z(0) == doctest::Approx(0.1));
    CHECK(g.plane_z(60) == doctest::Approx(-0.2));
    CHECK(g.plane_z(20) == doctest::Approx(0.0).scale(1.0));

    GridSpec bad = g;
    bad.dz = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = g;
    bad.z_top = -0.3;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = g;
    bad.nx = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("single chirp back-projection reduces to one sample") {
    RadarParams radar;
    Scene scene;
    scene.scatterers.push_back({{0.0, 0.0, 0.0}, 1.0, {}});
    Pose antenna;
    antenna.transform.translation = Eigen::Vector3d(0.0, 0.0, 5.0);
    const RawChirp chirp = synthesize_chirp(radar, antenna, antenna, scene, 1);
    const std::vector<RangeProfile> profiles{range_compress(radar, chirp, 16)};

    double peak_mag = 0.0;
    for (const auto& b : profiles[0].bins)
        peak_mag = std::max(peak_mag, std::abs(std::complex<double>(b)));

    const GridSpec g = patch_grid(0.0, 0.0, 1, 0.01, 0.0, 0.0, 0.005);
    const ComplexPlane plane = backproject_plane(profiles, radar, g, 0.0, 0.0, 8.0);
    CHECK(std::abs(plane[0]) == doctest::Approx(peak_mag).epsilon(1e-3));
    // the test-pinned sign convention: a point target focuses with phase ~ 0
    CHECK(std::abs(std::arg(plane[0])) < 0.05);

    // N identical chirps scale the pixel exactly N-fold
    std::vector<RangeProfile> five(5, profiles[0]);
    const ComplexPlane plane5 = backproject_plane(five, radar, g, 0.0, 0.0, 8.0);
    CHECK(std::abs(plane5[0] - 5.0 * plane[0]) / std::abs(plane5[0]) < 1e-12);

    CHECK_THROWS_AS(backproject_plane({}, radar, g, 0.0, 0.0, 8.0), std::invalid_argument);
}

TEST_CASE("buried point target focuses at its true position") {
    const SmallScene& s = buried_target_scene();
    const GridSpec g = patch_grid(0.0, 0.0, 33, 0.005, -0.035, -0.065, 0.005);
    const ImageVolume vol = focus_volume(s.profiles, s.radar, g, 0.0, 8.0);
    CHECK(vol.planes.size() == 7);

    int best_plane = 0;
    double best_mag = -1.0;
    std::size_t best_px = 0;
    for (std::size_t k = 0; k < vol.planes.size(); ++k) {
        const std::size_t px = plane_argmax(vol.planes[k]);
        if (std::abs(vol.planes[k][px]) > best_mag) {
            best_mag = std::abs(vol.planes[k][px]);
            best_plane = static_cast<int>(k);
            best_px = px;
        }
    }
    const int i = static_cast<int>(best_px) % g.nx;
    const int j = static_cast<int>(best_px) / g.nx;
    CHECK(std::abs(g.x(i)) <= g.dx + 1e-12);  // within one pixel of (0, 0)
    CHECK(std::abs(g.y(j)) <= g.dy + 1e-12);
    CHECK(std::abs(g.plane_z(best_plane) - (-0.05)) <= 0.010);
}

TEST_CASE("wrong permittivity defocuses a buried target") {
    const SmallScene& s = buried_target_scene();
    const GridSpec g = patch_grid(0.0, 0.0, 17, 0.005, -0.05, -0.05, 0.005);
    auto peak_at_er = [&](double er) {
        const ComplexPlane p = backproject_plane(s.profiles, s.radar, g, -0.05, 0.0, er);
        return std::abs(p[plane_argmax(p)]);
    };
    const double truth = peak_at_er(8.0);
    CHECK(peak_at_er(4.0) < truth);
    CHECK(peak_at_er(16.0) < truth);
}

TEST_CASE("worker count never changes the volume") {
    const SmallScene& s = buried_target_scene();
    const GridSpec g = patch_grid(0.0, 0.0, 21, 0.005, -0.045, -0.055, 0.005);
    FocusOptions serial, parallel;
    serial.workers = 1;
    parallel.workers = 3;
    const ImageVolume a = focus_volume(s.profiles, s.radar, g, 0.0, 8.0, serial);
    const ImageVolume b = focus_volume(s.profiles, s.radar, g, 0.0, 8.0, parallel);
    for (std::size_t k = 0; k < a.planes.size(); ++k)
        for (std::size_t px = 0; px < a.planes[k].size(); ++px) {
            CHECK(a.planes[k][px].real() == b.planes[k][px].real());
            CHECK(a.planes[k][px].imag() == b.planes[k][px].imag());
        }
}

TEST_CASE("back-projection is linear in the scene") {
    RadarParams radar;
    Pose antenna;
    antenna.transform.translation = Eigen::Vector3d(1.5, 0.5, 4.0);
    Scene only_a, only_b, both;
    only_a.scatterers.push_back({{0.1, 0.0, 0.0}, 1.0, {}});
    only_b.scatterers.push_back({{-0.1, 0.05, 0.0}, 0.7, {}});
    both.scatterers = {only_a.scatterers[0], only_b.scatterers[0]};

    const GridSpec g = patch_grid(0.0, 0.0, 11, 0.02, 0.0, 0.0, 0.005);
    auto image_of = [&](const Scene& scene) {
        const RawChirp chirp = synthesize_chirp(radar, antenna, antenna, scene, 0);
        const std::vector<RangeProfile> profiles{range_compress(radar, chirp, 16)};
        return backproject_plane(profiles, radar, g, 0.0, 0.0, 8.0);
    };
    const ComplexPlane pa = image_of(only_a);
    const ComplexPlane pb = image_of(only_b);
    const ComplexPlane pab = image_of(both);
    double num = 0.0, den = 0.0;
    for (std::size_t px = 0; px < pab.size(); ++px) {
        num += std::norm(pab[px] - pa[px] - pb[px]);
        den += std::norm(pab[px]);
    }
    CHECK(std::sqrt(num / den) < 1e-5);  // float32 recording quantization
}

TEST_CASE("translating scene and aperture moves the image with them") {
    RadarParams radar;
    CircleSpec circle;
    circle.radius = 2.0;
    circle.height = 2.0;
    circle.speed = 0.4;
    circle.prf = 5.0;

    const Eigen::Vector3d shift(3.0, -2.0, 0.0);
    auto focused_peak = [&](const Eigen::Vector3d& offset) {
        Scene scene;
        scene.scatterers.push_back({offset, 1.0, {}});
        CircleSpec moved = circle;
        moved.center = offset;
        const std::vector<Pose> poses = circular_trajectory(moved);
        std::vector<RangeProfile> profiles;
        for (std::size_t n = 0; n < poses.size(); ++n) {
            const RawChirp chirp =
                synthesize_chirp(radar, poses[n], poses[n], scene, chirp_seed(3, n));
            profiles.push_back(range_compress(radar, chirp, 8, 40e-9));
        }
        const GridSpec g =
            patch_grid(offset.x(), offset.y(), 15, 0.01, 0.0, 0.0, 0.005);
        const ComplexPlane p = backproject_plane(profiles, radar, g, 0.0, 0.0, 8.0);
        const std::size_t px = plane_argmax(p);
        return Eigen::Vector2d(g.x(static_cast<int>(px) % g.nx),
                               g.y(static_cast<int>(px) / g.nx));
    };
    const Eigen::Vector2d base = focused_peak({0.0, 0.0, 0.0});
    const Eigen::Vector2d moved = focused_peak(shift);
    CHECK(std::abs(moved.x() - base.x() - shift.x()) <= 0.01 + 1e-12);
    CHECK(std::abs(moved.y() - base.y() - shift.y()) <= 0.01 + 1e-12);
}

TEST_CASE("limited-persistence target drifts with the focus plane") {
    Scene scene;
    Scatterer sc;
    sc.position = Eigen::Vector3d(0.0, 0.0, -0.05);
    sc.visibility = {{EIGEN_PI / 4.0, 3.0 * EIGEN_PI / 4.0}};  // seen from +y
    scene.scatterers.push_back(sc);
    scene.er = 8.0;
    const SmallScene s = make_small_scene(scene);

    std::vector<double> peak_y;
    for (const double z0 : {-0.02, -0.05, -0.08}) {
        const GridSpec g = patch_grid(0.0, 0.0, 41, 0.005, z0, z0, 0.005);
        const ComplexPlane p = backproject_plane(s.profiles, s.radar, g, z0, 0.0, 8.0);
        const std::size_t px = plane_argmax(p);
        peak_y.push_back(g.y(static_cast<int>(px) / g.nx));
    }
    // monotone drift along the look direction, centered near truth at z = -50 mm
    const bool increasing = peak_y[0] < peak_y[1] && peak_y[1] < peak_y[2];
    const bool decreasing = peak_y[0] > peak_y[1] && peak_y[1] > peak_y[2];
    CHECK((increasing || decreasing));
    CHECK(std::abs(peak_y[1]) <= 0.015);
}

TEST_CASE("coherent sum: identity, six-fold gain, and grid mismatch") {
    const SmallScene& s = buried_target_scene();
    const GridSpec g = patch_grid(0.0, 0.0, 9, 0.005, -0.05, -0.05, 0.005);
    const ImageVolume one = focus_volume(s.profiles, s.radar, g, 0.0, 8.0);

    const ImageVolume same = coherent_sum({one});
    for (std::size_t px = 0; px < one.planes[0].size(); ++px)
        CHECK(std::abs(same.planes[0][px] - one.planes[0][px]) == 0.0);

    const ImageVolume six = coherent_sum({one, one, one, one, one, one});
    for (std::size_t px = 0; px < one.planes[0].size(); ++px)
        CHECK(std::abs(six.planes[0][px] - 6.0 * one.planes[0][px]) <=
              1e-12 * std::abs(six.planes[0][px]));
    CHECK(six.chirp_count == 6 * one.chirp_count);

    ImageVolume other = one;
    other.grid.dx *= 2.0;
    CHECK_THROWS_AS(coherent_sum({one, other}), std::invalid_argument);
    CHECK_THROWS_AS(coherent_sum({}), std::invalid_argument);
}

TEST_CASE("psf metrics recover the width of an analytic Gaussian blob") {
    GridSpec g = patch_grid(0.0, 0.0, 41, 0.005, 0.0, 0.0, 0.005);
    const double sigma = 0.015;  // 3 pixels
    ImageVolume vol;
    vol.grid = g;
    vol.planes.assign(1, ComplexPlane(static_cast<std::size_t>(g.nx) * g.ny));
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double r2 = g.x(i) * g.x(i) + g.y(j) * g.y(j);
            vol.planes[0][static_cast<std::size_t>(j) * g.nx + i] =
                std::exp(-r2 / (2.0 * sigma * sigma));
        }
    const PsfMetrics m = psf_metrics(vol, 20, 20, 0);
    // half-power points of exp(-x^2/(2 sigma^2)) sit at sigma*sqrt(ln 2)
    const double expected = 2.0 * sigma * std::sqrt(std::log(2.0));
    CHECK(m.cross_range == doctest::Approx(expected).epsilon(0.02));
    CHECK(m.ground_range == doctest::Approx(expected).epsilon(0.02));
    CHECK(m.depth == 0.0);
    CHECK(m.peak_i == 20);
    CHECK(m.peak_j == 20);

    // flat plane and edge-clipped peak are rejected
    ImageVolume flat = vol;
    for (auto& v : flat.planes[0]) v = 1.0;
    CHECK_THROWS_AS(psf_metrics(flat, 20, 20, 0), std::runtime_error);
    ImageVolume clipped = vol;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            clipped.planes[0][static_cast<std::size_t>(j) * g.nx + i] =
                std::exp(-(g.x(i) - g.x(g.nx - 1)) * (g.x(i) - g.x(g.nx - 1)) /
                         (2.0 * sigma * sigma));
    CHECK_THROWS_AS(psf_metrics(clipped, g.nx - 1, 20, 0), std::runtime_error);
}
