#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gpsar/detection.hpp"
#include "gpsar/random.hpp"

using namespace gpsar;

namespace {

std::vector<double> exponential_plane(int nx, int ny, std::uint64_t seed) {
    detail::GaussianStream rng(seed);
    std::vector<double> power(static_cast<std::size_t>(nx) * ny);
    for (auto& p : power) p = -std::log(rng.uniform());
    return power;
}

/// O(n^2) reference partition: repeatedly merge any two groups that contain
/// detections within the radius.
std::vector<int> brute_force_groups(const std::vector<Detection>& dets, double radius) {
    std::vector<int> label(dets.size());
    std::iota(label.begin(), label.end(), 0);
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t a = 0; a < dets.size(); ++a)
            for (std::size_t b = a + 1; b < dets.size(); ++b) {
                const double dx = dets[a].x - dets[b].x;
                const double dy = dets[a].y - dets[b].y;
                const double dz = dets[a].z - dets[b].z;
                if (dx * dx + dy * dy + dz * dz <= radius * radius &&
                    label[a] != label[b]) {
                    const int lo = std::min(label[a], label[b]);
                    const int hi = std::max(label[a], label[b]);
                    for (auto& l : label)
                        if (l == hi) l = lo;
                    changed = true;
                }
            }
    }
    return label;
}

}  // namespace

TEST_CASE("threshold factor formula") {
    CfarParams params;
    const int n_train = (2 * (params.guard + params.train) + 1) *
                            (2 * (params.guard + params.train) + 1) -
                        (2 * params.guard + 1) * (2 * params.guard + 1);
    const double alpha = params.threshold_factor(n_train);
    CHECK(alpha ==
          doctest::Approx(n_train * (std::pow(params.pfa, -1.0 / n_train) - 1.0))
              .epsilon(1e-12));
    CHECK(alpha > 1.0);
    CHECK_THROWS_AS((CfarParams{-1, 8, 1e-4}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((CfarParams{4, 0, 1e-4}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((CfarParams{4, 8, 1.5}.validate()), std::invalid_argument);
}

TEST_CASE("constant plane yields no detections") {
    CfarParams params;
    const std::vector<double> plane(64 * 64, 3.7);
    const std::vector<std::uint8_t> mask = ca_cfar_plane(plane, 64, 64, params);
    for (const auto m : mask) CHECK(m == 0);
}

TEST_CASE("an isolated strong spike is detected exactly once") {
    CfarParams params;
    std::vector<double> plane(64 * 64, 1.0);
    plane[31 * 64 + 40] = 100.0;  // 20 dB above the background
    const std::vector<std::uint8_t> mask = ca_cfar_plane(plane, 64, 64, params);
    std::size_t hits = 0, where = 0;
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask[i]) {
            ++hits;
            where = i;
        }
    CHECK(hits == 1);
    CHECK(where == 31 * 64 + 40);
}

TEST_CASE("plane smaller than the CFAR window is rejected") {
    CfarParams params;  // window needs 2*(4+8)+1 = 25 cells
    const std::vector<double> plane(24 * 24, 1.0);
    CHECK_THROWS_AS(ca_cfar_plane(plane, 24, 24, params), std::invalid_argument);
}

TEST_CASE("empirical false-alarm rate tracks the design pfa") {
    CfarParams params;  // pfa = 1e-4
    const int nx = 1000, ny = 1000;
    const std::vector<double> power = exponential_plane(nx, ny, 77);
    const std::vector<std::uint8_t> mask = ca_cfar_plane(power, nx, ny, params);
    const std::size_t alarms = std::count(mask.begin(), mask.end(), std::uint8_t{1});
    const double rate = static_cast<double>(alarms) / (static_cast<double>(nx) * ny);
    CHECK(rate >= 0.5 * params.pfa);
    CHECK(rate <= 2.0 * params.pfa);
}

TEST_CASE("the detection mask is scale invariant") {
    CfarParams params;
    const std::vector<double> power = exponential_plane(200, 200, 5);
    const std::vector<std::uint8_t> base = ca_cfar_plane(power, 200, 200, params);
    for (const double g : {0.1, 10.0}) {
        std::vector<double> scaled = power;
        for (auto& p : scaled) p *= g;
        const std::vector<std::uint8_t> mask = ca_cfar_plane(scaled, 200, 200, params);
        CHECK(mask == base);
    }
}

TEST_CASE("lower pfa never adds detections") {
    const std::vector<double> power = exponential_plane(200, 200, 9);
    CfarParams loose;
    loose.pfa = 1e-3;
    CfarParams tight;
    tight.pfa = 1e-5;
    const std::vector<std::uint8_t> loose_mask = ca_cfar_plane(power, 200, 200, loose);
    const std::vector<std::uint8_t> tight_mask = ca_cfar_plane(power, 200, 200, tight);
    std::size_t n_loose = 0, n_tight = 0;
    for (std::size_t i = 0; i < loose_mask.size(); ++i) {
        n_loose += loose_mask[i];
        n_tight += tight_mask[i];
        if (tight_mask[i]) CHECK(loose_mask[i]);  // nested thresholds
    }
    CHECK(n_tight <= n_loose);
}

TEST_CASE("empty volume produces no detections") {
    ImageVolume vol;
    vol.grid.nx = vol.grid.ny = 32;
    vol.grid.dx = vol.grid.dy = 0.01;
    vol.grid.z_top = 0.0;
    vol.grid.z_bottom = -0.01;
    vol.grid.dz = 0.01;
    vol.planes.assign(vol.grid.plane_count(),
                      ComplexPlane(static_cast<std::size_t>(32) * 32, {0.0, 0.0}));
    CfarParams params;
    CHECK(detect_volume(vol, params).empty());
}

TEST_CASE("a buried spike is reported near its voxel") {
    ImageVolume vol;
    vol.grid.nx = vol.grid.ny = 48;
    vol.grid.x0 = vol.grid.y0 = 0.0;
    vol.grid.dx = vol.grid.dy = 0.01;
    vol.grid.z_top = 0.0;
    vol.grid.z_bottom = -0.1;
    vol.grid.dz = 0.05;
    vol.planes.assign(3, ComplexPlane(static_cast<std::size_t>(48) * 48, {0.0, 0.0}));
    detail::GaussianStream rng(123);
    for (auto& plane : vol.planes)
        for (auto& v : plane) v = {0.01 * rng.normal(), 0.01 * rng.normal()};
    vol.planes[1][20 * 48 + 30] = {10.0, 0.0};

    CfarParams params;
    std::vector<Detection> dets = detect_volume(vol, params);
    REQUIRE(!dets.empty());
    std::sort(dets.begin(), dets.end(),
              [](const Detection& a, const Detection& b) {
                  return a.amplitude_db > b.amplitude_db;
              });
    CHECK(dets.front().i == 30);
    CHECK(dets.front().j == 20);
    CHECK(dets.front().plane_index == 1);
    CHECK(dets.front().z == doctest::Approx(-0.05));
    CHECK(dets.front().amplitude_db == doctest::Approx(0.0));
}

TEST_CASE("grouping basics") {
    std::vector<Detection> none;
    CHECK(group_detections(none, 0.1).empty());

    std::vector<Detection> pair(2);
    pair[0].x = 0.0;
    pair[1].x = 0.01;
    pair[0].amplitude_db = -3.0;
    pair[1].amplitude_db = -1.0;
    const std::vector<TargetReport> reports = group_detections(pair, 0.05);
    REQUIRE(reports.size() == 1);
    CHECK(reports[0].member_count == 2);
    CHECK(reports[0].x == doctest::Approx(0.01));  // max-amplitude member
    CHECK(pair[0].group_id == pair[1].group_id);

    CHECK_THROWS_AS(group_detections(pair, 0.0), std::invalid_argument);
}

TEST_CASE("grouping matches the quadratic oracle and ignores input order") {
    detail::GaussianStream rng(31);
    std::vector<Detection> dets(300);
    for (auto& d : dets) {
        d.x = 0.3 * rng.normal();
        d.y = 0.3 * rng.normal();
        d.z = 0.05 * rng.normal();
        d.amplitude_db = -std::abs(rng.normal());
    }
    const double radius = 0.08;

    std::vector<Detection> mine = dets;
    group_detections(mine, radius);
    const std::vector<int> oracle = brute_force_groups(dets, radius);

    // identical partitions: same-group in one labeling iff same-group in the other
    for (std::size_t a = 0; a < dets.size(); ++a)
        for (std::size_t b = a + 1; b < dets.size(); ++b)
            CHECK((mine[a].group_id == mine[b].group_id) ==
                  (oracle[a] == oracle[b]));

    // order invariance of the induced partition
    std::vector<Detection> reversed(dets.rbegin(), dets.rend());
    group_detections(reversed, radius);
    const std::size_t n = dets.size();
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            CHECK((mine[a].group_id == mine[b].group_id) ==
                  (reversed[n - 1 - a].group_id == reversed[n - 1 - b].group_id));
}

TEST_CASE("scoring against ground truth") {
    std::vector<TargetReport> reports(3);
    reports[0].x = 0.0;
    reports[0].y = 0.0;
    reports[1].x = 1.0;
    reports[1].y = 0.0;
    reports[2].x = 5.0;
    reports[2].y = 5.0;  // spurious
    const std::vector<Eigen::Vector3d> truth = {
        {0.1, 0.1, -0.05}, {1.0, 0.05, -0.1}, {-2.0, 0.0, 0.0}};
    const ScoreReport score = score_detections(reports, truth, 0.25);
    CHECK(score.detected == 2);
    CHECK(score.missed == 1);
    CHECK(score.false_alarms == 1);
    REQUIRE(score.matched_truth.size() == 2);
    CHECK(score.matched_truth[0] == 0);
    CHECK(score.matched_truth[1] == 1);
}
