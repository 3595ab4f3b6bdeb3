#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gpsar/geometry.hpp"
#include "gpsar/random.hpp"
#include "gpsar/signal.hpp"

using namespace gpsar;

namespace {

Transform random_transform(detail::GaussianStream& g) {
    Transform t;
    Eigen::Quaterniond q(g.normal(), g.normal(), g.normal(), g.normal());
    t.rotation = q.normalized();
    t.translation = Eigen::Vector3d(g.normal(), g.normal(), g.normal());
    return t;
}

double max_abs(const Eigen::Matrix4d& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("compose with identity and inverse") {
    detail::GaussianStream g(11);
    for (int k = 0; k < 20; ++k) {
        const Transform t = random_transform(g);
        const Transform left = compose(Transform::identity(), t);
        CHECK(rotation_angle(left, t) < 1e-12);
        CHECK((left.translation - t.translation).norm() < 1e-12);

        const Transform round = compose(t, inverse(t));
        CHECK(round.translation.norm() < 1e-9);
        CHECK(rotation_angle(round, Transform::identity()) < 1e-9);
    }
}

TEST_CASE("compose matches the homogeneous matrix product") {
    detail::GaussianStream g(17);
    for (int k = 0; k < 50; ++k) {
        const Transform a = random_transform(g);
        const Transform b = random_transform(g);
        const Eigen::Matrix4d oracle = a.matrix() * b.matrix();
        CHECK(max_abs(compose(a, b).matrix() - oracle) < 1e-12);
    }
}

TEST_CASE("compose is associative") {
    detail::GaussianStream g(23);
    for (int k = 0; k < 50; ++k) {
        const Transform a = random_transform(g);
        const Transform b = random_transform(g);
        const Transform c = random_transform(g);
        const Transform lhs = compose(compose(a, b), c);
        const Transform rhs = compose(a, compose(b, c));
        CHECK(rotation_angle(lhs, rhs) < 1e-9);
        CHECK((lhs.translation - rhs.translation).norm() < 1e-9);
    }
}

TEST_CASE("apply: identity, half turn, and matrix oracle") {
    CHECK((apply(Transform::identity(), {1.0, 2.0, 3.0}) - Eigen::Vector3d(1, 2, 3)).norm() == 0.0);

    Transform half_turn;
    half_turn.rotation = Eigen::Quaterniond(Eigen::AngleAxisd(EIGEN_PI, Eigen::Vector3d::UnitZ()));
    CHECK((apply(half_turn, {1.0, 0.0, 0.0}) - Eigen::Vector3d(-1, 0, 0)).norm() < 1e-12);

    detail::GaussianStream g(31);
    for (int k = 0; k < 50; ++k) {
        const Transform t = random_transform(g);
        const Eigen::Vector3d p(g.normal(), g.normal(), g.normal());
        const Eigen::Vector4d hom = t.matrix() * Eigen::Vector4d(p.x(), p.y(), p.z(), 1.0);
        CHECK((apply(t, p) - hom.head<3>()).norm() < 1e-12);
    }
}

TEST_CASE("circular trajectory spacing and counts") {
    CircleSpec spec;
    spec.radius = 7.75;
    spec.height = 3.75;
    spec.speed = 0.4;
    spec.prf = 30.0;

    const std::vector<Pose> poses = circular_trajectory(spec);
    CHECK(poses.size() == 3653);

    const double nominal = spec.speed / spec.prf;
    CHECK(nominal == doctest::Approx(13.3e-3).epsilon(1e-3));
    for (std::size_t n = 1; n < poses.size(); ++n) {
        const double chord =
            (poses[n].transform.translation - poses[n - 1].transform.translation).norm();
        const double arc = 2.0 * spec.radius * std::asin(chord / (2.0 * spec.radius));
        CHECK(std::abs(arc - nominal) / nominal < 1e-12);
        CHECK(poses[n].time > poses[n - 1].time);
    }

    for (const auto& p : poses) CHECK(p.transform.translation.z() == spec.height);
}

TEST_CASE("circular trajectory rejects degenerate specs") {
    CircleSpec spec;
    spec.radius = 7.75;
    spec.height = 3.75;
    spec.speed = 0.4;
    spec.prf = 30.0;

    CircleSpec bad = spec;
    bad.arc = 0.0;
    CHECK_THROWS_AS(circular_trajectory(bad), std::invalid_argument);
    bad = spec;
    bad.radius = -1.0;
    CHECK_THROWS_AS(circular_trajectory(bad), std::invalid_argument);
    bad = spec;
    bad.speed = 0.0;
    CHECK_THROWS_AS(circular_trajectory(bad), std::invalid_argument);
    bad = spec;
    bad.prf = -30.0;
    CHECK_THROWS_AS(circular_trajectory(bad), std::invalid_argument);
}

TEST_CASE("antenna track: identity, pure translation, rolled body") {
    CircleSpec spec;
    spec.radius = 2.0;
    spec.height = 3.0;
    spec.speed = 0.4;
    spec.prf = 10.0;
    const std::vector<Pose> body = circular_trajectory(spec);

    const std::vector<Pose> same = antenna_track(body, Transform::identity());
    for (std::size_t n = 0; n < body.size(); ++n) {
        CHECK(same[n].time == body[n].time);
        CHECK((same[n].transform.translation - body[n].transform.translation).norm() < 1e-15);
    }

    Transform down;
    down.translation = Eigen::Vector3d(0.0, 0.0, -0.3);
    const std::vector<Pose> lowered = antenna_track(body, down);
    for (std::size_t n = 0; n < body.size(); ++n)
        CHECK(lowered[n].transform.translation.z() == doctest::Approx(2.7).epsilon(1e-12));

    // rolled body with a lateral lever arm against the matrix oracle
    Transform lever;
    lever.translation = Eigen::Vector3d(0.0, 0.5, 0.0);
    std::vector<Pose> rolled = body;
    const Eigen::Quaterniond roll(Eigen::AngleAxisd(10.0 * EIGEN_PI / 180.0,
                                                    Eigen::Vector3d::UnitX()));
    for (auto& p : rolled) p.transform.rotation = (p.transform.rotation * roll).normalized();
    const std::vector<Pose> tracked = antenna_track(rolled, lever);
    for (std::size_t n = 0; n < rolled.size(); ++n) {
        const Eigen::Matrix4d oracle = rolled[n].transform.matrix() * lever.matrix();
        CHECK(max_abs(tracked[n].transform.matrix() - oracle) < 1e-12);
    }
}

TEST_CASE("antenna track commutes with world re-basing") {
    CircleSpec spec;
    spec.radius = 3.0;
    spec.height = 2.0;
    spec.speed = 0.5;
    spec.prf = 7.0;
    const std::vector<Pose> body = circular_trajectory(spec);

    detail::GaussianStream g(41);
    const Transform rebase = random_transform(g);
    const Transform lever = random_transform(g);

    std::vector<Pose> rebased = body;
    for (auto& p : rebased) p.transform = compose(rebase, p.transform);

    const std::vector<Pose> lhs = antenna_track(rebased, lever);
    std::vector<Pose> rhs = antenna_track(body, lever);
    for (auto& p : rhs) p.transform = compose(rebase, p.transform);

    for (std::size_t n = 0; n < body.size(); ++n) {
        CHECK((lhs[n].transform.translation - rhs[n].transform.translation).norm() < 1e-9);
        CHECK(rotation_angle(lhs[n].transform, rhs[n].transform) < 1e-9);
    }
}

TEST_CASE("predicted resolution at the reference geometry") {
    RadarParams radar;  // 1 GHz start, 3 GHz bandwidth
    const double incidence = std::atan2(7.75, 3.75);
    CHECK(incidence * 180.0 / EIGEN_PI == doctest::Approx(64.2).epsilon(2e-3));

    const ResolutionEstimate air = predicted_resolution(radar, incidence, 1.0, Medium::air);
    const double dcr_oracle = kSpeedOfLight / (4.0 * (radar.f0 + radar.bandwidth) *
                                               std::sin(incidence));
    CHECK(air.cross_range == doctest::Approx(dcr_oracle).epsilon(1e-12));
    CHECK(air.ground_range == doctest::Approx(dcr_oracle).epsilon(1e-12));
    CHECK(air.cross_range == doctest::Approx(0.0208).epsilon(2e-2));

    const ResolutionEstimate soil = predicted_resolution(radar, incidence, 8.0, Medium::soil);
    const double theta_t = std::asin(std::sin(incidence) / std::sqrt(8.0));
    CHECK(theta_t * 180.0 / EIGEN_PI == doctest::Approx(18.6).epsilon(1e-2));
    const double dz_oracle = 4.0 / (std::sqrt(2.0 * EIGEN_PI) * std::cos(theta_t)) *
                             (kSpeedOfLight / std::sqrt(8.0)) / (2.0 * radar.bandwidth);
    CHECK(soil.depth == doctest::Approx(dz_oracle).epsilon(1e-12));
    CHECK(soil.depth == doctest::Approx(0.030).epsilon(2e-2));
    // cross-range does not depend on the medium
    CHECK(soil.cross_range == doctest::Approx(air.cross_range).epsilon(1e-12));
}

TEST_CASE("predicted resolution grazing limit and monotonicity") {
    RadarParams radar;
    const double grazing = EIGEN_PI / 2.0 - 1e-9;
    const ResolutionEstimate limit = predicted_resolution(radar, grazing, 1.0, Medium::air);
    CHECK(limit.cross_range == doctest::Approx(kSpeedOfLight / (4.0 * 4.0e9)).epsilon(1e-6));
    CHECK(limit.cross_range == doctest::Approx(18.7e-3).epsilon(2e-3));

    double prev = predicted_resolution(radar, 0.01, 1.0, Medium::air).cross_range;
    for (double theta = 0.05; theta < EIGEN_PI / 2.0; theta += 0.05) {
        const double cur = predicted_resolution(radar, theta, 1.0, Medium::air).cross_range;
        CHECK(cur < prev);
        prev = cur;
    }

    CHECK_THROWS_AS(predicted_resolution(radar, 0.0, 1.0, Medium::air), std::invalid_argument);
    CHECK_THROWS_AS(predicted_resolution(radar, EIGEN_PI / 2.0, 1.0, Medium::air),
                    std::invalid_argument);
    CHECK_THROWS_AS(predicted_resolution(radar, 0.5, 0.5, Medium::soil), std::invalid_argument);
}
