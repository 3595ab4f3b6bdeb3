#include "gpsar/geometry.hpp"

#include <cmath>

#include "gpsar/signal.hpp"

namespace gpsar {

Eigen::Matrix4d Transform::matrix() const {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m.block<3, 3>(0, 0) = rotation.toRotationMatrix();
    m.block<3, 1>(0, 3) = translation;
    return m;
}

Transform compose(const Transform& a, const Transform& b) {
    Transform out;
    out.rotation = a.rotation * b.rotation;
    out.rotation.normalize();
    out.translation = a.rotation * b.translation + a.translation;
    return out;
}

Transform inverse(const Transform& t) {
    Transform out;
    out.rotation = t.rotation.conjugate();
    out.translation = -(out.rotation * t.translation);
    return out;
}

Eigen::Vector3d apply(const Transform& t, const Eigen::Vector3d& p) {
    return t.rotation * p + t.translation;
}

double rotation_angle(const Transform& a, const Transform& b) {
    return a.rotation.angularDistance(b.rotation);
}

std::vector<Pose> circular_trajectory(const CircleSpec& spec) {
    if (spec.radius <= 0.0) throw std::invalid_argument("circular_trajectory: radius must be positive");
    if (spec.speed <= 0.0) throw std::invalid_argument("circular_trajectory: speed must be positive");
    if (spec.prf <= 0.0) throw std::invalid_argument("circular_trajectory: prf must be positive");
    const double spacing = spec.speed / spec.prf;
    const double arc_length = spec.arc * spec.radius;
    if (arc_length / spacing < 1.0)
        throw std::invalid_argument("circular_trajectory: arc holds fewer than one sampling interval");

    const std::size_t count = static_cast<std::size_t>(std::floor(arc_length / spacing)) + 1;
    const double dpsi = spacing / spec.radius;  // azimuth step per chirp
    std::vector<Pose> poses(count);
    for (std::size_t k = 0; k < count; ++k) {
        const double az = spec.start_azimuth + dpsi * static_cast<double>(k);
        Pose& pose = poses[k];
        pose.time = static_cast<double>(k) / spec.prf;
        pose.transform.translation = spec.center +
            Eigen::Vector3d(spec.radius * std::cos(az), spec.radius * std::sin(az), spec.height);
        // yaw along the velocity tangent (counter-clockwise travel)
        pose.transform.rotation =
            Eigen::Quaterniond(Eigen::AngleAxisd(az + EIGEN_PI / 2.0, Eigen::Vector3d::UnitZ()));
    }
    return poses;
}

std::vector<Pose> antenna_track(const std::vector<Pose>& body, const Transform& t_ba) {
    std::vector<Pose> out(body.size());
    for (std::size_t i = 0; i < body.size(); ++i) {
        out[i].time = body[i].time;
        out[i].transform = compose(body[i].transform, t_ba);
    }
    return out;
}

ResolutionEstimate predicted_resolution(const RadarParams& radar, double incidence,
                                        double er, Medium medium) {
    if (!(incidence > 0.0 && incidence < static_cast<double>(EIGEN_PI) / 2.0))
        throw std::invalid_argument("predicted_resolution: incidence must lie in (0, pi/2)");
    if (er < 1.0) throw std::invalid_argument("predicted_resolution: er must be >= 1");

    ResolutionEstimate res;
    res.cross_range = kSpeedOfLight / (4.0 * (radar.f0 + radar.bandwidth) * std::sin(incidence));
    res.ground_range = res.cross_range;

    double theta = incidence;
    double c = kSpeedOfLight;
    if (medium == Medium::soil) {
        theta = std::asin(std::sin(incidence) / std::sqrt(er));
        c = kSpeedOfLight / std::sqrt(er);
    }
    res.depth = 4.0 / (std::sqrt(2.0 * EIGEN_PI) * std::cos(theta)) * c / (2.0 * radar.bandwidth);
    return res;
}

}  // namespace gpsar
