#ifndef GPSAR_GEOMETRY_HPP
#define GPSAR_GEOMETRY_HPP

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <stdexcept>
#include <vector>

namespace gpsar {

inline constexpr double kSpeedOfLight = 299792458.0;

/// Rigid 6-DoF transform, world-from-frame convention.
/// Rotation is a unit Hamilton quaternion, renormalized after composition.
struct Transform {
    Eigen::Quaterniond rotation{1.0, 0.0, 0.0, 0.0};
    Eigen::Vector3d translation{0.0, 0.0, 0.0};

    static Transform identity() { return {}; }

    Eigen::Matrix4d matrix() const;
};

Transform compose(const Transform& a, const Transform& b);
Transform inverse(const Transform& t);
Eigen::Vector3d apply(const Transform& t, const Eigen::Vector3d& p);

/// Rotation angle (rad) between two transforms, translation offset norm.
double rotation_angle(const Transform& a, const Transform& b);

struct Pose {
    double time = 0.0;  // s
    Transform transform;
};

/// Circular aperture flown at constant speed and height.
struct CircleSpec {
    Eigen::Vector3d center{0.0, 0.0, 0.0};
    double radius = 0.0;         // m
    double height = 0.0;         // m, z of the trajectory
    double speed = 0.0;          // m/s
    double prf = 0.0;            // Hz, chirp repetition frequency
    double start_azimuth = 0.0;  // rad
    double arc = 2.0 * EIGEN_PI; // rad, 2*pi for a full circle
};

/// Poses at 1/prf intervals along the arc, body yaw tangent to the circle
/// (zero roll/pitch). Arc-length spacing between consecutive poses is
/// speed/prf. Throws std::invalid_argument on a degenerate spec.
std::vector<Pose> circular_trajectory(const CircleSpec& spec);

/// Per-pose composition body * t_ba, timestamps preserved.
std::vector<Pose> antenna_track(const std::vector<Pose>& body, const Transform& t_ba);

struct RadarParams;  // signal.hpp

enum class Medium { air, soil };

struct ResolutionEstimate {
    double cross_range;   // m
    double ground_range;  // m
    double depth;         // m, z-direction
};

/// CSAR resolution bounds for an isotropic target: cross/ground range from
/// the swept RF band at incidence angle theta_i, z from the bandwidth at the
/// (possibly refracted) incidence angle. For soil the refracted angle
/// asin(sin(theta_i)/sqrt(er)) and the slowed wave speed are used.
ResolutionEstimate predicted_resolution(const RadarParams& radar, double incidence,
                                        double er, Medium medium);

}  // namespace gpsar

#endif
