#ifndef GPSAR_MOTION_HPP
#define GPSAR_MOTION_HPP

#include <cstdint>
#include <vector>

#include "gpsar/geometry.hpp"

namespace gpsar {

inline constexpr double kGravity = 9.80665;

struct ImuSample {
    double time = 0.0;
    Eigen::Vector3d angular_rate{0.0, 0.0, 0.0};        // rad/s, body frame
    Eigen::Vector3d linear_acceleration{0.0, 0.0, 0.0}; // m/s^2, body frame, specific force
};

struct PrismMeasurement {
    double time = 0.0;
    Eigen::Vector3d position{0.0, 0.0, 0.0};  // m, world frame
};

/// IMU noise densities in SI (rad/s/sqrt(Hz), m/s^2/sqrt(Hz)); the paper's
/// datasheet units convert via the *_from_* helpers.
struct ImuSpec {
    double rate = 200.0;  // Hz
    double gyro_noise_density = 1.9199e-4;
    double accel_noise_density = 1.8333e-3;
    double gyro_bias_std = 1.5e-4;   // rad/s, constant per run
    double accel_bias_std = 5.0e-3;  // m/s^2, constant per run

    static double gyro_density_from_deg_per_sqrt_hour(double arw);
    static double accel_density_from_mps_per_sqrt_hour(double vrw);
};

/// Total station tracking a prism; noise acts in spherical coordinates about
/// the station position.
struct StationSpec {
    Eigen::Vector3d position{10.0, 0.0, 1.5};  // m, world frame
    double rate = 20.0;          // Hz
    double distance_std = 4e-3;  // m
    double angle_std = 9.7738e-6;  // rad (2 arcsec)
};

/// Ground-truth kinematic sample for sensor simulation.
struct TruthSample {
    double time = 0.0;
    Transform transform;  // T_WB
    Eigen::Vector3d velocity{0.0, 0.0, 0.0};      // m/s, world
    Eigen::Vector3d acceleration{0.0, 0.0, 0.0};  // m/s^2, world
    Eigen::Vector3d angular_rate{0.0, 0.0, 0.0};  // rad/s, body
};

/// Closed-form circular flight sampled at `rate`, yaw tangent to the circle.
std::vector<TruthSample> circle_truth(const CircleSpec& spec, double rate);

struct SensorStreams {
    std::vector<ImuSample> imu;
    std::vector<PrismMeasurement> prism;
    Eigen::Vector3d gyro_bias{0.0, 0.0, 0.0};
    Eigen::Vector3d accel_bias{0.0, 0.0, 0.0};
};

/// IMU and prism measurements from truth; noise and the constant biases come
/// from the seeded generator. Truth must be sampled at the IMU rate or
/// faster.
SensorStreams simulate_sensors(const std::vector<TruthSample>& truth, const ImuSpec& imu,
                               const StationSpec& station, const Transform& t_bp,
                               std::uint64_t seed);

using Matrix15 = Eigen::Matrix<double, 15, 15>;

/// Error-state order: position, velocity, attitude, gyro bias, accel bias.
struct StateEstimate {
    double time = 0.0;
    Transform pose;  // T_WB
    Eigen::Vector3d velocity{0.0, 0.0, 0.0};
    Eigen::Vector3d gyro_bias{0.0, 0.0, 0.0};
    Eigen::Vector3d accel_bias{0.0, 0.0, 0.0};
    Matrix15 covariance = Matrix15::Zero();
};

struct EkfConfig {
    ImuSpec imu;
    StationSpec station;
    double gyro_bias_rw = 1e-7;   // rad/s/sqrt(Hz), keeps P conditioned
    double accel_bias_rw = 1e-6;  // m/s^2/sqrt(Hz)
    double init_position_std = 0.01;
    double init_velocity_std = 0.1;
    double init_tilt_std = 0.01;      // rad
    double init_heading_std = 0.0087; // rad, magnetometer prior (~0.5 deg)
    double meas_std_floor = 1e-5;     // m, lower bound on prism noise
};

/// Initial estimate from the take-off attitude (magnetometer-grade heading)
/// and the first absolute fix; covariance seeded from the config priors.
StateEstimate make_initial_state(const EkfConfig& cfg, double time, const Transform& pose,
                                 const Eigen::Vector3d& velocity);

/// Strapdown propagation of one IMU sample (zero-order hold over
/// [state.time, imu.time]); covariance propagated to first order. Throws on
/// non-monotonic time.
StateEstimate ekf_step(const EkfConfig& cfg, const StateEstimate& state, const ImuSample& imu);

/// Prism position update with lever-arm measurement model
/// p_WP = p_WB + R_WB t_bp. Throws if the measurement is staler than one IMU
/// period.
StateEstimate ekf_update(const EkfConfig& cfg, const StateEstimate& state,
                         const PrismMeasurement& meas, const Transform& t_bp);

struct EkfStepRecord {
    StateEstimate predicted;  // before any update at this time
    StateEstimate filtered;   // after update, if one was applied
    Matrix15 transition;      // error-state F from the previous step
};

struct EkfHistory {
    std::vector<EkfStepRecord> steps;
    std::vector<ImuSample> imu;  // the consumed stream, for resampling
};

/// Forward EKF over time-merged IMU and prism streams (each individually
/// time-ordered). The initial state orientation/position come from `init`.
EkfHistory run_ekf(const EkfConfig& cfg, const StateEstimate& init,
                   const std::vector<ImuSample>& imu,
                   const std::vector<PrismMeasurement>& prism, const Transform& t_bp);

/// Rauch-Tung-Striebel fixed-interval smoother over the EKF history.
std::vector<StateEstimate> rts_smooth(const EkfHistory& history);

/// Smoothed states IMU-integrated to each radar timestamp. Throws if a
/// timestamp falls outside the estimated span.
std::vector<Pose> smooth_and_resample(const EkfHistory& history,
                                      const std::vector<double>& t_radar);

/// Eq.-4 style lever-arm application for both antennas.
std::pair<std::vector<Pose>, std::vector<Pose>> antenna_phase_centers(
    const std::vector<Pose>& poses, const Transform& t_ba1, const Transform& t_ba2);

/// Piecewise-linear interpolation of prism fixes (test/analysis baseline).
Eigen::Vector3d interpolate_prism(const std::vector<PrismMeasurement>& prism, double t);

}  // namespace gpsar

#endif
