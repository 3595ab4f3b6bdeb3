#include "gpsar/motion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gpsar/random.hpp"

namespace gpsar {

namespace {

constexpr int kPos = 0, kVel = 3, kAtt = 6, kGyroBias = 9, kAccelBias = 12;

const Eigen::Vector3d kGravityVector(0.0, 0.0, -kGravity);

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
    Eigen::Matrix3d m;
    m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
    return m;
}

Eigen::Quaterniond quat_exp(const Eigen::Vector3d& theta) {
    const double angle = theta.norm();
    if (angle < 1e-12) {
        Eigen::Quaterniond q(1.0, 0.5 * theta.x(), 0.5 * theta.y(), 0.5 * theta.z());
        q.normalize();
        return q;
    }
    return Eigen::Quaterniond(Eigen::AngleAxisd(angle, theta / angle));
}

Eigen::Vector3d quat_log(const Eigen::Quaterniond& q) {
    const Eigen::AngleAxisd aa(q);
    double angle = aa.angle();
    if (angle > EIGEN_PI) angle -= 2.0 * EIGEN_PI;
    return angle * aa.axis();
}

using Vector15 = Eigen::Matrix<double, 15, 1>;

Vector15 boxminus(const StateEstimate& a, const StateEstimate& b) {
    Vector15 d;
    d.segment<3>(kPos) = a.pose.translation - b.pose.translation;
    d.segment<3>(kVel) = a.velocity - b.velocity;
    d.segment<3>(kAtt) = quat_log(b.pose.rotation.conjugate() * a.pose.rotation);
    d.segment<3>(kGyroBias) = a.gyro_bias - b.gyro_bias;
    d.segment<3>(kAccelBias) = a.accel_bias - b.accel_bias;
    return d;
}

void boxplus(StateEstimate& s, const Vector15& d) {
    s.pose.translation += d.segment<3>(kPos);
    s.velocity += d.segment<3>(kVel);
    s.pose.rotation = (s.pose.rotation * quat_exp(d.segment<3>(kAtt))).normalized();
    s.gyro_bias += d.segment<3>(kGyroBias);
    s.accel_bias += d.segment<3>(kAccelBias);
}

// Nominal-state strapdown over [state.time, t] with the sample held constant.
void propagate_nominal(StateEstimate& s, const ImuSample& imu, double t) {
    const double dt = t - s.time;
    const Eigen::Vector3d omega = imu.angular_rate - s.gyro_bias;
    const Eigen::Vector3d accel = imu.linear_acceleration - s.accel_bias;
    const Eigen::Matrix3d rot = s.pose.rotation.toRotationMatrix();
    const Eigen::Vector3d a_world = rot * accel + kGravityVector;
    s.pose.translation += s.velocity * dt + 0.5 * a_world * dt * dt;
    s.velocity += a_world * dt;
    s.pose.rotation = (s.pose.rotation * quat_exp(omega * dt)).normalized();
    s.time = t;
}

StateEstimate step_with_transition(const EkfConfig& cfg, const StateEstimate& state,
                                   const ImuSample& imu, Matrix15* transition) {
    if (!(imu.time > state.time))
        throw std::invalid_argument("ekf_step: IMU time must advance");
    const double dt = imu.time - state.time;

    StateEstimate next = state;
    const Eigen::Vector3d omega = imu.angular_rate - state.gyro_bias;
    const Eigen::Vector3d accel = imu.linear_acceleration - state.accel_bias;
    const Eigen::Matrix3d rot = state.pose.rotation.toRotationMatrix();
    propagate_nominal(next, imu, imu.time);

    Matrix15 f = Matrix15::Identity();
    f.block<3, 3>(kPos, kVel) = Eigen::Matrix3d::Identity() * dt;
    f.block<3, 3>(kVel, kAtt) = -rot * skew(accel) * dt;
    f.block<3, 3>(kVel, kAccelBias) = -rot * dt;
    f.block<3, 3>(kAtt, kAtt) = quat_exp(-omega * dt).toRotationMatrix();
    f.block<3, 3>(kAtt, kGyroBias) = -Eigen::Matrix3d::Identity() * dt;

    const double qa = cfg.imu.accel_noise_density * cfg.imu.accel_noise_density * dt;
    const double qg = cfg.imu.gyro_noise_density * cfg.imu.gyro_noise_density * dt;
    Matrix15 q = Matrix15::Zero();
    q.block<3, 3>(kPos, kPos) = Eigen::Matrix3d::Identity() * (qa * dt * dt / 3.0);
    q.block<3, 3>(kVel, kVel) = Eigen::Matrix3d::Identity() * qa;
    q.block<3, 3>(kAtt, kAtt) = Eigen::Matrix3d::Identity() * qg;
    q.block<3, 3>(kGyroBias, kGyroBias) =
        Eigen::Matrix3d::Identity() * (cfg.gyro_bias_rw * cfg.gyro_bias_rw * dt);
    q.block<3, 3>(kAccelBias, kAccelBias) =
        Eigen::Matrix3d::Identity() * (cfg.accel_bias_rw * cfg.accel_bias_rw * dt);

    next.covariance = f * state.covariance * f.transpose() + q;
    next.covariance = 0.5 * (next.covariance + next.covariance.transpose()).eval();
    if (transition) *transition = f;
    return next;
}

// Prism noise covariance in Cartesian coordinates from the station's
// distance/angle accuracies at the given point.
Eigen::Matrix3d prism_noise_covariance(const StationSpec& station, double floor_std,
                                       const Eigen::Vector3d& point) {
    const Eigen::Vector3d rel = point - station.position;
    const double r = std::max(rel.norm(), 1e-3);
    const Eigen::Vector3d radial = rel / r;
    const Eigen::Vector3d az_dir = Eigen::Vector3d(-radial.y(), radial.x(), 0.0).normalized();
    const Eigen::Vector3d el_dir = radial.cross(az_dir);
    const double sd = station.distance_std;
    const double st = station.angle_std * r;
    Eigen::Matrix3d cov = sd * sd * radial * radial.transpose() +
                          st * st * (az_dir * az_dir.transpose() + el_dir * el_dir.transpose());
    cov += floor_std * floor_std * Eigen::Matrix3d::Identity();
    return cov;
}

}  // namespace

double ImuSpec::gyro_density_from_deg_per_sqrt_hour(double arw) {
    return arw * EIGEN_PI / 180.0 / 60.0;
}

double ImuSpec::accel_density_from_mps_per_sqrt_hour(double vrw) { return vrw / 60.0; }

std::vector<TruthSample> circle_truth(const CircleSpec& spec, double rate) {
    if (rate <= 0.0) throw std::invalid_argument("circle_truth: rate must be positive");
    if (spec.radius <= 0.0 || spec.speed <= 0.0)
        throw std::invalid_argument("circle_truth: degenerate circle");
    const double omega = spec.speed / spec.radius;  // counter-clockwise
    const double duration = spec.arc * spec.radius / spec.speed;
    const auto count = static_cast<std::size_t>(std::floor(duration * rate)) + 1;
    std::vector<TruthSample> truth(count);
    for (std::size_t k = 0; k < count; ++k) {
        const double t = static_cast<double>(k) / rate;
        const double az = spec.start_azimuth + omega * t;
        TruthSample& s = truth[k];
        s.time = t;
        s.transform.translation = spec.center +
            Eigen::Vector3d(spec.radius * std::cos(az), spec.radius * std::sin(az), spec.height);
        s.transform.rotation =
            Eigen::Quaterniond(Eigen::AngleAxisd(az + EIGEN_PI / 2.0, Eigen::Vector3d::UnitZ()));
        s.velocity = spec.speed * Eigen::Vector3d(-std::sin(az), std::cos(az), 0.0);
        s.acceleration = -spec.speed * omega * Eigen::Vector3d(std::cos(az), std::sin(az), 0.0);
        s.angular_rate = Eigen::Vector3d(0.0, 0.0, omega);
    }
    return truth;
}

SensorStreams simulate_sensors(const std::vector<TruthSample>& truth, const ImuSpec& imu,
                               const StationSpec& station, const Transform& t_bp,
                               std::uint64_t seed) {
    if (truth.size() < 2) throw std::invalid_argument("simulate_sensors: need at least two truth samples");
    const double truth_dt = truth[1].time - truth[0].time;
    if (truth_dt > 1.0 / imu.rate + 1e-9)
        throw std::invalid_argument("simulate_sensors: truth sampled slower than the IMU rate");

    detail::GaussianStream g(seed);
    SensorStreams streams;
    streams.gyro_bias =
        imu.gyro_bias_std * Eigen::Vector3d(g.normal(), g.normal(), g.normal());
    streams.accel_bias =
        imu.accel_bias_std * Eigen::Vector3d(g.normal(), g.normal(), g.normal());

    const double gyro_std = imu.gyro_noise_density * std::sqrt(imu.rate);
    const double accel_std = imu.accel_noise_density * std::sqrt(imu.rate);

    streams.imu.reserve(truth.size());
    for (const auto& s : truth) {
        ImuSample m;
        m.time = s.time;
        const Eigen::Matrix3d rot_t = s.transform.rotation.toRotationMatrix().transpose();
        m.angular_rate = s.angular_rate + streams.gyro_bias +
                         gyro_std * Eigen::Vector3d(g.normal(), g.normal(), g.normal());
        m.linear_acceleration = rot_t * (s.acceleration - kGravityVector) + streams.accel_bias +
                                accel_std * Eigen::Vector3d(g.normal(), g.normal(), g.normal());
        streams.imu.push_back(m);
    }

    const double span = truth.back().time - truth.front().time;
    const auto n_prism = static_cast<std::size_t>(std::floor(span * station.rate)) + 1;
    streams.prism.reserve(n_prism);
    for (std::size_t k = 0; k < n_prism; ++k) {
        const double t = truth.front().time + static_cast<double>(k) / station.rate;
        const auto idx = std::min(static_cast<std::size_t>(std::round((t - truth.front().time) / truth_dt)),
                                  truth.size() - 1);
        const TruthSample& s = truth[idx];
        const Eigen::Vector3d prism_true = apply(s.transform, t_bp.translation);
        const Eigen::Vector3d rel = prism_true - station.position;
        const double r = rel.norm();
        const double az = std::atan2(rel.y(), rel.x());
        const double el = std::asin(rel.z() / r);
        const double rn = r + station.distance_std * g.normal();
        const double azn = az + station.angle_std * g.normal();
        const double eln = el + station.angle_std * g.normal();
        PrismMeasurement m;
        m.time = s.time;
        m.position = station.position +
                     rn * Eigen::Vector3d(std::cos(eln) * std::cos(azn),
                                          std::cos(eln) * std::sin(azn), std::sin(eln));
        streams.prism.push_back(m);
    }
    return streams;
}

StateEstimate make_initial_state(const EkfConfig& cfg, double time, const Transform& pose,
                                 const Eigen::Vector3d& velocity) {
    StateEstimate s;
    s.time = time;
    s.pose = pose;
    s.velocity = velocity;
    Matrix15 p = Matrix15::Zero();
    p.block<3, 3>(kPos, kPos) =
        Eigen::Matrix3d::Identity() * cfg.init_position_std * cfg.init_position_std;
    p.block<3, 3>(kVel, kVel) =
        Eigen::Matrix3d::Identity() * cfg.init_velocity_std * cfg.init_velocity_std;
    p.block<3, 3>(kAtt, kAtt) =
        Eigen::Vector3d(cfg.init_tilt_std * cfg.init_tilt_std,
                        cfg.init_tilt_std * cfg.init_tilt_std,
                        cfg.init_heading_std * cfg.init_heading_std)
            .asDiagonal();
    p.block<3, 3>(kGyroBias, kGyroBias) =
        Eigen::Matrix3d::Identity() * cfg.imu.gyro_bias_std * cfg.imu.gyro_bias_std;
    p.block<3, 3>(kAccelBias, kAccelBias) =
        Eigen::Matrix3d::Identity() * cfg.imu.accel_bias_std * cfg.imu.accel_bias_std;
    s.covariance = p;
    return s;
}

StateEstimate ekf_step(const EkfConfig& cfg, const StateEstimate& state, const ImuSample& imu) {
    return step_with_transition(cfg, state, imu, nullptr);
}

StateEstimate ekf_update(const EkfConfig& cfg, const StateEstimate& state,
                         const PrismMeasurement& meas, const Transform& t_bp) {
    if (std::abs(meas.time - state.time) > 1.0 / cfg.imu.rate + 1e-9)
        throw std::invalid_argument("ekf_update: measurement staler than one IMU period");

    const Eigen::Matrix3d rot = state.pose.rotation.toRotationMatrix();
    const Eigen::Vector3d predicted = state.pose.translation + rot * t_bp.translation;
    const Eigen::Vector3d innovation = meas.position - predicted;

    Eigen::Matrix<double, 3, 15> h = Eigen::Matrix<double, 3, 15>::Zero();
    h.block<3, 3>(0, kPos) = Eigen::Matrix3d::Identity();
    h.block<3, 3>(0, kAtt) = -rot * skew(t_bp.translation);

    const Eigen::Matrix3d r_meas =
        prism_noise_covariance(cfg.station, cfg.meas_std_floor, meas.position);
    const Eigen::Matrix3d s = h * state.covariance * h.transpose() + r_meas;
    const Eigen::Matrix<double, 15, 3> k =
        state.covariance * h.transpose() * s.ldlt().solve(Eigen::Matrix3d::Identity());

    StateEstimate next = state;
    boxplus(next, k * innovation);
    const Matrix15 ikh = Matrix15::Identity() - k * h;
    next.covariance = ikh * state.covariance * ikh.transpose() + k * r_meas * k.transpose();
    next.covariance = 0.5 * (next.covariance + next.covariance.transpose()).eval();
    return next;
}

EkfHistory run_ekf(const EkfConfig& cfg, const StateEstimate& init,
                   const std::vector<ImuSample>& imu,
                   const std::vector<PrismMeasurement>& prism, const Transform& t_bp) {
    EkfHistory history;
    history.imu = imu;
    StateEstimate state = init;

    EkfStepRecord first;
    first.predicted = state;
    first.filtered = state;
    first.transition = Matrix15::Identity();
    history.steps.push_back(first);

    std::size_t pp = 0;
    // measurements at or before the initial time are consumed by the init
    while (pp < prism.size() && prism[pp].time <= state.time + 1e-12) ++pp;

    for (const auto& sample : imu) {
        if (sample.time <= state.time + 1e-12) continue;
        EkfStepRecord rec;
        state = step_with_transition(cfg, state, sample, &rec.transition);
        rec.predicted = state;
        while (pp < prism.size() && prism[pp].time <= state.time + 1e-9) {
            state = ekf_update(cfg, state, prism[pp], t_bp);
            ++pp;
        }
        rec.filtered = state;
        history.steps.push_back(rec);
    }
    return history;
}

std::vector<StateEstimate> rts_smooth(const EkfHistory& history) {
    const std::size_t n = history.steps.size();
    if (n == 0) return {};
    std::vector<StateEstimate> smoothed(n);
    smoothed[n - 1] = history.steps[n - 1].filtered;
    for (std::size_t k = n - 1; k-- > 0;) {
        const EkfStepRecord& next = history.steps[k + 1];
        const StateEstimate& filtered = history.steps[k].filtered;
        const Matrix15 gain = filtered.covariance * next.transition.transpose() *
                              next.predicted.covariance.ldlt().solve(Matrix15::Identity());
        const Vector15 delta = gain * boxminus(smoothed[k + 1], next.predicted);
        smoothed[k] = filtered;
        boxplus(smoothed[k], delta);
        smoothed[k].covariance =
            filtered.covariance +
            gain * (smoothed[k + 1].covariance - next.predicted.covariance) * gain.transpose();
        smoothed[k].covariance =
            0.5 * (smoothed[k].covariance + smoothed[k].covariance.transpose()).eval();
    }
    return smoothed;
}

std::vector<Pose> smooth_and_resample(const EkfHistory& history,
                                      const std::vector<double>& t_radar) {
    if (history.steps.empty()) throw std::invalid_argument("smooth_and_resample: empty history");
    const std::vector<StateEstimate> smoothed = rts_smooth(history);
    const double t0 = smoothed.front().time;
    const double t1 = smoothed.back().time;

    std::vector<double> times(smoothed.size());
    for (std::size_t i = 0; i < smoothed.size(); ++i) times[i] = smoothed[i].time;

    std::vector<Pose> poses;
    poses.reserve(t_radar.size());
    for (const double t : t_radar) {
        if (t < t0 - 1e-9 || t > t1 + 1e-9)
            throw std::invalid_argument("smooth_and_resample: radar timestamp outside the estimated span");
        const auto it = std::upper_bound(times.begin(), times.end(), t);
        const auto idx = static_cast<std::size_t>(std::max<std::ptrdiff_t>(
            0, std::distance(times.begin(), it) - 1));
        StateEstimate s = smoothed[idx];
        if (t > s.time + 1e-12) {
            // IMU-integrate forward, each sample held over the interval it ends
            for (const auto& m : history.imu) {
                if (m.time <= s.time + 1e-12) continue;
                if (m.time >= t) { propagate_nominal(s, m, t); break; }
                propagate_nominal(s, m, m.time);
            }
            if (s.time < t) propagate_nominal(s, history.imu.back(), t);
        }
        poses.push_back({t, s.pose});
    }
    return poses;
}

std::pair<std::vector<Pose>, std::vector<Pose>> antenna_phase_centers(
    const std::vector<Pose>& poses, const Transform& t_ba1, const Transform& t_ba2) {
    return {antenna_track(poses, t_ba1), antenna_track(poses, t_ba2)};
}

Eigen::Vector3d interpolate_prism(const std::vector<PrismMeasurement>& prism, double t) {
    if (prism.empty()) throw std::invalid_argument("interpolate_prism: no measurements");
    if (t <= prism.front().time) return prism.front().position;
    if (t >= prism.back().time) return prism.back().position;
    const auto it = std::upper_bound(prism.begin(), prism.end(), t,
                                     [](double v, const PrismMeasurement& m) { return v < m.time; });
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double f = (t - lo.time) / (hi.time - lo.time);
    return lo.position + f * (hi.position - lo.position);
}

}  // namespace gpsar
