#include "gpsar/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "gpsar/analysis.hpp"
#include "gpsar/detection.hpp"
#include "gpsar/motion.hpp"
#include "gpsar/propagation.hpp"

namespace gpsar {

namespace fs = std::filesystem;

namespace {

std::uint64_t effective_seed(const Scenario& s, const RunOptions& o) {
    return o.has_seed_override ? o.seed_override : s.seed;
}

double effective_er(const Scenario& s, const RunOptions& o) {
    return o.er_override >= 1.0 ? o.er_override : s.scene.er;
}

std::string path_in(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

std::string recording_name(std::size_t k) { return "aperture_" + std::to_string(k) + ".gpsarraw"; }
std::string truth_name(std::size_t k) { return "truth_aperture_" + std::to_string(k) + ".csv"; }
std::string estimate_name(std::size_t k) { return "est_aperture_" + std::to_string(k) + ".csv"; }

std::uint64_t aperture_chirp_base(const Scenario& scenario, std::size_t aperture_index) {
    std::uint64_t base = 0;
    for (std::size_t k = 0; k < aperture_index; ++k)
        base += circular_trajectory(scenario.apertures[k]).size();
    return base;
}

/// Estimated body trajectory for one aperture: simulated IMU + total-station
/// prism fixes, forward EKF, RTS smoothing, resampled to the radar times.
std::vector<Pose> estimate_aperture_trajectory(const Scenario& scenario,
                                               std::size_t aperture_index,
                                               std::uint64_t seed) {
    const CircleSpec& circle = scenario.apertures[aperture_index];
    const std::vector<Pose> radar_poses = circular_trajectory(circle);

    const std::vector<TruthSample> truth = circle_truth(circle, scenario.motion.imu.rate);
    const std::uint64_t sensor_seed = chirp_seed(seed, 0x0e571000ULL + aperture_index);
    const SensorStreams streams = simulate_sensors(truth, scenario.motion.imu,
                                                   scenario.motion.station,
                                                   scenario.motion.t_bp, sensor_seed);

    EkfConfig cfg;
    cfg.imu = scenario.motion.imu;
    cfg.station = scenario.motion.station;
    const StateEstimate init =
        make_initial_state(cfg, truth.front().time, truth.front().transform,
                           truth.front().velocity);
    const EkfHistory history =
        run_ekf(cfg, init, streams.imu, streams.prism, scenario.motion.t_bp);

    std::vector<double> t_radar(radar_poses.size());
    for (std::size_t i = 0; i < radar_poses.size(); ++i) t_radar[i] = radar_poses[i].time;
    return smooth_and_resample(history, t_radar);
}

struct PeakLocation {
    int i = 0, j = 0, k = 0;
    double magnitude = 0.0;
};

PeakLocation find_volume_peak(const ImageVolume& volume) {
    PeakLocation peak;
    for (std::size_t k = 0; k < volume.planes.size(); ++k)
        for (int j = 0; j < volume.grid.ny; ++j)
            for (int i = 0; i < volume.grid.nx; ++i) {
                const double m =
                    std::abs(volume.planes[k][static_cast<std::size_t>(j) * volume.grid.nx + i]);
                if (m > peak.magnitude) {
                    peak.magnitude = m;
                    peak.i = i;
                    peak.j = j;
                    peak.k = static_cast<int>(k);
                }
            }
    return peak;
}

ImageVolume load_focused_volume(const std::string& out_dir) {
    const std::string path = path_in(out_dir, "volume.gpsarvol");
    if (!fs::exists(path))
        throw std::runtime_error("missing " + path + "; run the focus stage first");
    return read_volume(path);
}

}  // namespace

double swath_max_delay(const Scenario& scenario) {
    const GridSpec& g = scenario.grid;
    const double c0 = kSpeedOfLight;
    const double c1 = wave_speed(scenario.scene.er);
    const double depth = std::max(0.0, scenario.scene.interface_z - g.z_bottom);
    const double x_far = std::max(std::abs(g.x0), std::abs(g.x(g.nx - 1)));
    const double y_far = std::max(std::abs(g.y0), std::abs(g.y(g.ny - 1)));

    double worst = 0.0;
    for (const auto& circle : scenario.apertures) {
        const double horiz = std::hypot(std::abs(circle.center.x()) + x_far,
                                        std::abs(circle.center.y()) + y_far) +
                             circle.radius;
        const double vert = circle.height - std::min(scenario.scene.interface_z, g.z_bottom);
        const double air = std::hypot(horiz, vert);
        worst = std::max(worst, 2.0 * (air / c0 + depth / c1));
    }
    return worst * 1.05;
}

Recording simulate_aperture(const Scenario& scenario, std::size_t aperture_index,
                            const RunOptions& opts) {
    if (aperture_index >= scenario.apertures.size())
        throw std::out_of_range("simulate_aperture: aperture index out of range");
    const std::uint64_t seed = effective_seed(scenario, opts);
    const std::uint64_t base = aperture_chirp_base(scenario, aperture_index);

    const std::vector<Pose> body = circular_trajectory(scenario.apertures[aperture_index]);
    const std::vector<Pose> tx = antenna_track(body, scenario.motion.t_ba1);
    const std::vector<Pose> rx = antenna_track(body, scenario.motion.t_ba2);

    Scene scene = scenario.scene;
    scene.er = effective_er(scenario, opts);

    Recording rec;
    rec.radar = scenario.radar;
    rec.chirps.resize(body.size());
    for (std::size_t n = 0; n < body.size(); ++n)
        rec.chirps[n] = synthesize_chirp(rec.radar, tx[n], rx[n], scene,
                                         chirp_seed(seed, base + n));
    return rec;
}

std::vector<RangeProfile> compress_recording(const Recording& recording, int pad_factor,
                                             double max_delay) {
    std::vector<RangeProfile> profiles(recording.chirps.size());
    for (std::size_t n = 0; n < recording.chirps.size(); ++n)
        profiles[n] = range_compress(recording.radar, recording.chirps[n], pad_factor, max_delay);
    return profiles;
}

void write_manifest(const Scenario& scenario, const std::string& out_dir,
                    const std::string& stage, const RunOptions& opts) {
    nlohmann::json m;
    m["stage"] = stage;
    m["scenario_version"] = scenario.version;
    m["seed"] = effective_seed(scenario, opts);
    m["workers"] = opts.workers;
    m["pad_factor"] = opts.pad_factor;
    m["er"] = effective_er(scenario, opts);
    m["truth_trajectory"] = opts.truth_trajectory;
    m["monostatic"] = opts.monostatic;
    m["scenario_hash"] = fnv1a64(emit_scenario(scenario));
    std::ofstream out(path_in(out_dir, "manifest.json"));
    if (!out) throw std::runtime_error("cannot write manifest in " + out_dir);
    out << m.dump(2) << "\n";
}

void run_simulate(const Scenario& scenario, const std::string& out_dir, const RunOptions& opts) {
    fs::create_directories(out_dir);
    for (std::size_t k = 0; k < scenario.apertures.size(); ++k) {
        const Recording rec = simulate_aperture(scenario, k, opts);
        write_recording(path_in(out_dir, recording_name(k)), rec);
        std::vector<Pose> body = circular_trajectory(scenario.apertures[k]);
        write_trajectory_csv(path_in(out_dir, truth_name(k)), body);
    }
    write_manifest(scenario, out_dir, "simulate", opts);
}

void run_estimate(const Scenario& scenario, const std::string& out_dir, const RunOptions& opts) {
    fs::create_directories(out_dir);
    const std::uint64_t seed = effective_seed(scenario, opts);
    for (std::size_t k = 0; k < scenario.apertures.size(); ++k) {
        std::vector<Pose> body;
        if (opts.truth_trajectory || !scenario.motion.enabled)
            body = circular_trajectory(scenario.apertures[k]);
        else
            body = estimate_aperture_trajectory(scenario, k, seed);
        write_trajectory_csv(path_in(out_dir, estimate_name(k)), body);
    }
    write_manifest(scenario, out_dir, "estimate", opts);
}

void run_focus(const Scenario& scenario, const std::string& out_dir, const RunOptions& opts) {
    fs::create_directories(out_dir);
    const double er = effective_er(scenario, opts);
    const double max_delay = swath_max_delay(scenario);

    FocusOptions fopts;
    fopts.workers = opts.workers;
    fopts.monostatic = opts.monostatic;

    std::vector<ImageVolume> volumes;
    for (std::size_t k = 0; k < scenario.apertures.size(); ++k) {
        const std::string rec_path = path_in(out_dir, recording_name(k));
        if (!fs::exists(rec_path))
            throw std::runtime_error("missing " + rec_path + "; run the simulate stage first");
        Recording rec = read_recording(rec_path);

        const bool use_estimate = scenario.motion.enabled && !opts.truth_trajectory;
        if (use_estimate) {
            const std::string traj_path = path_in(out_dir, estimate_name(k));
            if (!fs::exists(traj_path))
                throw std::runtime_error("missing " + traj_path + "; run the estimate stage first");
            const std::vector<Pose> body = read_trajectory_csv(traj_path);
            if (body.size() != rec.chirps.size())
                throw std::runtime_error(traj_path + ": pose count does not match the recording");
            const std::vector<Pose> tx = antenna_track(body, scenario.motion.t_ba1);
            const std::vector<Pose> rx = antenna_track(body, scenario.motion.t_ba2);
            for (std::size_t n = 0; n < rec.chirps.size(); ++n) {
                rec.chirps[n].tx_pose = tx[n];
                rec.chirps[n].rx_pose = rx[n];
            }
        }

        const std::vector<RangeProfile> profiles =
            compress_recording(rec, opts.pad_factor, max_delay);
        ImageVolume vol = focus_volume(profiles, rec.radar, scenario.grid,
                                       scenario.scene.interface_z, er, fopts);
        vol.aperture_ids = {static_cast<std::uint32_t>(k)};
        volumes.push_back(std::move(vol));
    }

    const ImageVolume combined = volumes.size() == 1 ? std::move(volumes.front())
                                                     : coherent_sum(volumes);
    write_volume(path_in(out_dir, "volume.gpsarvol"), combined);

    const PeakLocation peak = find_volume_peak(combined);
    if (peak.magnitude > 0.0)
        write_plane_pgm(path_in(out_dir, "peak_plane.pgm"),
                        combined.planes[static_cast<std::size_t>(peak.k)], combined.grid,
                        peak.magnitude);
    write_manifest(scenario, out_dir, "focus", opts);
}

void run_profile(const Scenario& scenario, const std::string& out_dir, const RunOptions& opts) {
    const ImageVolume volume = load_focused_volume(out_dir);

    std::vector<BoxRegion> boxes = scenario.boxes;
    if (boxes.empty()) {
        BoxRegion center;
        center.cx = (volume.grid.x0 + volume.grid.x(volume.grid.nx - 1)) / 2.0;
        center.cy = (volume.grid.y0 + volume.grid.y(volume.grid.ny - 1)) / 2.0;
        boxes.push_back(center);
    }

    std::ofstream summary(path_in(out_dir, "depth_estimates.csv"));
    if (!summary) throw std::runtime_error("cannot write depth_estimates.csv in " + out_dir);
    summary.precision(15);
    summary << "box,cx,cy,z_est_mm,amplitude_db\n";
    for (std::size_t b = 0; b < boxes.size(); ++b) {
        const DepthProfile profile = depth_profile(volume, boxes[b]);
        write_depth_profile_csv(
            path_in(out_dir, "depth_profile_" + std::to_string(b) + ".csv"), profile);
        const double z_est = estimate_depth(profile);
        double best_db = profile.samples.front().second;
        for (const auto& [z, db] : profile.samples) best_db = std::max(best_db, db);
        summary << b << "," << boxes[b].cx << "," << boxes[b].cy << ","
                << z_est * 1000.0 << "," << best_db << "\n";
    }
    write_manifest(scenario, out_dir, "profile", opts);
}

void run_hist(const Scenario& scenario, const std::string& out_dir, const RunOptions& opts) {
    const ImageVolume volume = load_focused_volume(out_dir);
    const PeakLocation peak = find_volume_peak(volume);
    const double reference = peak.magnitude > 0.0 ? peak.magnitude : 1.0;
    constexpr int kBins = 120;
    constexpr double kLoDb = -60.0, kHiDb = 0.0;
    const std::vector<std::size_t> counts = amplitude_histogram(
        volume.planes[static_cast<std::size_t>(peak.k)], kBins, kLoDb, kHiDb, reference);
    write_histogram_csv(path_in(out_dir, "histogram.csv"), counts, kLoDb, kHiDb);
    write_manifest(scenario, out_dir, "hist", opts);
}

void run_detect(const Scenario& scenario, const std::string& out_dir, const RunOptions& opts) {
    const ImageVolume volume = load_focused_volume(out_dir);
    std::vector<Detection> detections = detect_volume(volume, scenario.cfar);
    const std::vector<TargetReport> reports =
        group_detections(detections, scenario.group_radius);
    write_detections_csv(path_in(out_dir, "detections.csv"), detections);

    std::ofstream targets(path_in(out_dir, "targets.csv"));
    if (!targets) throw std::runtime_error("cannot write targets.csv in " + out_dir);
    targets.precision(15);
    targets << "x,y,z,amplitude_db,member_count\n";
    for (const auto& r : reports)
        targets << r.x << "," << r.y << "," << r.z << "," << r.amplitude_db << ","
                << r.member_count << "\n";

    std::vector<Eigen::Vector3d> truth;
    for (const auto& sc : scenario.scene.scatterers) truth.push_back(sc.position);
    const ScoreReport score = score_detections(reports, truth);
    nlohmann::json j;
    j["detected"] = score.detected;
    j["missed"] = score.missed;
    j["false_alarms"] = score.false_alarms;
    j["matched_truth"] = score.matched_truth;
    j["truth_count"] = truth.size();
    j["group_count"] = reports.size();
    std::ofstream score_out(path_in(out_dir, "score.json"));
    score_out << j.dump(2) << "\n";

    write_manifest(scenario, out_dir, "detect", opts);
}

void run_psf(const Scenario& scenario, const std::string& out_dir, const RunOptions& opts) {
    const ImageVolume volume = load_focused_volume(out_dir);
    const PeakLocation peak = find_volume_peak(volume);
    const PsfMetrics metrics = psf_metrics(volume, peak.i, peak.j, peak.k);

    nlohmann::json j;
    j["cross_range_m"] = metrics.cross_range;
    j["ground_range_m"] = metrics.ground_range;
    j["depth_m"] = metrics.depth;
    j["pslr_db"] = metrics.pslr_db;
    j["peak"] = {{"x_m", volume.grid.x(metrics.peak_i)},
                 {"y_m", volume.grid.y(metrics.peak_j)},
                 {"z_m", volume.grid.plane_z(metrics.peak_k)},
                 {"magnitude", metrics.peak_magnitude}};
    std::ofstream out(path_in(out_dir, "psf.json"));
    if (!out) throw std::runtime_error("cannot write psf.json in " + out_dir);
    out << j.dump(2) << "\n";
    write_manifest(scenario, out_dir, "psf", opts);
}

void run_all(const Scenario& scenario, const std::string& out_dir, const RunOptions& opts) {
    run_simulate(scenario, out_dir, opts);
    run_estimate(scenario, out_dir, opts);
    run_focus(scenario, out_dir, opts);
    run_profile(scenario, out_dir, opts);
    run_hist(scenario, out_dir, opts);
    run_detect(scenario, out_dir, opts);
    run_psf(scenario, out_dir, opts);
    write_manifest(scenario, out_dir, "all", opts);
}

}  // namespace gpsar
