#include "gpsar/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace gpsar {

using nlohmann::json;

namespace {

[[noreturn]] void semantic_error(const std::string& field, const std::string& what) {
    throw std::invalid_argument("scenario." + field + ": " + what);
}

void check_keys(const json& obj, const std::string& where,
                const std::set<std::string>& allowed) {
    for (const auto& [key, value] : obj.items())
        if (!allowed.count(key))
            semantic_error(where.empty() ? key : where + "." + key, "unknown key");
}

double get_num(const json& obj, const std::string& where, const std::string& key, double dflt) {
    if (!obj.contains(key)) return dflt;
    if (!obj[key].is_number()) semantic_error(where + "." + key, "expected a number");
    return obj[key].get<double>();
}

Eigen::Vector3d get_vec3(const json& obj, const std::string& where, const std::string& key,
                         const Eigen::Vector3d& dflt) {
    if (!obj.contains(key)) return dflt;
    const json& a = obj[key];
    if (!a.is_array() || a.size() != 3) semantic_error(where + "." + key, "expected [x, y, z]");
    return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

Transform parse_transform(const json& obj, const std::string& where) {
    check_keys(obj, where, {"translation_m", "quaternion_wxyz"});
    Transform t;
    t.translation = get_vec3(obj, where, "translation_m", Eigen::Vector3d::Zero());
    if (obj.contains("quaternion_wxyz")) {
        const json& q = obj["quaternion_wxyz"];
        if (!q.is_array() || q.size() != 4)
            semantic_error(where + ".quaternion_wxyz", "expected [w, x, y, z]");
        t.rotation = Eigen::Quaterniond(q[0].get<double>(), q[1].get<double>(),
                                        q[2].get<double>(), q[3].get<double>());
        if (std::abs(t.rotation.norm() - 1.0) > 1e-6)
            semantic_error(where + ".quaternion_wxyz", "quaternion must have unit norm");
        t.rotation.normalize();
    }
    return t;
}

json emit_transform(const Transform& t) {
    return {{"translation_m", {t.translation.x(), t.translation.y(), t.translation.z()}},
            {"quaternion_wxyz",
             {t.rotation.w(), t.rotation.x(), t.rotation.y(), t.rotation.z()}}};
}

GridSpec default_grid() {
    GridSpec g;
    g.nx = 128; g.ny = 128;
    g.dx = 0.01; g.dy = 0.01;
    g.x0 = -(g.nx - 1) * g.dx / 2.0;
    g.y0 = -(g.ny - 1) * g.dy / 2.0;
    g.z_top = 0.1; g.z_bottom = -0.2; g.dz = 0.005;
    return g;
}

CircleSpec default_aperture(double prf) {
    CircleSpec c;
    c.radius = 7.75;
    c.height = 3.75;
    c.speed = 0.4;
    c.prf = prf;
    return c;
}

}  // namespace

void Scenario::validate() const {
    radar.validate();
    if (apertures.empty()) semantic_error("apertures", "need at least one aperture");
    for (std::size_t i = 0; i < apertures.size(); ++i) {
        const std::string where = "apertures[" + std::to_string(i) + "]";
        if (apertures[i].radius <= 0.0) semantic_error(where + ".radius_m", "must be positive");
        if (apertures[i].speed <= 0.0) semantic_error(where + ".speed_mps", "must be positive");
        if (apertures[i].prf <= 0.0) semantic_error(where + ".prf_hz", "must be positive");
        if (apertures[i].arc <= 0.0) semantic_error(where + ".arc_rad", "must be positive");
        if (apertures[i].height <= scene.interface_z)
            semantic_error(where + ".height_m", "aperture must fly above the interface");
    }
    if (scene.er < 1.0) semantic_error("scene.er", "must be >= 1");
    if (scene.noise_std < 0.0) semantic_error("scene.noise_std", "must be non-negative");
    for (std::size_t i = 0; i < scene.scatterers.size(); ++i) {
        const std::string where = "scene.scatterers[" + std::to_string(i) + "]";
        if (scene.scatterers[i].amplitude < 0.0)
            semantic_error(where + ".amplitude", "must be non-negative");
        if (!scene.scatterers[i].position.allFinite())
            semantic_error(where + ".position_m", "must be finite");
    }
    grid.validate();
    cfar.validate();
    if (group_radius <= 0.0) semantic_error("group_radius_m", "must be positive");
    if (pad_factor < 1) semantic_error("pad_factor", "must be >= 1");
    for (std::size_t i = 0; i < boxes.size(); ++i)
        if (boxes[i].hx <= 0.0 || boxes[i].hy <= 0.0)
            semantic_error("boxes[" + std::to_string(i) + "].half_extent_m", "must be positive");
}

Scenario parse_scenario(const std::string& text) {
    json root = json::parse(text);  // parse_error carries line/column
    if (!root.is_object()) throw std::invalid_argument("scenario: top level must be an object");
    check_keys(root, "", {"version", "seed", "pad_factor", "group_radius_m", "radar",
                          "apertures", "scene", "grid", "motion", "cfar", "boxes"});

    Scenario s;
    s.version = static_cast<int>(get_num(root, "", "version", 1));
    s.seed = root.contains("seed") ? root["seed"].get<std::uint64_t>() : 0;
    s.pad_factor = static_cast<int>(get_num(root, "", "pad_factor", 16));
    s.group_radius = get_num(root, "", "group_radius_m", 0.15);

    if (root.contains("radar")) {
        const json& r = root["radar"];
        check_keys(r, "radar", {"f0_hz", "bandwidth_hz", "chirp_duration_s", "fs_hz", "prf_hz"});
        s.radar.f0 = get_num(r, "radar", "f0_hz", 1.0e9);
        s.radar.bandwidth = get_num(r, "radar", "bandwidth_hz", 3.0e9);
        s.radar.chirp_duration = get_num(r, "radar", "chirp_duration_s", 1024e-6);
        s.radar.fs = get_num(r, "radar", "fs_hz", 4.0e6);
        s.radar.prf = get_num(r, "radar", "prf_hz", 30.0);
    }

    if (root.contains("apertures")) {
        const json& arr = root["apertures"];
        if (!arr.is_array()) semantic_error("apertures", "expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string where = "apertures[" + std::to_string(i) + "]";
            check_keys(arr[i], where, {"center_m", "radius_m", "height_m", "speed_mps",
                                       "prf_hz", "start_azimuth_rad", "arc_rad"});
            CircleSpec c;
            c.center = get_vec3(arr[i], where, "center_m", Eigen::Vector3d::Zero());
            c.radius = get_num(arr[i], where, "radius_m", 7.75);
            c.height = get_num(arr[i], where, "height_m", 3.75);
            c.speed = get_num(arr[i], where, "speed_mps", 0.4);
            c.prf = get_num(arr[i], where, "prf_hz", s.radar.prf);
            c.start_azimuth = get_num(arr[i], where, "start_azimuth_rad", 0.0);
            c.arc = get_num(arr[i], where, "arc_rad", 2.0 * EIGEN_PI);
            s.apertures.push_back(c);
        }
    } else {
        s.apertures.push_back(default_aperture(s.radar.prf));
    }

    s.scene.er = 8.0;
    if (root.contains("scene")) {
        const json& sc = root["scene"];
        check_keys(sc, "scene", {"interface_z_m", "er", "noise_std", "scatterers"});
        s.scene.interface_z = get_num(sc, "scene", "interface_z_m", 0.0);
        s.scene.er = get_num(sc, "scene", "er", 8.0);
        s.scene.noise_std = get_num(sc, "scene", "noise_std", 0.0);
        if (sc.contains("scatterers")) {
            const json& arr = sc["scatterers"];
            if (!arr.is_array()) semantic_error("scene.scatterers", "expected an array");
            for (std::size_t i = 0; i < arr.size(); ++i) {
                const std::string where = "scene.scatterers[" + std::to_string(i) + "]";
                check_keys(arr[i], where, {"position_m", "amplitude", "visibility_rad"});
                Scatterer sct;
                sct.position = get_vec3(arr[i], where, "position_m", Eigen::Vector3d::Zero());
                sct.amplitude = get_num(arr[i], where, "amplitude", 1.0);
                if (arr[i].contains("visibility_rad")) {
                    const json& vis = arr[i]["visibility_rad"];
                    if (!vis.is_array()) semantic_error(where + ".visibility_rad",
                                                        "expected an array of [begin, end] pairs");
                    for (const auto& pair : vis) {
                        if (!pair.is_array() || pair.size() != 2)
                            semantic_error(where + ".visibility_rad", "expected [begin, end] pairs");
                        sct.visibility.push_back({pair[0].get<double>(), pair[1].get<double>()});
                    }
                }
                s.scene.scatterers.push_back(sct);
            }
        }
    }

    s.grid = default_grid();
    if (root.contains("grid")) {
        const json& g = root["grid"];
        check_keys(g, "grid", {"x0_m", "y0_m", "dx_m", "dy_m", "nx", "ny",
                               "z_top_m", "z_bottom_m", "dz_m"});
        s.grid.dx = get_num(g, "grid", "dx_m", 0.01);
        s.grid.dy = get_num(g, "grid", "dy_m", 0.01);
        s.grid.nx = static_cast<int>(get_num(g, "grid", "nx", 128));
        s.grid.ny = static_cast<int>(get_num(g, "grid", "ny", 128));
        s.grid.x0 = get_num(g, "grid", "x0_m", -(s.grid.nx - 1) * s.grid.dx / 2.0);
        s.grid.y0 = get_num(g, "grid", "y0_m", -(s.grid.ny - 1) * s.grid.dy / 2.0);
        s.grid.z_top = get_num(g, "grid", "z_top_m", 0.1);
        s.grid.z_bottom = get_num(g, "grid", "z_bottom_m", -0.2);
        s.grid.dz = get_num(g, "grid", "dz_m", 0.005);
    }

    if (root.contains("motion")) {
        const json& m = root["motion"];
        check_keys(m, "motion", {"enabled", "imu", "station", "t_bp", "t_ba1", "t_ba2"});
        if (m.contains("enabled")) {
            if (!m["enabled"].is_boolean()) semantic_error("motion.enabled", "expected a boolean");
            s.motion.enabled = m["enabled"].get<bool>();
        }
        if (m.contains("imu")) {
            const json& imu = m["imu"];
            check_keys(imu, "motion.imu",
                       {"rate_hz", "gyro_noise_density", "accel_noise_density",
                        "gyro_bias_std", "accel_bias_std"});
            s.motion.imu.rate = get_num(imu, "motion.imu", "rate_hz", 200.0);
            s.motion.imu.gyro_noise_density =
                get_num(imu, "motion.imu", "gyro_noise_density", s.motion.imu.gyro_noise_density);
            s.motion.imu.accel_noise_density =
                get_num(imu, "motion.imu", "accel_noise_density", s.motion.imu.accel_noise_density);
            s.motion.imu.gyro_bias_std =
                get_num(imu, "motion.imu", "gyro_bias_std", s.motion.imu.gyro_bias_std);
            s.motion.imu.accel_bias_std =
                get_num(imu, "motion.imu", "accel_bias_std", s.motion.imu.accel_bias_std);
        }
        if (m.contains("station")) {
            const json& st = m["station"];
            check_keys(st, "motion.station",
                       {"position_m", "rate_hz", "distance_std_m", "angle_std_rad"});
            s.motion.station.position =
                get_vec3(st, "motion.station", "position_m", s.motion.station.position);
            s.motion.station.rate = get_num(st, "motion.station", "rate_hz", 20.0);
            s.motion.station.distance_std =
                get_num(st, "motion.station", "distance_std_m", s.motion.station.distance_std);
            s.motion.station.angle_std =
                get_num(st, "motion.station", "angle_std_rad", s.motion.station.angle_std);
        }
        if (m.contains("t_bp")) s.motion.t_bp = parse_transform(m["t_bp"], "motion.t_bp");
        if (m.contains("t_ba1")) s.motion.t_ba1 = parse_transform(m["t_ba1"], "motion.t_ba1");
        if (m.contains("t_ba2")) s.motion.t_ba2 = parse_transform(m["t_ba2"], "motion.t_ba2");
    } else {
        s.motion.t_bp.translation = Eigen::Vector3d(0.0, 0.0, 0.2);
        s.motion.t_ba1.translation = Eigen::Vector3d(0.15, 0.25, -0.05);
        s.motion.t_ba2.translation = Eigen::Vector3d(-0.15, 0.25, -0.05);
    }

    if (root.contains("cfar")) {
        const json& c = root["cfar"];
        check_keys(c, "cfar", {"guard", "train", "pfa"});
        s.cfar.guard = static_cast<int>(get_num(c, "cfar", "guard", 4));
        s.cfar.train = static_cast<int>(get_num(c, "cfar", "train", 8));
        s.cfar.pfa = get_num(c, "cfar", "pfa", 1e-4);
    }

    if (root.contains("boxes")) {
        const json& arr = root["boxes"];
        if (!arr.is_array()) semantic_error("boxes", "expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string where = "boxes[" + std::to_string(i) + "]";
            check_keys(arr[i], where, {"center_m", "half_extent_m"});
            BoxRegion b;
            if (arr[i].contains("center_m")) {
                const json& c = arr[i]["center_m"];
                if (!c.is_array() || c.size() != 2) semantic_error(where + ".center_m", "expected [x, y]");
                b.cx = c[0].get<double>();
                b.cy = c[1].get<double>();
            }
            if (arr[i].contains("half_extent_m")) {
                const json& h = arr[i]["half_extent_m"];
                if (!h.is_array() || h.size() != 2)
                    semantic_error(where + ".half_extent_m", "expected [hx, hy]");
                b.hx = h[0].get<double>();
                b.hy = h[1].get<double>();
            }
            s.boxes.push_back(b);
        }
    }

    s.validate();
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

std::string emit_scenario(const Scenario& s) {
    json root;
    root["version"] = s.version;
    root["seed"] = s.seed;
    root["pad_factor"] = s.pad_factor;
    root["group_radius_m"] = s.group_radius;
    root["radar"] = {{"f0_hz", s.radar.f0},
                     {"bandwidth_hz", s.radar.bandwidth},
                     {"chirp_duration_s", s.radar.chirp_duration},
                     {"fs_hz", s.radar.fs},
                     {"prf_hz", s.radar.prf}};
    root["apertures"] = json::array();
    for (const auto& c : s.apertures)
        root["apertures"].push_back({{"center_m", {c.center.x(), c.center.y(), c.center.z()}},
                                     {"radius_m", c.radius},
                                     {"height_m", c.height},
                                     {"speed_mps", c.speed},
                                     {"prf_hz", c.prf},
                                     {"start_azimuth_rad", c.start_azimuth},
                                     {"arc_rad", c.arc}});
    json scatterers = json::array();
    for (const auto& sc : s.scene.scatterers) {
        json vis = json::array();
        for (const auto& sector : sc.visibility) vis.push_back({sector.begin, sector.end});
        scatterers.push_back(
            {{"position_m", {sc.position.x(), sc.position.y(), sc.position.z()}},
             {"amplitude", sc.amplitude},
             {"visibility_rad", vis}});
    }
    root["scene"] = {{"interface_z_m", s.scene.interface_z},
                     {"er", s.scene.er},
                     {"noise_std", s.scene.noise_std},
                     {"scatterers", scatterers}};
    root["grid"] = {{"x0_m", s.grid.x0}, {"y0_m", s.grid.y0}, {"dx_m", s.grid.dx},
                    {"dy_m", s.grid.dy}, {"nx", s.grid.nx},   {"ny", s.grid.ny},
                    {"z_top_m", s.grid.z_top}, {"z_bottom_m", s.grid.z_bottom},
                    {"dz_m", s.grid.dz}};
    root["motion"] = {{"enabled", s.motion.enabled},
                      {"imu",
                       {{"rate_hz", s.motion.imu.rate},
                        {"gyro_noise_density", s.motion.imu.gyro_noise_density},
                        {"accel_noise_density", s.motion.imu.accel_noise_density},
                        {"gyro_bias_std", s.motion.imu.gyro_bias_std},
                        {"accel_bias_std", s.motion.imu.accel_bias_std}}},
                      {"station",
                       {{"position_m",
                         {s.motion.station.position.x(), s.motion.station.position.y(),
                          s.motion.station.position.z()}},
                        {"rate_hz", s.motion.station.rate},
                        {"distance_std_m", s.motion.station.distance_std},
                        {"angle_std_rad", s.motion.station.angle_std}}},
                      {"t_bp", emit_transform(s.motion.t_bp)},
                      {"t_ba1", emit_transform(s.motion.t_ba1)},
                      {"t_ba2", emit_transform(s.motion.t_ba2)}};
    root["cfar"] = {{"guard", s.cfar.guard}, {"train", s.cfar.train}, {"pfa", s.cfar.pfa}};
    root["boxes"] = json::array();
    for (const auto& b : s.boxes)
        root["boxes"].push_back(
            {{"center_m", {b.cx, b.cy}}, {"half_extent_m", {b.hx, b.hy}}});
    return root.dump(2) + "\n";
}

}  // namespace gpsar
