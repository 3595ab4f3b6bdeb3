#include "gpsar/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gpsar {

namespace {

// all containers are little-endian; this codebase targets little-endian hosts
template <typename T>
void put(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw std::runtime_error("unexpected end of file");
    return v;
}

void put_pose(std::ostream& out, const Pose& pose) {
    put(out, pose.time);
    put(out, pose.transform.rotation.w());
    put(out, pose.transform.rotation.x());
    put(out, pose.transform.rotation.y());
    put(out, pose.transform.rotation.z());
    put(out, pose.transform.translation.x());
    put(out, pose.transform.translation.y());
    put(out, pose.transform.translation.z());
}

Pose get_pose(std::istream& in) {
    Pose pose;
    pose.time = get<double>(in);
    const double w = get<double>(in), x = get<double>(in), y = get<double>(in), z = get<double>(in);
    pose.transform.rotation = Eigen::Quaterniond(w, x, y, z);
    const double tx = get<double>(in);
    const double ty = get<double>(in);
    const double tz = get<double>(in);
    pose.transform.translation = Eigen::Vector3d(tx, ty, tz);
    return pose;
}

}  // namespace

void write_recording(const std::string& path, const Recording& recording) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.write("GPSARRAW", 8);
    put(out, recording.radar.f0);
    put(out, recording.radar.bandwidth);
    put(out, recording.radar.chirp_duration);
    put(out, recording.radar.fs);
    put(out, recording.radar.prf);
    put(out, static_cast<std::uint64_t>(recording.chirps.size()));
    const std::uint32_t n_samples =
        recording.chirps.empty() ? 0u
                                 : static_cast<std::uint32_t>(recording.chirps.front().samples.size());
    put(out, n_samples);
    for (const auto& chirp : recording.chirps) {
        if (chirp.samples.size() != n_samples)
            throw std::runtime_error("write_recording: inconsistent chirp length");
        put(out, chirp.time);
        put_pose(out, chirp.tx_pose);
        put_pose(out, chirp.rx_pose);
        out.write(reinterpret_cast<const char*>(chirp.samples.data()),
                  static_cast<std::streamsize>(n_samples * sizeof(std::complex<float>)));
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

Recording read_recording(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, "GPSARRAW", 8) != 0)
        throw std::runtime_error(path + ": not a GPSARRAW file");
    Recording rec;
    rec.radar.f0 = get<double>(in);
    rec.radar.bandwidth = get<double>(in);
    rec.radar.chirp_duration = get<double>(in);
    rec.radar.fs = get<double>(in);
    rec.radar.prf = get<double>(in);
    const auto n_chirps = get<std::uint64_t>(in);
    const auto n_samples = get<std::uint32_t>(in);
    rec.chirps.resize(n_chirps);
    for (auto& chirp : rec.chirps) {
        chirp.time = get<double>(in);
        chirp.tx_pose = get_pose(in);
        chirp.rx_pose = get_pose(in);
        chirp.samples.resize(n_samples);
        in.read(reinterpret_cast<char*>(chirp.samples.data()),
                static_cast<std::streamsize>(n_samples * sizeof(std::complex<float>)));
        if (!in) throw std::runtime_error(path + ": truncated chirp data");
    }
    return rec;
}

void write_volume(const std::string& path, const ImageVolume& volume) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.write("GPSARVOL1", 9);
    const GridSpec& g = volume.grid;
    put(out, g.x0); put(out, g.y0); put(out, g.dx); put(out, g.dy);
    put(out, static_cast<std::uint32_t>(g.nx));
    put(out, static_cast<std::uint32_t>(g.ny));
    put(out, g.z_top); put(out, g.z_bottom); put(out, g.dz);
    put(out, static_cast<std::uint32_t>(volume.planes.size()));
    put(out, volume.er);
    put(out, volume.chirp_count);
    put(out, static_cast<std::uint32_t>(volume.aperture_ids.size()));
    for (const auto id : volume.aperture_ids) put(out, id);
    std::vector<std::complex<float>> row(static_cast<std::size_t>(g.nx));
    for (const auto& plane : volume.planes) {
        for (int j = 0; j < g.ny; ++j) {
            for (int i = 0; i < g.nx; ++i) {
                const auto& v = plane[static_cast<std::size_t>(j) * g.nx + i];
                row[static_cast<std::size_t>(i)] = {static_cast<float>(v.real()),
                                                    static_cast<float>(v.imag())};
            }
            out.write(reinterpret_cast<const char*>(row.data()),
                      static_cast<std::streamsize>(row.size() * sizeof(std::complex<float>)));
        }
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

ImageVolume read_volume(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    char magic[9];
    in.read(magic, 9);
    if (!in || std::memcmp(magic, "GPSARVOL1", 9) != 0)
        throw std::runtime_error(path + ": not a GPSARVOL1 file");
    ImageVolume vol;
    GridSpec& g = vol.grid;
    g.x0 = get<double>(in); g.y0 = get<double>(in); g.dx = get<double>(in); g.dy = get<double>(in);
    g.nx = static_cast<int>(get<std::uint32_t>(in));
    g.ny = static_cast<int>(get<std::uint32_t>(in));
    g.z_top = get<double>(in); g.z_bottom = get<double>(in); g.dz = get<double>(in);
    const auto n_planes = get<std::uint32_t>(in);
    vol.er = get<double>(in);
    vol.chirp_count = get<std::uint64_t>(in);
    const auto n_ids = get<std::uint32_t>(in);
    vol.aperture_ids.resize(n_ids);
    for (auto& id : vol.aperture_ids) id = get<std::uint32_t>(in);
    vol.planes.assign(n_planes, ComplexPlane(static_cast<std::size_t>(g.nx) * g.ny));
    std::vector<std::complex<float>> row(static_cast<std::size_t>(g.nx));
    for (auto& plane : vol.planes)
        for (int j = 0; j < g.ny; ++j) {
            in.read(reinterpret_cast<char*>(row.data()),
                    static_cast<std::streamsize>(row.size() * sizeof(std::complex<float>)));
            if (!in) throw std::runtime_error(path + ": truncated plane data");
            for (int i = 0; i < g.nx; ++i)
                plane[static_cast<std::size_t>(j) * g.nx + i] =
                    std::complex<double>(row[static_cast<std::size_t>(i)].real(),
                                         row[static_cast<std::size_t>(i)].imag());
        }
    return vol;
}

void write_plane_pgm(const std::string& path, const ComplexPlane& plane, const GridSpec& grid,
                     double reference, double clip_db) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "P5\n" << grid.nx << " " << grid.ny << "\n65535\n";
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            const double m = std::abs(plane[static_cast<std::size_t>(j) * grid.nx + i]);
            double db = m > 0.0 ? 20.0 * std::log10(m / reference) : -clip_db;
            db = std::clamp(db, -clip_db, 0.0);
            const auto v = static_cast<std::uint16_t>(std::lround((db + clip_db) / clip_db * 65535.0));
            const unsigned char bytes[2] = {static_cast<unsigned char>(v >> 8),
                                            static_cast<unsigned char>(v & 0xff)};
            out.write(reinterpret_cast<const char*>(bytes), 2);
        }
    std::ofstream meta(path + ".txt");
    meta << "reference_linear " << reference << "\nclip_db " << clip_db
         << "\nx0 " << grid.x0 << "\ny0 " << grid.y0 << "\ndx " << grid.dx << "\ndy " << grid.dy
         << "\nvalue_db = pixel / 65535 * clip_db - clip_db\n";
}

void write_trajectory_csv(const std::string& path, const std::vector<Pose>& poses) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.precision(15);
    out << "t,x,y,z,qw,qx,qy,qz\n";
    for (const auto& p : poses)
        out << p.time << "," << p.transform.translation.x() << "," << p.transform.translation.y()
            << "," << p.transform.translation.z() << "," << p.transform.rotation.w() << ","
            << p.transform.rotation.x() << "," << p.transform.rotation.y() << ","
            << p.transform.rotation.z() << "\n";
}

std::vector<Pose> read_trajectory_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty trajectory file");
    std::vector<Pose> poses;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        Pose p;
        double qw, qx, qy, qz;
        if (!(ss >> p.time >> p.transform.translation.x() >> p.transform.translation.y() >>
              p.transform.translation.z() >> qw >> qx >> qy >> qz))
            throw std::runtime_error(path + ": malformed trajectory row");
        p.transform.rotation = Eigen::Quaterniond(qw, qx, qy, qz).normalized();
        poses.push_back(p);
    }
    return poses;
}

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (const unsigned char c : data) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

}  // namespace gpsar
