#ifndef GPSAR_IO_HPP
#define GPSAR_IO_HPP

#include <string>
#include <vector>

#include "gpsar/imaging.hpp"
#include "gpsar/signal.hpp"

namespace gpsar {

/// One aperture's worth of raw chirps plus the radar description.
struct Recording {
    RadarParams radar;
    std::vector<RawChirp> chirps;
};

// "GPSARRAW" container: little-endian header (radar params, chirp count,
// sample count), then per chirp the tx/rx poses and complex float32 samples.
void write_recording(const std::string& path, const Recording& recording);
Recording read_recording(const std::string& path);

// "GPSARVOL1" container: grid as float64/uint32, er, chirp count, aperture
// ids, then planes in z-descending order, row-major complex float32.
void write_volume(const std::string& path, const ImageVolume& volume);
ImageVolume read_volume(const std::string& path);

/// 16-bit PGM (P5) of dB-scaled magnitude clipped to clip_db below the
/// reference, plus a <path>.txt sidecar with the scaling.
void write_plane_pgm(const std::string& path, const ComplexPlane& plane, const GridSpec& grid,
                     double reference, double clip_db = 40.0);

void write_trajectory_csv(const std::string& path, const std::vector<Pose>& poses);
std::vector<Pose> read_trajectory_csv(const std::string& path);

/// FNV-1a 64-bit, used for manifest parameter hashes.
std::uint64_t fnv1a64(const std::string& data);

}  // namespace gpsar

#endif
