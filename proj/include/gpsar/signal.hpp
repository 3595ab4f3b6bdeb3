#ifndef GPSAR_SIGNAL_HPP
#define GPSAR_SIGNAL_HPP

#include <complex>
#include <cstdint>
#include <vector>

#include "gpsar/geometry.hpp"

namespace gpsar {

/// FMCW chirp description. fs * chirp_duration must be an integer.
struct RadarParams {
    double f0 = 1.0e9;               // Hz, start frequency
    double bandwidth = 3.0e9;        // Hz
    double chirp_duration = 1024e-6; // s
    double fs = 4.0e6;               // Hz, beat-signal sampling frequency
    double prf = 30.0;               // Hz

    double slope() const { return bandwidth / chirp_duration; }
    int sample_count() const;
    /// Time of the window center, (N-1)/(2 fs); range-compressed phases are
    /// referenced to it.
    double window_center_time() const;
    void validate() const;  // throws std::invalid_argument
};

/// Azimuth visibility sector [begin, end) in [0, 2pi); begin > end wraps
/// through zero.
struct AzimuthSector {
    double begin = 0.0;
    double end = 2.0 * EIGEN_PI;
    bool contains(double az) const;
};

struct Scatterer {
    Eigen::Vector3d position{0.0, 0.0, 0.0};
    double amplitude = 1.0;  // linear
    std::vector<AzimuthSector> visibility;  // empty = isotropic

    bool visible_from(const Eigen::Vector3d& antenna) const;
};

struct Scene {
    double interface_z = 0.0;
    double er = 8.0;
    std::vector<Scatterer> scatterers;
    double noise_std = 0.0;  // linear, per complex sample
};

struct RawChirp {
    double time = 0.0;
    Pose tx_pose, rx_pose;
    std::vector<std::complex<float>> samples;
};

/// Range-compressed spectrum of one chirp. bins[b] corresponds to round-trip
/// delay b * delay_per_bin, with delay_per_bin = (fs / n_padded) / K. bins may
/// be truncated below n_padded when the caller bounds the swath; delays past
/// the stored bins sample as zero.
struct RangeProfile {
    double time = 0.0;
    Pose tx_pose, rx_pose;
    std::vector<std::complex<float>> bins;
    double delay_per_bin = 0.0;  // s
    std::size_t n_padded = 0;    // pad_factor * sample_count
};

/// Dechirped point-target phase at the start of the chirp:
/// 2 pi f0 dt - pi K dt^2.
double dechirp_phase(const RadarParams& radar, double dt);

/// Phase of a range-compressed sample at delay dt, referenced to the window
/// center: dechirp_phase + 2 pi K dt t_c. Back-projection conjugates this.
double matched_phase(const RadarParams& radar, double dt);

/// Complex baseband dechirped echo of all visible scatterers, plus circular
/// complex Gaussian noise drawn from a generator seeded by `seed` alone (the
/// caller derives per-chirp seeds). Throws if a pose is at or below the
/// interface.
RawChirp synthesize_chirp(const RadarParams& radar, const Pose& tx, const Pose& rx,
                          const Scene& scene, std::uint64_t seed);

/// Hann window, zero-pad to pad_factor * N, FFT. Bin phases are rotated so a
/// tone's phase reads at the window center rather than the first sample.
/// max_delay, when finite, truncates the stored bins to the usable swath.
RangeProfile range_compress(const RadarParams& radar, const RawChirp& chirp, int pad_factor,
                            double max_delay = -1.0);

/// Complex-linear interpolation between adjacent bins; zero outside the
/// stored swath.
std::complex<double> sample_profile(const RangeProfile& profile, double delay);

/// Per-chirp seed derived from the recording seed and chirp index, so the
/// fan-out order over chirps cannot change the output.
std::uint64_t chirp_seed(std::uint64_t global_seed, std::uint64_t chirp_index);

namespace detail {
/// In-place radix-2 DIT FFT; size must be a power of two.
void fft_pow2(std::vector<std::complex<double>>& data);
/// Deterministic splitmix64 stream; used for seed derivation and noise.
std::uint64_t splitmix64(std::uint64_t& state);
}  // namespace detail

}  // namespace gpsar

#endif
