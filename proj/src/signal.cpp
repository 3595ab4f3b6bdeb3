#include "gpsar/signal.hpp"

#include <cmath>
#include <stdexcept>

#include "gpsar/propagation.hpp"
#include "gpsar/random.hpp"

namespace gpsar {

int RadarParams::sample_count() const {
    const double n = fs * chirp_duration;
    const double rounded = std::round(n);
    if (std::abs(n - rounded) > 1e-6 || rounded < 2.0)
        throw std::invalid_argument("RadarParams: fs * chirp_duration must be an integer sample count");
    return static_cast<int>(rounded);
}

double RadarParams::window_center_time() const {
    return (sample_count() - 1) / (2.0 * fs);
}

void RadarParams::validate() const {
    if (f0 <= 0.0) throw std::invalid_argument("RadarParams: f0 must be positive");
    if (bandwidth <= 0.0) throw std::invalid_argument("RadarParams: bandwidth must be positive");
    if (chirp_duration <= 0.0) throw std::invalid_argument("RadarParams: chirp_duration must be positive");
    if (fs <= 0.0) throw std::invalid_argument("RadarParams: fs must be positive");
    if (prf <= 0.0) throw std::invalid_argument("RadarParams: prf must be positive");
    (void)sample_count();
}

bool AzimuthSector::contains(double az) const {
    const double two_pi = 2.0 * EIGEN_PI;
    az = std::fmod(az, two_pi);
    if (az < 0.0) az += two_pi;
    if (begin <= end) return az >= begin && az < end;
    return az >= begin || az < end;  // wraps through zero
}

bool Scatterer::visible_from(const Eigen::Vector3d& antenna) const {
    if (visibility.empty()) return true;
    const double az = std::atan2(antenna.y() - position.y(), antenna.x() - position.x());
    for (const auto& sector : visibility)
        if (sector.contains(az)) return true;
    return false;
}

double dechirp_phase(const RadarParams& radar, double dt) {
    return 2.0 * EIGEN_PI * radar.f0 * dt - EIGEN_PI * radar.slope() * dt * dt;
}

double matched_phase(const RadarParams& radar, double dt) {
    return dechirp_phase(radar, dt) +
           2.0 * EIGEN_PI * radar.slope() * dt * radar.window_center_time();
}

namespace detail {

std::uint64_t splitmix64(std::uint64_t& state) { return splitmix64_next(state); }

void fft_pow2(std::vector<std::complex<double>>& data) {
    const std::size_t n = data.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("fft_pow2: size must be a power of two");
    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * EIGEN_PI / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = data[i + k];
                const std::complex<double> v = data[i + k + len / 2] * w;
                data[i + k] = u + v;
                data[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

}  // namespace detail

std::uint64_t chirp_seed(std::uint64_t global_seed, std::uint64_t chirp_index) {
    std::uint64_t state = global_seed ^ (0x632be59bd9b4e019ULL * (chirp_index + 1));
    return detail::splitmix64(state);
}

RawChirp synthesize_chirp(const RadarParams& radar, const Pose& tx, const Pose& rx,
                          const Scene& scene, std::uint64_t seed) {
    if (tx.transform.translation.z() <= scene.interface_z ||
        rx.transform.translation.z() <= scene.interface_z)
        throw std::invalid_argument("synthesize_chirp: antenna pose at or below the interface");

    const int n = radar.sample_count();
    const double k_slope = radar.slope();
    RawChirp chirp;
    chirp.time = tx.time;
    chirp.tx_pose = tx;
    chirp.rx_pose = rx;
    chirp.samples.assign(static_cast<std::size_t>(n), {0.0f, 0.0f});

    const Eigen::Vector3d tx_pos = tx.transform.translation;
    const Eigen::Vector3d rx_pos = rx.transform.translation;

    std::vector<std::complex<double>> acc(static_cast<std::size_t>(n), {0.0, 0.0});
    for (const auto& sc : scene.scatterers) {
        if (sc.amplitude <= 0.0) continue;
        if (!sc.visible_from(tx_pos)) continue;
        const double dt = round_trip_time(tx_pos, rx_pos, sc.position, scene.interface_z, scene.er);
        const double phi0 = dechirp_phase(radar, dt);
        const double beat = 2.0 * EIGEN_PI * k_slope * dt / radar.fs;  // rad per sample
        // recurrence keeps this off the per-sample sincos path
        const std::complex<double> step(std::cos(beat), std::sin(beat));
        std::complex<double> tone = sc.amplitude * std::complex<double>(std::cos(phi0), std::sin(phi0));
        for (int i = 0; i < n; ++i) {
            acc[static_cast<std::size_t>(i)] += tone;
            tone *= step;
        }
    }

    if (scene.noise_std > 0.0) {
        detail::GaussianStream g(seed);
        const double s = scene.noise_std / std::sqrt(2.0);
        for (int i = 0; i < n; ++i)
            acc[static_cast<std::size_t>(i)] += std::complex<double>(s * g.normal(), s * g.normal());
    }

    for (int i = 0; i < n; ++i)
        chirp.samples[static_cast<std::size_t>(i)] = {static_cast<float>(acc[i].real()),
                                                      static_cast<float>(acc[i].imag())};
    return chirp;
}

RangeProfile range_compress(const RadarParams& radar, const RawChirp& chirp, int pad_factor,
                            double max_delay) {
    if (pad_factor < 1) throw std::invalid_argument("range_compress: pad_factor must be >= 1");
    const std::size_t n = chirp.samples.size();
    std::size_t n_pad = n * static_cast<std::size_t>(pad_factor);
    // round padded length up to a power of two (already one for the default radar)
    std::size_t pow2 = 1;
    while (pow2 < n_pad) pow2 <<= 1;
    n_pad = pow2;

    std::vector<std::complex<double>> buf(n_pad, {0.0, 0.0});
    for (std::size_t i = 0; i < n; ++i) {
        const double w = 0.5 - 0.5 * std::cos(2.0 * EIGEN_PI * static_cast<double>(i) /
                                              static_cast<double>(n - 1));
        buf[i] = std::complex<double>(chirp.samples[i].real(), chirp.samples[i].imag()) * w;
    }
    detail::fft_pow2(buf);

    RangeProfile profile;
    profile.time = chirp.time;
    profile.tx_pose = chirp.tx_pose;
    profile.rx_pose = chirp.rx_pose;
    profile.n_padded = n_pad;
    const double k_slope = radar.slope();
    profile.delay_per_bin = radar.fs / (static_cast<double>(n_pad) * k_slope);

    // positive beat frequencies only; truncate to the requested swath
    std::size_t n_keep = n_pad / 2;
    if (max_delay > 0.0) {
        const auto want = static_cast<std::size_t>(std::ceil(max_delay / profile.delay_per_bin)) + 2;
        n_keep = std::min(n_keep, want);
    }

    // rotate bin phases so a tone reads its phase at the window center
    const double rot = 2.0 * EIGEN_PI * static_cast<double>(n - 1) / (2.0 * static_cast<double>(n_pad));
    profile.bins.resize(n_keep);
    for (std::size_t b = 0; b < n_keep; ++b) {
        const double a = rot * static_cast<double>(b);
        const std::complex<double> v = buf[b] * std::complex<double>(std::cos(a), std::sin(a));
        profile.bins[b] = {static_cast<float>(v.real()), static_cast<float>(v.imag())};
    }
    return profile;
}

std::complex<double> sample_profile(const RangeProfile& profile, double delay) {
    if (delay < 0.0) return {0.0, 0.0};
    const double pos = delay / profile.delay_per_bin;
    const auto b = static_cast<std::size_t>(pos);
    if (b + 1 >= profile.bins.size()) return {0.0, 0.0};
    const double frac = pos - static_cast<double>(b);
    const std::complex<double> lo(profile.bins[b].real(), profile.bins[b].imag());
    const std::complex<double> hi(profile.bins[b + 1].real(), profile.bins[b + 1].imag());
    return lo + (hi - lo) * frac;
}

}  // namespace gpsar
