#include "gpsar/propagation.hpp"

#include <cmath>
#include <stdexcept>

#include "gpsar/geometry.hpp"

namespace gpsar {

double wave_speed(double er) {
    if (er < 1.0) throw std::invalid_argument("wave_speed: er must be >= 1");
    return kSpeedOfLight / std::sqrt(er);
}

namespace detail {

namespace {

// Snell residual along the interface: u is the crossing offset from the
// antenna ground projection, d the total horizontal distance.
// f(u) = sin(theta_i)/c0 - sin(theta_t)/c1, strictly increasing on [0, d].
inline double snell_residual(double u, double d, double h, double depth,
                             double inv_c0, double inv_c1, double& dfdu) {
    const double r0 = std::sqrt(u * u + h * h);
    const double du = d - u;
    const double r1 = std::sqrt(du * du + depth * depth);
    dfdu = inv_c0 * h * h / (r0 * r0 * r0) + inv_c1 * depth * depth / (r1 * r1 * r1);
    return u * inv_c0 / r0 - du * inv_c1 / r1;
}

}  // namespace

double fermat_crossing(double d, double h, double depth, double inv_c0, double inv_c1) {
    if (d <= 0.0) return 0.0;
    if (depth <= 0.0) return d;  // crossing at the pixel itself

    double lo = 0.0, hi = d;
    // straight-segment crossing is exact for matched media and a good start
    double u = d * h / (h + depth);
    double dfdu = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double f = snell_residual(u, d, h, depth, inv_c0, inv_c1, dfdu);
        if (std::abs(f) < 1e-16) break;
        if (f > 0.0) hi = u; else lo = u;
        double next = u - f / dfdu;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);  // bisection fallback
        if (hi - lo < 1e-13 * (1.0 + d)) { u = 0.5 * (lo + hi); break; }
        u = next;
    }
    return u;
}

double fermat_delay(double d, double h, double depth, double inv_c0, double inv_c1,
                    double* warm) {
    if (depth <= 0.0) {
        // pixel at the interface: single-medium slant path
        return std::sqrt(d * d + h * h) * inv_c0;
    }
    if (d <= 0.0) return h * inv_c0 + depth * inv_c1;  // vertical

    double u;
    if (warm && *warm > 0.0 && *warm < d) {
        u = *warm;
        double lo = 0.0, hi = d, dfdu = 0.0;
        for (int it = 0; it < 200; ++it) {
            const double f = snell_residual(u, d, h, depth, inv_c0, inv_c1, dfdu);
            if (std::abs(f) < 1e-16) break;
            if (f > 0.0) hi = u; else lo = u;
            double next = u - f / dfdu;
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            if (hi - lo < 1e-13 * (1.0 + d)) { u = 0.5 * (lo + hi); break; }
            u = next;
        }
    } else {
        u = fermat_crossing(d, h, depth, inv_c0, inv_c1);
    }
    if (warm) *warm = u;
    const double du = d - u;
    return std::sqrt(u * u + h * h) * inv_c0 + std::sqrt(du * du + depth * depth) * inv_c1;
}

}  // namespace detail

PathSolution refraction_point(const Eigen::Vector3d& antenna, const Eigen::Vector3d& pixel,
                              double interface_z, double er) {
    if (antenna.z() <= interface_z)
        throw std::invalid_argument("refraction_point: antenna must be strictly above the interface");
    if (er < 1.0) throw std::invalid_argument("refraction_point: er must be >= 1");

    PathSolution sol;
    const double inv_c0 = 1.0 / kSpeedOfLight;
    const double inv_c1 = std::sqrt(er) / kSpeedOfLight;

    if (pixel.z() >= interface_z) {
        sol.r0 = (pixel - antenna).norm();
        sol.r1 = 0.0;
        sol.delay_one_way = sol.r0 * inv_c0;
        sol.crossing = Eigen::Vector3d(pixel.x(), pixel.y(), interface_z);
        return sol;
    }

    const double h = antenna.z() - interface_z;
    const double depth = interface_z - pixel.z();
    const Eigen::Vector2d a_xy(antenna.x(), antenna.y());
    const Eigen::Vector2d p_xy(pixel.x(), pixel.y());
    const double d = (p_xy - a_xy).norm();

    const double u = detail::fermat_crossing(d, h, depth, inv_c0, inv_c1);
    const Eigen::Vector2d dir = d > 0.0 ? Eigen::Vector2d((p_xy - a_xy) / d) : Eigen::Vector2d::Zero();
    const Eigen::Vector2d cross_xy = a_xy + u * dir;

    sol.crossing = Eigen::Vector3d(cross_xy.x(), cross_xy.y(), interface_z);
    sol.r0 = std::sqrt(u * u + h * h);
    const double du = d - u;
    sol.r1 = std::sqrt(du * du + depth * depth);
    sol.delay_one_way = sol.r0 * inv_c0 + sol.r1 * inv_c1;
    return sol;
}

double round_trip_time(const Eigen::Vector3d& tx, const Eigen::Vector3d& rx,
                       const Eigen::Vector3d& pixel, double interface_z, double er) {
    return refraction_point(tx, pixel, interface_z, er).delay_one_way +
           refraction_point(rx, pixel, interface_z, er).delay_one_way;
}

}  // namespace gpsar
