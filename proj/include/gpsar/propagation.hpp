#ifndef GPSAR_PROPAGATION_HPP
#define GPSAR_PROPAGATION_HPP

#include <Eigen/Dense>

namespace gpsar {

/// Phase velocity c0/sqrt(er). Throws std::invalid_argument for er < 1.
double wave_speed(double er);

/// Solved two-media path from an antenna above the interface to a pixel.
struct PathSolution {
    Eigen::Vector3d crossing;  // on the interface plane
    double r0 = 0.0;           // air path length, m
    double r1 = 0.0;           // soil path length, m
    double delay_one_way = 0.0;  // r0/c0 + r1/c1, s
};

/// Fermat path between an antenna (strictly above the interface) and a pixel.
/// For pixels at or above the interface the straight line is returned with
/// r1 = 0. For buried pixels the interface crossing minimizes total travel
/// time along the line between the ground projections; the Snell residual at
/// the solution is below 1e-12.
PathSolution refraction_point(const Eigen::Vector3d& antenna, const Eigen::Vector3d& pixel,
                              double interface_z, double er);

/// One-way tx->pixel plus one-way pixel->rx, each along its own Fermat path.
/// For tx == rx this reduces to the monostatic 2*(r0/c0 + r1/c1).
double round_trip_time(const Eigen::Vector3d& tx, const Eigen::Vector3d& rx,
                       const Eigen::Vector3d& pixel, double interface_z, double er);

namespace detail {

/// Planar one-way delay solver for the imaging hot path. d is the horizontal
/// antenna-to-pixel distance, h the antenna height above the interface,
/// depth the pixel depth below it (>= 0). warm, when non-null, carries the
/// crossing offset from the antenna ground projection between calls as a
/// Newton starting point. Returns the one-way delay in seconds.
double fermat_delay(double d, double h, double depth, double inv_c0, double inv_c1,
                    double* warm = nullptr);

/// Crossing offset from the antenna ground projection (same parametrization
/// as fermat_delay).
double fermat_crossing(double d, double h, double depth, double inv_c0, double inv_c1);

}  // namespace detail

}  // namespace gpsar

#endif
