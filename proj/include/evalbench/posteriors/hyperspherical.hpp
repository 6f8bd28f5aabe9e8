#pragma once

#include <span>
#include <vector>

namespace evalbench::posteriors {

/// Hyperspherical coordinates of a D-vector.
///
/// angles[0] is the azimuth in (-pi, pi]; angles[k] for k >= 1 lies in
/// [0, pi] and carries sin^k in the volume element, so
/// dv = r^{D-1} prod_k sin(angles[k])^k dr dangles.
/// In the usual phi_1..phi_{D-1} convention (v_1 = r cos phi_1, ...),
/// angles[k] = phi_{D-1-k}.
struct Hyperspherical {
  double radius = 0.0;
  std::vector<double> angles;

  std::size_t dim() const { return angles.size() + 1; }
};

/// Throws InvalidArgument for D < 2 or a zero vector.
Hyperspherical cart_to_hyperspherical(std::span<const double> v);
std::vector<double> hyperspherical_to_cart(const Hyperspherical& h);

/// log |dv / d(r, angles)|.
double log_jacobian(const Hyperspherical& h);

/// Radial noise log density written in hyperspherical coordinates, with the
/// r^{D-1} factor and the (2 pi)^{-1/2} normaliser of the radius term:
/// (D-1) log r - log(2 pi)/2 - r^2/2 + sum_k k log sin(angles[k]).
/// Out-of-range angles throw InvalidArgument.
double radial_logpdf_hyperspherical(const Hyperspherical& h);

/// Properly normalised density of (r, angles) when r ~ |N(0,1)| and the
/// direction is uniform: sqrt(2/pi) e^{-r^2/2} prod sin^k / S_D.
/// Reduces to the half-normal for D = 1 (pass an empty angle list).
double radial_logpdf_normalized(const Hyperspherical& h);

/// log of the surface area of the unit sphere in R^D, 2 pi^{D/2} / Gamma(D/2).
double log_sphere_area(std::size_t d);

}  // namespace evalbench::posteriors
