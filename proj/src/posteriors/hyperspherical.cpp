#include "evalbench/posteriors/hyperspherical.hpp"

#include <cmath>
#include <numbers>

#include "evalbench/numcore/error.hpp"

namespace evalbench::posteriors {

namespace {

constexpr double kPi = std::numbers::pi;

void check_angles(const Hyperspherical& h) {
  if (!(h.radius >= 0.0)) throw InvalidArgument("hyperspherical radius must be >= 0");
  for (std::size_t k = 0; k < h.angles.size(); ++k) {
    const double a = h.angles[k];
    const bool ok = k == 0 ? (a > -kPi && a <= kPi) : (a >= 0.0 && a <= kPi);
    if (!ok) throw InvalidArgument("hyperspherical angle " + std::to_string(k) + " out of range");
  }
}

}  // namespace

Hyperspherical cart_to_hyperspherical(std::span<const double> v) {
  const std::size_t d = v.size();
  if (d < 2) throw InvalidArgument("cart_to_hyperspherical needs D >= 2");
  // tail[j] = |v_{j..D-1}| (0-based)
  std::vector<double> tail(d + 1, 0.0);
  for (std::size_t j = d; j-- > 0;) tail[j] = std::hypot(tail[j + 1], v[j]);
  if (tail[0] == 0.0) throw InvalidArgument("cart_to_hyperspherical: zero vector has no angles");
  Hyperspherical h;
  h.radius = tail[0];
  h.angles.assign(d - 1, 0.0);
  // phi_j (1-based j = 1..D-2) = atan2(|v_{j+1..D}|, v_j); phi_{D-1} = atan2(v_D, v_{D-1}).
  for (std::size_t j = 1; j + 1 < d; ++j) h.angles[d - 1 - j] = std::atan2(tail[j], v[j - 1]);
  h.angles[0] = std::atan2(v[d - 1], v[d - 2]);
  if (h.angles[0] == -kPi) h.angles[0] = kPi;
  return h;
}

std::vector<double> hyperspherical_to_cart(const Hyperspherical& h) {
  const std::size_t d = h.dim();
  if (d < 2) throw InvalidArgument("hyperspherical_to_cart needs D >= 2");
  std::vector<double> v(d);
  double s = h.radius;
  for (std::size_t j = 1; j + 1 < d; ++j) {
    const double phi = h.angles[d - 1 - j];
    v[j - 1] = s * std::cos(phi);
    s *= std::sin(phi);
  }
  v[d - 2] = s * std::cos(h.angles[0]);
  v[d - 1] = s * std::sin(h.angles[0]);
  return v;
}

double log_jacobian(const Hyperspherical& h) {
  double lj = static_cast<double>(h.dim() - 1) * std::log(h.radius);
  for (std::size_t k = 1; k < h.angles.size(); ++k) lj += static_cast<double>(k) * std::log(std::sin(h.angles[k]));
  return lj;
}

double radial_logpdf_hyperspherical(const Hyperspherical& h) {
  check_angles(h);
  double lp = -0.5 * std::log(2.0 * kPi) - 0.5 * h.radius * h.radius;
  lp += static_cast<double>(h.dim() - 1) * std::log(h.radius);
  for (std::size_t k = 1; k < h.angles.size(); ++k) lp += static_cast<double>(k) * std::log(std::sin(h.angles[k]));
  return lp;
}

double log_sphere_area(std::size_t d) {
  const double half = 0.5 * static_cast<double>(d);
  return std::log(2.0) + half * std::log(kPi) - std::lgamma(half);
}

double radial_logpdf_normalized(const Hyperspherical& h) {
  check_angles(h);
  double lp = 0.5 * std::log(2.0 / kPi) - 0.5 * h.radius * h.radius;
  if (h.dim() >= 2) lp -= log_sphere_area(h.dim());
  for (std::size_t k = 1; k < h.angles.size(); ++k) lp += static_cast<double>(k) * std::log(std::sin(h.angles[k]));
  return lp;
}

}  // namespace evalbench::posteriors
