#pragma once

// Exact LWR Riemann solution for the Greenshields diagram, used as an
// independent oracle for the finite-volume scheme. For a concave flux the
// entropy solution is a shock when rho_L < rho_R and a rarefaction fan when
// rho_L > rho_R.

#include <cmath>

#include "tsg/fundamental_diagram.hpp"

namespace tsg::testing {

inline double riemann_exact(const FundamentalDiagram& fd, double rho_left, double rho_right,
                            double x0, double x, double t) {
  if (t <= 0.0) return x < x0 ? rho_left : rho_right;
  const double xi = (x - x0) / t;
  if (rho_left == rho_right) return rho_left;
  if (rho_left < rho_right) {
    // shock at the Rankine-Hugoniot speed
    const double s =
        (fd.flux(rho_right) - fd.flux(rho_left)) / (rho_right - rho_left);
    return xi < s ? rho_left : rho_right;
  }
  // rarefaction between the characteristic speeds f'(rho_left) < f'(rho_right)
  auto fprime = [&fd](double rho) { return fd.v_free * (1.0 - 2.0 * rho / fd.rho_max); };
  const double a = fprime(rho_left);
  const double b = fprime(rho_right);
  if (xi <= a) return rho_left;
  if (xi >= b) return rho_right;
  // invert f' for Greenshields
  return 0.5 * fd.rho_max * (1.0 - xi / fd.v_free);
}

}  // namespace tsg::testing
