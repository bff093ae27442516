#pragma once

#include "tsg/common.hpp"

namespace tsg {

/// Static flow/density relation of a road. Both families satisfy the three
/// structural requirements: f is concave and Lipschitz on [0, rho_max],
/// f(0) = f(rho_max) = 0, and there is a unique critical density where the
/// flow peaks (the road capacity).
///
/// Units: rho in vehicles/km, flux in vehicles/h, speeds in km/h.
struct FundamentalDiagram {
  enum class Family { greenshields, triangular };

  Family family = Family::greenshields;
  double v_free = 60.0;    // free-flow speed
  double rho_max = 120.0;  // jam density
  double rho_crit_tri = 0.0;  // triangular only: peak location

  static FundamentalDiagram greenshields(double v_free, double rho_max);
  static FundamentalDiagram triangular(double v_free, double rho_max, double rho_crit);

  double flux(double rho) const;
  double demand(double rho) const;  // nondecreasing envelope of flux
  double supply(double rho) const;  // nonincreasing envelope of flux

  double rho_crit() const;
  double capacity() const { return flux(rho_crit()); }
  /// Largest characteristic speed |f'|; drives the CFL restriction.
  double max_wave_speed() const;

  /// Throws when parameters violate the diagram axioms.
  void check() const;
};

}  // namespace tsg
