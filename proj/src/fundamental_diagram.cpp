#include "tsg/fundamental_diagram.hpp"

#include <algorithm>
#include <string>

namespace tsg {

namespace {

void check_rho(const FundamentalDiagram& fd, double rho) {
  if (!(rho >= 0.0) || !(rho <= fd.rho_max))
    fail(ErrorKind::validation,
         "density " + format_double(rho) + " outside [0, " + format_double(fd.rho_max) + "]");
}

}  // namespace

FundamentalDiagram FundamentalDiagram::greenshields(double v_free, double rho_max) {
  FundamentalDiagram fd{Family::greenshields, v_free, rho_max, 0.0};
  fd.check();
  return fd;
}

FundamentalDiagram FundamentalDiagram::triangular(double v_free, double rho_max,
                                                  double rho_crit) {
  FundamentalDiagram fd{Family::triangular, v_free, rho_max, rho_crit};
  fd.check();
  return fd;
}

void FundamentalDiagram::check() const {
  if (!(v_free > 0.0)) fail(ErrorKind::validation, "diagram: v_free must be positive");
  if (!(rho_max > 0.0)) fail(ErrorKind::validation, "diagram: rho_max must be positive");
  if (family == Family::triangular && !(rho_crit_tri > 0.0 && rho_crit_tri < rho_max))
    fail(ErrorKind::validation, "diagram: rho_crit must lie strictly inside (0, rho_max)");
}

double FundamentalDiagram::flux(double rho) const {
  check_rho(*this, rho);
  if (family == Family::greenshields) return v_free * rho * (1.0 - rho / rho_max);
  if (rho <= rho_crit_tri) return v_free * rho;
  const double cap = v_free * rho_crit_tri;
  return cap * (rho_max - rho) / (rho_max - rho_crit_tri);
}

double FundamentalDiagram::rho_crit() const {
  return family == Family::greenshields ? 0.5 * rho_max : rho_crit_tri;
}

double FundamentalDiagram::demand(double rho) const {
  check_rho(*this, rho);
  return rho <= rho_crit() ? flux(rho) : capacity();
}

double FundamentalDiagram::supply(double rho) const {
  check_rho(*this, rho);
  return rho <= rho_crit() ? capacity() : flux(rho);
}

double FundamentalDiagram::max_wave_speed() const {
  if (family == Family::greenshields) return v_free;
  const double backward = v_free * rho_crit_tri / (rho_max - rho_crit_tri);
  return std::max(v_free, backward);
}

}  // namespace tsg
