#include "kac/energy_law.hpp"

#include <cmath>
#include <stdexcept>

namespace kac {

EnergyLawDensity energy_law(const GridDensity& f, int n_points) {
  const VelocityGrid& grid = f.grid();
  // Reject data degenerate at the origin: essentially all mass inside one
  // grid cell means V^2 has no density on any usable scale.
  double m2 = 0.0, core = 0.0;
  for (int i = 0; i < grid.n_points; ++i) {
    double w = (i == 0 || i == grid.n_points - 1) ? 0.5 : 1.0;
    double v = grid.node(i);
    m2 += w * v * v * f.value(i);
    if (std::abs(v) <= 2.0 * grid.spacing()) core += w * f.value(i);
  }
  m2 *= grid.spacing();
  core *= grid.spacing();
  if (core > 1.0 - 1e-9 || !(m2 > 1e-12))
    throw std::invalid_argument("energy_law: density degenerate at v = 0");

  EnergyLawDensity h;
  h.u_max = grid.v_max * grid.v_max;
  h.du = h.u_max / n_points;
  h.values.resize(n_points);
  for (int j = 0; j < n_points; ++j) {
    double u = h.node(j);
    double s = std::sqrt(u);
    double fe = 0.5 * (f.evaluate(s) + f.evaluate(-s));
    h.values[j] = fe / s;
  }
  // Invariant integrals in the s variable (u = s^2): ∫h du = ∫2 f_e(s) ds.
  int ns = 8 * n_points;
  double ds = grid.v_max / ns;
  double s0 = 0.0, s1 = 0.0;
  for (int i = 0; i <= ns; ++i) {
    double w = (i == 0 || i == ns) ? 0.5 : 1.0;
    double s = i * ds;
    double fe = 0.5 * (f.evaluate(s) + f.evaluate(-s));
    s0 += w * 2.0 * fe;
    s1 += w * 2.0 * s * s * fe;
  }
  h.mass = s0 * ds;
  h.mean = s1 * ds;
  return h;
}

}  // namespace kac
