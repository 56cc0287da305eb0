#pragma once

#include <vector>

#include "kac/grid_density.hpp"

namespace kac {

// Density h of the energy variable V^2 when V has density f:
// h(u) = (f(sqrt u) + f(-sqrt u)) / (2 sqrt u) on u in (0, u_max].
// The 1/sqrt(u) singularity is integrable; all quadrature against h goes
// through the substitution u = s^2, which makes the integrand smooth.
struct EnergyLawDensity {
  double u_max = 0.0;
  double du = 0.0;
  std::vector<double> values;  // h at u_j = (j+1) du

  double node(int j) const { return du * (j + 1); }
  double mass = 0.0;  // ∫ h du, via the s-substitution
  double mean = 0.0;  // ∫ u h du = m2(f)
};

EnergyLawDensity energy_law(const GridDensity& f, int n_points = 4096);

}  // namespace kac
