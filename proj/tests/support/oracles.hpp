#pragma once

#include <vector>

#include "kac/grid_density.hpp"
#include "kac/rng.hpp"

namespace kac::oracles {

// Direct spherical quadrature of ∫ f⊗3 dσ over S^2(r): Gauss-Legendre in the
// polar substitution, midpoint in the azimuth. Independent of the
// convolution-power pipeline.
double sphere_z3(const GridDensity& f, double r, int n_polar = 192, int n_phi = 384);

// ∫ f⊗4 dσ over S^3(r) by one more iterated angle around sphere_z3.
double sphere_z4(const GridDensity& f, double r, int n_alpha = 160, int n_polar = 128,
                 int n_phi = 256);

struct McEstimate {
  double value = 0.0;
  double stderr_value = 0.0;
};

// Monte Carlo estimate of D_{3,gamma} over S^2(sqrt 3) x theta by a
// batched ratio estimator (the normalization is estimated from the same
// sample).
McEstimate mc_entropy_production_3(const GridDensity& f, double gamma,
                                   std::int64_t samples, Rng& rng, int batches = 32);

// Monte Carlo estimate of the log-power pair integral at N = 3.
McEstimate mc_log_power_3(const GridDensity& f, double beta, std::int64_t samples,
                          Rng& rng, int batches = 32);

// O(n^2) direct convolution doubling of the energy-law masses on a coarse
// grid; returns density samples of h^{*m} (m a power of two) at j*du.
std::vector<double> direct_conv_power_doubling(const GridDensity& f, int m,
                                               double u_max, int n);

}  // namespace kac::oracles
