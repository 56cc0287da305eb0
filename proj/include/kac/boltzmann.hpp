#pragma once

#include <vector>

#include "kac/grid_density.hpp"
#include "kac/reduce.hpp"

namespace kac {

// Prefactor of the closed-form dissipation integral, fixed once against the
// finite-difference -dH/dt oracle and frozen; the acceptance suite
// revalidates the calibration on every run.
inline constexpr double kDissipationPrefactor =
    1.0 / (4.0 * 3.14159265358979323846264338328);

struct CollisionKernelCache {
  VelocityGrid grid;
  double gamma = 0.0;
  int theta_nodes = 64;  // full-circle count
  bool folded = false;   // quarter-circle fold for even densities
  std::vector<double> cos_t, sin_t;
  double theta_node_weight = 0.0;       // full-circle measure per node
  std::vector<double> gamma_pow;        // (1 + v_i^2 + w_j^2)^gamma, row-major
};

CollisionKernelCache make_collision_cache(const VelocityGrid& grid, double gamma,
                                          int theta_nodes, bool even_density);

// Q_gamma f sampled at the nodes; the discrete mass and energy moments of the
// result are projected to exactly zero (subtracting alpha f + beta v^2 f).
std::vector<double> collision_Q(const GridDensity& f,
                                const CollisionKernelCache& cache,
                                Execution exec = Execution::Parallel);

// Symmetrized dissipation integral; equals -dH/dt along solve() within
// quadrature error. unreliable (when requested) reports floor-dominated
// support.
double entropy_production_Dgamma(const GridDensity& f, double gamma,
                                 const CollisionKernelCache& cache,
                                 Execution exec = Execution::Parallel,
                                 bool* unreliable = nullptr);

struct SolverConfig {
  VelocityGrid grid;
  double dt = 0.0;  // 0: rate-bound heuristic 0.01 / (1 + 2 m2 3^gamma)
  double t_end = 5.0;
  double gamma = 0.0;
  int theta_nodes = 64;
  std::vector<double> sample_times;  // t_end is always sampled
  double h_slack = 1e-10;            // allowed per-step entropy increase
};

struct SolveSample {
  double t = 0.0;
  std::vector<double> values;
  double entropy = 0.0;      // H(f | M_1)
  double dissipation = 0.0;  // D_gamma(f)
  double mass = 0.0;
  double energy = 0.0;
  double m4 = 0.0;
};

struct SolveResult {
  std::vector<SolveSample> samples;
  std::vector<double> step_times;
  std::vector<double> step_entropy;  // per accepted step, for -dH/dt oracles
  int steps = 0;
};

// Explicit 4th-order time stepping with positivity floor and exact discrete
// conservation; throws if H(t) increases beyond h_slack in one step.
SolveResult solve(const GridDensity& f0, const SolverConfig& config);

}  // namespace kac
