#pragma once

#include <cstdint>
#include <vector>

#include "kac/grid_density.hpp"
#include "kac/rng.hpp"

namespace kac {

// Length-N velocity vector constrained to the energy sphere sum v_i^2 = N.
struct ParticleState {
  std::vector<double> v;
  double energy_cache = 0.0;

  int n() const { return static_cast<int>(v.size()); }
  double recompute_energy() const {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
  }
  void rescale_to_sphere() {
    double s = recompute_energy();
    double c = std::sqrt(v.size() / s);
    for (double& x : v) x *= c;
    energy_cache = static_cast<double>(v.size());
  }
};

struct WalkConfig {
  int n = 100;
  double gamma = 0.0;
  double t_end = 1.0;
  std::uint64_t seed = 1;
  std::vector<double> sample_times;     // t_end is always sampled
  int histogram_bins = 64;
  double histogram_vmax = 5.0;
  std::int64_t renormalization_period = 10000;  // events; 0 disables
};

struct WalkSample {
  double t = 0.0;
  double m2 = 0.0, m4 = 0.0, m6 = 0.0;  // empirical per-particle moments
  std::vector<double> histogram;        // pooled coordinate mass per bin
};

struct TrajectoryRecord {
  std::vector<WalkSample> samples;
  std::int64_t events = 0;
  double wall_seconds = 0.0;
};

// i.i.d. draws from f by inverse CDF on the grid, rescaled onto the sphere.
ParticleState sample_chaotic_initial(const GridDensity& f, int n, Rng& rng);

void collision_rotate(ParticleState& state, int i, int j, double theta);

// Exact event-driven stepping. Pair selection for gamma > 0 uses thinning:
// uniform pair proposals at rate N (1 + 2 vbound^2)^gamma accepted with
// probability ((1+v_i^2+v_j^2)/(1+2 vbound^2))^gamma, so accepted events
// realize the true rates without O(N^2) bookkeeping.
class GillespieStepper {
 public:
  GillespieStepper(double gamma, const ParticleState& state);

  // Applies one event and returns the waiting time.
  double step(ParticleState& state, Rng& rng);

  std::int64_t proposals() const { return proposals_; }
  std::int64_t accepted() const { return accepted_; }

 private:
  void refresh_bound(const ParticleState& state);
  double gamma_;
  double vbound2_ = 0.0;  // upper bound for max v_i^2, tightened lazily
  std::int64_t proposals_ = 0, accepted_ = 0;
  std::int64_t since_refresh_ = 0;
};

TrajectoryRecord run_walk(const WalkConfig& config, const GridDensity& f0);

struct EnsembleResult {
  WalkConfig config;
  int trajectories = 0;
  std::vector<double> sample_times;
  std::vector<std::vector<double>> pooled_histogram;        // [time][bin]
  std::vector<std::vector<std::vector<double>>> per_traj;   // [traj][time][bin]
  std::vector<std::vector<double>> m4;                      // [time][traj]
  std::vector<double> mean_events;
  std::vector<double> var_events;
};

// Trajectories use seed-derived independent streams; aggregation order is
// fixed so ensemble statistics do not depend on the number of workers.
EnsembleResult run_ensemble(const WalkConfig& config, const GridDensity& f0,
                            int trajectories);

struct ChaosDistance {
  double t = 0.0;
  double l1 = 0.0;
  double stderr_l1 = 0.0;  // jackknife over trajectories
};

// Pooled single-particle histogram against a reference density series
// sampled on the same bins (reference[t][bin] = bin mass of f(.,t)).
std::vector<ChaosDistance> propagation_of_chaos_check(
    const EnsembleResult& ensemble,
    const std::vector<double>& reference_times,
    const std::vector<std::vector<double>>& reference_bins);

// Bin masses of a density on the ensemble's histogram bins.
std::vector<double> density_bin_masses(const GridDensity& f, int bins, double vmax);
std::vector<double> grid_function_bin_masses(const VelocityGrid& grid,
                                             const std::vector<double>& values,
                                             int bins, double vmax);

}  // namespace kac
