#include "kac/kac_walk.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include <omp.h>

namespace kac {

namespace {
constexpr double kPi = 3.14159265358979323846264338328;
}

ParticleState sample_chaotic_initial(const GridDensity& f, int n, Rng& rng) {
  if (n < 3) throw std::invalid_argument("sample_chaotic_initial: n >= 3");
  const VelocityGrid& grid = f.grid();
  const int m = grid.n_points;
  // Cell masses of the piecewise-linear density; inverse CDF samples a cell,
  // then the linear density within it.
  std::vector<double> cdf(m, 0.0);
  for (int i = 1; i < m; ++i)
    cdf[i] = cdf[i - 1] + 0.5 * (f.value(i - 1) + f.value(i)) * grid.spacing();
  double total = cdf[m - 1];

  ParticleState st;
  st.v.resize(n);
  for (;;) {
    for (int p = 0; p < n; ++p) {
      double target = rng.u01() * total;
      int lo = 0, hi = m - 1;
      while (hi - lo > 1) {
        int mid = (lo + hi) / 2;
        (cdf[mid] <= target ? lo : hi) = mid;
      }
      double cell_mass = cdf[hi] - cdf[lo];
      double a = f.value(lo), b = f.value(hi);
      double x;  // position in [0,1] within the cell
      if (cell_mass <= 0.0) {
        x = rng.u01();
      } else {
        double u = (target - cdf[lo]) / cell_mass;
        double denom = a + b;
        if (denom <= 0.0) {
          x = u;
        } else {
          // Invert u = (a x + (b-a) x^2/2) / ((a+b)/2).
          double disc = a * a + (b * b - a * a) * u;
          x = (b == a) ? u : (std::sqrt(std::max(disc, 0.0)) - a) / (b - a);
        }
      }
      st.v[p] = grid.node(lo) + x * grid.spacing();
    }
    if (st.recompute_energy() > 0.0) break;  // all-zero draw: redraw
  }
  st.rescale_to_sphere();
  return st;
}

void collision_rotate(ParticleState& state, int i, int j, double theta) {
  if (i == j) throw std::invalid_argument("collision_rotate: i != j required");
  double c = std::cos(theta), s = std::sin(theta);
  double vi = state.v[i], vj = state.v[j];
  state.v[i] = vi * c + vj * s;
  state.v[j] = -vi * s + vj * c;
}

GillespieStepper::GillespieStepper(double gamma, const ParticleState& state)
    : gamma_(gamma) {
  refresh_bound(state);
}

void GillespieStepper::refresh_bound(const ParticleState& state) {
  double m = 0.0;
  for (double x : state.v) m = std::max(m, x * x);
  vbound2_ = m;
  since_refresh_ = 0;
}

double GillespieStepper::step(ParticleState& state, Rng& rng) {
  const int n = state.n();
  double tau = 0.0;
  for (;;) {
    double rmax = gamma_ == 0.0 ? 1.0 : std::pow(1.0 + 2.0 * vbound2_, gamma_);
    tau += rng.exponential(n * rmax);
    std::uint64_t pick = rng.below(static_cast<std::uint64_t>(n) * (n - 1));
    int i = static_cast<int>(pick / (n - 1));
    int j = static_cast<int>(pick % (n - 1));
    if (j >= i) ++j;
    ++proposals_;
    ++since_refresh_;
    bool accept = true;
    if (gamma_ != 0.0) {
      double r = std::pow(
          (1.0 + state.v[i] * state.v[i] + state.v[j] * state.v[j]) /
              (1.0 + 2.0 * vbound2_),
          gamma_);
      accept = rng.u01() < r;
    }
    if (accept) {
      double theta = rng.uniform(-kPi, kPi);
      collision_rotate(state, i, j, theta);
      if (gamma_ != 0.0) {
        vbound2_ = std::max({vbound2_, state.v[i] * state.v[i],
                             state.v[j] * state.v[j]});
        // Lazy tightening: the bound only grows between refreshes.
        if (since_refresh_ >= 4096 ||
            (proposals_ > 1000 && accepted_ * 100 < proposals_))
          refresh_bound(state);
      }
      ++accepted_;
      return tau;
    }
  }
}

namespace {

WalkSample observe(double t, const ParticleState& st, int bins, double vmax) {
  WalkSample s;
  s.t = t;
  const int n = st.n();
  double s2 = 0, s4 = 0, s6 = 0;
  s.histogram.assign(bins, 0.0);
  double w = 2.0 * vmax / bins;
  for (double x : st.v) {
    double x2 = x * x;
    s2 += x2;
    s4 += x2 * x2;
    s6 += x2 * x2 * x2;
    int b = static_cast<int>((x + vmax) / w);
    if (b >= 0 && b < bins) s.histogram[b] += 1.0;
  }
  s.m2 = s2 / n;
  s.m4 = s4 / n;
  s.m6 = s6 / n;
  for (double& h : s.histogram) h /= n;
  return s;
}

}  // namespace

namespace {

TrajectoryRecord run_walk_stream(const WalkConfig& config, const GridDensity& f0,
                                 std::uint64_t stream) {
  if (!(config.t_end > 0.0)) throw std::invalid_argument("run_walk: t_end > 0");
  if (config.histogram_bins < 2) throw std::invalid_argument("run_walk: bins >= 2");
  auto t0 = std::chrono::steady_clock::now();
  Rng rng(config.seed, stream);
  ParticleState st = sample_chaotic_initial(f0, config.n, rng);
  GillespieStepper stepper(config.gamma, st);

  std::vector<double> times;
  for (double ts : config.sample_times)
    if (ts >= 0.0 && ts <= config.t_end + 1e-12) times.push_back(ts);
  times.push_back(config.t_end);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  TrajectoryRecord rec;
  double t = 0.0;
  std::size_t next = 0;
  while (next < times.size() && times[next] <= 0.0) {
    rec.samples.push_back(observe(0.0, st, config.histogram_bins, config.histogram_vmax));
    ++next;
  }
  while (next < times.size()) {
    double tau = stepper.step(st, rng);
    double t_event = t + tau;
    while (next < times.size() && times[next] <= t_event) {
      // State is unchanged between events; sample the pre-event state.
      rec.samples.push_back(
          observe(times[next], st, config.histogram_bins, config.histogram_vmax));
      ++next;
    }
    t = t_event;
    ++rec.events;
    if (config.renormalization_period > 0 &&
        rec.events % config.renormalization_period == 0)
      st.rescale_to_sphere();
  }
  rec.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

}  // namespace

TrajectoryRecord run_walk(const WalkConfig& config, const GridDensity& f0) {
  return run_walk_stream(config, f0, 0);
}

EnsembleResult run_ensemble(const WalkConfig& config, const GridDensity& f0,
                            int trajectories) {
  EnsembleResult out;
  out.config = config;
  out.trajectories = trajectories;
  std::vector<TrajectoryRecord> recs(trajectories);
#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < trajectories; ++k)
    recs[k] = run_walk_stream(config, f0, static_cast<std::uint64_t>(k));

  if (trajectories == 0) return out;
  std::size_t ntimes = recs[0].samples.size();
  out.sample_times.resize(ntimes);
  for (std::size_t s = 0; s < ntimes; ++s) out.sample_times[s] = recs[0].samples[s].t;
  int bins = config.histogram_bins;
  out.pooled_histogram.assign(ntimes, std::vector<double>(bins, 0.0));
  out.per_traj.resize(trajectories);
  out.m4.assign(ntimes, std::vector<double>(trajectories, 0.0));
  double me = 0.0, ve = 0.0;
  for (int k = 0; k < trajectories; ++k) {
    out.per_traj[k].resize(ntimes);
    for (std::size_t s = 0; s < ntimes; ++s) {
      out.per_traj[k][s] = recs[k].samples[s].histogram;
      out.m4[s][k] = recs[k].samples[s].m4;
      for (int b = 0; b < bins; ++b)
        out.pooled_histogram[s][b] += recs[k].samples[s].histogram[b];
    }
    me += static_cast<double>(recs[k].events);
  }
  me /= trajectories;
  for (int k = 0; k < trajectories; ++k) {
    double d = recs[k].events - me;
    ve += d * d;
  }
  out.mean_events.push_back(me);
  out.var_events.push_back(trajectories > 1 ? ve / (trajectories - 1) : 0.0);
  for (auto& h : out.pooled_histogram)
    for (double& x : h) x /= trajectories;
  return out;
}

std::vector<double> density_bin_masses(const GridDensity& f, int bins, double vmax) {
  std::vector<double> out(bins, 0.0);
  double w = 2.0 * vmax / bins;
  const int sub = 64;
  for (int b = 0; b < bins; ++b) {
    double lo = -vmax + b * w;
    double s = 0.0;
    for (int i = 0; i <= sub; ++i) {
      double wt = (i == 0 || i == sub) ? 0.5 : 1.0;
      s += wt * f.evaluate(lo + w * i / sub);
    }
    out[b] = s * w / sub;
  }
  return out;
}

std::vector<double> grid_function_bin_masses(const VelocityGrid& grid,
                                             const std::vector<double>& values,
                                             int bins, double vmax) {
  GridDensity gd(grid, values);
  return density_bin_masses(gd, bins, vmax);
}

std::vector<ChaosDistance> propagation_of_chaos_check(
    const EnsembleResult& ensemble, const std::vector<double>& reference_times,
    const std::vector<std::vector<double>>& reference_bins) {
  std::vector<ChaosDistance> out;
  const int m = ensemble.trajectories;
  for (std::size_t s = 0; s < ensemble.sample_times.size(); ++s) {
    // locate matching reference time
    int ref = -1;
    for (std::size_t r = 0; r < reference_times.size(); ++r)
      if (std::abs(reference_times[r] - ensemble.sample_times[s]) < 1e-9) ref = static_cast<int>(r);
    if (ref < 0) continue;
    const std::vector<double>& p = reference_bins[ref];
    const std::vector<double>& pooled = ensemble.pooled_histogram[s];
    if (p.size() != pooled.size())
      throw std::invalid_argument("propagation_of_chaos_check: bin mismatch");
    ChaosDistance d;
    d.t = ensemble.sample_times[s];
    for (std::size_t b = 0; b < p.size(); ++b) d.l1 += std::abs(pooled[b] - p[b]);
    // Jackknife over trajectories.
    if (m > 1) {
      double mean = 0.0;
      std::vector<double> loo(m, 0.0);
      for (int k = 0; k < m; ++k) {
        double dist = 0.0;
        for (std::size_t b = 0; b < p.size(); ++b) {
          double pb = (pooled[b] * m - ensemble.per_traj[k][s][b]) / (m - 1);
          dist += std::abs(pb - p[b]);
        }
        loo[k] = dist;
        mean += dist;
      }
      mean /= m;
      double ss = 0.0;
      for (double x : loo) ss += (x - mean) * (x - mean);
      d.stderr_l1 = std::sqrt(ss * (m - 1) / m);
    }
    out.push_back(d);
  }
  return out;
}

}  // namespace kac
