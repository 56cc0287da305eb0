#include "kac/boltzmann.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace kac {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = 3.14159265358979323846264338328;

double trapz_weight(int i, int n) { return (i == 0 || i == n - 1) ? 0.5 : 1.0; }

// Discrete moments with trapezoid weights.
void discrete_moments(const VelocityGrid& g, const std::vector<double>& v,
                      double* m0, double* m2, double* m4) {
  double s0 = 0, s2 = 0, s4 = 0;
  for (int i = 0; i < g.n_points; ++i) {
    double w = trapz_weight(i, g.n_points);
    double x = g.node(i);
    s0 += w * v[i];
    s2 += w * x * x * v[i];
    s4 += w * x * x * x * x * v[i];
  }
  *m0 = s0 * g.spacing();
  *m2 = s2 * g.spacing();
  *m4 = s4 * g.spacing();
}

// Subtract alpha f + beta v^2 f so the discrete mass and energy moments of
// rhs become exactly zero.
void project_collision_invariants(const VelocityGrid& g, const std::vector<double>& f,
                                  std::vector<double>* rhs) {
  double fm0, fm2, fm4, q0, q2, q4;
  discrete_moments(g, f, &fm0, &fm2, &fm4);
  discrete_moments(g, *rhs, &q0, &q2, &q4);
  double det = fm0 * fm4 - fm2 * fm2;
  if (std::abs(det) < 1e-30) return;
  double alpha = (q0 * fm4 - q2 * fm2) / det;
  double beta = (q2 * fm0 - q0 * fm2) / det;
  for (int i = 0; i < g.n_points; ++i) {
    double x = g.node(i);
    (*rhs)[i] -= (alpha + beta * x * x) * f[i];
  }
}

}  // namespace

CollisionKernelCache make_collision_cache(const VelocityGrid& grid, double gamma,
                                          int theta_nodes, bool even_density) {
  if (theta_nodes < 64)
    throw std::invalid_argument("make_collision_cache: theta_nodes >= 64");
  CollisionKernelCache c;
  c.grid = grid;
  c.gamma = gamma;
  c.theta_nodes = theta_nodes;
  c.folded = even_density;
  int nq = even_density ? std::max(theta_nodes / 4, 8) : theta_nodes;
  double range = even_density ? 0.5 * kPi : 2.0 * kPi;
  c.cos_t.resize(nq);
  c.sin_t.resize(nq);
  for (int k = 0; k < nq; ++k) {
    double th = (k + 0.5) * range / nq;
    c.cos_t[k] = std::cos(th);
    c.sin_t[k] = std::sin(th);
  }
  c.theta_node_weight = 2.0 * kPi / nq;
  if (gamma != 0.0) {
    int n = grid.n_points;
    c.gamma_pow.resize(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
      double vi2 = grid.node(i) * grid.node(i);
      for (int j = 0; j < n; ++j) {
        double wj2 = grid.node(j) * grid.node(j);
        c.gamma_pow[static_cast<std::size_t>(i) * n + j] = std::pow(1.0 + vi2 + wj2, gamma);
      }
    }
  }
  return c;
}

std::vector<double> collision_Q(const GridDensity& f, const CollisionKernelCache& cache,
                                Execution exec) {
  const VelocityGrid& grid = f.grid();
  if (!(grid == cache.grid))
    throw std::invalid_argument("collision_Q: cache grid mismatch");
  if (cache.folded && !f.is_even())
    throw std::invalid_argument("collision_Q: folded cache requires an even density");
  const int n = grid.n_points;
  const int nth = static_cast<int>(cache.cos_t.size());
  const double dv = grid.spacing();

  std::vector<double> out(n, 0.0);
  const double* gp = cache.gamma_pow.empty() ? nullptr : cache.gamma_pow.data();

  auto row = [&](std::int64_t ii) {
    int i = static_cast<int>(ii);
    double vi = grid.node(i);
    double fi = f.value(i);
    double gain = 0.0, loss = 0.0;
    for (int j = 0; j < n; ++j) {
      double w = grid.node(j);
      double wj = trapz_weight(j, n) * (gp ? gp[static_cast<std::size_t>(i) * n + j] : 1.0);
      double tsum = 0.0;
      for (int k = 0; k < nth; ++k) {
        double a = vi * cache.cos_t[k] - w * cache.sin_t[k];
        double b = vi * cache.sin_t[k] + w * cache.cos_t[k];
        double lq = f.log_interp(a) + f.log_interp(b);
        if (lq > -700.0) tsum += std::exp(lq);
      }
      gain += wj * tsum;
      loss += wj * fi * f.value(j);
    }
    // Node weight 2 pi / nq in theta; the loss integrand is
    // theta-independent and carries the full 2 pi.
    return (gain * cache.theta_node_weight - loss * 2.0 * kPi) * dv / kPi;
  };

#pragma omp parallel for schedule(static) if (exec == Execution::Parallel)
  for (int i = 0; i < n; ++i) out[i] = row(i);

  project_collision_invariants(grid, f.values(), &out);
  return out;
}

double entropy_production_Dgamma(const GridDensity& f, double gamma,
                                 const CollisionKernelCache& cache, Execution exec,
                                 bool* unreliable) {
  const VelocityGrid& grid = f.grid();
  if (!(grid == cache.grid) || gamma != cache.gamma)
    throw std::invalid_argument("entropy_production_Dgamma: cache mismatch");
  if (cache.folded && !f.is_even())
    throw std::invalid_argument("entropy_production_Dgamma: folded cache requires even density");
  const int n = grid.n_points;
  const int nth = static_cast<int>(cache.cos_t.size());
  const double dv = grid.spacing();
  const double* gp = cache.gamma_pow.empty() ? nullptr : cache.gamma_pow.data();

  if (unreliable) {
    double floored = 0.0;
    for (int i = 0; i < n; ++i)
      if (f.value(i) <= kDensityFloor * 1e10) floored += f.value(i);
    *unreliable = floored * dv > 1e-3;
  }

  auto row = [&](std::int64_t ii) {
    int i = static_cast<int>(ii);
    double vi = grid.node(i);
    double fi = f.value(i);
    double lfi = fi > kDensityFloor ? f.node_log(i) : kLogDensityFloor;
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
      double w = grid.node(j);
      double p = fi * f.value(j);
      double lp = lfi + (f.value(j) > kDensityFloor ? f.node_log(j) : kLogDensityFloor);
      double tsum = 0.0;
      for (int k = 0; k < nth; ++k) {
        double a = vi * cache.cos_t[k] - w * cache.sin_t[k];
        double b = vi * cache.sin_t[k] + w * cache.cos_t[k];
        double lq = f.log_interp(a) + f.log_interp(b);
        double q = lq > -700.0 ? std::exp(lq) : 0.0;
        if (p <= kDensityFloor && q <= kDensityFloor) continue;
        tsum += (p - q) * (lp - std::max(lq, kLogDensityFloor));
      }
      acc += trapz_weight(j, n) * (gp ? gp[static_cast<std::size_t>(i) * n + j] : 1.0) * tsum;
    }
    return trapz_weight(i, n) * acc;
  };

  double total = exec == Execution::Parallel ? chunked_sum(n, row, 1)
                                             : chunked_sum_serial(n, row, 1);
  return kDissipationPrefactor * total * dv * dv * cache.theta_node_weight;
}

namespace {

double entropy_vs_maxwellian(const VelocityGrid& g, const std::vector<double>& f,
                             const std::vector<double>& log_m1) {
  double s = 0.0;
  for (int i = 0; i < g.n_points; ++i) {
    if (f[i] <= kDensityFloor) continue;
    s += trapz_weight(i, g.n_points) * f[i] * (std::log(f[i]) - log_m1[i]);
  }
  return s * g.spacing();
}

// Clamp negatives, then restore exact discrete unit mass and energy.
void floor_and_restore(const VelocityGrid& g, std::vector<double>* f) {
  for (int pass = 0; pass < 3; ++pass) {
    bool clipped = false;
    for (double& x : *f)
      if (x < 0.0) {
        x = 0.0;
        clipped = true;
      }
    double m0, m2, m4;
    discrete_moments(g, *f, &m0, &m2, &m4);
    double det = m0 * m4 - m2 * m2;
    if (std::abs(det) < 1e-30) break;
    double alpha = ((1.0 - m0) * m4 - (1.0 - m2) * m2) / det;
    double beta = ((1.0 - m2) * m0 - (1.0 - m0) * m2) / det;
    double worst = 0.0;
    for (int i = 0; i < g.n_points; ++i) {
      double x = g.node(i);
      (*f)[i] += (alpha + beta * x * x) * (*f)[i];
      worst = std::min(worst, (*f)[i]);
    }
    if (!clipped && worst >= 0.0) break;
  }
}

}  // namespace

SolveResult solve(const GridDensity& f0, const SolverConfig& config) {
  const VelocityGrid& grid = config.grid;
  GridDensity init = f0.grid() == grid ? f0 : [&] {
    std::vector<double> v(grid.n_points);
    for (int i = 0; i < grid.n_points; ++i) v[i] = f0.evaluate(grid.node(i));
    return GridDensity(grid, std::move(v));
  }();
  double m0, m2, m4;
  discrete_moments(grid, init.values(), &m0, &m2, &m4);
  if (std::abs(m0 - 1.0) > 1e-8 || std::abs(m2 - 1.0) > 1e-4)
    throw std::invalid_argument("solve: initial datum must have unit mass and energy");

  std::vector<double> f = init.values();
  floor_and_restore(grid, &f);

  CollisionKernelCache cache =
      make_collision_cache(grid, config.gamma, config.theta_nodes, init.is_even());

  GridDensity m1 = maxwellian(1.0, grid);
  std::vector<double> log_m1(grid.n_points);
  for (int i = 0; i < grid.n_points; ++i) log_m1[i] = m1.node_log(i);

  double dt = config.dt > 0.0
                  ? config.dt
                  : 0.01 / (1.0 + 2.0 * m2 * std::pow(3.0, config.gamma));

  std::vector<double> sample_times;
  for (double ts : config.sample_times)
    if (ts >= 0.0 && ts <= config.t_end + 1e-12) sample_times.push_back(ts);
  sample_times.push_back(config.t_end);
  std::sort(sample_times.begin(), sample_times.end());
  sample_times.erase(std::unique(sample_times.begin(), sample_times.end()),
                     sample_times.end());

  SolveResult res;
  auto emit_sample = [&](double t, const std::vector<double>& state) {
    SolveSample s;
    s.t = t;
    s.values = state;
    GridDensity gd(grid, state);
    s.entropy = entropy_vs_maxwellian(grid, state, log_m1);
    s.dissipation = entropy_production_Dgamma(gd, config.gamma, cache);
    discrete_moments(grid, state, &s.mass, &s.energy, &s.m4);
    res.samples.push_back(std::move(s));
  };

  auto rk4_step = [&](std::vector<double>& state, double h) {
    const int n = grid.n_points;
    std::vector<double> k1 = collision_Q(GridDensity(grid, state), cache);
    std::vector<double> tmp(n);
    for (int i = 0; i < n; ++i) tmp[i] = std::max(state[i] + 0.5 * h * k1[i], 0.0);
    std::vector<double> k2 = collision_Q(GridDensity(grid, tmp), cache);
    for (int i = 0; i < n; ++i) tmp[i] = std::max(state[i] + 0.5 * h * k2[i], 0.0);
    std::vector<double> k3 = collision_Q(GridDensity(grid, tmp), cache);
    for (int i = 0; i < n; ++i) tmp[i] = std::max(state[i] + h * k3[i], 0.0);
    std::vector<double> k4 = collision_Q(GridDensity(grid, tmp), cache);
    for (int i = 0; i < n; ++i)
      state[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    floor_and_restore(grid, &state);
  };

  double t = 0.0;
  double h_prev = entropy_vs_maxwellian(grid, f, log_m1);
  res.step_times.push_back(0.0);
  res.step_entropy.push_back(h_prev);
  std::size_t next_sample = 0;
  while (next_sample < sample_times.size() && sample_times[next_sample] <= 1e-12) {
    emit_sample(0.0, f);
    ++next_sample;
  }

  while (t < config.t_end - 1e-12) {
    double h = dt;
    if (next_sample < sample_times.size())
      h = std::min(h, sample_times[next_sample] - t);
    h = std::min(h, config.t_end - t);
    rk4_step(f, h);
    t += h;
    ++res.steps;
    double h_now = entropy_vs_maxwellian(grid, f, log_m1);
    if (h_now > h_prev + config.h_slack)
      throw std::runtime_error("solve: entropy increased at t = " + std::to_string(t) +
                               " by " + std::to_string(h_now - h_prev) +
                               " (step-size failure)");
    h_prev = h_now;
    res.step_times.push_back(t);
    res.step_entropy.push_back(h_now);
    if (next_sample < sample_times.size() &&
        t >= sample_times[next_sample] - 1e-12) {
      emit_sample(t, f);
      ++next_sample;
    }
  }
  return res;
}

}  // namespace kac
