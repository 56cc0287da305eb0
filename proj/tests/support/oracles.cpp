#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <omp.h>

namespace kac::oracles {

namespace {

constexpr double kPi = 3.14159265358979323846264338328;

// Gauss-Legendre nodes on [-1,1], generated by Newton on Legendre polynomials.
void gauss_legendre(int n, std::vector<double>* x, std::vector<double>* w) {
  x->resize(n);
  w->resize(n);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (t * p1 - p0) / (t * t - 1.0);
      double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    double p0 = 1.0, p1 = t;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    double dp = n * (t * p1 - p0) / (t * t - 1.0);
    (*x)[i] = t;
    (*w)[i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
}

}  // namespace

double sphere_z3(const GridDensity& f, double r, int n_polar, int n_phi) {
  // Z3 = (1/4pi) ∫_{-pi/2}^{pi/2} cos t ∫_0^{2pi}
  //        f(r sin t) f(r cos t cos p) f(r cos t sin p) dp dt
  std::vector<double> gx, gw;
  gauss_legendre(n_polar, &gx, &gw);
  double total = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : total)
  for (int i = 0; i < n_polar; ++i) {
    double t = 0.5 * kPi * gx[i];
    double wt = 0.5 * kPi * gw[i] * std::cos(t);
    double f1 = f.evaluate(r * std::sin(t));
    if (f1 == 0.0) continue;
    double rc = r * std::cos(t);
    double s = 0.0;
    for (int j = 0; j < n_phi; ++j) {
      double p = (j + 0.5) * 2.0 * kPi / n_phi;
      s += f.evaluate(rc * std::cos(p)) * f.evaluate(rc * std::sin(p));
    }
    total += wt * f1 * s * (2.0 * kPi / n_phi);
  }
  return total / (4.0 * kPi);
}

double sphere_z4(const GridDensity& f, double r, int n_alpha, int n_polar, int n_phi) {
  // Z4 = (2/pi) ∫_0^pi sin^2 a f(r cos a) Z3(f, r sin a) da
  std::vector<double> gx, gw;
  gauss_legendre(n_alpha, &gx, &gw);
  double total = 0.0;
  for (int i = 0; i < n_alpha; ++i) {
    double a = 0.5 * kPi * (gx[i] + 1.0);
    double w = 0.5 * kPi * gw[i];
    double sa = std::sin(a);
    double fa = f.evaluate(r * std::cos(a));
    if (fa == 0.0 || sa <= 0.0) continue;
    total += w * sa * sa * fa * sphere_z3(f, r * sa, n_polar, n_phi);
  }
  return total * 2.0 / kPi;
}

namespace {

template <class Term>
McEstimate mc_pair_functional(const GridDensity& f, std::int64_t samples, Rng& rng,
                              int batches, Term&& term) {
  // Ratio estimator over uniform points of S^2(sqrt 3) and uniform theta;
  // the batch spread gives the standard error.
  std::vector<double> num(batches, 0.0), den(batches, 0.0);
  std::int64_t per = samples / batches;
  for (int b = 0; b < batches; ++b) {
    for (std::int64_t s = 0; s < per; ++s) {
      double g1 = rng.normal(), g2 = rng.normal(), g3 = rng.normal();
      double norm = std::sqrt(g1 * g1 + g2 * g2 + g3 * g3);
      if (norm < 1e-12) continue;
      double c = std::sqrt(3.0) / norm;
      double v1 = c * g1, v2 = c * g2, v3 = c * g3;
      double theta = rng.uniform(-kPi, kPi);
      double p = f.evaluate(v1) * f.evaluate(v2) * f.evaluate(v3);
      double w1 = v1 * std::cos(theta) + v2 * std::sin(theta);
      double w2 = -v1 * std::sin(theta) + v2 * std::cos(theta);
      double q = f.evaluate(w1) * f.evaluate(w2) * f.evaluate(v3);
      den[b] += p;
      num[b] += term(v1, v2, p, q);
    }
  }
  double tn = 0.0, td = 0.0;
  for (int b = 0; b < batches; ++b) {
    tn += num[b];
    td += den[b];
  }
  McEstimate e;
  if (td <= 0.0) return e;
  e.value = tn / td;
  double mean = e.value, ss = 0.0;
  int used = 0;
  for (int b = 0; b < batches; ++b) {
    if (den[b] <= 0.0) continue;
    double rb = num[b] / den[b];
    ss += (rb - mean) * (rb - mean);
    ++used;
  }
  if (used > 1) e.stderr_value = std::sqrt(ss / (used - 1) / used);
  return e;
}

double psi_floored(double p, double q) {
  double lp = p > kDensityFloor ? std::log(p) : kLogDensityFloor;
  double lq = q > kDensityFloor ? std::log(q) : kLogDensityFloor;
  if (p <= kDensityFloor && q <= kDensityFloor) return 0.0;
  return (p - q) * (lp - lq);
}

}  // namespace

McEstimate mc_entropy_production_3(const GridDensity& f, double gamma,
                                   std::int64_t samples, Rng& rng, int batches) {
  McEstimate e = mc_pair_functional(
      f, samples, rng, batches, [&](double v1, double v2, double p, double q) {
        double s = v1 * v1 + v2 * v2;
        double g = gamma == 0.0 ? 1.0 : std::pow(1.0 + s, gamma);
        return g * psi_floored(p, q);
      });
  // D_3 = (3 / 4pi) * 2pi * E[...] / Z3 = (3/2) * ratio
  e.value *= 1.5;
  e.stderr_value *= 1.5;
  return e;
}

McEstimate mc_log_power_3(const GridDensity& f, double beta, std::int64_t samples,
                          Rng& rng, int batches) {
  // (1/2pi) * 2pi * E[psi_beta] / Z3 = ratio
  return mc_pair_functional(
      f, samples, rng, batches, [&](double, double, double p, double q) {
        double lp = p > kDensityFloor ? std::log(p) : kLogDensityFloor;
        double lq = q > kDensityFloor ? std::log(q) : kLogDensityFloor;
        if (p <= kDensityFloor && q <= kDensityFloor) return 0.0;
        return std::abs(p - q) * std::pow(std::abs(lp - lq), 1.0 + beta);
      });
}

std::vector<double> direct_conv_power_doubling(const GridDensity& f, int m,
                                               double u_max, int n) {
  if (m < 2 || (m & (m - 1)) != 0)
    throw std::invalid_argument("direct_conv_power_doubling: m must be a power of two");
  double du = u_max / n;
  // Cell masses of the energy law via the s-substitution, midpoint rule.
  std::vector<double> mass(n, 0.0);
  const int sub = 16;
  for (int j = 0; j < n; ++j) {
    double sa = std::sqrt(j * du), sb = std::sqrt((j + 1) * du);
    double s = 0.0;
    for (int q = 0; q < sub; ++q) {
      double x = sa + (sb - sa) * (q + 0.5) / sub;
      s += f.evaluate(x) + f.evaluate(-x);
    }
    mass[j] = s * (sb - sa) / sub;
  }
  std::vector<double> cur = mass;
  for (int level = 2; level <= m; level *= 2) {
    std::vector<double> nxt(n, 0.0);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int i = 0; i <= j; ++i) s += cur[i] * cur[j - i];
      nxt[j] = s;
    }
    cur = std::move(nxt);
  }
  for (double& x : cur) x /= du;  // masses -> density
  return cur;
}

}  // namespace kac::oracles
