#include "kac/conditioned_tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace kac {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = 3.14159265358979323846264338328;
constexpr double kInvSqrt2Pi = 0.39894228040143267793994605993;

struct ThetaGrid {
  std::vector<double> c, s;
  double node_weight = 0.0;  // full-circle measure carried per node
};

// For even base densities the pair integrand folds onto [0, pi/2) after a
// swap of the integration variables; node weight stays 2 pi / count.
ThetaGrid make_theta(int full_nodes, bool even) {
  ThetaGrid g;
  int nq = even ? std::max(full_nodes / 4, 8) : full_nodes;
  double range = even ? 0.5 * kPi : 2.0 * kPi;
  g.c.resize(nq);
  g.s.resize(nq);
  for (int k = 0; k < nq; ++k) {
    double th = (k + 0.5) * range / nq;
    g.c[k] = std::cos(th);
    g.s[k] = std::sin(th);
  }
  // Folded quarter-range carries weight 4; either way one node stands for
  // 2 pi / nq of the full circle.
  g.node_weight = 2.0 * kPi / nq;
  return g;
}

}  // namespace

ConditionedTensor::ConditionedTensor(std::shared_ptr<PartitionTable> table, int n)
    : table_(std::move(table)), n_(n) {
  if (n_ < 3) throw std::invalid_argument("ConditionedTensor: n >= 3 required");
  MomentReport rep = moments(table_->base(), {});
  if (std::abs(rep.m2 - 1.0) > 1e-8)
    throw std::invalid_argument("ConditionedTensor: base must have unit second moment");
  table_->ensure(n_);
  table_->ensure(n_ - 1);
  table_->ensure(n_ - 2);
  log_z_ = table_->log_partition(n_, static_cast<double>(n_));
  if (!std::isfinite(log_z_))
    throw std::runtime_error("ConditionedTensor: normalization vanishes at the sphere energy");
}

ConditionedTensor::ConditionedTensor(const GridDensity& base, int n)
    : ConditionedTensor(std::make_shared<PartitionTable>(base), n) {}

double marginal_at(const ConditionedTensor& ct, const std::vector<double>& vs) {
  int k = static_cast<int>(vs.size());
  int n = ct.n();
  if (k < 1 || k > n - 2)
    throw std::invalid_argument("marginal_at: require 1 <= k <= N-2");
  ct.table().ensure(n - k);
  double se = 0.0;
  double lf = 0.0;
  for (double v : vs) {
    se += v * v;
    lf += ct.base().log_interp(v);
  }
  if (se >= n || lf == -kInf) return 0.0;
  double lw = ct.table().log_conv_power(n - k, n - se) -
              ct.table().log_conv_power(n, static_cast<double>(n));
  double lm = lf + lw;
  return lm > -700.0 ? std::exp(lm) : 0.0;
}

std::vector<double> marginal_grid(const ConditionedTensor& ct) {
  const GridDensity& f = ct.base();
  const VelocityGrid& grid = f.grid();
  int n = ct.n();
  double lhn = ct.table().log_conv_power(n, static_cast<double>(n));
  std::vector<double> out(grid.n_points, 0.0);
  for (int i = 0; i < grid.n_points; ++i) {
    double v = grid.node(i);
    if (v * v >= n || f.value(i) <= kDensityFloor) continue;
    double lw = ct.table().log_conv_power(n - 1, n - v * v) - lhn;
    if (lw == -kInf) continue;
    out[i] = f.value(i) * std::exp(lw);
  }
  return out;
}

double entropy_HN(const ConditionedTensor& ct) {
  const GridDensity& f = ct.base();
  const VelocityGrid& grid = f.grid();
  std::vector<double> pi1 = marginal_grid(ct);
  double s = 0.0;
  for (int i = 0; i < grid.n_points; ++i) {
    if (pi1[i] <= 0.0 || f.value(i) <= kDensityFloor) continue;
    double w = (i == 0 || i == grid.n_points - 1) ? 0.5 : 1.0;
    s += w * pi1[i] * f.node_log(i);
  }
  s *= grid.spacing();
  return ct.n() * s - ct.log_z();
}

namespace {

// Shared pair-collision loop. Mode 0: entropy production with weight
// (1+s)^gamma and psi = (p-q)(log p - log q). Mode 1: log-power integrand
// |p-q| |log p - log q|^{1+beta} without the gamma weight.
double pair_integral(const ConditionedTensor& ct, double gamma_or_beta, int mode,
                     const PairIntegralOptions& opt) {
  const GridDensity& f = ct.base();
  const VelocityGrid& grid = f.grid();
  const int n = ct.n();
  ct.table().ensure(n - 2);
  const double lhn = ct.table().log_conv_power(n, static_cast<double>(n));
  const ThetaGrid th = make_theta(opt.theta_nodes, f.is_even());
  const int nth = static_cast<int>(th.c.size());
  const int stride = opt.v_stride;
  if ((grid.n_points - 1) % stride != 0)
    throw std::invalid_argument("pair_integral: stride must divide the grid");
  const int nv = (grid.n_points - 1) / stride + 1;
  const double dv = grid.spacing() * stride;

  std::vector<double> vs(nv), fv(nv), lf(nv), wq(nv);
  for (int i = 0; i < nv; ++i) {
    int gi = i * stride;
    vs[i] = grid.node(gi);
    fv[i] = f.value(gi);
    lf[i] = f.value(gi) > kDensityFloor ? f.node_log(gi) : kLogDensityFloor;
    wq[i] = (i == 0 || i == nv - 1) ? 0.5 : 1.0;
  }

  auto row_term = [&](std::int64_t ii) {
    int i = static_cast<int>(ii);
    double acc = 0.0;
    for (int j = 0; j < nv; ++j) {
      double s2 = vs[i] * vs[i] + vs[j] * vs[j];
      if (s2 >= n) continue;
      double lw = ct.table().log_conv_power(n - 2, n - s2) - lhn;
      if (lw == -kInf) continue;
      double weight = std::exp(lw);
      if (mode == 0 && gamma_or_beta != 0.0)
        weight *= std::pow(1.0 + s2, gamma_or_beta);
      double p = fv[i] * fv[j];
      double lp = lf[i] + lf[j];
      double tsum = 0.0;
      for (int k = 0; k < nth; ++k) {
        double a = vs[i] * th.c[k] + vs[j] * th.s[k];
        double b = -vs[i] * th.s[k] + vs[j] * th.c[k];
        double lq = f.log_interp(a) + f.log_interp(b);
        double q = lq > -700.0 ? std::exp(lq) : 0.0;
        if (p <= kDensityFloor && q <= kDensityFloor) continue;
        double lpf = std::max(lp, kLogDensityFloor);
        double lqf = std::max(lq, kLogDensityFloor);
        if (mode == 0) {
          tsum += (p - q) * (lpf - lqf);
        } else {
          tsum += std::abs(p - q) * std::pow(std::abs(lpf - lqf), 1.0 + gamma_or_beta);
        }
      }
      acc += wq[i] * wq[j] * weight * tsum;
    }
    return acc;
  };

  double total = opt.exec == Execution::Parallel
                     ? chunked_sum(nv, row_term, 1)
                     : chunked_sum_serial(nv, row_term, 1);
  total *= dv * dv * th.node_weight;
  if (mode == 0) return total * n / (4.0 * kPi);
  return total / (2.0 * kPi);
}

}  // namespace

double entropy_production_DN(const ConditionedTensor& ct, double gamma,
                             const PairIntegralOptions& opt) {
  if (gamma < 0.0 || gamma > 1.0)
    throw std::invalid_argument("entropy_production_DN: gamma in [0,1]");
  return pair_integral(ct, gamma, 0, opt);
}

double log_power_integral(const ConditionedTensor& ct, double beta,
                          const PairIntegralOptions& opt) {
  if (!(beta > 0.0)) throw std::invalid_argument("log_power_integral: beta > 0");
  return pair_integral(ct, beta, 1, opt);
}

ConcentrationProfile g_concentration_profile(PartitionTable& table,
                                             const std::vector<int>& ns,
                                             double window_sigmas, double r_sigmas) {
  ConcentrationProfile prof;
  prof.sigma2 = table.sigma2();
  prof.g_sup = kInvSqrt2Pi;
  double sig = std::sqrt(prof.sigma2);
  bool decreasing = true;
  double prev = kInf;
  for (int n : ns) {
    table.ensure(n);
    double sn = std::sqrt(n * prof.sigma2);
    double lo = std::max(1e-9, n - window_sigmas * sn);
    double hi = n + window_sigmas * sn;
    const int scan = 4001;
    double sup = 0.0;
    bool shrunk = false;
    for (int i = 0; i < scan; ++i) {
      double u = lo + (hi - lo) * i / (scan - 1);
      double lh = table.log_conv_power(n, u);
      if (lh == -kInf) {
        shrunk = true;  // outside the resolvable bulk; window effectively ends
        continue;
      }
      double extracted = sig * std::sqrt(static_cast<double>(n)) * std::exp(lh);
      double x = u - n;
      double cand = kInvSqrt2Pi * std::exp(-x * x / (2.0 * n * prof.sigma2));
      sup = std::max(sup, std::abs(extracted - cand));
    }
    double r = r_sigmas * sn;
    prof.ns.push_back(n);
    prof.sup_lambda.push_back(sup);
    prof.g_at_zero.push_back(kInvSqrt2Pi);
    prof.sup_g_dev.push_back(kInvSqrt2Pi * (1.0 - std::exp(-r * r / (2.0 * n * prof.sigma2))));
    prof.window_radius.push_back(r);
    prof.window_shrunk.push_back(shrunk);
    prof.max_sup_lambda = std::max(prof.max_sup_lambda, sup);
    if (sup >= prev) decreasing = false;
    prev = sup;
  }
  prof.decreasing_trend = decreasing;
  return prof;
}

double log_scalability_constant(PartitionTable& table, const TailModel& tail,
                                const std::vector<int>& ns) {
  if (!tail.has_lower || !tail.has_upper)
    throw std::invalid_argument("log_scalability_constant: two-sided declared bounds required");
  const GridDensity& f = table.base();
  const VelocityGrid& grid = f.grid();
  for (int i = 0; i < grid.n_points; ++i) {
    double v = grid.node(i);
    double lo = tail.c1 * std::exp(-tail.a1 * v * v);
    double hi = tail.c2 * std::exp(tail.a2 * v * v);
    double fi = f.value(i);
    if (fi < lo * (1.0 - 1e-9) || fi > hi * (1.0 + 1e-9))
      throw std::invalid_argument(
          "log_scalability_constant: declared bound violated at v = " + std::to_string(v));
  }
  double zterm = 0.0;
  for (int n : ns) {
    table.ensure(n);
    double lz = table.log_partition(n, static_cast<double>(n));
    zterm = std::max(zterm, std::abs(lz) / n);
  }
  return std::max(std::abs(std::log(tail.c1)), std::abs(std::log(tail.c2))) +
         std::max(tail.a1, tail.a2) + zterm;
}

double c_epsilon(double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("c_epsilon: eps > 0");
  return 1.0 / (eps * std::exp(1.0));
}

double c_k_beta(double k, double beta) {
  double p = k * (1.0 + beta);
  double integral = 2.0 * std::sqrt(kPi) *
                    std::exp(std::lgamma(0.5 * (p + 1.0)) - std::lgamma(0.5 * p + 1.0));
  return std::pow(2.0, p + 1.0) * integral;
}

double log_power_constant(const GridDensity& f, const LogPowerConstantParams& p,
                          const ConcentrationProfile* profile) {
  double order = p.k * (1.0 + p.beta);
  const VelocityGrid& grid = f.grid();
  double mom = 0.0;
  for (int i = 0; i < grid.n_points; ++i) {
    double w = (i == 0 || i == grid.n_points - 1) ? 0.5 : 1.0;
    mom += w * std::pow(std::abs(grid.node(i)), order) * f.value(i);
  }
  mom *= grid.spacing();

  double bound;
  if (p.use_fisher_bound) {
    MomentReport rep = moments(f, {});
    if (!std::isfinite(rep.fisher))
      throw std::invalid_argument("log_power_constant: Fisher information diverges");
    bound = std::pow(rep.fisher, 0.5 * p.epsilon);
  } else {
    bound = std::pow(*std::max_element(f.values().begin(), f.values().end()), p.epsilon);
  }

  double gfactor = 1.0;
  if (profile) {
    double den = kInvSqrt2Pi - profile->max_sup_lambda;
    if (!(den > 0.0))
      throw std::invalid_argument("log_power_constant: concentration residual too large");
    gfactor = (profile->g_sup + profile->max_sup_lambda) / den;
  }

  double ce = c_epsilon(p.epsilon);
  double inner = 2.0 * std::pow(ce * bound, 1.0 + p.beta) +
                 std::pow(p.a, 1.0 + p.beta) * (1.0 + c_k_beta(p.k, p.beta)) * mom;
  double c = std::pow(2.0, 1.0 + 2.0 * p.beta) * std::sqrt(3.0) * gfactor * inner;
  return std::pow(c, 1.0 / (1.0 + p.beta));
}

PairWeightBracket pair_weight_bracket(const ConditionedTensor& ct, double mass_tol) {
  const GridDensity& f = ct.base();
  const VelocityGrid& grid = f.grid();
  const int n = ct.n();
  // Pair-energy value s_eff below which f⊗f keeps all but mass_tol of its
  // mass: take x with P(v^2 > x) <= mass_tol / 2 and use s_eff = 2x.
  double total = 1.0;
  double tailmass = 0.0;
  double x = grid.v_max * grid.v_max;
  for (int i = grid.n_points - 1; i > grid.n_points / 2; --i) {
    double w = (i == grid.n_points - 1) ? 0.5 : 1.0;
    tailmass += 2.0 * w * f.value(i) * grid.spacing();
    if (tailmass > 0.5 * mass_tol * total) {
      x = grid.node(i) * grid.node(i);
      break;
    }
  }
  PairWeightBracket out;
  out.s_eff = std::min(2.0 * x, 0.999 * n);
  double lhn = ct.table().log_conv_power(n, static_cast<double>(n));
  out.w_min = kInf;
  out.w_max = 0.0;
  const int scan = 4096;
  for (int i = 0; i <= scan; ++i) {
    double s = out.s_eff * i / scan;
    double lw = ct.table().log_conv_power(n - 2, n - s) - lhn;
    double w = lw > -700.0 ? std::exp(lw) : 0.0;
    out.w_min = std::min(out.w_min, w);
    out.w_max = std::max(out.w_max, w);
  }
  return out;
}

}  // namespace kac
