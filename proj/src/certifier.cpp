#include "kac/certifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace kac {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double safe_pow(double base, double expo) { return std::pow(base, expo); }

Verdict verdict_from_margin(double margin, double tolerance) {
  return margin >= -tolerance ? Verdict::Pass : Verdict::Fail;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    default: return "inconclusive-with-tolerance";
  }
}

nlohmann::json TheoremReport::to_json() const {
  nlohmann::json j;
  j["theorem_id"] = theorem_id;
  j["parameters"] = parameters;
  j["lhs"] = lhs;
  j["rhs"] = rhs;
  j["constant_value"] = constant_value;
  j["margin"] = margin;
  j["tolerance"] = tolerance;
  j["verdict"] = to_string(verdict);
  if (!note.empty()) j["note"] = note;
  return j;
}

std::string TheoremReport::one_line() const {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-14s lhs=%.6e rhs=%.6e margin=%+.3e tol=%.1e %s",
                theorem_id.c_str(), lhs, rhs, margin, tolerance,
                to_string(verdict).c_str());
  return std::string(buf) + (note.empty() ? "" : "  [" + note + "]");
}

Measured measure_entropy_HN(const ConditionedTensor& ct) {
  const GridDensity& f = ct.base();
  const VelocityGrid& grid = f.grid();
  std::vector<double> pi1 = marginal_grid(ct);
  auto integrate = [&](int stride) {
    double s = 0.0;
    int nv = (grid.n_points - 1) / stride + 1;
    for (int i = 0; i < nv; ++i) {
      int gi = i * stride;
      if (pi1[gi] <= 0.0 || f.value(gi) <= kDensityFloor) continue;
      double w = (i == 0 || i == nv - 1) ? 0.5 : 1.0;
      s += w * pi1[gi] * f.node_log(gi);
    }
    return s * grid.spacing() * stride;
  };
  Measured m;
  double full = integrate(1), half = integrate(2);
  m.value = ct.n() * full - ct.log_z();
  m.tolerance = 10.0 * std::abs(ct.n() * (full - half)) + 1e-9;
  return m;
}

Measured measure_entropy_production_DN(const ConditionedTensor& ct, double gamma,
                                       const PairIntegralOptions& opt) {
  Measured m;
  m.value = entropy_production_DN(ct, gamma, opt);
  PairIntegralOptions coarse = opt;
  coarse.v_stride = opt.v_stride * 2;
  coarse.theta_nodes = std::max(64, opt.theta_nodes / 2);
  double low = entropy_production_DN(ct, gamma, coarse);
  m.tolerance = 10.0 * std::abs(m.value - low) + 1e-9;
  return m;
}

double marginal_moment(const ConditionedTensor& ct, double order) {
  const VelocityGrid& grid = ct.base().grid();
  std::vector<double> pi1 = marginal_grid(ct);
  double s = 0.0;
  for (int i = 0; i < grid.n_points; ++i) {
    double w = (i == 0 || i == grid.n_points - 1) ? 0.5 : 1.0;
    s += w * std::pow(std::abs(grid.node(i)), order) * pi1[i];
  }
  return s * grid.spacing();
}

double marginal_exp_moment(const ConditionedTensor& ct, double a, double mu) {
  const VelocityGrid& grid = ct.base().grid();
  std::vector<double> pi1 = marginal_grid(ct);
  double s = 0.0;
  for (int i = 0; i < grid.n_points; ++i) {
    double w = (i == 0 || i == grid.n_points - 1) ? 0.5 : 1.0;
    s += w * std::exp(a * std::pow(std::abs(grid.node(i)), mu)) * pi1[i];
  }
  return s * grid.spacing();
}

TheoremReport certify_villani(const ConditionedTensor& ct,
                              const PairIntegralOptions& opt) {
  TheoremReport rep;
  rep.theorem_id = "villani";
  Measured d = measure_entropy_production_DN(ct, 1.0, opt);
  Measured h = measure_entropy_HN(ct);
  rep.parameters = {{"N", ct.n()}, {"gamma", 1.0}};
  rep.lhs = d.value;
  rep.rhs = h.value / 3.0;
  rep.constant_value = 1.0 / 3.0;
  rep.margin = rep.lhs - rep.rhs;
  rep.tolerance = d.tolerance + h.tolerance / 3.0;
  rep.verdict = verdict_from_margin(rep.margin, rep.tolerance);
  return rep;
}

double constant_thm22i(double k, double gamma, double n, double c_f, double m2k) {
  if (!(k > 1.0)) throw std::invalid_argument("constant_thm22i: k > 1 required");
  if (!(gamma >= 0.0 && gamma < 1.0))
    throw std::invalid_argument("constant_thm22i: gamma in [0,1) required");
  if (!(c_f > 0.0) || !(m2k > 0.0))
    throw std::invalid_argument("constant_thm22i: positive C_F and M_2k required");
  double e1 = (2.0 * k - gamma * k - gamma) / (k - 1.0);
  double e2 = (k - gamma) / (k - 1.0);
  double e3 = (1.0 - gamma) / (k - 1.0);
  return (k - 1.0) / (safe_pow(3.0, e1) * (1.0 - gamma)) *
         safe_pow((1.0 - gamma) / (k - gamma), e2) /
         (safe_pow(2.0 * c_f, e3) * safe_pow(1.0 + 2.0 * m2k, e3)) *
         safe_pow(n, -e3);
}

double constant_thm23i(double k, double gamma, double beta, double c_f, double m2k) {
  double d = k * beta - (1.0 + beta);
  if (!(d > 0.0)) throw std::invalid_argument("constant_thm23i: k > 1 + 1/beta required");
  if (!(gamma >= 0.0 && gamma < 1.0))
    throw std::invalid_argument("constant_thm23i: gamma in [0,1) required");
  double num = (1.0 + beta) * (1.0 - gamma);
  return d / num * safe_pow(num / d, (k * beta - gamma * (1.0 + beta)) / d) *
         safe_pow(2.0, (1.0 - gamma) / d) /
         safe_pow(3.0, (2.0 * k * beta - k * beta * gamma - gamma * (1.0 + beta)) / d) /
         (safe_pow(c_f, num / d) * safe_pow(1.0 + 2.0 * m2k, beta * (1.0 - gamma) / d));
}

TheoremReport certify_thm22(const ConditionedTensor& ct, double gamma,
                            const MomentMode& mode, double c_f, double moment_value,
                            const PairIntegralOptions& opt) {
  TheoremReport rep;
  rep.theorem_id = mode.exponential ? "thm22_exp" : "thm22_poly";
  rep.parameters = {{"N", ct.n()}, {"gamma", gamma}, {"C_F", c_f}};
  if (!(c_f > 0.0) || !std::isfinite(moment_value) || !(moment_value > 0.0)) {
    rep.verdict = Verdict::Inconclusive;
    rep.note = "hypotheses unverifiable (missing C_F or moment bound)";
    return rep;
  }
  Measured d = measure_entropy_production_DN(ct, gamma, opt);
  Measured h = measure_entropy_HN(ct);
  double n = ct.n();
  double hn = std::max(h.value, 0.0) / n;
  rep.lhs = d.value / n;
  if (mode.exponential) {
    rep.parameters["a"] = mode.a;
    rep.parameters["mu"] = mode.mu;
    rep.parameters["M_exp"] = moment_value;
    if (hn <= 0.0) {
      rep.rhs = 0.0;
    } else {
      double a = mode.a, mu = mode.mu;
      double inner = 96.0 * c_f * safe_pow(4.0 / (a * mu * std::exp(1.0)), 2.0 / mu) *
                     std::exp(a / safe_pow(2.0, mu / 2.0)) * moment_value;
      double xy = 2.0 / a * std::log(inner) + 2.0 / a * std::log(n / hn);
      if (xy <= 0.0) {
        rep.verdict = Verdict::Inconclusive;
        rep.note = "log term nonpositive; bound undefined in this regime";
        return rep;
      }
      rep.rhs = hn / (6.0 * safe_pow(4.0, 1.0 - gamma) *
                      safe_pow(xy, 2.0 * (1.0 - gamma) / mu));
      rep.constant_value = rep.rhs > 0 ? rep.rhs / hn : 0.0;
    }
  } else {
    rep.parameters["k"] = mode.k;
    rep.parameters["M_2k"] = moment_value;
    double c = constant_thm22i(mode.k, gamma, n, c_f, moment_value);
    rep.constant_value = c;
    rep.rhs = c * safe_pow(hn, 1.0 + (1.0 - gamma) / (mode.k - 1.0));
  }
  rep.margin = rep.lhs - rep.rhs;
  rep.tolerance = d.tolerance / n + h.tolerance / n;
  rep.verdict = verdict_from_margin(rep.margin, rep.tolerance);
  return rep;
}

TheoremReport certify_thm23(const ConditionedTensor& ct, double gamma, double beta,
                            const MomentMode& mode, double c_f, double moment_value,
                            const PairIntegralOptions& opt) {
  TheoremReport rep;
  rep.theorem_id = mode.exponential ? "thm23_exp" : "thm23_poly";
  rep.parameters = {{"N", ct.n()}, {"gamma", gamma}, {"beta", beta}, {"C_F", c_f}};
  if (!mode.exponential && !(mode.k * beta > 1.0 + beta))
    throw std::invalid_argument("certify_thm23: k > 1 + 1/beta required");
  if (!(c_f > 0.0) || !std::isfinite(moment_value) || !(moment_value > 0.0)) {
    rep.verdict = Verdict::Inconclusive;
    rep.note = "hypotheses unverifiable (missing log-power constant or moment)";
    return rep;
  }
  Measured d = measure_entropy_production_DN(ct, gamma, opt);
  Measured h = measure_entropy_HN(ct);
  double n = ct.n();
  double hn = std::max(h.value, 0.0) / n;
  rep.lhs = d.value / n;
  if (mode.exponential) {
    rep.parameters["a"] = mode.a;
    rep.parameters["mu"] = mode.mu;
    rep.parameters["M_exp"] = moment_value;
    if (hn <= 0.0) {
      rep.rhs = 0.0;
    } else {
      double a = mode.a, mu = mode.mu;
      double arg = 4.0 * safe_pow(c_f, (1.0 + beta) / beta) *
                   safe_pow(safe_pow(2.0, 2.0 + mu) * (1.0 + beta) /
                                (a * beta * mu * std::exp(1.0)),
                            2.0 * (1.0 + beta) / (beta * mu)) *
                   std::exp(a / safe_pow(2.0, mu / 2.0)) * moment_value /
                   safe_pow(hn / 6.0, (1.0 + beta) / beta);
      double l = safe_pow(2.0, 1.0 + mu) / a * std::log(arg);
      if (l <= 0.0) {
        rep.verdict = Verdict::Inconclusive;
        rep.note = "log term nonpositive; bound undefined in this regime";
        return rep;
      }
      rep.rhs = safe_pow(std::abs(l), -2.0 * (1.0 - gamma) / mu) * hn;
    }
  } else {
    rep.parameters["k"] = mode.k;
    rep.parameters["M_2k"] = moment_value;
    double c = constant_thm23i(mode.k, gamma, beta, c_f, moment_value);
    rep.constant_value = c;
    double eps = (1.0 - gamma) * (1.0 + beta) / (mode.k * beta - (1.0 + beta));
    rep.parameters["epsilon_exponent"] = eps;
    rep.rhs = c * safe_pow(hn, 1.0 + eps);
  }
  rep.margin = rep.lhs - rep.rhs;
  rep.tolerance = d.tolerance / n + h.tolerance / n;
  rep.verdict = verdict_from_margin(rep.margin, rep.tolerance);
  return rep;
}

TheoremReport certify_thm13(const GridDensity& f, const Thm13Params& p,
                            const CollisionKernelCache& cache) {
  TheoremReport rep;
  rep.theorem_id = p.exponential ? "thm13_exp" : "thm13_poly";
  rep.parameters = {{"gamma", p.gamma}, {"beta", p.beta}, {"k", p.k},
                    {"epsilon", p.epsilon}};
  std::string failures;

  double max_order = std::max({2.0 * p.k, p.k * (1.0 + p.beta), 4.0});
  MomentReport mom = moments(f, {static_cast<int>(std::ceil(max_order))});
  if (!std::isfinite(mom.orders[0].value)) failures += "moment bound; ";
  if (!std::isfinite(mom.fisher)) failures += "Fisher information; ";
  const auto& tail = f.tail();
  double lower_c = 0.0;
  if (tail && tail->has_lower && tail->a1 <= 1.0) {
    lower_c = tail->c1;  // c1 e^{-a1 v^2} >= c1 e^{-v^2} when a1 <= 1
  } else {
    failures += "declared Gaussian lower bound f >= C e^{-v^2}; ";
  }
  if (!failures.empty()) {
    rep.verdict = Verdict::Inconclusive;
    rep.note = "hypothesis failures: " + failures;
    return rep;
  }
  rep.parameters["lower_bound_C"] = lower_c;

  LogPowerConstantParams lp;
  lp.beta = p.beta;
  lp.k = p.k;
  lp.a = 1.0;
  lp.epsilon = p.epsilon;
  lp.use_fisher_bound = true;
  double c_f = log_power_constant(f, lp, nullptr);
  rep.parameters["C_f"] = c_f;

  double h = relative_entropy(f, maxwellian(1.0, f.grid()));
  double d = entropy_production_Dgamma(f, p.gamma, cache);
  rep.lhs = d;
  if (p.exponential) {
    // Assembled from the log-power exponential bound in the large-N limit.
    MomentReport em = moments(f, {}, ExpMomentParams{p.a, p.mu});
    if (em.m_exp_divergent || !std::isfinite(em.m_exp)) {
      rep.verdict = Verdict::Inconclusive;
      rep.note = "hypothesis failures: exponential moment";
      return rep;
    }
    if (h <= 0.0) {
      rep.rhs = 0.0;
    } else {
      double a = p.a, mu = p.mu, beta = p.beta;
      double arg = 4.0 * safe_pow(c_f, (1.0 + beta) / beta) *
                   safe_pow(safe_pow(2.0, 2.0 + mu) * (1.0 + beta) /
                                (a * beta * mu * std::exp(1.0)),
                            2.0 * (1.0 + beta) / (beta * mu)) *
                   std::exp(a / safe_pow(2.0, mu / 2.0)) * em.m_exp /
                   safe_pow(h / 6.0, (1.0 + beta) / beta);
      double l = safe_pow(2.0, 1.0 + mu) / a * std::log(arg);
      if (l <= 0.0) {
        rep.verdict = Verdict::Inconclusive;
        rep.note = "log term nonpositive";
        return rep;
      }
      rep.rhs = safe_pow(l, -2.0 * (1.0 - p.gamma) / mu) * h;
    }
  } else {
    double m2k = 0.0;
    {
      const VelocityGrid& grid = f.grid();
      for (int i = 0; i < grid.n_points; ++i) {
        double w = (i == 0 || i == grid.n_points - 1) ? 0.5 : 1.0;
        m2k += w * std::pow(std::abs(grid.node(i)), 2.0 * p.k) * f.value(i);
      }
      m2k *= grid.spacing();
    }
    double c = constant_thm23i(p.k, p.gamma, p.beta, c_f, m2k);
    rep.constant_value = c;
    double eps = (1.0 - p.gamma) * (1.0 + p.beta) / (p.k * p.beta - (1.0 + p.beta));
    rep.parameters["epsilon_exponent"] = eps;
    rep.rhs = c * safe_pow(std::max(h, 0.0), 1.0 + eps);
  }
  rep.margin = rep.lhs - rep.rhs;
  rep.tolerance = 1e-8 + 0.01 * std::abs(rep.lhs);
  rep.verdict = verdict_from_margin(rep.margin, rep.tolerance);
  return rep;
}

TheoremReport certify_transfer_thm41(const GridDensity& f, double gamma,
                                     double eps_limit, const ConditionedTensor& ct,
                                     const CollisionKernelCache& cache,
                                     const PairIntegralOptions& opt) {
  TheoremReport rep;
  rep.theorem_id = "thm41_transfer";
  rep.parameters = {{"N", ct.n()}, {"gamma", gamma}, {"epsilon", eps_limit}};

  double h = relative_entropy(f, maxwellian(1.0, f.grid()));
  double d = entropy_production_Dgamma(f, gamma, cache);
  Measured hn = measure_entropy_HN(ct);
  Measured dn = measure_entropy_production_DN(ct, gamma, opt);
  double n = ct.n();

  if (h <= 1e-14) {
    rep.lhs = dn.value / n;
    rep.rhs = 0.0;
    rep.margin = rep.lhs;
    rep.tolerance = dn.tolerance / n;
    rep.verdict = verdict_from_margin(rep.margin, rep.tolerance);
    rep.note = "limit density at equilibrium; trivial";
    return rep;
  }

  double k1 = d / safe_pow(h, 1.0 + eps_limit);
  PairWeightBracket br = pair_weight_bracket(ct);
  double c_h = (hn.value / n) / h;  // measured entropy bracket at this N
  if (!(br.w_min > 0.0) || !(c_h > 0.0)) {
    rep.verdict = Verdict::Inconclusive;
    rep.note = "bracket constants unavailable";
    return rep;
  }
  rep.parameters["K1"] = k1;
  rep.parameters["C_H"] = c_h;
  rep.parameters["C_D_low"] = br.w_min;
  rep.parameters["C_D_high"] = br.w_max;
  rep.parameters["s_eff"] = br.s_eff;

  rep.lhs = dn.value / n;
  rep.rhs = k1 * br.w_min * safe_pow(hn.value / (c_h * n), 1.0 + eps_limit);
  rep.constant_value = k1 * br.w_min;
  rep.margin = rep.lhs - rep.rhs;
  rep.tolerance = dn.tolerance / n + hn.tolerance / n;
  rep.verdict = verdict_from_margin(rep.margin, rep.tolerance);
  return rep;
}

std::vector<double> decay_envelope_thm24(double h0_per_particle, double c, double n,
                                         double k, double gamma,
                                         const std::vector<double>& times) {
  if (gamma == 1.0)
    throw std::invalid_argument(
        "decay_envelope_thm24: gamma = 1 degenerate (exponential regime applies)");
  if (!(c > 0.0) || !(k > 1.0) || !(gamma >= 0.0 && gamma < 1.0))
    throw std::invalid_argument("decay_envelope_thm24: need C > 0, k > 1, gamma in [0,1)");
  std::vector<double> out;
  out.reserve(times.size());
  double e = (gamma - 1.0) / (k - 1.0);
  for (double t : times) {
    double basev = safe_pow(h0_per_particle, e) + c * safe_pow(n, e) * t;
    out.push_back(safe_pow(basev, -(k - 1.0) / (1.0 - gamma)));
  }
  return out;
}

}  // namespace kac
