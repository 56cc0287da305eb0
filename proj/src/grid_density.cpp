#include "kac/grid_density.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace kac {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 6.283185307179586476925286766559;

double gaussian(double v, double mean, double sigma) {
  double z = (v - mean) / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(kTwoPi));
}

}  // namespace

double trapezoid(const VelocityGrid& grid, const std::vector<double>& samples) {
  double s = 0.0;
  for (double x : samples) s += x;
  s -= 0.5 * (samples.front() + samples.back());
  return s * grid.spacing();
}

GridDensity::GridDensity(VelocityGrid grid, std::vector<double> values,
                         std::optional<TailModel> tail)
    : grid_(grid), values_(std::move(values)), tail_(std::move(tail)) {
  if (grid_.n_points < 4 || static_cast<int>(values_.size()) != grid_.n_points)
    throw std::invalid_argument("GridDensity: value count does not match grid");
  for (double& x : values_) {
    if (!(x > -1e-14)) throw std::invalid_argument("GridDensity: negative sample");
    if (x < 0.0) x = 0.0;
  }
  double m = trapezoid(grid_, values_);
  if (!(m > 0.0)) throw std::invalid_argument("GridDensity: zero mass");
  for (double& x : values_) x /= m;
  rebuild_log_table();
  double asym = 0.0;
  int n = grid_.n_points;
  for (int i = 0; i < n; ++i)
    asym = std::max(asym, std::abs(values_[i] - values_[n - 1 - i]));
  even_ = asym <= 1e-12;
}

void GridDensity::rebuild_log_table() {
  log_values_.resize(values_.size());
  for (std::size_t i = 0; i < values_.size(); ++i)
    log_values_[i] = values_[i] > kDensityFloor ? std::log(values_[i]) : -kInf;
}

double GridDensity::log_interp(double v) const {
  const int n = grid_.n_points;
  const double t = (v - grid_.v_min()) / grid_.spacing();
  if (!(t >= 0.0) || t > n - 1) return -kInf;
  int base = static_cast<int>(t) - 1;
  base = std::clamp(base, 0, n - 4);
  const double x = t - base;
  const double* lv = log_values_.data() + base;
  if (lv[0] > -kInf && lv[1] > -kInf && lv[2] > -kInf && lv[3] > -kInf) {
    const double x1 = x - 1.0, x2 = x - 2.0, x3 = x - 3.0;
    return lv[0] * (x1 * x2 * x3) * (-1.0 / 6.0) + lv[1] * (x * x2 * x3) * 0.5 +
           lv[2] * (x * x1 * x3) * (-0.5) + lv[3] * (x * x1 * x2) * (1.0 / 6.0);
  }
  // Near the support edge some taps are at the floor: fall back to linear
  // interpolation of the values themselves.
  int i0 = std::min(static_cast<int>(t), n - 2);
  double w = t - i0;
  double val = (1.0 - w) * values_[i0] + w * values_[i0 + 1];
  return val > kDensityFloor ? std::log(val) : -kInf;
}

double GridDensity::evaluate(double v) const {
  if (pdf_) return pdf_(v);
  double lg = log_interp(v);
  return lg > -kInf ? std::exp(lg) : 0.0;
}

double GridDensity::mass() const { return trapezoid(grid_, values_); }

GridDensity GridDensity::with_values(std::vector<double> values) const {
  GridDensity out(grid_, std::move(values), tail_);
  return out;
}

GridDensity GridDensity::maxwellian(double temperature, const VelocityGrid& grid) {
  if (!(temperature > 0.0)) throw std::invalid_argument("maxwellian: T must be positive");
  // Analytic mass beyond the grid; the grid must resolve the tails.
  double loss = std::erfc(grid.v_max / std::sqrt(2.0 * temperature));
  if (loss > 1e-6)
    throw std::invalid_argument("maxwellian: grid too narrow, truncation error above tolerance");

  // Fit the sampled Gaussian so the grid quadrature has exactly unit mass and
  // second moment T: solve S2(T')/S0(T') = T for the shape, then scale.
  const int n = grid.n_points;
  auto ratio = [&](double tp) {
    double s0 = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
      double v = grid.node(i);
      double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
      double e = std::exp(-0.5 * v * v / tp);
      s0 += w * e;
      s2 += w * v * v * e;
    }
    return s2 / s0;
  };
  double lo = temperature * 0.5, hi = temperature * 1.5;
  while (ratio(lo) > temperature) lo *= 0.5;
  while (ratio(hi) < temperature) hi *= 1.5;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * temperature; ++it) {
    double mid = 0.5 * (lo + hi);
    (ratio(mid) < temperature ? lo : hi) = mid;
  }
  double tprime = 0.5 * (lo + hi);
  double s0 = 0.0;
  for (int i = 0; i < n; ++i) {
    double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    s0 += w * std::exp(-0.5 * grid.node(i) * grid.node(i) / tprime);
  }
  s0 *= grid.spacing();
  double amp = 1.0 / s0;

  std::vector<double> vals(n);
  for (int i = 0; i < n; ++i)
    vals[i] = amp * std::exp(-0.5 * grid.node(i) * grid.node(i) / tprime);
  TailModel tail;
  tail.c1 = amp * (1.0 - 1e-12);
  tail.a1 = 0.5 / tprime;
  tail.c2 = amp * (1.0 + 1e-12);
  tail.a2 = 0.0;
  tail.has_lower = tail.has_upper = true;
  tail.exp_a = 0.1;
  tail.exp_mu = 1.0;
  GridDensity out(grid, std::move(vals), tail);
  double la = std::log(amp), invt = 0.5 / tprime;
  out.pdf_ = [amp, invt](double v) { return amp * std::exp(-invt * v * v); };
  out.log_pdf_ = [la, invt](double v) { return la - invt * v * v; };
  out.even_ = true;
  return out;
}

GridDensity maxwellian(double temperature, const VelocityGrid& grid) {
  return GridDensity::maxwellian(temperature, grid);
}

GridDensity GridDensity::bimodal(double mu, double sigma, const VelocityGrid& grid,
                                 double floor_weight) {
  if (!(sigma > 0.0) || !(floor_weight >= 0.0) || floor_weight >= 1.0)
    throw std::invalid_argument("bimodal: bad parameters");
  double w = floor_weight;
  double energy = (1.0 - w) * (mu * mu + sigma * sigma) + w;
  double s = std::sqrt(energy);
  // Rescaled components; the broad floor keeps a Gaussian lower bound valid.
  double m1 = mu / s, s1 = sigma / s, sf = 1.0 / s;
  const int n = grid.n_points;
  std::vector<double> vals(n);
  auto pdf = [=](double v) {
    return 0.5 * (1.0 - w) * (gaussian(v, -m1, s1) + gaussian(v, m1, s1)) +
           w * gaussian(v, 0.0, sf);
  };
  for (int i = 0; i < n; ++i) vals[i] = pdf(grid.node(i));
  double gm = 0.0;
  for (int i = 0; i < n; ++i) gm += (i == 0 || i == n - 1) ? 0.5 * vals[i] : vals[i];
  gm *= grid.spacing();
  for (double& x : vals) x /= gm;

  TailModel tail;
  tail.a1 = 0.5 / (sf * sf);
  tail.c1 = 0.999 * (w / gm) * gaussian(0.0, 0.0, sf);
  double peak = *std::max_element(vals.begin(), vals.end());
  tail.c2 = 1.001 * peak;
  tail.a2 = 0.0;
  tail.has_lower = tail.has_upper = true;
  tail.exp_a = 0.1;
  tail.exp_mu = 1.0;
  GridDensity out(grid, vals, tail);
  out.pdf_ = [pdf, gm](double v) { return pdf(v) / gm; };
  out.log_pdf_ = [pdf, gm](double v) { return std::log(pdf(v) / gm); };
  out.even_ = true;
  return out;
}

GridDensity GridDensity::uniform_energy(const VelocityGrid& grid) {
  const double b = std::sqrt(3.0);
  const double c = 1.0 / (2.0 * b);
  if (grid.v_max <= b) throw std::invalid_argument("uniform_energy: grid too narrow");
  const int n = grid.n_points;
  std::vector<double> vals(n);
  for (int i = 0; i < n; ++i) vals[i] = std::abs(grid.node(i)) <= b ? c : 0.0;
  TailModel tail;
  tail.c2 = 1.01 * c;
  tail.a2 = 0.0;
  tail.has_upper = true;
  GridDensity out(grid, std::move(vals), tail);
  out.pdf_ = [b, c](double v) { return std::abs(v) <= b ? c : 0.0; };
  out.log_pdf_ = [b, c](double v) { return std::abs(v) <= b ? std::log(c) : -kInf; };
  out.breakpoints_ = {b};
  out.even_ = true;
  return out;
}

double relative_entropy(const GridDensity& f, const GridDensity& g) {
  if (!(f.grid() == g.grid()))
    throw std::invalid_argument("relative_entropy: densities must share a grid");
  const int n = f.grid().n_points;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    double fi = f.value(i);
    if (fi <= kDensityFloor) continue;  // 0 log 0 = 0
    if (g.value(i) <= kDensityFloor && fi > 1e-12) return kInf;
    double lf = f.node_log(i);
    double lg = g.value(i) > kDensityFloor ? g.node_log(i) : kLogDensityFloor;
    double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    s += w * fi * (lf - lg);
  }
  return s * f.grid().spacing();
}

PinskerGap pinsker_gap(const GridDensity& f, const GridDensity& g) {
  PinskerGap out;
  out.entropy = relative_entropy(f, g);
  const int n = f.grid().n_points;
  double l1 = 0.0;
  for (int i = 0; i < n; ++i) {
    double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    l1 += w * std::abs(f.value(i) - g.value(i));
  }
  l1 *= f.grid().spacing();
  out.pinsker_bound = 0.5 * l1 * l1;
  return out;
}

MomentReport moments(const GridDensity& f, const std::vector<int>& ks,
                     std::optional<ExpMomentParams> exp_params) {
  const VelocityGrid& grid = f.grid();
  const int n = grid.n_points;
  const double dv = grid.spacing();
  MomentReport rep;
  double s0 = 0, s2 = 0, s4 = 0;
  for (int i = 0; i < n; ++i) {
    double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    double v = grid.node(i), fi = f.value(i);
    s0 += w * fi;
    s2 += w * v * v * fi;
    s4 += w * v * v * v * v * fi;
  }
  rep.mass = s0 * dv;
  rep.m2 = s2 * dv;
  rep.m4 = s4 * dv;

  const double edge = 0.9 * grid.v_max;
  for (int k : ks) {
    if (k < 0) throw std::invalid_argument("moments: negative order");
    MomentOrder mo;
    mo.k = k;
    double total = 0.0, top = 0.0;
    for (int i = 0; i < n; ++i) {
      double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
      double v = grid.node(i);
      double term = w * std::pow(std::abs(v), k) * f.value(i);
      total += term;
      if (std::abs(v) >= edge) top += term;
    }
    mo.value = total * dv;
    mo.coarse_grid_warning = total > 0.0 && top > 0.1 * total;
    rep.orders.push_back(mo);
  }

  if (exp_params) {
    rep.m_exp_requested = true;
    double a = exp_params->a, mu = exp_params->mu;
    const auto& tail = f.tail();
    if (tail && tail->has_lower && (mu > 2.0 || (mu == 2.0 && a >= tail->a1)))
      rep.m_exp_divergent = true;
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
      s += w * std::exp(a * std::pow(std::abs(grid.node(i)), mu)) * f.value(i);
    }
    rep.m_exp = s * dv;
  }

  // Fisher information by second-order central differences with the floor;
  // endpoints one-sided.
  double fi_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    double d;
    if (i == 0)
      d = (f.value(1) - f.value(0)) / dv;
    else if (i == n - 1)
      d = (f.value(n - 1) - f.value(n - 2)) / dv;
    else
      d = (f.value(i + 1) - f.value(i - 1)) / (2.0 * dv);
    double den = std::max(f.value(i), kDensityFloor);
    if (d == 0.0) continue;
    double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    fi_sum += w * d * d / den;
  }
  rep.fisher = fi_sum * dv;

  double ll = 0.0;
  for (int i = 0; i < n; ++i) {
    double fi = f.value(i);
    if (fi <= kDensityFloor) continue;
    double v = grid.node(i);
    double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    ll += w * fi * (1.0 + v * v) * (1.0 + std::abs(f.node_log(i)));
  }
  rep.l_log_l = ll * dv;
  return rep;
}

GridDensity normalize_unit_energy(const GridDensity& f) {
  MomentReport rep = moments(f, {});
  double m2 = rep.m2;
  if (!(m2 > 1e-12) || !std::isfinite(m2))
    throw std::invalid_argument("normalize_unit_energy: degenerate second moment");
  double s = std::sqrt(m2);
  const VelocityGrid& grid = f.grid();
  std::vector<double> vals(grid.n_points);
  for (int i = 0; i < grid.n_points; ++i) vals[i] = s * f.evaluate(s * grid.node(i));
  double gm = trapezoid(grid, vals);
  std::optional<TailModel> tail = f.tail();
  if (tail) {
    tail->c1 *= s / gm;
    tail->a1 *= m2;
    tail->c2 *= s / gm;
    tail->a2 *= m2;
  }
  GridDensity out(grid, std::move(vals), tail);
  if (f.has_analytic()) {
    auto base_pdf = f.pdf_;
    out.pdf_ = [base_pdf, s, gm](double v) { return s * base_pdf(s * v) / gm; };
    out.log_pdf_ = [base_pdf, s, gm](double v) { return std::log(s * base_pdf(s * v) / gm); };
  }
  out.even_ = f.is_even();
  return out;
}

void save_density_csv(const GridDensity& f, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << "v,f\n";
  char buf[64];
  for (int i = 0; i < f.grid().n_points; ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", f.grid().node(i), f.value(i));
    os << buf;
  }
  if (f.tail()) {
    nlohmann::json j;
    const TailModel& t = *f.tail();
    j["C1"] = t.c1;
    j["a1"] = t.a1;
    j["C2"] = t.c2;
    j["a2"] = t.a2;
    j["a"] = t.exp_a;
    j["mu"] = t.exp_mu;
    std::ofstream js(path + ".json");
    js << j.dump(2) << "\n";
  }
}

GridDensity load_density_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path);
  std::string line;
  std::getline(is, line);  // header
  std::vector<double> vs, fs;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string a, b;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ','))
      throw std::runtime_error("bad density CSV row: " + line);
    vs.push_back(std::stod(a));
    fs.push_back(std::stod(b));
  }
  if (vs.size() < 4) throw std::runtime_error("density CSV too short");
  int n = static_cast<int>(vs.size());
  double dv = (vs.back() - vs.front()) / (n - 1);
  for (int i = 0; i < n; ++i)
    if (std::abs(vs[i] - (vs.front() + i * dv)) > 1e-9 * std::max(1.0, std::abs(vs[i])))
      throw std::runtime_error("density CSV grid is not uniform");
  if (std::abs(vs.front() + vs.back()) > 1e-9)
    throw std::runtime_error("density CSV grid is not symmetric about 0");
  VelocityGrid grid{vs.back(), n};
  std::optional<TailModel> tail;
  std::ifstream js(path + ".json");
  if (js) {
    nlohmann::json j;
    js >> j;
    TailModel t;
    t.c1 = j.value("C1", 0.0);
    t.a1 = j.value("a1", 0.0);
    t.c2 = j.value("C2", 0.0);
    t.a2 = j.value("a2", 0.0);
    t.exp_a = j.value("a", 0.0);
    t.exp_mu = j.value("mu", 0.0);
    t.has_lower = t.c1 > 0.0;
    t.has_upper = t.c2 > 0.0;
    tail = t;
  }
  return GridDensity(grid, std::move(fs), tail);
}

}  // namespace kac
