#include "kac/partition.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <fftw3.h>
#include <omp.h>

namespace kac {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kFftSize = 1 << 20;
constexpr double kPi = 3.14159265358979323846264338328;

// 4-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr double kGlNode[4] = {-0.8611363115940526, -0.3399810435848563,
                               0.3399810435848563, 0.8611363115940526};
constexpr double kGlWeight[4] = {0.3478548451374538, 0.6521451548625461,
                                 0.6521451548625461, 0.3478548451374538};

double f_even(const GridDensity& f, double v) {
  return 0.5 * (f.evaluate(v) + f.evaluate(-v));
}

}  // namespace

double log_sphere_area(int m) {
  return std::log(2.0) + 0.5 * m * std::log(kPi) - std::lgamma(0.5 * m);
}

PartitionTable::PartitionTable(GridDensity base) : base_(std::move(base)) {
  MomentReport rep = moments(base_, {});
  sigma2_ = std::max(rep.m4 - 1.0, 1e-6);
}

// Deposits the mass of the energy law cell by cell onto the FFT grid,
// matching mass, mean and variance of each bite exactly (three-node weights,
// possibly signed). This keeps the bulk of h^{*m} accurate to ~du^3 * m level
// even after a thousand convolutions.
PartitionTable::Power PartitionTable::build_power(int m) const {
  const double vmax = base_.grid().v_max;
  const double usup = vmax * vmax;
  double window = std::max({4.0 * m + 64.0,
                            m + 120.0 * std::sqrt(m * (sigma2_ + 1.0)),
                            2.2 * usup});
  Power p;
  p.du = window / kFftSize;
  const double du = p.du;

  std::vector<double> pmf(kFftSize, 0.0);
  auto deposit = [&](double massv, double c, double mu2) {
    if (massv == 0.0) return;
    int j = std::clamp(static_cast<int>(std::lround(c / du)), 1, kFftSize - 2);
    // Lagrange-dual weights on nodes j-1, j, j+1: reproduce the bite's
    // mass, mean and second moment exactly (weights may be signed).
    double x0 = (j - 1) * du - c, x1 = j * du - c, x2 = (j + 1) * du - c;
    pmf[j - 1] += massv * (mu2 + x1 * x2) / ((x0 - x1) * (x0 - x2));
    pmf[j] += massv * (mu2 + x0 * x2) / ((x1 - x0) * (x1 - x2));
    pmf[j + 1] += massv * (mu2 + x0 * x1) / ((x2 - x0) * (x2 - x1));
  };

  std::vector<double> breaks = base_.breakpoints();
  std::sort(breaks.begin(), breaks.end());
  int ncell = static_cast<int>(std::ceil(usup / du));
  for (int cell = 0; cell < ncell; ++cell) {
    double ua = cell * du, ub = std::min((cell + 1) * du, usup);
    if (ub <= ua) break;
    double sa = std::sqrt(ua), sb = std::sqrt(ub);
    double seg[8];
    int nseg = 0;
    seg[nseg++] = sa;
    for (double br : breaks)
      if (br > sa && br < sb && nseg < 7) seg[nseg++] = br;
    seg[nseg++] = sb;
    for (int k = 0; k + 1 < nseg; ++k) {
      double lo = seg[k], hi = seg[k + 1];
      if (hi <= lo) continue;
      double m0 = 0.0, m1 = 0.0, m2 = 0.0;
      double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
      for (int g = 0; g < 4; ++g) {
        double s = mid + half * kGlNode[g];
        double w = half * kGlWeight[g] * 2.0 * f_even(base_, s);
        double u = s * s;
        m0 += w;
        m1 += w * u;
        m2 += w * u * u;
      }
      if (m0 <= 0.0) continue;
      double c = m1 / m0;
      double mu2 = std::max(m2 / m0 - c * c, 0.0);
      deposit(m0, c, mu2);
    }
  }

  // Characteristic-function exponentiation: m-th power of the DFT.
  std::vector<std::complex<double>> spec(kFftSize / 2 + 1);
  {
    fftw_plan plan = fftw_plan_dft_r2c_1d(
        kFftSize, pmf.data(), reinterpret_cast<fftw_complex*>(spec.data()),
        FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
  }
  for (auto& z : spec) {
    double r = std::abs(z);
    if (r <= 0.0) {
      z = 0.0;
      continue;
    }
    double lr = m * std::log(r);
    double th = m * std::arg(z);
    z = lr < -745.0 ? std::complex<double>(0.0, 0.0)
                    : std::polar(std::exp(lr), th);
  }
  std::vector<double> conv(kFftSize);
  {
    fftw_plan plan = fftw_plan_dft_c2r_1d(
        kFftSize, reinterpret_cast<fftw_complex*>(spec.data()), conv.data(),
        FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
  }

  // Keep the reachable window; clamp Gibbs undershoot at 0 before the log.
  double sigma_m = std::sqrt(m * (sigma2_ + 1.0));
  int keep = std::min<int>(
      kFftSize,
      static_cast<int>((m + 60.0 * sigma_m + 80.0 + 2.0 * usup) / du) + 4);
  p.log_h.resize(keep);
  const double scale = 1.0 / (static_cast<double>(kFftSize) * du);
  for (int j = 0; j < keep; ++j) {
    double v = conv[j] * scale;
    p.log_h[j] = v > kDensityFloor ? std::log(v) : -kInf;
  }
  return p;
}

// h*h via the circle integral; the integrand is smooth and its odd
// derivatives vanish at both endpoints, so the midpoint rule converges
// spectrally.
PartitionTable::Power PartitionTable::build_pair_power() const {
  const double vmax = base_.grid().v_max;
  Power p;
  const int n = 1 << 18;
  const double window = 2.0 * vmax * vmax;
  p.du = window / n;
  p.log_h.assign(n, -kInf);
  const int ntau = 128;
#pragma omp parallel for schedule(static)
  for (int j = 1; j < n; ++j) {
    double u = j * p.du;
    double r = std::sqrt(u);
    double s = 0.0;
    for (int t = 0; t < ntau; ++t) {
      double tau = (t + 0.5) * (0.5 * kPi / ntau);
      s += f_even(base_, r * std::sin(tau)) * f_even(base_, r * std::cos(tau));
    }
    double val = 2.0 * s * (0.5 * kPi / ntau);
    p.log_h[j] = val > kDensityFloor ? std::log(val) : -kInf;
  }
  // u -> 0 limit is pi * f_e(0)^2.
  double v0 = kPi * f_even(base_, 0.0) * f_even(base_, 0.0);
  p.log_h[0] = v0 > kDensityFloor ? std::log(v0) : -kInf;
  return p;
}

void PartitionTable::ensure(int m) {
  if (m < 2 || powers_.count(m)) return;
  powers_.emplace(m, m == 2 ? build_pair_power() : build_power(m));
}

double PartitionTable::interp_log(const Power& p, double u) {
  double t = u / p.du;
  int n = static_cast<int>(p.log_h.size());
  if (!(t >= 0.0) || t > n - 1) return -kInf;
  int basei = std::clamp(static_cast<int>(t) - 1, 0, n - 4);
  double x = t - basei;
  const double* lv = p.log_h.data() + basei;
  if (lv[0] > -kInf && lv[1] > -kInf && lv[2] > -kInf && lv[3] > -kInf) {
    double x1 = x - 1.0, x2 = x - 2.0, x3 = x - 3.0;
    return lv[0] * (x1 * x2 * x3) * (-1.0 / 6.0) + lv[1] * (x * x2 * x3) * 0.5 +
           lv[2] * (x * x1 * x3) * (-0.5) + lv[3] * (x * x1 * x2) * (1.0 / 6.0);
  }
  int i0 = std::min(static_cast<int>(t), n - 2);
  if (p.log_h[i0] > -kInf && p.log_h[i0 + 1] > -kInf) {
    double w = t - i0;
    return (1.0 - w) * p.log_h[i0] + w * p.log_h[i0 + 1];
  }
  return -kInf;
}

double PartitionTable::log_conv_power(int m, double u) const {
  if (m < 1) throw std::invalid_argument("log_conv_power: m >= 1 required");
  if (!(u > 0.0)) return -kInf;
  if (m == 1) {
    double s = std::sqrt(u);
    double fe = f_even(base_, s);
    return fe > kDensityFloor ? std::log(fe) - 0.5 * std::log(u) : -kInf;
  }
  auto it = powers_.find(m);
  if (it == powers_.end())
    throw std::logic_error("log_conv_power: table for m not built; call ensure()");
  return interp_log(it->second, u);
}

double PartitionTable::log_partition(int m, double u) const {
  if (!(u > 0.0)) throw std::invalid_argument("log_partition: u must be positive");
  double lh = log_conv_power(m, u);
  if (lh == -kInf) return -kInf;
  return std::log(2.0) + lh - log_sphere_area(m) - 0.5 * (m - 2) * std::log(u);
}

void PartitionTable::export_csv(const std::string& path, const std::vector<int>& ms,
                                int max_rows_per_m) const {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << "m,u,logZ\n";
  char buf[96];
  for (int m : ms) {
    auto it = powers_.find(m);
    if (it == powers_.end()) throw std::logic_error("export_csv: m not built");
    const Power& p = it->second;
    int n = static_cast<int>(p.log_h.size());
    int stride = std::max(1, n / max_rows_per_m);
    for (int j = 1; j < n; j += stride) {
      if (p.log_h[j] == -kInf) continue;
      double u = j * p.du;
      std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", m, u, log_partition(m, u));
      os << buf;
    }
  }
}

void PartitionTable::import_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path);
  std::string line;
  std::getline(is, line);
  std::map<int, std::vector<std::pair<double, double>>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string a, b, c;
    std::getline(ss, a, ',');
    std::getline(ss, b, ',');
    std::getline(ss, c, ',');
    rows[std::stoi(a)].emplace_back(std::stod(b), std::stod(c));
  }
  for (auto& [m, pts] : rows) {
    if (pts.size() < 8) continue;
    double du = pts[1].first - pts[0].first;
    Power p;
    p.du = du;
    int n = static_cast<int>(std::lround(pts.back().first / du)) + 1;
    p.log_h.assign(n, -kInf);
    for (auto& [u, lz] : pts) {
      int j = static_cast<int>(std::lround(u / du));
      if (j < 0 || j >= n) continue;
      // invert the assembly to store log h^{*m}
      p.log_h[j] = lz - std::log(2.0) + log_sphere_area(m) + 0.5 * (m - 2) * std::log(u);
    }
    powers_[m] = std::move(p);
  }
}

}  // namespace kac
