#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "kac/grid_density.hpp"

namespace kac {

// log |S^{m-1}|, the surface area of the unit sphere in R^m, via log-gamma
// (Gamma values themselves overflow past m ~ 340).
double log_sphere_area(int m);

// Tables of log h^{*m}(u), the m-fold convolution power of the energy law of
// the base density, from which the normalization function follows as
//   log Z_m(f, sqrt u) = log 2 + log h^{*m}(u) - log|S^{m-1}| - ((m-2)/2) log u.
// m >= 3 is computed by characteristic-function exponentiation (FFT power of
// the discretized law on a 2^20-point padded grid, moment-matched deposition,
// results clamped at 0 before the log); m = 2 by the smooth circle integral
// 2 ∫ f_e(sqrt(u) sin t) f_e(sqrt(u) cos t) dt; m = 1 analytically.
class PartitionTable {
 public:
  explicit PartitionTable(GridDensity base);

  const GridDensity& base() const { return base_; }
  double sigma2() const { return sigma2_; }  // m4(f) - 1

  void ensure(int m);

  // log h^{*m}(u); -inf where the convolution power is below the floor.
  double log_conv_power(int m, double u) const;
  double log_partition(int m, double u) const;

  // (m, u, logZ) rows for reuse across runs.
  void export_csv(const std::string& path, const std::vector<int>& ms,
                  int max_rows_per_m = 20000) const;
  void import_csv(const std::string& path);

 private:
  struct Power {
    double du = 0.0;
    std::vector<double> log_h;  // log density at u_j = j du
  };

  Power build_power(int m) const;
  Power build_pair_power() const;
  static double interp_log(const Power& p, double u);

  GridDensity base_;
  double sigma2_ = 0.0;
  std::map<int, Power> powers_;
};

}  // namespace kac
