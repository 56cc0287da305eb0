#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace kac {

// Positivity floor applied inside logarithms; grids hit exact zeros while the
// entropy functionals are defined for positive densities. The convention
// 0*log(0) = 0 is applied wherever a density factor multiplies its own log.
inline constexpr double kDensityFloor = 1e-300;
inline const double kLogDensityFloor = -690.77552789821368;  // log(1e-300)

struct VelocityGrid {
  double v_max = 10.0;
  int n_points = 1025;

  double v_min() const { return -v_max; }
  double spacing() const { return 2.0 * v_max / (n_points - 1); }
  double node(int i) const { return -v_max + spacing() * i; }
  bool operator==(const VelocityGrid& o) const {
    return v_max == o.v_max && n_points == o.n_points;
  }
};

// Declared analytic tail of a density, validated on-grid where consumed.
// Lower bound c1*exp(-a1 v^2) <= f, upper bound f <= c2*exp(+a2 v^2).
struct TailModel {
  double c1 = 0.0, a1 = 0.0;
  double c2 = 0.0, a2 = 0.0;
  double exp_a = 0.0, exp_mu = 0.0;  // exponential-moment parameters (a, mu)
  bool has_lower = false, has_upper = false;
};

struct MomentOrder {
  int k = 0;          // order of |v|^k
  double value = 0.0;
  bool divergent = false;
  bool coarse_grid_warning = false;
};

struct MomentReport {
  double mass = 0.0;
  double m2 = 0.0;
  double m4 = 0.0;
  std::vector<MomentOrder> orders;
  double m_exp = 0.0;  // ∫ e^{a|v|^mu} f, when requested
  bool m_exp_requested = false;
  bool m_exp_divergent = false;
  double fisher = 0.0;
  double l_log_l = 0.0;
};

// One-dimensional probability density sampled on a uniform symmetric grid.
// Builtins carry an exact analytic evaluator; between-node evaluation for
// loaded data uses cubic interpolation of the log-density (so a sampled
// Gaussian evaluates exactly: its log is a quadratic).
class GridDensity {
 public:
  GridDensity(VelocityGrid grid, std::vector<double> values,
              std::optional<TailModel> tail = std::nullopt);

  static GridDensity maxwellian(double temperature, const VelocityGrid& grid);
  // Symmetric two-Gaussian mixture plus a small broad Gaussian component
  // (weight floor_weight) so a Gaussian lower bound holds on the whole grid,
  // rescaled analytically to unit energy.
  static GridDensity bimodal(double mu, double sigma, const VelocityGrid& grid,
                             double floor_weight = 0.01);
  // Uniform on [-sqrt(3), sqrt(3)]: unit mass and unit energy analytically.
  static GridDensity uniform_energy(const VelocityGrid& grid);

  const VelocityGrid& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  double value(int i) const { return values_[static_cast<std::size_t>(i)]; }
  double node_log(int i) const { return log_values_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& node_logs() const { return log_values_; }

  bool has_analytic() const { return static_cast<bool>(pdf_); }
  // Density at an arbitrary point: analytic when available, otherwise
  // exp of the interpolated log (zero extension outside the grid).
  double evaluate(double v) const;
  // log density at an arbitrary point via the interpolation tables only;
  // this is the hot-path rule shared by all pair-collision integrands.
  double log_interp(double v) const;

  bool is_even() const { return even_; }

  // Locations (in |v|) where the density jumps; quadrature against the
  // energy law splits integration cells there.
  const std::vector<double>& breakpoints() const { return breakpoints_; }

  const std::optional<TailModel>& tail() const { return tail_; }
  void set_tail(const TailModel& t) { tail_ = t; }

  // Replaces the sample values (drops any analytic evaluator).
  GridDensity with_values(std::vector<double> values) const;

  double mass() const;  // trapezoid mass

 private:
  friend GridDensity normalize_unit_energy(const GridDensity& f);

  void rebuild_log_table();

  VelocityGrid grid_;
  std::vector<double> values_;
  std::vector<double> log_values_;
  std::optional<TailModel> tail_;
  std::function<double(double)> pdf_;
  std::function<double(double)> log_pdf_;
  std::vector<double> breakpoints_;
  bool even_ = false;
};

// Trapezoid quadrature of node samples over the grid (fixed summation order).
double trapezoid(const VelocityGrid& grid, const std::vector<double>& samples);

GridDensity maxwellian(double temperature, const VelocityGrid& grid);

// ∫ f (ln f - ln g) dv >= 0. Returns +inf when f carries mass where g is at
// the floor (support mismatch).
double relative_entropy(const GridDensity& f, const GridDensity& g);

struct PinskerGap {
  double entropy = 0.0;
  double pinsker_bound = 0.0;  // (1/2) (∫|f-g|)^2
};
PinskerGap pinsker_gap(const GridDensity& f, const GridDensity& g);

struct ExpMomentParams {
  double a = 0.0;
  double mu = 0.0;
};
MomentReport moments(const GridDensity& f, const std::vector<int>& ks,
                     std::optional<ExpMomentParams> exp_params = std::nullopt);

// v -> sqrt(m2) f(sqrt(m2) v), resampled; unit mass and unit second moment.
GridDensity normalize_unit_energy(const GridDensity& f);

// Density I/O: two-column CSV (v, f) with a header row; declared tail
// parameters in a sidecar JSON object {C1, a1, C2, a2, mu, a}.
void save_density_csv(const GridDensity& f, const std::string& path);
GridDensity load_density_csv(const std::string& path);

}  // namespace kac
