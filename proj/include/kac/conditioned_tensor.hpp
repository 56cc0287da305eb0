#pragma once

#include <memory>
#include <vector>

#include "kac/partition.hpp"
#include "kac/reduce.hpp"

namespace kac {

// Tensor power of a unit-energy density conditioned to the energy sphere,
// represented by its base density and the convolution-power tables of the
// energy law. All sphere functionals reduce to pair integrals against the
// weight h^{*(N-k)}(N - |v|^2) / h^{*N}(N); the sphere-area factors of the
// textbook form cancel exactly in that ratio.
class ConditionedTensor {
 public:
  ConditionedTensor(std::shared_ptr<PartitionTable> table, int n);
  ConditionedTensor(const GridDensity& base, int n);

  const GridDensity& base() const { return table_->base(); }
  PartitionTable& table() const { return *table_; }
  std::shared_ptr<PartitionTable> table_ptr() const { return table_; }
  int n() const { return n_; }
  double log_z() const { return log_z_; }  // log Z_N(f, sqrt N)

 private:
  std::shared_ptr<PartitionTable> table_;
  int n_ = 0;
  double log_z_ = 0.0;
};

// k-particle marginal density at one point; zero outside the energy ball.
double marginal_at(const ConditionedTensor& ct, const std::vector<double>& vs);
// First marginal sampled at the grid nodes.
std::vector<double> marginal_grid(const ConditionedTensor& ct);

// H_N(F_N) = N ∫ Π1 log f - log Z_N.
double entropy_HN(const ConditionedTensor& ct);

struct PairIntegralOptions {
  int theta_nodes = 256;  // full-circle node count
  int v_stride = 1;       // node thinning, for quadrature-error estimates
  Execution exec = Execution::Parallel;
};

// Entropy production D_{N,gamma}(F_N) of the walk on the sphere.
double entropy_production_DN(const ConditionedTensor& ct, double gamma,
                             const PairIntegralOptions& opt = {});

// Pair integral of |ΔF| |Δ log F|^{1+beta} under one collision rotation
// (left side of the log-power bound); O(1) in N.
double log_power_integral(const ConditionedTensor& ct, double beta,
                          const PairIntegralOptions& opt = {});

struct ConcentrationProfile {
  double sigma2 = 0.0;  // ∫ v^4 f - 1
  std::vector<int> ns;
  std::vector<double> sup_lambda;    // measured sup_u residual per N
  std::vector<double> g_at_zero;     // candidate profile at x = 0
  std::vector<double> sup_g_dev;     // sup_{|x|<R} |g(x,N) - (2pi)^{-1/2}|
  std::vector<double> window_radius; // R per N
  std::vector<bool> window_shrunk;
  bool decreasing_trend = false;
  double g_sup = 0.0;          // ||g||_inf
  double max_sup_lambda = 0.0;
};

ConcentrationProfile g_concentration_profile(PartitionTable& table,
                                             const std::vector<int>& ns,
                                             double window_sigmas = 6.0,
                                             double r_sigmas = 5.0);

// Log-scalability constant of the conditioned family under declared
// two-sided Gaussian bounds, validated at every grid node.
double log_scalability_constant(PartitionTable& table, const TailModel& tail,
                                const std::vector<int>& ns);

double c_epsilon(double eps);            // sup_{x>=1} log x / x^eps = 1/(e eps)
double c_k_beta(double k, double beta);  // 2^{k(1+b)+1} ∫ |cos|^{k(1+b)}

struct LogPowerConstantParams {
  double beta = 1.0;
  double k = 2.0;
  double a = 1.0;        // lower bound f >= exp(-a |v|^k)
  double epsilon = 0.5;  // tunable in C_eps
  bool use_fisher_bound = true;  // ||f||_inf <= sqrt(I(f))
};

// Closed-form log-power constant; profile == nullptr uses the limiting
// concentration prefactor 1.
double log_power_constant(const GridDensity& f, const LogPowerConstantParams& p,
                          const ConcentrationProfile* profile);

// Range of the pair weight W(s) over the pair energies that carry all but
// mass_tol of f⊗f; the brackets feed the transfer-theorem check.
struct PairWeightBracket {
  double w_min = 0.0;
  double w_max = 0.0;
  double s_eff = 0.0;
};
PairWeightBracket pair_weight_bracket(const ConditionedTensor& ct,
                                      double mass_tol = 1e-8);

}  // namespace kac
