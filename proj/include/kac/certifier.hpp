#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "kac/boltzmann.hpp"
#include "kac/conditioned_tensor.hpp"

namespace kac {

enum class Verdict { Pass, Fail, Inconclusive };

std::string to_string(Verdict v);

// One inequality check: echoed parameters, both sides, constant, margin and
// verdict. Tolerance is additive: pass iff margin >= -tolerance.
struct TheoremReport {
  std::string theorem_id;
  nlohmann::json parameters;
  double lhs = 0.0;
  double rhs = 0.0;
  double constant_value = 0.0;
  double margin = 0.0;
  double tolerance = 0.0;
  Verdict verdict = Verdict::Inconclusive;
  std::string note;

  nlohmann::json to_json() const;
  std::string one_line() const;
};

// Value plus a 10x grid-halving Richardson error estimate, so inequality
// checks do not fail on discretization noise.
struct Measured {
  double value = 0.0;
  double tolerance = 0.0;
};

Measured measure_entropy_HN(const ConditionedTensor& ct);
Measured measure_entropy_production_DN(const ConditionedTensor& ct, double gamma,
                                       const PairIntegralOptions& opt = {});

// ∫ Pi1 |v|^order and ∫ Pi1 e^{a|v|^mu} of the first marginal.
double marginal_moment(const ConditionedTensor& ct, double order);
double marginal_exp_moment(const ConditionedTensor& ct, double a, double mu);

struct MomentMode {
  bool exponential = false;
  double k = 3.0;   // polynomial order: M_{2k}
  double a = 0.1;   // exponential parameters
  double mu = 1.0;
};

TheoremReport certify_villani(const ConditionedTensor& ct,
                              const PairIntegralOptions& opt = {});

double constant_thm22i(double k, double gamma, double n, double c_f, double m2k);
// N-independent constant of the log-power bound (polynomial mode).
double constant_thm23i(double k, double gamma, double beta, double c_f, double m2k);

// moment_value is M_{2k}(Pi1) in polynomial mode, M_exp(Pi1) in exponential
// mode; pass family-level suprema for N-uniform hypotheses.
TheoremReport certify_thm22(const ConditionedTensor& ct, double gamma,
                            const MomentMode& mode, double c_f, double moment_value,
                            const PairIntegralOptions& opt = {});
TheoremReport certify_thm23(const ConditionedTensor& ct, double gamma, double beta,
                            const MomentMode& mode, double c_f, double moment_value,
                            const PairIntegralOptions& opt = {});

struct Thm13Params {
  double gamma = 0.0;
  double beta = 1.0;
  double k = 3.0;
  double epsilon = 0.5;
  bool exponential = false;
  double a = 0.1;
  double mu = 1.0;
};
TheoremReport certify_thm13(const GridDensity& f, const Thm13Params& p,
                            const CollisionKernelCache& cache);

TheoremReport certify_transfer_thm41(const GridDensity& f, double gamma,
                                     double eps_limit, const ConditionedTensor& ct,
                                     const CollisionKernelCache& cache,
                                     const PairIntegralOptions& opt = {});

// ((H0)^{(g-1)/(k-1)} + C N^{(g-1)/(k-1)} t)^{-(k-1)/(1-g)} per time.
std::vector<double> decay_envelope_thm24(double h0_per_particle, double c, double n,
                                         double k, double gamma,
                                         const std::vector<double>& times);

}  // namespace kac
