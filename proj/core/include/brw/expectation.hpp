#pragma once

#include <optional>
#include <string>
#include <vector>

namespace brw {

// Single-site ageing branching process: individuals die at rate 1 and
// breed at the arrival times of a Poisson process with intensity
// lambda * exp(-alpha * age).
struct ExpectationParams {
  double lambda = 1.0;  // > 0
  double alpha = 1.0;   // > 0
  double v0 = 1.0;      // initial population, > 0

  void validate() const;
};

// Expected population at time t. The two-exponential solution is
// evaluated as v0 * e^-t * (1 + lambda * expm1((lambda-alpha) t)/(lambda-alpha)),
// which is algebraically identical and stays stable through the
// lambda == alpha resonance (where it degenerates to v0 (1+lambda t) e^-t).
double v_closed(const ExpectationParams& p, double t);

// dV/dt of the closed form; v_closed is increasing at 0 iff lambda > 1.
double v_dot_closed(const ExpectationParams& p, double t);

// Expected population of the matched constant-rate process: same mean
// offspring, breeding rate lambda/(1+alpha), so s0 * e^{(lambda/(1+alpha)-1) t}.
double s_closed(const ExpectationParams& p, double t);

struct OdeTrajectory {
  std::vector<double> t;
  std::vector<double> v;
  std::vector<double> v_dot;
  bool step_warning = false;  // step-doubling error estimate exceeded 1e-6
};

// Fixed-step RK4 for the second-order population equation
//   v'' = (lambda - alpha - 2) v' + (lambda - alpha - 1) v,
//   v(0) = v0, v'(0) = (lambda - 1) v0.
// Serves as the independent check of v_closed.
OdeTrajectory integrate_ode(const ExpectationParams& p, double h, double t_max);

// Long-run regime relative to the matched constant-rate process.
//   1: lambda > alpha+1   both diverge, ageing process eventually larger
//   2: lambda = alpha+1   matched process constant, ageing -> v0*lambda
//   3: alpha < lambda < alpha+1   both -> 0, matched eventually larger
//   4: lambda = alpha     both -> 0, ageing ~ alpha t v0 e^-t
//   5: lambda < alpha     both -> 0, ageing ~ alpha/(alpha-lambda) v0 e^-t
struct RegimeReport {
  int regime_case = 0;
  std::string description;
};

RegimeReport compare_regime(const ExpectationParams& p);

// Time of the interior maximum of v_closed, present exactly when
// 1 < lambda < alpha + 1 (initial slope positive, eventual decay).
std::optional<double> peak_time(const ExpectationParams& p);

}  // namespace brw
