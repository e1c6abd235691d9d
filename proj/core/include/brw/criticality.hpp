#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "brw/model.hpp"
#include "brw/vertex.hpp"

namespace brw {

// Taboo-path coefficients of the first-return generating function
// Phi(x,y|s) = sum_n coeff[n-1] * s^n. coeff[n-1] sums the speed-free
// moment products over all length-n paths x -> y whose intermediate
// vertices avoid y.
struct PhiSeries {
  Vertex x, y;
  std::vector<double> coeff;  // coeff[n-1] = phi^(n), n >= 1

  int order() const { return static_cast<int>(coeff.size()); }
};

// Coefficients on an explicit weight matrix (row-major n x n), via the
// first-step recursion phi^(m)_{xy} = sum_{w != y} K_{xw} phi^(m-1)_{wy}.
std::vector<double> taboo_coefficients(const std::vector<double>& K,
                                       std::size_t n, std::size_t x,
                                       std::size_t y, int N);

// Model-level coefficients. Finite graphs run the dense recursion over
// all vertices. Tree models with at most a root overlay and x = y = root
// collapse to a distance-from-root recursion (length-n paths stay within
// distance n, so depth N is exact); other tree queries materialise the
// radius-N ball, subject to the cap.
PhiSeries phi_coefficients(const BrwModel& model, const Vertex& x,
                           const Vertex& y, int N,
                           std::size_t ball_cap = kDefaultSparseBallCap);

// Partial sum sum_{n<=N} phi^(n) * lambda^n; a lower bound on Phi.
double phi_eval(const PhiSeries& s, double lambda);

// Largest speed at which the scenario's closed-form Phi stays real.
double phi_domain_end(const ScenarioParams& p);

// Exact first-return generating function at the root for the named tree
// scenarios; nullopt past the convergence radius.
std::optional<double> phi_closed_tree(const ScenarioParams& p, double lambda);

// max{ lambda in the domain : Phi(o,o|lambda) <= 1 }, by bisection on the
// closed form (absolute tolerance 1e-10); equals the domain end when Phi
// never reaches 1.
double lambda_s_from_phi_closed(const ScenarioParams& p);

// Honest bracket for the local critical speed from the truncated series.
// hi is the root of the partial sum = 1 (an upper estimate, since the
// partial sum underestimates Phi). lo is a heuristic: the largest grid
// speed at which the observed coefficient tail still decays geometrically.
struct SeriesBracket {
  double lo = 0.0;
  double hi = 0.0;
  bool heuristic_lo = true;
  bool open_hi = false;  // partial sum never reached 1 below lambda_max
  std::vector<double> n_root_sequence;  // n-th roots of phi^(n), 0 where phi^(n)=0
};

SeriesBracket lambda_s_series(const BrwModel& model, const Vertex& x, int N,
                              double tol = 1e-3, double lambda_max = 1e6);

// Perron root of a nonnegative matrix (row-major n x n) by power
// iteration on K + I (the shift makes it aperiodic), to relative
// tolerance tol.
double spectral_radius(const std::vector<double>& K, std::size_t n,
                       double tol = 1e-10);

// Local critical speed 1/rho(K) on a finite irreducible graph; the value
// does not depend on the starting vertex.
double lambda_s_spectral(const BrwModel& model, const Vertex& x);

// Row-sum route to the global critical speed: the sequence of n-th roots
// of sum_y k^(n)_{xy} and the lower bound lo = 1 / max over the trailing
// half-window (a conservative liminf proxy; exact for transitive models,
// where the sequence is constant).
struct RowSumBound {
  double lo = 0.0;
  std::vector<double> sequence;
};

RowSumBound lambda_w_bound(const BrwModel& model, const Vertex& x, int N,
                           std::size_t ball_cap = kDefaultSparseBallCap);

struct CriticalValue {
  std::optional<double> value;           // point estimate
  std::optional<double> lo, hi;          // bracket when no point value
  std::string method;                    // closed_form | series_root | spectral |
                                         // rowsum_bound | finite_exact
  double lo_eff() const;
  double hi_eff() const;
};

struct CriticalReport {
  CriticalValue lambda_s;
  CriticalValue lambda_w;
  std::vector<double> n_root_sequence;
  std::optional<ScenarioParams> scenario;
};

// Scenario thresholds for the root-loop strength, in the same units as k.
struct TreeloopThresholds {
  double local_onset;  // loop strength where the local value starts moving
  double merge;        // loop strength where the two critical values meet
};
TreeloopThresholds treeloop_thresholds(int d, double k);

struct AgeLoopThresholds {
  double k1;  // below: both critical values equal the unmodified ones
  double k2;  // at and above: the two critical values coincide
};
AgeLoopThresholds agelooptree_thresholds(int d, double k, double alpha,
                                         double alpha_o);

// Critical parameters of a named scenario from its closed forms. For the
// ageing scenarios the local value comes from the exact-Phi root; the
// global value follows from the local-modification constraints against
// the scenario's transitive base (min of the base global value and the
// modified local value).
CriticalReport closed_form_critical(const ScenarioParams& p);

enum class Phase {
  globally_subcritical,
  pure_global,
  locally_supercritical,
  at_boundary,
};

std::string phase_name(Phase p);

// Position of a speed relative to the report's critical values, with a
// tolerance band (and bracket interiors) mapping to at_boundary.
Phase classify_phase(double lambda, const CriticalReport& report,
                     double tol = 1e-9);

enum class RelationStatus { holds, violated, not_applicable };

struct MaximalityRelation {
  std::string name;
  RelationStatus status;
  std::string detail;
};

// Consistency checks for a local modification of a base with a pure
// global survival phase: (1) the global value cannot increase; (2) a
// surviving pure global phase pins the global value; (3) the modified
// local value decides whether the two values merge below the base global
// value or the global value stays put.
std::vector<MaximalityRelation> maximality_check(const CriticalReport& base,
                                                 const CriticalReport& modified,
                                                 double tol = 1e-9);

void to_json(nlohmann::json& j, const CriticalValue& v);
void to_json(nlohmann::json& j, const CriticalReport& r);
void to_json(nlohmann::json& j, const MaximalityRelation& r);

}  // namespace brw
