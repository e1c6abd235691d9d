#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "brw/model.hpp"
#include "brw/rng.hpp"

namespace brw {

struct Individual {
  std::uint64_t id = 0;  // deterministic lineage key; doubles as rng unit key
  Vertex site;
  double birth_time = 0.0;
  double death_time = 0.0;
  std::optional<std::uint64_t> parent;
};

struct SimConfig {
  double horizon = 10.0;     // event-driven time window
  int grid_points = 101;     // trajectory samples on [0, horizon]
  int generations = 200;     // generational window
  long pop_cap = 10000;      // abort threshold (flagged, not an error)
  std::uint64_t seed = 0;
  long trials = 1;
  std::vector<Vertex> target;      // local-survival target set
  int local_min_generations = 10;  // occupancy count defining the local proxy
  int initial = 1;                 // initial individuals at `start`
  Vertex start = Vertex::root();
  int threads = 1;

  void validate(const BrwModel& model) const;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<long> total;
  std::vector<long> target;
  std::vector<long> births;  // cumulative individuals created by each grid time
  std::vector<Individual> individuals;  // full birth/death record of the run
  bool capped = false;
  long trial = 0;
};

struct GenerationOutcome {
  std::optional<int> extinct_at;  // first empty generation
  bool capped = false;            // population reached pop_cap
  bool capped_tenth = false;      // reached pop_cap/10 (cap sensitivity)
  int target_generations = 0;     // distinct generations with target occupied
  bool visited_target = false;
  std::vector<long> generation_sizes;  // size of each evaluated generation
};

struct SurvivalEstimate {
  std::string event;
  long successes = 0;
  long trials = 0;
  double estimate = 0.0;
  double wilson_lo = 0.0;
  double wilson_hi = 0.0;
};

// The limsup survival events have no finite-horizon observer; these are
// the documented proxies: population hitting pop_cap within the
// generation window (global), and the target set occupied in at least
// local_min_generations distinct generations (local). The tenth-cap
// estimate reports how sensitive the global proxy is to the cap.
struct SurvivalReport {
  SurvivalEstimate global;
  SurvivalEstimate global_tenth_cap;
  SurvivalEstimate local;
  long pop_cap = 0;
  int generations = 0;
  std::uint64_t seed = 0;
};

struct ExpectationCurve {
  std::vector<double> times;
  std::vector<double> mean;
  std::vector<double> se;
  long trials = 0;
  std::uint64_t seed = 0;
};

// 95% score interval; contains the point estimate, stays inside [0, 1].
std::pair<double, double> wilson_interval(long successes, long trials);

// Unit-rate exponential lifetime.
double sample_lifetime(Rng& rng);

// Arrival times on (0, lifetime] of a Poisson process with intensity
// lambda * rate(t): count from Poisson(lambda * mass), then iid times by
// inverting the cumulative at uniform fractions of the mass. Sorted.
std::vector<double> sample_offspring_times(const RateFunction& rate,
                                           double lambda, double lifetime,
                                           Rng& rng);

// One individual's whole-life offspring in the generation view: a single
// Exp(1) lifetime T, then one Poisson count per rate class with mean
// lambda * cumulative(T) (times multiplicity for the edge class, assigned
// uniformly among neighbours; exact by superposition).
std::vector<std::pair<Vertex, long>> sample_generation_offspring(
    const BrwModel& model, const Vertex& site, Rng& rng);

// Exact event-driven realisation: offspring and death times are
// pre-sampled at each birth from per-individual substreams, so runs at
// different speeds with the same seed share every draw (monotone
// coupling), and thread count cannot affect the result.
Trajectory run_event_driven(const BrwModel& model, const SimConfig& cfg,
                            long trial);

// Generation-indexed run. Single-site constant-rate models collapse each
// generation to two draws (Gamma lifetime total, then one Poisson), which
// samples the same offspring law exactly; everything else walks the
// individuals.
GenerationOutcome run_generational(const BrwModel& model, const SimConfig& cfg,
                                   long trial);

SurvivalReport estimate_survival(const BrwModel& model, const SimConfig& cfg);

ExpectationCurve estimate_expectation(const BrwModel& model,
                                      const SimConfig& cfg);

void to_json(nlohmann::json& j, const SurvivalEstimate& e);
void to_json(nlohmann::json& j, const SurvivalReport& r);

}  // namespace brw
