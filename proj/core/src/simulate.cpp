#include "brw/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include <nlohmann/json.hpp>

#include "brw/parallel.hpp"

namespace brw {

namespace {

constexpr std::uint64_t kRootParentKey = 0x7b0c4a9d3f2e5c11ull;
constexpr long kEventGuard = 200'000'000;

// Substream channels per individual: 0 lifetime; 2+2c counts and event
// times of rate class c; 3+2c neighbour assignment of class c. Children
// are keyed by (parent, class, draw index), which does not involve the
// speed parameter: runs at different speeds share the draws of every
// individual they have in common.
std::uint64_t lineage_key(std::uint64_t parent, std::uint32_t cls,
                          std::uint64_t idx) {
  std::uint64_t h = mix64(parent ^ mix64(0xc2b2ae3d27d4eb4full * (cls + 1)));
  return mix64(h ^ mix64(0x9e3779b97f4a7c15ull * (idx + 1)));
}

std::uint64_t root_key(long copy) {
  return lineage_key(kRootParentKey, 0, static_cast<std::uint64_t>(copy));
}

struct RateClass {
  RateFunction rate;
  bool is_loop = false;
  std::vector<Vertex> targets;  // loop: {site}; edges: neighbour list
};

std::vector<RateClass> rate_classes(const BrwModel& model, const Vertex& site) {
  std::vector<RateClass> out;
  RateClass loop, edges;
  for (auto& [nbr, rf] : model.neighbors(site)) {
    if (nbr == site) {
      loop.rate = rf;
      loop.is_loop = true;
      loop.targets = {site};
    } else {
      edges.rate = rf;  // one shared profile per source vertex
      edges.targets.push_back(nbr);
    }
  }
  if (!loop.targets.empty()) out.push_back(std::move(loop));
  if (!edges.targets.empty()) out.push_back(std::move(edges));
  return out;
}

bool in_target(const std::vector<Vertex>& target, const Vertex& v) {
  return std::find(target.begin(), target.end(), v) != target.end();
}

// Single-site constant-rate models admit an exact per-generation
// collapse: each parent's whole-life offspring count is mixed Poisson
// over its Exp(1) lifetime, so a generation of size z produces
// Poisson(lambda * k * Gamma(z, 1)) children in total (negative binomial
// in law). Two draws replace z of them.
std::optional<double> aggregate_rate(const BrwModel& model) {
  if (model.is_tree() || model.graph().n != 1) return std::nullopt;
  const VertexRates& r = model.rates.at(Vertex::finite(0));
  if (!r.loop || r.loop->kind != RateKind::constant) return std::nullopt;
  return r.loop->k;
}

}  // namespace

void SimConfig::validate(const BrwModel& model) const {
  if (!(horizon > 0.0)) throw ConfigError("sim: horizon must be > 0");
  if (grid_points < 2) throw ConfigError("sim: grid_points must be >= 2");
  if (generations < 1) throw ConfigError("sim: generations must be >= 1");
  if (pop_cap < 1) throw ConfigError("sim: pop_cap must be >= 1");
  if (trials < 1) throw ConfigError("sim: trials must be >= 1");
  if (initial < 1) throw ConfigError("sim: initial must be >= 1");
  if (local_min_generations < 1)
    throw ConfigError("sim: local_min_generations must be >= 1");
  if (!model.valid_vertex(start)) throw ConfigError("sim: invalid start vertex");
  for (const auto& v : target)
    if (!model.valid_vertex(v)) throw ConfigError("sim: invalid target vertex");
}

std::pair<double, double> wilson_interval(long successes, long trials) {
  const double z = 1.959963984540054;  // 97.5% normal quantile
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

double sample_lifetime(Rng& rng) { return rng.exponential(); }

std::vector<double> sample_offspring_times(const RateFunction& rate,
                                           double lambda, double lifetime,
                                           Rng& rng) {
  if (!(lifetime > 0.0))
    throw ConfigError("sample_offspring_times: lifetime must be > 0");
  const double mass = rate.cumulative(lifetime);
  const long n = poisson(rng, lambda * mass);
  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(n));
  for (long j = 0; j < n; ++j) {
    const auto t = rate.inverse_cumulative(rng.uniform_open() * mass);
    times.push_back(*t);  // u*mass < mass, so inversion cannot fail
  }
  std::sort(times.begin(), times.end());
  return times;
}

std::vector<std::pair<Vertex, long>> sample_generation_offspring(
    const BrwModel& model, const Vertex& site, Rng& rng) {
  const double T = sample_lifetime(rng);
  std::vector<std::pair<Vertex, long>> out;
  for (const auto& cls : rate_classes(model, site)) {
    const double mult = static_cast<double>(cls.targets.size());
    const double mean = model.lambda * mult * cls.rate.cumulative(T);
    const long n = poisson(rng, mean);
    if (n == 0) continue;
    if (cls.is_loop) {
      out.emplace_back(site, n);
      continue;
    }
    std::vector<long> counts(cls.targets.size(), 0);
    for (long j = 0; j < n; ++j) {
      auto idx = static_cast<std::size_t>(rng.uniform_open() * mult);
      idx = std::min(idx, cls.targets.size() - 1);
      ++counts[idx];
    }
    for (std::size_t i = 0; i < counts.size(); ++i)
      if (counts[i] > 0) out.emplace_back(cls.targets[i], counts[i]);
  }
  return out;
}

namespace {

struct Event {
  double time = 0.0;
  std::uint64_t seq = 0;
  bool is_death = false;
  std::uint32_t individual = 0;  // death: index into the record vector
  Vertex site;                   // birth
  std::uint64_t unit = 0;        // birth: lineage key
  std::uint64_t parent = 0;      // birth
  bool has_parent = false;
};

struct EventAfter {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time != b.time) return a.time > b.time;
    return a.seq > b.seq;
  }
};

}  // namespace

Trajectory run_event_driven(const BrwModel& model, const SimConfig& cfg,
                            long trial) {
  model.validate();
  cfg.validate(model);
  Trajectory traj;
  traj.trial = trial;
  traj.times.resize(static_cast<std::size_t>(cfg.grid_points));
  for (int i = 0; i < cfg.grid_points; ++i)
    traj.times[static_cast<std::size_t>(i)] =
        cfg.horizon * static_cast<double>(i) /
        static_cast<double>(cfg.grid_points - 1);

  std::priority_queue<Event, std::vector<Event>, EventAfter> queue;
  std::vector<Individual> individuals;
  std::uint64_t seq = 0;
  for (int r = 0; r < cfg.initial; ++r) {
    Event e;
    e.time = 0.0;
    e.seq = seq++;
    e.site = cfg.start;
    e.unit = root_key(r);
    queue.push(e);
  }

  long alive = 0, target_alive = 0, born = 0;
  std::size_t gi = 0;
  const auto record_until = [&](double next_time) {
    while (gi < traj.times.size() && traj.times[gi] < next_time) {
      traj.total.push_back(alive);
      traj.target.push_back(target_alive);
      traj.births.push_back(born);
      ++gi;
    }
  };

  while (!queue.empty()) {
    const Event e = queue.top();
    if (e.time > cfg.horizon) break;
    record_until(e.time);
    queue.pop();
    if (e.is_death) {
      const Individual& ind = individuals[e.individual];
      --alive;
      if (in_target(cfg.target, ind.site)) --target_alive;
      continue;
    }

    const auto idx = static_cast<std::uint32_t>(individuals.size());
    Rng life(cfg.seed, static_cast<std::uint64_t>(trial), e.unit, 0);
    const double lifetime = sample_lifetime(life);
    Individual ind;
    ind.id = e.unit;
    ind.site = e.site;
    ind.birth_time = e.time;
    ind.death_time = e.time + lifetime;
    if (e.has_parent) ind.parent = e.parent;
    individuals.push_back(ind);
    ++alive;
    ++born;
    if (in_target(cfg.target, e.site)) ++target_alive;

    Event death;
    death.time = ind.death_time;
    death.seq = seq++;
    death.is_death = true;
    death.individual = idx;
    queue.push(death);

    const auto classes = rate_classes(model, e.site);
    for (std::size_t c = 0; c < classes.size(); ++c) {
      const auto& cls = classes[c];
      const double mult = static_cast<double>(cls.targets.size());
      const double mass = cls.rate.cumulative(lifetime);
      Rng births(cfg.seed, static_cast<std::uint64_t>(trial), e.unit,
                 2 + 2 * static_cast<std::uint64_t>(c));
      Rng assign(cfg.seed, static_cast<std::uint64_t>(trial), e.unit,
                 3 + 2 * static_cast<std::uint64_t>(c));
      const long n = poisson(births, model.lambda * mult * mass);
      for (long j = 0; j < n; ++j) {
        const double age = *cls.rate.inverse_cumulative(
            births.uniform_open() * mass);
        Vertex target_site = cls.targets[0];
        if (!cls.is_loop && cls.targets.size() > 1) {
          auto pick = static_cast<std::size_t>(assign.uniform_open() * mult);
          target_site = cls.targets[std::min(pick, cls.targets.size() - 1)];
        }
        Event child;
        child.time = e.time + age;
        child.seq = seq++;
        child.site = std::move(target_site);
        child.unit = lineage_key(e.unit, static_cast<std::uint32_t>(c),
                                 static_cast<std::uint64_t>(j));
        child.parent = e.unit;
        child.has_parent = true;
        queue.push(child);
      }
    }

    if (alive >= cfg.pop_cap) {
      traj.capped = true;
      break;
    }
    if (seq > static_cast<std::uint64_t>(kEventGuard))
      throw NumericError("event count guard tripped");
  }

  // Counts are flat after the last processed event (or frozen at a cap).
  while (gi < traj.times.size()) {
    traj.total.push_back(alive);
    traj.target.push_back(target_alive);
    traj.births.push_back(born);
    ++gi;
  }
  traj.individuals = std::move(individuals);
  return traj;
}

GenerationOutcome run_generational(const BrwModel& model, const SimConfig& cfg,
                                   long trial) {
  model.validate();
  cfg.validate(model);
  GenerationOutcome out;

  if (const auto k = aggregate_rate(model)) {
    const bool start_in_target = in_target(cfg.target, Vertex::finite(0));
    Rng rng(cfg.seed, static_cast<std::uint64_t>(trial), 0, 1);
    long size = cfg.initial;
    for (int g = 0;; ++g) {
      out.generation_sizes.push_back(size);
      if (size == 0) {
        out.extinct_at = g;
        break;
      }
      if (start_in_target) ++out.target_generations;
      if (size >= cfg.pop_cap / 10) out.capped_tenth = true;
      if (size >= cfg.pop_cap) {
        out.capped = true;
        break;
      }
      if (g >= cfg.generations) break;
      const double total_life = gamma_shape_ge1(rng, static_cast<double>(size));
      size = poisson(rng, model.lambda * *k * total_life);
    }
    out.visited_target = out.target_generations > 0;
    return out;
  }

  std::vector<std::pair<Vertex, std::uint64_t>> current, next;
  current.reserve(static_cast<std::size_t>(cfg.initial));
  for (int r = 0; r < cfg.initial; ++r) current.emplace_back(cfg.start, root_key(r));
  auto occupied = [&](const Vertex& site) {
    return !cfg.target.empty() && in_target(cfg.target, site);
  };
  bool cur_occupied = false;
  for (const auto& [site, unit] : current) cur_occupied |= occupied(site);

  for (int g = 0;; ++g) {
    out.generation_sizes.push_back(static_cast<long>(current.size()));
    if (current.empty()) {
      out.extinct_at = g;
      break;
    }
    if (cur_occupied) ++out.target_generations;
    const long size = static_cast<long>(current.size());
    if (size >= cfg.pop_cap / 10) out.capped_tenth = true;
    if (size >= cfg.pop_cap) {
      out.capped = true;
      break;
    }
    if (g >= cfg.generations) break;

    next.clear();
    bool next_occupied = false;
    for (const auto& [site, unit] : current) {
      Rng rng(cfg.seed, static_cast<std::uint64_t>(trial), unit, 1);
      const auto offspring = sample_generation_offspring(model, site, rng);
      for (std::size_t e = 0; e < offspring.size(); ++e) {
        next_occupied |= occupied(offspring[e].first);
        for (long j = 0; j < offspring[e].second; ++j) {
          next.emplace_back(offspring[e].first,
                            lineage_key(unit, static_cast<std::uint32_t>(e),
                                        static_cast<std::uint64_t>(j)));
        }
      }
      // Once the cap verdict and occupancy are both settled, further
      // production cannot change the outcome.
      if (static_cast<long>(next.size()) >= cfg.pop_cap &&
          (cfg.target.empty() || next_occupied))
        break;
    }
    std::swap(current, next);
    cur_occupied = next_occupied;
  }
  out.visited_target = out.target_generations > 0;
  return out;
}

SurvivalReport estimate_survival(const BrwModel& model, const SimConfig& cfg) {
  model.validate();
  cfg.validate(model);
  struct Tally {
    long capped = 0, capped_tenth = 0, local = 0;
  };
  const long chunk = 1024;
  const long n_chunks = (cfg.trials + chunk - 1) / chunk;
  std::vector<Tally> slots(static_cast<std::size_t>(n_chunks));
  parallel_chunks(cfg.trials, chunk, cfg.threads,
                  [&](long begin, long end, long slot) {
                    Tally t;
                    for (long trial = begin; trial < end; ++trial) {
                      const auto o = run_generational(model, cfg, trial);
                      if (o.capped) ++t.capped;
                      if (o.capped_tenth) ++t.capped_tenth;
                      if (o.target_generations >= cfg.local_min_generations)
                        ++t.local;
                    }
                    slots[static_cast<std::size_t>(slot)] = t;
                  });
  Tally total;
  for (const auto& t : slots) {
    total.capped += t.capped;
    total.capped_tenth += t.capped_tenth;
    total.local += t.local;
  }

  const auto estimate = [&](const std::string& name, long hits) {
    SurvivalEstimate e;
    e.event = name;
    e.successes = hits;
    e.trials = cfg.trials;
    e.estimate = static_cast<double>(hits) / static_cast<double>(cfg.trials);
    std::tie(e.wilson_lo, e.wilson_hi) = wilson_interval(hits, cfg.trials);
    return e;
  };
  SurvivalReport rep;
  rep.global = estimate("global_pop_cap", total.capped);
  rep.global_tenth_cap = estimate("global_pop_cap_tenth", total.capped_tenth);
  rep.local = estimate("local_occupancy", total.local);
  rep.pop_cap = cfg.pop_cap;
  rep.generations = cfg.generations;
  rep.seed = cfg.seed;
  return rep;
}

ExpectationCurve estimate_expectation(const BrwModel& model,
                                      const SimConfig& cfg) {
  model.validate();
  cfg.validate(model);
  const auto g = static_cast<std::size_t>(cfg.grid_points);
  const long chunk = 64;
  const long n_chunks = (cfg.trials + chunk - 1) / chunk;
  std::vector<std::vector<double>> sums(static_cast<std::size_t>(n_chunks)),
      sumsqs(static_cast<std::size_t>(n_chunks));
  parallel_chunks(cfg.trials, chunk, cfg.threads,
                  [&](long begin, long end, long slot) {
                    std::vector<double> s(g, 0.0), s2(g, 0.0);
                    for (long trial = begin; trial < end; ++trial) {
                      const auto traj = run_event_driven(model, cfg, trial);
                      for (std::size_t i = 0; i < g; ++i) {
                        const auto x = static_cast<double>(traj.total[i]);
                        s[i] += x;
                        s2[i] += x * x;
                      }
                    }
                    sums[static_cast<std::size_t>(slot)] = std::move(s);
                    sumsqs[static_cast<std::size_t>(slot)] = std::move(s2);
                  });
  std::vector<double> sum(g, 0.0), sumsq(g, 0.0);
  for (long c = 0; c < n_chunks; ++c) {  // fixed order: bit-stable reduce
    for (std::size_t i = 0; i < g; ++i) {
      sum[i] += sums[static_cast<std::size_t>(c)][i];
      sumsq[i] += sumsqs[static_cast<std::size_t>(c)][i];
    }
  }
  ExpectationCurve curve;
  curve.trials = cfg.trials;
  curve.seed = cfg.seed;
  curve.times.resize(g);
  curve.mean.resize(g);
  curve.se.resize(g);
  const double n = static_cast<double>(cfg.trials);
  for (std::size_t i = 0; i < g; ++i) {
    curve.times[i] = cfg.horizon * static_cast<double>(i) /
                     static_cast<double>(cfg.grid_points - 1);
    curve.mean[i] = sum[i] / n;
    double var = 0.0;
    if (cfg.trials > 1)
      var = std::max(0.0, (sumsq[i] - sum[i] * sum[i] / n) / (n - 1.0));
    curve.se[i] = std::sqrt(var / n);
  }
  return curve;
}

void to_json(nlohmann::json& j, const SurvivalEstimate& e) {
  j = nlohmann::json{{"event", e.event},
                     {"successes", e.successes},
                     {"trials", e.trials},
                     {"estimate", e.estimate},
                     {"wilson_lo", e.wilson_lo},
                     {"wilson_hi", e.wilson_hi}};
}

void to_json(nlohmann::json& j, const SurvivalReport& r) {
  nlohmann::json estimates = nlohmann::json::array();
  for (const auto* e : {&r.global, &r.global_tenth_cap, &r.local}) {
    nlohmann::json je = *e;
    je["pop_cap"] = e == &r.global_tenth_cap ? r.pop_cap / 10 : r.pop_cap;
    je["generations"] = r.generations;
    estimates.push_back(je);
  }
  j = nlohmann::json{{"estimates", estimates},
                     {"generations", r.generations},
                     {"pop_cap", r.pop_cap},
                     {"seed", r.seed}};
}

}  // namespace brw
