// brw: critical parameters, sweeps, exact simulation and expected-population
// curves for branching random walks with age-decaying reproduction rates.
//
// Exit codes: 0 success, 2 configuration error, 3 numeric failure, 4 I/O.

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "brw/criticality.hpp"
#include "brw/expectation.hpp"
#include "brw/model.hpp"
#include "brw/simulate.hpp"

namespace {

using nlohmann::json;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt_g(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw brw::ConfigError("bad JSON in " + path + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  if (const auto dir = std::filesystem::path(path).parent_path(); !dir.empty())
    std::filesystem::create_directories(dir);
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out.good()) throw IoError("cannot write " + path);
}

void write_json(const std::string& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

int threads_default() {
  if (const char* env = std::getenv("BRW_THREADS")) {
    try {
      return std::max(1, std::stoi(env));
    } catch (...) {
      throw brw::ConfigError("BRW_THREADS is not an integer");
    }
  }
  return 1;
}

std::uint64_t ensure_seed(std::optional<std::uint64_t> seed) {
  if (seed) return *seed;
  std::random_device rd;  // recorded in the output metadata
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

// ---------------------------------------------------------------------------
// critical

constexpr char kCriticalCsvHeader[] =
    "scenario,d,k,k_oo,k_star,alpha,alpha_o,lambda_w,lambda_w_method,"
    "lambda_s,lambda_s_method,phase_at_lambda";

std::string critical_csv_row(const brw::CriticalReport& rep, double lambda) {
  std::ostringstream row;
  if (rep.scenario) {
    const auto& p = *rep.scenario;
    row << p.name << ',' << p.d << ',' << fmt_g(p.k) << ',' << fmt_g(p.k_oo)
        << ',' << fmt_g(p.k_star) << ',' << fmt_g(p.alpha) << ','
        << fmt_g(p.alpha_o);
  } else {
    row << "custom,,,,,,";
  }
  const auto one = [](const brw::CriticalValue& v) {
    if (v.value) return fmt_g(*v.value);
    if (v.lo && v.hi && std::isfinite(*v.hi)) return fmt_g(*v.hi);
    if (v.lo) return fmt_g(*v.lo);
    return std::string();
  };
  // For brackets the defensible single numbers differ by side: the series
  // root is an upper estimate of the local value, the row-sum bound a
  // lower one for the global value.
  std::string lw = rep.lambda_w.value ? fmt_g(*rep.lambda_w.value)
                   : rep.lambda_w.lo  ? fmt_g(*rep.lambda_w.lo)
                                      : one(rep.lambda_w);
  std::string ls = rep.lambda_s.value ? fmt_g(*rep.lambda_s.value)
                   : rep.lambda_s.hi && std::isfinite(*rep.lambda_s.hi)
                       ? fmt_g(*rep.lambda_s.hi)
                       : one(rep.lambda_s);
  row << ',' << lw << ',' << rep.lambda_w.method << ',' << ls << ','
      << rep.lambda_s.method << ','
      << brw::phase_name(brw::classify_phase(lambda, rep));
  return row.str();
}

// Report for a model without a named scenario: exact on finite irreducible
// graphs, honest brackets on trees.
brw::CriticalReport generic_report(const brw::BrwModel& model,
                                   const brw::Vertex& x, int series_n) {
  brw::CriticalReport rep;
  if (!model.is_tree()) {
    const double ls = brw::lambda_s_spectral(model, x);
    rep.lambda_s = {ls, std::nullopt, std::nullopt, "spectral"};
    // finite irreducible: one critical speed governs both survivals
    rep.lambda_w = {ls, std::nullopt, std::nullopt, "finite_exact"};
    const auto rb = brw::lambda_w_bound(model, x, std::min(series_n, 60));
    rep.n_root_sequence = rb.sequence;
    return rep;
  }
  const auto sb = brw::lambda_s_series(model, x, series_n);
  const auto rb = brw::lambda_w_bound(model, x, series_n);
  rep.lambda_s = {std::nullopt, sb.lo,
                  sb.open_hi ? std::optional<double>{} : std::optional<double>{sb.hi},
                  "series_root"};
  rep.lambda_w = {std::nullopt, rb.lo,
                  sb.open_hi ? std::optional<double>{} : std::optional<double>{sb.hi},
                  "rowsum_bound"};
  rep.n_root_sequence = rb.sequence;
  return rep;
}

struct CriticalArgs {
  std::string config_path;
  std::string out = "critical";
  std::string format = "both";  // json | csv | both
  std::optional<double> lambda;
  int series_n = 60;
};

int cmd_critical(const CriticalArgs& a) {
  json cfg = a.config_path.empty() ? json::object() : load_json(a.config_path);
  if (!cfg.contains("model")) {
    if (!cfg.contains("scenario") && !cfg.contains("space"))
      throw brw::ConfigError("critical: no model given");
    cfg = json{{"model", cfg}};
  }
  if (a.lambda) cfg["model"]["lambda"] = *a.lambda;
  const int series_n = cfg.value("series_n", a.series_n);

  const brw::BrwModel model = brw::model_from_json(cfg.at("model"));
  const auto scenario = brw::scenario_from_json(cfg.at("model"));

  brw::CriticalReport rep;
  json extras = json::object();
  if (scenario) {
    rep = brw::closed_form_critical(*scenario);
    // numeric diagnostics alongside the closed forms
    const auto sb = brw::lambda_s_series(model, brw::Vertex::root(),
                                         std::min(series_n, 200));
    const auto rb = brw::lambda_w_bound(model, brw::Vertex::root(), series_n);
    rep.n_root_sequence = rb.sequence;
    extras["series_bracket"] = {{"lo", sb.lo},
                                {"hi", sb.open_hi ? json("inf") : json(sb.hi)},
                                {"heuristic_lo", sb.heuristic_lo}};
    extras["rowsum_lo"] = rb.lo;
  } else {
    const brw::Vertex x = model.is_tree() ? brw::Vertex::root() : brw::Vertex::finite(0);
    rep = generic_report(model, x, series_n);
  }

  json out = rep;
  out["phase_at_lambda"] =
      brw::phase_name(brw::classify_phase(model.lambda, rep));
  out["lambda"] = model.lambda;
  out.update(extras);

  if (a.format == "json" || a.format == "both") write_json(a.out + ".json", out);
  if (a.format == "csv" || a.format == "both") {
    write_text(a.out + ".csv", std::string(kCriticalCsvHeader) + "\n" +
                                   critical_csv_row(rep, model.lambda) + "\n");
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// sweep

int cmd_sweep(const std::string& config_path, const std::string& out_path) {
  const json cfg = load_json(config_path);
  auto base_params = brw::scenario_from_json(cfg);
  if (!base_params) throw brw::ConfigError("sweep: config needs a scenario");
  if (!cfg.contains("sweep")) throw brw::ConfigError("sweep: missing sweep block");
  const auto& sw = cfg.at("sweep");
  const std::string param = sw.at("param").get<std::string>();
  const double from = sw.at("from").get<double>();
  const double to = sw.at("to").get<double>();
  const int points = sw.at("points").get<int>();
  if (points < 1) throw brw::ConfigError("sweep: empty grid");
  const bool with_base = cfg.value("with_base", false);

  const auto apply = [&](brw::ScenarioParams p, double v) {
    if (param == "k") p.k = v;
    else if (param == "k_oo") p.k_oo = v;
    else if (param == "k_star") p.k_star = v;
    else if (param == "alpha") p.alpha = v;
    else if (param == "alpha_o") p.alpha_o = v;
    else if (param == "lambda") p.lambda = v;
    else throw brw::ConfigError("sweep: unknown parameter '" + param + "'");
    return p;
  };

  std::optional<brw::CriticalReport> base_report;
  if (with_base) {
    brw::ScenarioParams unmodified = *base_params;
    if (unmodified.name == "treeloop") unmodified.name = "homtree";
    unmodified.k_oo = 0.0;
    unmodified.alpha_o = unmodified.alpha;
    base_report = brw::closed_form_critical(unmodified);
  }

  std::ostringstream csv;
  csv << kCriticalCsvHeader;
  if (with_base)
    csv << ",base_lambda_w,base_lambda_s,rel_global_cannot_increase,"
           "rel_pure_phase_pins_global,rel_merge_or_pin";
  csv << "\n";
  const auto status_str = [](brw::RelationStatus s) {
    return s == brw::RelationStatus::holds      ? "holds"
           : s == brw::RelationStatus::violated ? "violated"
                                                : "not_applicable";
  };
  for (int i = 0; i < points; ++i) {
    const double v =
        points == 1 ? from
                    : from + (to - from) * static_cast<double>(i) /
                          static_cast<double>(points - 1);
    const brw::ScenarioParams p = apply(*base_params, v);
    const auto rep = brw::closed_form_critical(p);
    csv << critical_csv_row(rep, p.lambda);
    if (with_base) {
      const auto relations = brw::maximality_check(*base_report, rep);
      csv << ',' << fmt_g(*base_report->lambda_w.value) << ','
          << fmt_g(*base_report->lambda_s.value);
      for (const auto& r : relations) csv << ',' << status_str(r.status);
    }
    csv << "\n";
  }
  write_text(out_path, csv.str());
  std::cout << "wrote " << out_path << " (" << points << " rows)\n";
  return 0;
}

// ---------------------------------------------------------------------------
// simulate

brw::SimConfig sim_config_from_json(const json& cfg, const brw::BrwModel& model) {
  brw::SimConfig sc;
  if (cfg.contains("sim")) {
    const auto& s = cfg.at("sim");
    sc.horizon = s.value("horizon", sc.horizon);
    sc.grid_points = s.value("grid_points", sc.grid_points);
    sc.generations = s.value("generations", sc.generations);
    sc.pop_cap = s.value("pop_cap", sc.pop_cap);
    sc.trials = s.value("trials", sc.trials);
    sc.local_min_generations =
        s.value("local_min_generations", sc.local_min_generations);
    sc.initial = s.value("initial", sc.initial);
    if (s.contains("seed")) sc.seed = s.at("seed").get<std::uint64_t>();
    if (s.contains("start"))
      sc.start = brw::Vertex::parse(s.at("start").get<std::string>());
    else if (!model.is_tree())
      sc.start = brw::Vertex::finite(0);
    if (s.contains("target"))
      for (const auto& t : s.at("target"))
        sc.target.push_back(brw::Vertex::parse(t.get<std::string>()));
  } else if (!model.is_tree()) {
    sc.start = brw::Vertex::finite(0);
  }
  if (sc.target.empty()) sc.target.push_back(sc.start);
  return sc;
}

struct SimArgs {
  std::string config_path;
  std::string out = "simulate";
  std::optional<std::uint64_t> seed;
  std::optional<long> trials;
  std::optional<double> lambda;
  int threads = 1;
  bool seed_given = false;
};

int cmd_simulate(const SimArgs& a) {
  const json cfg = load_json(a.config_path);
  if (!cfg.contains("model")) throw brw::ConfigError("simulate: no model");
  json model_json = cfg.at("model");
  if (a.lambda) model_json["lambda"] = *a.lambda;
  const brw::BrwModel model = brw::model_from_json(model_json);
  brw::SimConfig sc = sim_config_from_json(cfg, model);
  if (a.trials) sc.trials = *a.trials;
  const bool had_seed = a.seed.has_value() ||
                        (cfg.contains("sim") && cfg.at("sim").contains("seed"));
  if (a.seed) sc.seed = *a.seed;
  if (!had_seed) sc.seed = ensure_seed(std::nullopt);
  sc.threads = a.threads;
  const std::string mode = cfg.value("mode", "generational");

  json summary;
  summary["mode"] = mode;
  summary["model"] = model;
  summary["seed"] = sc.seed;
  summary["trials"] = sc.trials;

  if (mode == "event") {
    std::ostringstream csv;
    csv << "trial,t,total_count,target_count,capped\n";
    for (long trial = 0; trial < sc.trials; ++trial) {
      const auto traj = brw::run_event_driven(model, sc, trial);
      for (std::size_t i = 0; i < traj.times.size(); ++i) {
        csv << trial << ',' << fmt_g(traj.times[i]) << ',' << traj.total[i]
            << ',' << traj.target[i] << ',' << (traj.capped ? 1 : 0) << "\n";
      }
    }
    write_text(a.out + "_trajectories.csv", csv.str());
    const auto curve = brw::estimate_expectation(model, sc);
    json jc;
    jc["t"] = curve.times;
    jc["mean"] = curve.mean;
    jc["se"] = curve.se;
    summary["expectation"] = jc;
    summary["horizon"] = sc.horizon;
  } else if (mode == "generational") {
    const auto rep = brw::estimate_survival(model, sc);
    summary["survival"] = rep;
  } else {
    throw brw::ConfigError("simulate: mode must be event or generational");
  }
  write_json(a.out + "_summary.json", summary);
  std::cout << summary.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// expect / compare

std::string expectation_csv(const brw::ExpectationParams& p, double t_max,
                            int points, double h) {
  const auto ode = brw::integrate_ode(p, h, t_max);
  const auto regime = brw::compare_regime(p);
  std::ostringstream csv;
  csv << "t,V_closed,S_closed,V_rk4,regime_case\n";
  for (int i = 0; i < points; ++i) {
    const double t = t_max * static_cast<double>(i) / static_cast<double>(points - 1);
    // nearest RK4 grid point; h divides the sample spacing in all presets
    const auto idx = static_cast<std::size_t>(std::llround(t / h));
    const double rk4 = ode.v[std::min(idx, ode.v.size() - 1)];
    csv << fmt_g(t) << ',' << fmt_g(brw::v_closed(p, t)) << ','
        << fmt_g(brw::s_closed(p, t)) << ',' << fmt_g(rk4) << ','
        << regime.regime_case << "\n";
  }
  return csv.str();
}

int cmd_expect(double lambda, double alpha, double v0, double t_max, int points,
               double h, const std::string& out_path) {
  if (points < 2) throw brw::ConfigError("expect: points must be >= 2");
  const brw::ExpectationParams p{lambda, alpha, v0};
  p.validate();
  write_text(out_path, expectation_csv(p, t_max, points, h));
  std::cout << "wrote " << out_path << " (regime case "
            << brw::compare_regime(p).regime_case << ")\n";
  return 0;
}

int cmd_compare(const std::string& out_dir, const std::string& pairs_arg,
                double v0, double t_max, int points, double h, bool gnuplot) {
  std::vector<std::pair<double, double>> pairs;
  if (pairs_arg.empty()) {
    pairs = {{2.52, 1.5}, {2.5, 1.5}, {2.45, 1.5}, {4.0, 4.0}};
  } else {
    std::stringstream ss(pairs_arg);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto colon = item.find(':');
      if (colon == std::string::npos)
        throw brw::ConfigError("compare: pairs must be lambda:alpha,...");
      pairs.emplace_back(std::stod(item.substr(0, colon)),
                         std::stod(item.substr(colon + 1)));
    }
  }
  if (pairs.empty()) throw brw::ConfigError("compare: no parameter pairs");
  std::filesystem::create_directories(out_dir);
  std::vector<std::string> files;
  for (const auto& [lambda, alpha] : pairs) {
    const brw::ExpectationParams p{lambda, alpha, v0};
    p.validate();
    const std::string name =
        "compare_lambda" + fmt_g(lambda) + "_alpha" + fmt_g(alpha) + ".csv";
    write_text(out_dir + "/" + name, expectation_csv(p, t_max, points, h));
    files.push_back(name);
    std::cout << name << ": regime case " << brw::compare_regime(p).regime_case
              << "\n";
  }
  if (gnuplot) {
    std::ostringstream gp;
    gp << "set datafile separator ','\nset key left\n";
    for (const auto& f : files)
      gp << "plot '" << f
         << "' using 1:2 with lines title 'ageing', '' using 1:3 with lines "
            "title 'constant-rate'\npause -1\n";
    write_text(out_dir + "/compare.gp", gp.str());
  }
  return 0;
}

// ---------------------------------------------------------------------------
// check-maximality

int cmd_check_maximality(const std::string& config_path,
                         const std::string& out_path, double tol) {
  const json cfg = load_json(config_path);
  const auto base_sp = brw::scenario_from_json(cfg.at("base"));
  const auto mod_sp = brw::scenario_from_json(cfg.at("modified"));
  if (!base_sp || !mod_sp)
    throw brw::ConfigError("check-maximality: base and modified must be scenarios");
  const brw::BrwModel base_model = brw::make_scenario(*base_sp);
  const brw::BrwModel mod_model = brw::make_scenario(*mod_sp);
  if (!brw::is_local_modification(base_model, mod_model))
    throw brw::ConfigError(
        "check-maximality: models are not local modifications of each other");
  const auto base_rep = brw::closed_form_critical(*base_sp);
  const auto mod_rep = brw::closed_form_critical(*mod_sp);
  const auto relations = brw::maximality_check(base_rep, mod_rep, tol);
  json out{{"base", base_rep},
           {"modified", mod_rep},
           {"relations", relations},
           {"local_modification", true},
           {"tol", tol}};
  if (!out_path.empty()) write_json(out_path, out);
  std::cout << out.dump(2) << "\n";
  for (const auto& r : relations)
    if (r.status == brw::RelationStatus::violated) return 3;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"branching random walks with ageing: criticality and simulation"};
  app.require_subcommand(1);
  int threads = threads_default();
  app.add_option("--threads", threads, "worker threads (results are identical for any value)");

  CriticalArgs crit;
  auto* c_crit = app.add_subcommand("critical", "critical parameters of one model");
  c_crit->add_option("--config", crit.config_path, "model/config JSON");
  c_crit->add_option("--out", crit.out, "output path prefix");
  c_crit->add_option("--format", crit.format, "json|csv|both");
  double crit_lambda = 0.0;
  auto* crit_lopt = c_crit->add_option("--lambda", crit_lambda, "override speed");
  c_crit->add_option("--series-n", crit.series_n, "series diagnostics depth");

  std::string sweep_config, sweep_out = "sweep.csv";
  auto* c_sweep = app.add_subcommand("sweep", "critical parameters over a grid");
  c_sweep->add_option("--config", sweep_config, "sweep config JSON")->required();
  c_sweep->add_option("--out", sweep_out, "output CSV");

  SimArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Monte Carlo simulation");
  c_sim->add_option("--config", sim.config_path, "simulation config JSON")->required();
  c_sim->add_option("--out", sim.out, "output path prefix");
  std::uint64_t sim_seed = 0;
  auto* sim_seed_opt = c_sim->add_option("--seed", sim_seed, "rng seed");
  long sim_trials = 0;
  auto* sim_trials_opt = c_sim->add_option("--trials", sim_trials, "trial count");
  double sim_lambda = 0.0;
  auto* sim_lambda_opt = c_sim->add_option("--lambda", sim_lambda, "override speed");

  double ex_lambda = 2.5, ex_alpha = 1.5, ex_v0 = 1.0, ex_tmax = 10.0, ex_h = 1e-3;
  int ex_points = 101;
  std::string ex_out = "expect.csv";
  auto* c_expect = app.add_subcommand("expect", "expected population curves");
  c_expect->add_option("--lambda", ex_lambda, "speed")->required();
  c_expect->add_option("--alpha", ex_alpha, "ageing exponent")->required();
  c_expect->add_option("--v0", ex_v0, "initial population");
  c_expect->add_option("--tmax", ex_tmax, "time horizon");
  c_expect->add_option("--points", ex_points, "CSV sample points");
  c_expect->add_option("--step", ex_h, "RK4 step");
  c_expect->add_option("--out", ex_out, "output CSV");

  std::string cmp_out = "compare", cmp_pairs;
  double cmp_v0 = 1.0, cmp_tmax = 10.0, cmp_h = 1e-3;
  int cmp_points = 101;
  bool cmp_gnuplot = false;
  auto* c_cmp = app.add_subcommand("compare",
                                   "ageing vs matched constant-rate curves");
  c_cmp->add_option("--out", cmp_out, "output directory");
  c_cmp->add_option("--pairs", cmp_pairs, "lambda:alpha,... (default: the four presets)");
  c_cmp->add_option("--v0", cmp_v0, "initial population");
  c_cmp->add_option("--tmax", cmp_tmax, "time horizon");
  c_cmp->add_option("--points", cmp_points, "CSV sample points");
  c_cmp->add_option("--step", cmp_h, "RK4 step");
  c_cmp->add_flag("--gnuplot", cmp_gnuplot, "emit a gnuplot script");

  std::string chk_config, chk_out;
  double chk_tol = 1e-9;
  auto* c_chk = app.add_subcommand("check-maximality",
                                   "local-modification constraints on a model pair");
  c_chk->add_option("--config", chk_config, "pair config JSON")->required();
  c_chk->add_option("--out", chk_out, "output JSON");
  c_chk->add_option("--tol", chk_tol, "comparison tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*c_crit) {
      if (*crit_lopt) crit.lambda = crit_lambda;
      return cmd_critical(crit);
    }
    if (*c_sweep) return cmd_sweep(sweep_config, sweep_out);
    if (*c_sim) {
      if (*sim_seed_opt) sim.seed = sim_seed;
      if (*sim_trials_opt) sim.trials = sim_trials;
      if (*sim_lambda_opt) sim.lambda = sim_lambda;
      sim.threads = threads;
      return cmd_simulate(sim);
    }
    if (*c_expect)
      return cmd_expect(ex_lambda, ex_alpha, ex_v0, ex_tmax, ex_points, ex_h, ex_out);
    if (*c_cmp)
      return cmd_compare(cmp_out, cmp_pairs, cmp_v0, cmp_tmax, cmp_points,
                         cmp_h, cmp_gnuplot);
    if (*c_chk) return cmd_check_maximality(chk_config, chk_out, chk_tol);
  } catch (const brw::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const brw::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  }
  return 2;
}
