#include "brw/criticality.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>

#include <nlohmann/json.hpp>

namespace brw {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRootTol = 1e-10;       // bisection tolerance for speed roots
constexpr double kRadicandSlack = 1e-12; // clamp window at branch points

std::optional<double> clamped_sqrt(double disc) {
  if (disc < 0.0) {
    if (disc < -kRadicandSlack) return std::nullopt;
    disc = 0.0;
  }
  return std::sqrt(disc);
}

// Dense speed-free moment matrix of a finite-graph model.
std::vector<double> dense_k_matrix(const BrwModel& model) {
  const std::size_t n = static_cast<std::size_t>(model.graph().n);
  std::vector<double> K(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const Vertex v = Vertex::finite(static_cast<std::uint32_t>(i));
    for (const auto& [nbr, rf] : model.neighbors(v))
      K[i * n + nbr.id] = rf.first_moment();
  }
  return K;
}

struct BallGraph {
  std::vector<Vertex> verts;
  std::vector<int> level;
  std::vector<std::vector<std::pair<int, double>>> out;  // (index, k), in-ball
};

// Explicit radius-N ball with speed-free out-weights. Out-lists are
// complete for every vertex strictly inside the ball, which is all the
// leveled recursions read.
BallGraph build_ball(const BrwModel& model, const Vertex& center, int radius,
                     std::size_t cap) {
  BallGraph g;
  g.verts = ball_vertices(model, center, radius, cap);
  std::map<Vertex, int> index;
  for (std::size_t i = 0; i < g.verts.size(); ++i)
    index[g.verts[i]] = static_cast<int>(i);
  g.level.assign(g.verts.size(), 0);
  g.out.resize(g.verts.size());
  for (std::size_t i = 0; i < g.verts.size(); ++i) {
    for (const auto& [nbr, rf] : model.neighbors(g.verts[i])) {
      const auto it = index.find(nbr);
      if (it != index.end())
        g.out[i].emplace_back(it->second, rf.first_moment());
    }
  }
  // BFS levels (ball_vertices is level-ordered, but recompute for clarity)
  std::vector<int> lv(g.verts.size(), -1);
  lv[0] = 0;
  std::vector<int> queue{0};
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    const int v = queue[qi];
    for (const auto& [w, k] : g.out[static_cast<std::size_t>(v)]) {
      if (lv[static_cast<std::size_t>(w)] < 0) {
        lv[static_cast<std::size_t>(w)] = lv[static_cast<std::size_t>(v)] + 1;
        queue.push_back(w);
      }
    }
  }
  g.level = lv;
  return g;
}

// Taboo recursion collapsed onto distance classes around the root. Valid
// when the overlay touches at most the root and the query is root-to-root:
// every vertex at the same distance then plays the same role.
std::vector<double> radial_taboo(const RadialMoments& rm, int N) {
  const int d = rm.degree;
  std::vector<double> prev(static_cast<std::size_t>(N) + 2, 0.0);
  std::vector<double> cur(prev.size(), 0.0);
  std::vector<double> coeff(static_cast<std::size_t>(N), 0.0);
  prev[0] = rm.root_loop;
  if (N >= 1) prev[1] = rm.edge;
  coeff[0] = prev[0];
  for (int n = 2; n <= N; ++n) {
    cur[0] = d * rm.root_edge * prev[1];
    cur[1] = rm.loop * prev[1] + (d - 1) * rm.edge * prev[2];
    for (std::size_t j = 2; j + 1 < prev.size(); ++j) {
      cur[j] = rm.loop * prev[j] + rm.edge * prev[j - 1] +
               (d - 1) * rm.edge * prev[j + 1];
    }
    cur.back() = 0.0;
    coeff[static_cast<std::size_t>(n) - 1] = cur[0];
    std::swap(prev, cur);
  }
  return coeff;
}

}  // namespace

std::vector<double> taboo_coefficients(const std::vector<double>& K,
                                       std::size_t n, std::size_t x,
                                       std::size_t y, int N) {
  if (N < 1) throw ConfigError("taboo_coefficients: N must be >= 1");
  std::vector<double> g(n), next(n), coeff(static_cast<std::size_t>(N));
  for (std::size_t w = 0; w < n; ++w) g[w] = K[w * n + y];
  coeff[0] = g[x];
  for (int m = 2; m <= N; ++m) {
    for (std::size_t w = 0; w < n; ++w) {
      double acc = 0.0;
      const double* row = &K[w * n];
      for (std::size_t u = 0; u < n; ++u)
        if (u != y) acc += row[u] * g[u];
      next[w] = acc;
    }
    std::swap(g, next);
    coeff[static_cast<std::size_t>(m) - 1] = g[x];
  }
  return coeff;
}

PhiSeries phi_coefficients(const BrwModel& model, const Vertex& x,
                           const Vertex& y, int N, std::size_t ball_cap) {
  if (N < 1) throw ConfigError("phi_coefficients: N must be >= 1");
  if (!model.valid_vertex(x) || !model.valid_vertex(y))
    throw ConfigError("phi_coefficients: invalid vertex");
  PhiSeries s{x, y, {}};
  if (!model.is_tree()) {
    const std::size_t n = static_cast<std::size_t>(model.graph().n);
    s.coeff = taboo_coefficients(dense_k_matrix(model), n, x.id, y.id, N);
    return s;
  }
  if (x == Vertex::root() && y == Vertex::root()) {
    if (const auto rm = radial_view(model)) {
      s.coeff = radial_taboo(*rm, N);
      return s;
    }
  }
  const BallGraph g = build_ball(model, x, N, ball_cap);
  int y_idx = -1;
  for (std::size_t i = 0; i < g.verts.size(); ++i)
    if (g.verts[i] == y) y_idx = static_cast<int>(i);
  s.coeff.assign(static_cast<std::size_t>(N), 0.0);
  if (y_idx < 0) return s;  // y unreachable within N steps
  std::vector<double> cur(g.verts.size(), 0.0), next(g.verts.size(), 0.0);
  for (std::size_t i = 0; i < g.verts.size(); ++i) {
    if (g.level[i] > N - 1) continue;
    for (const auto& [j, k] : g.out[i])
      if (j == y_idx) cur[i] += k;
  }
  s.coeff[0] = cur[0];
  for (int m = 2; m <= N; ++m) {
    for (std::size_t i = 0; i < g.verts.size(); ++i) {
      if (g.level[i] > N - m) {
        next[i] = 0.0;
        continue;
      }
      double acc = 0.0;
      for (const auto& [j, k] : g.out[i])
        if (j != y_idx) acc += k * cur[static_cast<std::size_t>(j)];
      next[i] = acc;
    }
    std::swap(cur, next);
    s.coeff[static_cast<std::size_t>(m) - 1] = cur[0];
  }
  return s;
}

double phi_eval(const PhiSeries& s, double lambda) {
  double sum = 0.0;
  double p = 1.0;
  for (double c : s.coeff) {
    p *= lambda;
    if (c == 0.0) continue;  // skip: p may have overflowed to inf
    sum += c * p;
    if (!(sum < 1e300)) return kInf;
  }
  return sum;
}

double phi_domain_end(const ScenarioParams& p) {
  const double root = 2.0 * p.k * std::sqrt(static_cast<double>(p.d - 1));
  if (p.name == "homtree" || p.name == "treeloop") return 1.0 / root;
  if (p.name == "agelooptree") return (p.alpha + 1.0) / root;
  if (p.name == "homloops") return (p.alpha + 1.0) / (p.k_star + root);
  throw ConfigError("phi_domain_end: unknown scenario '" + p.name + "'");
}

std::optional<double> phi_closed_tree(const ScenarioParams& p, double lambda) {
  if (lambda < 0.0) throw ConfigError("phi_closed_tree: lambda must be >= 0");
  const double d = static_cast<double>(p.d);
  const double end = phi_domain_end(p);
  if (lambda > end * (1.0 + 1e-12)) return std::nullopt;
  if (p.name == "homtree" || p.name == "treeloop") {
    const auto root =
        clamped_sqrt(1.0 - 4.0 * (d - 1.0) * lambda * lambda * p.k * p.k);
    if (!root) return std::nullopt;
    const double tree = d * (1.0 - *root) / (2.0 * (d - 1.0));
    if (p.name == "homtree") return tree;
    return tree + p.k_oo * lambda;
  }
  if (p.name == "agelooptree") {
    const double gamma = (p.alpha + 1.0) / (p.alpha_o + 1.0);
    const double mu = lambda * p.k / (p.alpha + 1.0);
    const auto root = clamped_sqrt(1.0 - 4.0 * (d - 1.0) * mu * mu);
    if (!root) return std::nullopt;
    return gamma * d * (1.0 - *root) / (2.0 * (d - 1.0)) +
           lambda * p.k_oo / (p.alpha_o + 1.0);
  }
  if (p.name == "homloops") {
    const double gamma = (p.alpha + 1.0) / (p.alpha_o + 1.0);
    const double u = lambda * p.k_star / (p.alpha + 1.0);
    const double c = lambda * p.k / (p.alpha + 1.0);
    const auto root =
        clamped_sqrt((1.0 - u) * (1.0 - u) - 4.0 * (d - 1.0) * c * c);
    if (!root) return std::nullopt;
    return gamma * (d * (1.0 - *root) / (2.0 * (d - 1.0)) +
                    (d - 2.0) * u / (2.0 * (d - 1.0)));
  }
  throw ConfigError("phi_closed_tree: unknown scenario '" + p.name + "'");
}

double lambda_s_from_phi_closed(const ScenarioParams& p) {
  const double end = phi_domain_end(p);
  const auto at_end = phi_closed_tree(p, end);
  if (!at_end) throw NumericError("phi undefined at its own domain end");
  if (*at_end <= 1.0) return end;  // phi never reaches 1: radius is critical
  double lo = 0.0, hi = end;
  for (int it = 0; it < 200 && hi - lo > kRootTol * 1e-2; ++it) {
    const double mid = 0.5 * (lo + hi);
    const auto v = phi_closed_tree(p, mid);
    if (v && *v > 1.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

SeriesBracket lambda_s_series(const BrwModel& model, const Vertex& x, int N,
                              double tol, double lambda_max) {
  if (N < 2) throw ConfigError("lambda_s_series: N must be >= 2");
  const PhiSeries series = phi_coefficients(model, x, x, N);
  SeriesBracket out;
  out.n_root_sequence.resize(series.coeff.size(), 0.0);
  for (std::size_t i = 0; i < series.coeff.size(); ++i) {
    if (series.coeff[i] > 0.0)
      out.n_root_sequence[i] =
          std::exp(std::log(series.coeff[i]) / static_cast<double>(i + 1));
  }

  const auto reaches_one = [&](double lam) { return phi_eval(series, lam) >= 1.0; };
  double hi = 1e-6;
  while (hi < lambda_max && !reaches_one(hi)) hi *= 2.0;
  if (hi >= lambda_max && !reaches_one(hi)) {
    out.open_hi = true;
    out.hi = kInf;
    out.lo = 0.0;
    return out;
  }
  double lo_b = 0.0, hi_b = hi;
  for (int it = 0; it < 200 && hi_b - lo_b > kRootTol; ++it) {
    const double mid = 0.5 * (lo_b + hi_b);
    if (reaches_one(mid)) {
      hi_b = mid;
    } else {
      lo_b = mid;
    }
  }
  out.hi = 0.5 * (lo_b + hi_b);

  // Heuristic lower edge: the largest speed at which the observed tail
  // of phi^(n) lambda^n still shrinks geometrically. Uses the n-th-root
  // form, which is insensitive to parity gaps in the coefficients.
  double tail_root = 0.0;
  bool tail_nonzero = false;
  for (std::size_t i = series.coeff.size() / 2; i < series.coeff.size(); ++i) {
    if (series.coeff[i] > 0.0) {
      tail_nonzero = true;
      tail_root = std::max(tail_root, out.n_root_sequence[i]);
    }
  }
  if (!tail_nonzero) {
    // The series terminates: the partial sum is the whole function.
    out.lo = out.hi;
    out.heuristic_lo = false;
  } else {
    out.lo = std::min(out.hi, (1.0 - tol) / tail_root);
    out.heuristic_lo = true;
  }
  return out;
}

double spectral_radius(const std::vector<double>& K, std::size_t n,
                       double tol) {
  if (n == 0) throw ConfigError("spectral_radius: empty matrix");
  std::vector<double> v(n, 1.0 / static_cast<double>(n)), w(n);
  double rho_shifted = 1.0;
  double prev_change = kInf;
  for (int it = 0; it < 500000; ++it) {
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double acc = v[i];  // shift by identity keeps the iteration aperiodic
      const double* row = &K[i * n];
      for (std::size_t j = 0; j < n; ++j) acc += row[j] * v[j];
      w[i] = acc;
      norm += acc;
    }
    if (norm <= 0.0) return 0.0;
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / norm;
    const double change = std::fabs(norm - rho_shifted);
    rho_shifted = norm;
    // geometric error estimate from the contraction ratio
    const double ratio = prev_change > 0.0 ? change / prev_change : 0.0;
    prev_change = change;
    if (change <= 1e-15 * rho_shifted) break;
    if (change <= tol * rho_shifted && ratio < 1.0 &&
        change * ratio / (1.0 - ratio) <= tol * rho_shifted) {
      break;
    }
  }
  return rho_shifted - 1.0;
}

double lambda_s_spectral(const BrwModel& model, const Vertex& x) {
  if (model.is_tree())
    throw ConfigError("lambda_s_spectral: needs a finite graph");
  if (!model.valid_vertex(x))
    throw ConfigError("lambda_s_spectral: invalid vertex");
  if (!model.graph().is_irreducible())
    throw ConfigError("lambda_s_spectral: graph must be irreducible");
  const std::size_t n = static_cast<std::size_t>(model.graph().n);
  const double rho = spectral_radius(dense_k_matrix(model), n);
  if (rho <= 0.0) return kInf;
  return 1.0 / rho;
}

namespace {

// n-th roots of the row-sum sequence, computed with running rescaling so
// deep powers cannot overflow.
std::vector<double> rowsum_roots(
    const std::function<void(const std::vector<double>&, std::vector<double>&)>& step,
    std::size_t width, double start_of_interest, int N,
    const std::function<double(const std::vector<double>&)>& read) {
  std::vector<double> v(width, 1.0), w(width, 0.0);
  std::vector<double> roots(static_cast<std::size_t>(N), 0.0);
  double log_scale = 0.0;
  (void)start_of_interest;
  for (int m = 1; m <= N; ++m) {
    step(v, w);
    std::swap(v, w);
    const double s = read(v);
    if (s > 0.0)
      roots[static_cast<std::size_t>(m) - 1] =
          std::exp((std::log(s) + log_scale) / static_cast<double>(m));
    double mx = 0.0;
    for (double t : v) mx = std::max(mx, t);
    if (mx > 1e200) {
      for (double& t : v) t /= mx;
      log_scale += std::log(mx);
    }
  }
  return roots;
}

}  // namespace

RowSumBound lambda_w_bound(const BrwModel& model, const Vertex& x, int N,
                           std::size_t ball_cap) {
  if (N < 1) throw ConfigError("lambda_w_bound: N must be >= 1");
  if (!model.valid_vertex(x)) throw ConfigError("lambda_w_bound: invalid vertex");
  RowSumBound out;

  if (!model.is_tree()) {
    const std::size_t n = static_cast<std::size_t>(model.graph().n);
    const auto K = dense_k_matrix(model);
    out.sequence = rowsum_roots(
        [&](const std::vector<double>& v, std::vector<double>& w) {
          for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += K[i * n + j] * v[j];
            w[i] = acc;
          }
        },
        n, 0, N, [&](const std::vector<double>& v) { return v[x.id]; });
  } else if (x == Vertex::root() && radial_view(model)) {
    const RadialMoments rm = *radial_view(model);
    const double d = static_cast<double>(rm.degree);
    const std::size_t width = static_cast<std::size_t>(N) + 2;
    out.sequence = rowsum_roots(
        [&, m = 0](const std::vector<double>& v, std::vector<double>& w) mutable {
          ++m;
          std::fill(w.begin(), w.end(), 0.0);
          const std::size_t valid = width - static_cast<std::size_t>(m);
          w[0] = rm.root_loop * v[0] + d * rm.root_edge * v[1];
          if (valid >= 2)
            w[1] = rm.loop * v[1] + rm.edge * v[0] + (d - 1.0) * rm.edge * v[2];
          for (std::size_t j = 2; j < valid && j + 1 < width; ++j)
            w[j] = rm.loop * v[j] + rm.edge * v[j - 1] +
                   (d - 1.0) * rm.edge * v[j + 1];
        },
        width, 0, N, [](const std::vector<double>& v) { return v[0]; });
  } else {
    const BallGraph g = build_ball(model, x, N, ball_cap);
    const std::size_t n = g.verts.size();
    out.sequence = rowsum_roots(
        [&, m = 0](const std::vector<double>& v, std::vector<double>& w) mutable {
          ++m;
          for (std::size_t i = 0; i < n; ++i) {
            if (g.level[i] > N - m) {
              w[i] = 0.0;
              continue;
            }
            double acc = 0.0;
            for (const auto& [j, k] : g.out[i])
              acc += k * v[static_cast<std::size_t>(j)];
            w[i] = acc;
          }
        },
        n, 0, N, [](const std::vector<double>& v) { return v[0]; });
  }

  double tail_max = 0.0;
  for (std::size_t i = out.sequence.size() / 2; i < out.sequence.size(); ++i)
    tail_max = std::max(tail_max, out.sequence[i]);
  out.lo = tail_max > 0.0 ? 1.0 / tail_max : kInf;
  return out;
}

double CriticalValue::lo_eff() const {
  if (value) return *value;
  return lo.value_or(-kInf);
}

double CriticalValue::hi_eff() const {
  if (value) return *value;
  return hi.value_or(kInf);
}

TreeloopThresholds treeloop_thresholds(int d, double k) {
  const double dd = static_cast<double>(d);
  return {k * (dd - 2.0) / std::sqrt(dd - 1.0),
          k * dd * (dd - 2.0) / (dd - 1.0)};
}

AgeLoopThresholds agelooptree_thresholds(int d, double k, double alpha,
                                         double alpha_o) {
  const double dd = static_cast<double>(d);
  const double beta = (alpha_o + 1.0) / (alpha + 1.0);
  // k1: where phi at the unmodified local critical speed reaches 1.
  // k2: where phi at the unmodified global critical speed reaches 1;
  // at alpha_o = alpha it reduces to the constant-rate merge threshold
  // k d (d-2)/(d-1).
  const double k1 = (beta - dd / (2.0 * (dd - 1.0))) * 2.0 * k * std::sqrt(dd - 1.0);
  const double k2 = k * dd * (beta - 1.0 / (dd - 1.0));
  return {k1, k2};
}

CriticalReport closed_form_critical(const ScenarioParams& p) {
  (void)make_scenario(p);  // validates parameters
  const double d = static_cast<double>(p.d);
  CriticalReport r;
  r.scenario = p;
  if (p.name == "homtree") {
    r.lambda_w = {1.0 / (p.k * d), std::nullopt, std::nullopt, "closed_form"};
    r.lambda_s = {1.0 / (2.0 * p.k * std::sqrt(d - 1.0)), std::nullopt,
                  std::nullopt, "closed_form"};
    return r;
  }
  if (p.name == "treeloop") {
    const auto th = treeloop_thresholds(p.d, p.k);
    double ls;
    if (p.k_oo <= th.local_onset) {
      ls = 1.0 / (2.0 * p.k * std::sqrt(d - 1.0));
    } else {
      ls = ((d - 2.0) * p.k_oo +
            d * std::sqrt(p.k_oo * p.k_oo + 4.0 * p.k * p.k)) /
           (2.0 * (d * d * p.k * p.k + (d - 1.0) * p.k_oo * p.k_oo));
    }
    const double lw_base = 1.0 / (p.k * d);
    r.lambda_s = {ls, std::nullopt, std::nullopt, "closed_form"};
    r.lambda_w = {std::min(ls, lw_base), std::nullopt, std::nullopt,
                  "closed_form"};
    return r;
  }
  if (p.name == "agelooptree" || p.name == "homloops") {
    const double lw_base =
        p.name == "agelooptree"
            ? (p.alpha + 1.0) / (p.k * d)
            : (p.alpha + 1.0) / (p.k * d + p.k_star);
    const double ls = lambda_s_from_phi_closed(p);
    r.lambda_s = {ls, std::nullopt, std::nullopt, "closed_form"};
    r.lambda_w = {std::min(ls, lw_base), std::nullopt, std::nullopt,
                  "closed_form"};
    return r;
  }
  throw ConfigError("closed_form_critical: unknown scenario '" + p.name + "'");
}

std::string phase_name(Phase p) {
  switch (p) {
    case Phase::globally_subcritical: return "globally_subcritical";
    case Phase::pure_global: return "pure_global";
    case Phase::locally_supercritical: return "locally_supercritical";
    case Phase::at_boundary: return "at_boundary";
  }
  return "?";
}

Phase classify_phase(double lambda, const CriticalReport& report, double tol) {
  const double w_lo = report.lambda_w.lo_eff();
  const double w_hi = report.lambda_w.hi_eff();
  const double s_lo = report.lambda_s.lo_eff();
  const double s_hi = report.lambda_s.hi_eff();
  if (lambda < w_lo - tol) return Phase::globally_subcritical;
  if (lambda > s_hi + tol) return Phase::locally_supercritical;
  if (lambda > w_hi + tol && lambda < s_lo - tol) return Phase::pure_global;
  return Phase::at_boundary;
}

namespace {

MaximalityRelation relation(std::string name, RelationStatus st,
                            std::string detail) {
  return {std::move(name), st, std::move(detail)};
}

}  // namespace

std::vector<MaximalityRelation> maximality_check(const CriticalReport& base,
                                                 const CriticalReport& modified,
                                                 double tol) {
  std::vector<MaximalityRelation> out;
  const auto na = [&](const char* name, const char* why) {
    out.push_back(relation(name, RelationStatus::not_applicable, why));
  };
  if (!base.lambda_w.value || !base.lambda_s.value || !modified.lambda_w.value ||
      !modified.lambda_s.value) {
    na("global_cannot_increase", "point estimates required");
    na("pure_phase_pins_global", "point estimates required");
    na("merge_or_pin", "point estimates required");
    return out;
  }
  const double lw = *base.lambda_w.value;
  const double ls = *base.lambda_s.value;
  const double lws = *modified.lambda_w.value;
  const double lss = *modified.lambda_s.value;
  if (!(lw < ls - tol)) {
    na("global_cannot_increase", "base has no pure global survival phase");
    na("pure_phase_pins_global", "base has no pure global survival phase");
    na("merge_or_pin", "base has no pure global survival phase");
    return out;
  }

  out.push_back(relation(
      "global_cannot_increase",
      lws <= lw + tol ? RelationStatus::holds : RelationStatus::violated,
      "lambda_w* <= lambda_w"));

  if (lws < lss - tol) {
    out.push_back(relation("pure_phase_pins_global",
                           std::fabs(lws - lw) <= tol ? RelationStatus::holds
                                                      : RelationStatus::violated,
                           "lambda_w* < lambda_s* forces lambda_w* = lambda_w"));
  } else {
    out.push_back(relation("pure_phase_pins_global",
                           RelationStatus::not_applicable,
                           "modification has no pure global survival phase"));
  }

  if (lss <= lw - tol) {
    out.push_back(relation(
        "merge_or_pin",
        std::fabs(lws - lss) <= tol ? RelationStatus::holds
                                    : RelationStatus::violated,
        "lambda_s* <= lambda_w forces lambda_w* = lambda_s*"));
  } else if (lss > lw + tol) {
    out.push_back(relation(
        "merge_or_pin",
        (std::fabs(lws - lw) <= tol && lss > lws + tol / 2.0)
            ? RelationStatus::holds
            : RelationStatus::violated,
        "lambda_s* > lambda_w forces lambda_w* = lambda_w < lambda_s*"));
  } else {
    out.push_back(relation("merge_or_pin", RelationStatus::not_applicable,
                           "lambda_s* within tolerance of lambda_w"));
  }
  return out;
}

void to_json(nlohmann::json& j, const CriticalValue& v) {
  j = nlohmann::json::object();
  if (v.value) j["value"] = *v.value;
  if (v.lo) j["lo"] = *v.lo;
  if (v.hi) j["hi"] = std::isfinite(*v.hi) ? nlohmann::json(*v.hi)
                                           : nlohmann::json("inf");
  j["method"] = v.method;
}

void to_json(nlohmann::json& j, const CriticalReport& r) {
  j = nlohmann::json{{"lambda_s", r.lambda_s}, {"lambda_w", r.lambda_w}};
  if (!r.n_root_sequence.empty()) j["n_root_sequence"] = r.n_root_sequence;
  if (r.scenario) {
    j["scenario"] = r.scenario->name;
    j["params"] = {{"d", r.scenario->d},       {"k", r.scenario->k},
                   {"k_oo", r.scenario->k_oo}, {"k_star", r.scenario->k_star},
                   {"alpha", r.scenario->alpha}, {"alpha_o", r.scenario->alpha_o},
                   {"lambda", r.scenario->lambda}};
  }
}

void to_json(nlohmann::json& j, const MaximalityRelation& r) {
  const char* st = r.status == RelationStatus::holds      ? "holds"
                   : r.status == RelationStatus::violated ? "violated"
                                                          : "not_applicable";
  j = nlohmann::json{{"name", r.name}, {"status", st}, {"detail", r.detail}};
}

}  // namespace brw
