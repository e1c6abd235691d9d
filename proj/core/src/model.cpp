#include "brw/model.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace brw {

std::vector<std::vector<int>> GraphSpace::out_adjacency() const {
  std::vector<std::set<int>> adj(static_cast<std::size_t>(n));
  for (const auto& [a, b] : edges) adj[static_cast<std::size_t>(a)].insert(b);
  std::vector<std::vector<int>> out(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < adj.size(); ++i)
    out[i].assign(adj[i].begin(), adj[i].end());
  return out;
}

namespace {

bool all_reachable(const std::vector<std::vector<int>>& adj) {
  if (adj.empty()) return false;
  std::vector<char> seen(adj.size(), 0);
  std::deque<int> q{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!q.empty()) {
    const int v = q.front();
    q.pop_front();
    for (int w : adj[static_cast<std::size_t>(v)]) {
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = 1;
        ++count;
        q.push_back(w);
      }
    }
  }
  return count == adj.size();
}

}  // namespace

bool GraphSpace::is_irreducible() const {
  if (n <= 0) return false;
  const auto fwd = out_adjacency();
  std::vector<std::vector<int>> rev(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < fwd.size(); ++i)
    for (int j : fwd[i]) rev[static_cast<std::size_t>(j)].push_back(static_cast<int>(i));
  return all_reachable(fwd) && all_reachable(rev);
}

bool same_space(const SpaceSpec& a, const SpaceSpec& b) {
  if (a.index() != b.index()) return false;
  if (std::holds_alternative<TreeSpace>(a))
    return std::get<TreeSpace>(a).degree == std::get<TreeSpace>(b).degree;
  const auto& ga = std::get<GraphSpace>(a);
  const auto& gb = std::get<GraphSpace>(b);
  return ga.n == gb.n && ga.out_adjacency() == gb.out_adjacency();
}

const VertexRates& RateFamily::at(const Vertex& x) const {
  const auto it = overrides.find(x);
  return it == overrides.end() ? base : it->second;
}

void BrwModel::validate() const {
  if (!(lambda > 0.0)) throw ConfigError("model: lambda must be > 0");
  if (is_tree()) {
    if (tree().degree < 3) throw ConfigError("model: tree degree must be >= 3");
  } else {
    const auto& g = graph();
    if (g.n < 1) throw ConfigError("model: graph needs at least one vertex");
    for (const auto& [a, b] : g.edges) {
      if (a < 0 || b < 0 || a >= g.n || b >= g.n)
        throw ConfigError("model: edge endpoint out of range");
      if (a == b)
        throw ConfigError("model: self-pairs not allowed in edge list; use a loop rate");
    }
  }
  for (const auto& [v, r] : rates.overrides) {
    if (!valid_vertex(v)) throw ConfigError("model: override at invalid vertex");
    (void)r;
  }
}

bool BrwModel::valid_vertex(const Vertex& x) const {
  if (is_tree()) {
    if (x.kind != VertexKind::tree) return false;
    const int d = tree().degree;
    for (std::size_t i = 0; i < x.word.size(); ++i) {
      const int limit = (i == 0) ? d : d - 1;
      if (x.word[i] >= limit) return false;
    }
    return true;
  }
  return x.kind == VertexKind::finite && static_cast<int>(x.id) < graph().n;
}

namespace {

bool tree_adjacent(const Vertex& x, const Vertex& y) {
  const auto& a = x.word.size() < y.word.size() ? x : y;
  const auto& b = x.word.size() < y.word.size() ? y : x;
  if (b.word.size() != a.word.size() + 1) return false;
  return std::equal(a.word.begin(), a.word.end(), b.word.begin());
}

}  // namespace

RateFunction BrwModel::rate_of(const Vertex& x, const Vertex& y) const {
  if (!valid_vertex(x) || !valid_vertex(y))
    throw ConfigError("model: invalid vertex address");
  const VertexRates& r = rates.at(x);
  if (x == y) return r.loop.value_or(RateFunction::zero());
  bool adjacent = false;
  if (is_tree()) {
    adjacent = tree_adjacent(x, y);
  } else {
    for (const auto& [a, b] : graph().edges) {
      if (a == static_cast<int>(x.id) && b == static_cast<int>(y.id)) {
        adjacent = true;
        break;
      }
    }
  }
  return adjacent ? r.edge : RateFunction::zero();
}

std::vector<std::pair<Vertex, RateFunction>> BrwModel::neighbors(
    const Vertex& x) const {
  if (!valid_vertex(x)) throw ConfigError("model: invalid vertex address");
  const VertexRates& r = rates.at(x);
  std::vector<std::pair<Vertex, RateFunction>> out;
  if (r.loop && !r.loop->is_zero()) out.emplace_back(x, *r.loop);
  if (is_tree()) {
    if (r.edge.is_zero()) return out;
    const int d = tree().degree;
    if (!x.word.empty()) {
      Vertex parent = x;
      parent.word.pop_back();
      out.emplace_back(std::move(parent), r.edge);
    }
    const int nchildren = x.word.empty() ? d : d - 1;
    for (int c = 0; c < nchildren; ++c) {
      Vertex child = x;
      child.word.push_back(static_cast<std::uint8_t>(c));
      out.emplace_back(std::move(child), r.edge);
    }
  } else {
    if (!r.edge.is_zero()) {
      const auto adj = graph().out_adjacency();
      for (int j : adj[x.id])
        out.emplace_back(Vertex::finite(static_cast<std::uint32_t>(j)), r.edge);
    }
  }
  return out;
}

bool is_local_modification(const BrwModel& a, const BrwModel& b) {
  if (!same_space(a.space, b.space))
    throw ConfigError("is_local_modification: models live on different spaces");
  return a.rates.base == b.rates.base;
}

std::optional<std::size_t> MomentMatrix::index_of(const Vertex& v) const {
  const auto it = std::find(verts.begin(), verts.end(), v);
  if (it == verts.end()) return std::nullopt;
  return static_cast<std::size_t>(it - verts.begin());
}

double MomentMatrix::row_sum(std::size_t i) const {
  double s = 0.0;
  for (std::size_t j = 0; j < size(); ++j) s += at(i, j);
  return s;
}

std::vector<Vertex> ball_vertices(const BrwModel& model, const Vertex& center,
                                  int radius, std::size_t cap) {
  std::vector<Vertex> verts{center};
  std::set<Vertex> seen{center};
  std::size_t frontier_begin = 0;
  for (int r = 0; r < radius; ++r) {
    const std::size_t frontier_end = verts.size();
    for (std::size_t i = frontier_begin; i < frontier_end; ++i) {
      for (const auto& [nbr, rf] : model.neighbors(verts[i])) {
        if (nbr == verts[i]) continue;
        if (seen.insert(nbr).second) {
          verts.push_back(nbr);
          if (verts.size() > cap)
            throw ConfigError("ball cap exceeded (" + std::to_string(cap) +
                              " vertices); reduce the radius or raise the cap");
        }
      }
    }
    frontier_begin = frontier_end;
  }
  return verts;
}

MomentMatrix moment_matrix_ball(const BrwModel& model, const Vertex& center,
                                int radius, std::size_t vertex_cap,
                                bool speed_free) {
  if (radius < 0) throw ConfigError("moment_matrix_ball: radius must be >= 0");
  if (!model.valid_vertex(center))
    throw ConfigError("moment_matrix_ball: invalid center");
  MomentMatrix mm;
  mm.verts = ball_vertices(model, center, radius, vertex_cap);
  const std::size_t n = mm.verts.size();
  std::map<Vertex, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) index[mm.verts[i]] = i;
  mm.m.assign(n * n, 0.0);
  const double scale = speed_free ? 1.0 : model.lambda;
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& [nbr, rf] : model.neighbors(mm.verts[i])) {
      const auto it = index.find(nbr);
      if (it != index.end()) mm.m[i * n + it->second] = scale * rf.first_moment();
    }
  }
  return mm;
}

std::optional<RadialMoments> radial_view(const BrwModel& model) {
  if (!model.is_tree()) return std::nullopt;
  const auto& ov = model.rates.overrides;
  if (!ov.empty() && (ov.size() > 1 || ov.begin()->first != Vertex::root()))
    return std::nullopt;
  RadialMoments rm;
  rm.degree = model.tree().degree;
  rm.edge = model.rates.base.edge.first_moment();
  rm.loop = model.rates.base.loop ? model.rates.base.loop->first_moment() : 0.0;
  const VertexRates& root = model.rates.at(Vertex::root());
  rm.root_edge = root.edge.first_moment();
  rm.root_loop = root.loop ? root.loop->first_moment() : 0.0;
  return rm;
}

namespace {

void require_scenario(bool cond, const char* what) {
  if (!cond) throw ConfigError(std::string("scenario: ") + what);
}

}  // namespace

BrwModel make_homtree(int d, double k, double lambda) {
  require_scenario(d >= 3, "homtree needs d >= 3");
  require_scenario(k > 0.0, "homtree needs k > 0");
  BrwModel m{TreeSpace{d}, RateFamily{{RateFunction::constant(k), {}}, {}}, lambda};
  m.validate();
  return m;
}

BrwModel make_treeloop(int d, double k, double k_oo, double lambda) {
  require_scenario(k_oo >= 0.0, "treeloop needs k_oo >= 0");
  BrwModel m = make_homtree(d, k, lambda);
  VertexRates root{RateFunction::constant(k), std::nullopt};
  if (k_oo > 0.0) root.loop = RateFunction::constant(k_oo);
  m.rates.overrides[Vertex::root()] = root;
  return m;
}

BrwModel make_agelooptree(int d, double k, double k_oo, double alpha,
                          double alpha_o, double lambda) {
  require_scenario(d >= 3, "agelooptree needs d >= 3");
  require_scenario(k > 0.0, "agelooptree needs k > 0");
  require_scenario(k_oo >= 0.0, "agelooptree needs k_oo >= 0");
  require_scenario(alpha > 0.0 && alpha_o > 0.0, "agelooptree needs alpha, alpha_o > 0");
  BrwModel m{TreeSpace{d},
             RateFamily{{RateFunction::exp_decay(k, alpha), {}}, {}}, lambda};
  VertexRates root{RateFunction::exp_decay(k, alpha_o), std::nullopt};
  if (k_oo > 0.0) root.loop = RateFunction::exp_decay(k_oo, alpha_o);
  m.rates.overrides[Vertex::root()] = root;
  m.validate();
  return m;
}

BrwModel make_homloops(int d, double k, double k_star, double alpha,
                       double alpha_o, double lambda) {
  require_scenario(d >= 3, "homloops needs d >= 3");
  require_scenario(k > 0.0 && k_star > 0.0, "homloops needs k, k_star > 0");
  require_scenario(alpha > 0.0 && alpha_o > 0.0, "homloops needs alpha, alpha_o > 0");
  BrwModel m{TreeSpace{d},
             RateFamily{{RateFunction::exp_decay(k, alpha),
                         RateFunction::exp_decay(k_star, alpha)},
                        {}},
             lambda};
  m.rates.overrides[Vertex::root()] =
      VertexRates{RateFunction::exp_decay(k, alpha_o),
                  RateFunction::exp_decay(k_star, alpha_o)};
  m.validate();
  return m;
}

BrwModel make_scenario(const ScenarioParams& p) {
  if (p.name == "homtree") return make_homtree(p.d, p.k, p.lambda);
  if (p.name == "treeloop") return make_treeloop(p.d, p.k, p.k_oo, p.lambda);
  if (p.name == "agelooptree")
    return make_agelooptree(p.d, p.k, p.k_oo, p.alpha, p.alpha_o, p.lambda);
  if (p.name == "homloops")
    return make_homloops(p.d, p.k, p.k_star, p.alpha, p.alpha_o, p.lambda);
  throw ConfigError("scenario: unknown name '" + p.name + "'");
}

BrwModel scenario_base_model(const ScenarioParams& p) {
  if (p.name == "homtree") return make_homtree(p.d, p.k, p.lambda);
  if (p.name == "treeloop") return make_homtree(p.d, p.k, p.lambda);
  if (p.name == "agelooptree")
    return BrwModel{TreeSpace{p.d},
                    RateFamily{{RateFunction::exp_decay(p.k, p.alpha), {}}, {}},
                    p.lambda};
  if (p.name == "homloops")
    return BrwModel{TreeSpace{p.d},
                    RateFamily{{RateFunction::exp_decay(p.k, p.alpha),
                                RateFunction::exp_decay(p.k_star, p.alpha)},
                               {}},
                    p.lambda};
  throw ConfigError("scenario: unknown name '" + p.name + "'");
}

std::optional<ScenarioParams> scenario_from_json(const nlohmann::json& j) {
  if (!j.contains("scenario")) return std::nullopt;
  ScenarioParams p;
  p.name = j.at("scenario").get<std::string>();
  p.d = j.value("d", 3);
  p.k = j.value("k", 1.0);
  p.k_oo = j.value("k_oo", 0.0);
  p.k_star = j.value("k_star", 0.0);
  p.alpha = j.value("alpha", 0.0);
  p.alpha_o = j.value("alpha_o", p.alpha);
  p.lambda = j.value("lambda", 1.0);
  return p;
}

BrwModel model_from_json(const nlohmann::json& j) {
  if (const auto sp = scenario_from_json(j)) return make_scenario(*sp);
  BrwModel m;
  const auto& s = j.at("space");
  if (s.contains("tree")) {
    m.space = TreeSpace{s.at("tree").at("d").get<int>()};
  } else if (s.contains("graph")) {
    GraphSpace g;
    g.n = s.at("graph").at("n").get<int>();
    for (const auto& e : s.at("graph").at("edges"))
      g.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    m.space = g;
  } else {
    throw ConfigError("model: space must be tree or graph");
  }
  const auto& base = j.at("base");
  m.rates.base.edge = base.at("edge").get<RateFunction>();
  if (base.contains("loop") && !base.at("loop").is_null())
    m.rates.base.loop = base.at("loop").get<RateFunction>();
  if (j.contains("overrides")) {
    for (const auto& o : j.at("overrides")) {
      const Vertex v = Vertex::parse(o.at("vertex").get<std::string>());
      VertexRates r;
      r.edge = o.contains("edge") ? o.at("edge").get<RateFunction>()
                                  : m.rates.base.edge;
      if (o.contains("loop") && !o.at("loop").is_null())
        r.loop = o.at("loop").get<RateFunction>();
      m.rates.overrides[v] = r;
    }
  }
  m.lambda = j.at("lambda").get<double>();
  m.validate();
  return m;
}

void to_json(nlohmann::json& j, const BrwModel& m) {
  nlohmann::json space;
  if (m.is_tree()) {
    space = {{"tree", {{"d", m.tree().degree}}}};
  } else {
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& [a, b] : m.graph().edges) edges.push_back({a, b});
    space = {{"graph", {{"n", m.graph().n}, {"edges", edges}}}};
  }
  nlohmann::json base{{"edge", m.rates.base.edge}};
  base["loop"] = m.rates.base.loop ? nlohmann::json(*m.rates.base.loop)
                                   : nlohmann::json(nullptr);
  nlohmann::json overrides = nlohmann::json::array();
  for (const auto& [v, r] : m.rates.overrides) {
    nlohmann::json o{{"vertex", v.str()}, {"edge", r.edge}};
    o["loop"] = r.loop ? nlohmann::json(*r.loop) : nlohmann::json(nullptr);
    overrides.push_back(o);
  }
  j = nlohmann::json{{"space", space},
                     {"base", base},
                     {"overrides", overrides},
                     {"lambda", m.lambda}};
}

}  // namespace brw
