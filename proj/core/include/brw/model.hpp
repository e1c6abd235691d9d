#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "brw/rates.hpp"
#include "brw/vertex.hpp"

namespace brw {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Homogeneous tree of degree d >= 3; vertices are reduced path words.
struct TreeSpace {
  int degree = 3;
};

// Finite directed graph on {0..n-1}. Self-pairs are rejected: loops come
// from the rate family, not the edge list.
struct GraphSpace {
  int n = 0;
  std::vector<std::pair<int, int>> edges;

  std::vector<std::vector<int>> out_adjacency() const;
  bool is_irreducible() const;  // strongly connected
};

using SpaceSpec = std::variant<TreeSpace, GraphSpace>;

bool same_space(const SpaceSpec& a, const SpaceSpec& b);

// Rates attached to one source vertex: one profile shared by all of its
// out-edges, plus an optional self-loop profile.
struct VertexRates {
  RateFunction edge = RateFunction::zero();
  std::optional<RateFunction> loop;

  friend bool operator==(const VertexRates&, const VertexRates&) = default;
};

// Base rates applied everywhere plus a finite per-source-vertex overlay.
struct RateFamily {
  VertexRates base;
  std::map<Vertex, VertexRates> overrides;

  const VertexRates& at(const Vertex& x) const;
};

struct BrwModel {
  SpaceSpec space;
  RateFamily rates;
  double lambda = 1.0;  // speed knob; > 0

  void validate() const;
  bool is_tree() const { return std::holds_alternative<TreeSpace>(space); }
  const TreeSpace& tree() const { return std::get<TreeSpace>(space); }
  const GraphSpace& graph() const { return std::get<GraphSpace>(space); }

  bool valid_vertex(const Vertex& x) const;

  // Profile governing births an x-individual sends to y. Zero profile
  // for non-adjacent, non-loop pairs.
  RateFunction rate_of(const Vertex& x, const Vertex& y) const;

  // All y with a nonzero profile from x, loop included.
  std::vector<std::pair<Vertex, RateFunction>> neighbors(const Vertex& x) const;

  // Speed-free expected offspring x -> y over a full lifetime.
  double k_of(const Vertex& x, const Vertex& y) const {
    return rate_of(x, y).first_moment();
  }

  // With the speed factor applied: lambda * k_of.
  double m_of(const Vertex& x, const Vertex& y) const {
    return lambda * k_of(x, y);
  }
};

// Two models on the same space differ on at most finitely many source
// vertices exactly when their base families agree (overlays are finite
// by construction). Throws on mismatched spaces.
bool is_local_modification(const BrwModel& a, const BrwModel& b);

// Dense restriction of the first-moment matrix to the ball of given
// radius around a center. verts[0] is the center; entries are
// lambda * k unless built speed-free.
struct MomentMatrix {
  std::vector<Vertex> verts;
  std::vector<double> m;  // row-major, size() x size()

  std::size_t size() const { return verts.size(); }
  double at(std::size_t i, std::size_t j) const { return m[i * size() + j]; }
  std::optional<std::size_t> index_of(const Vertex& v) const;
  double row_sum(std::size_t i) const;
};

// Dense storage is quadratic in the ball size, so the default cap is small.
inline constexpr std::size_t kDefaultDenseBallCap = 4096;
// Sparse traversals (taboo-path recursions on explicit balls) scale linearly.
inline constexpr std::size_t kDefaultSparseBallCap = 2'000'000;

// Breadth-first ball enumeration; deterministic order, result[0] = center.
// Throws when the ball exceeds the vertex cap.
std::vector<Vertex> ball_vertices(const BrwModel& model, const Vertex& center,
                                  int radius, std::size_t cap);

MomentMatrix moment_matrix_ball(const BrwModel& model, const Vertex& center,
                                int radius,
                                std::size_t vertex_cap = kDefaultDenseBallCap,
                                bool speed_free = false);

// Speed-free moments of a tree model whose overlay touches at most the
// root: everything a distance-from-root recursion needs. The collapsed
// view is what makes deep tree computations tractable.
struct RadialMoments {
  int degree = 0;
  double edge = 0.0;       // k of any non-root source edge
  double loop = 0.0;       // k of any non-root loop
  double root_edge = 0.0;  // k of a root edge
  double root_loop = 0.0;  // k of the root loop
};

std::optional<RadialMoments> radial_view(const BrwModel& model);

// Named model builders used by configs and sweeps.
struct ScenarioParams {
  std::string name;  // homtree | treeloop | agelooptree | homloops
  int d = 3;
  double k = 1.0;
  double k_oo = 0.0;    // treeloop / agelooptree root loop strength
  double k_star = 0.0;  // homloops loop strength at every site
  double alpha = 0.0;
  double alpha_o = 0.0;
  double lambda = 1.0;
};

BrwModel make_homtree(int d, double k, double lambda);
BrwModel make_treeloop(int d, double k, double k_oo, double lambda);
BrwModel make_agelooptree(int d, double k, double k_oo, double alpha,
                          double alpha_o, double lambda);
BrwModel make_homloops(int d, double k, double k_star, double alpha,
                       double alpha_o, double lambda);
BrwModel make_scenario(const ScenarioParams& p);

// The transitive model the scenario locally modifies (shared base family).
BrwModel scenario_base_model(const ScenarioParams& p);

BrwModel model_from_json(const nlohmann::json& j);
std::optional<ScenarioParams> scenario_from_json(const nlohmann::json& j);
void to_json(nlohmann::json& j, const BrwModel& m);

}  // namespace brw
