#include <doctest.h>

#include <cmath>
#include <nlohmann/json.hpp>

#include "brw/model.hpp"

using brw::BrwModel;
using brw::RateFunction;
using brw::Vertex;

namespace {

Vertex v(const std::string& s) { return Vertex::parse(s); }

}  // namespace

TEST_CASE("vertex addressing") {
  CHECK(Vertex::root().str() == "o");
  CHECK(v("o/2/0").word == std::vector<std::uint8_t>{2, 0});
  CHECK(v("o/2/0").str() == "o/2/0");
  CHECK(v("5") == Vertex::finite(5));
  CHECK(brw::tree_distance(v("o/1/0"), v("o/1")) == 1);
  CHECK(brw::tree_distance(v("o/1/0"), v("o/2")) == 3);
  CHECK_THROWS(Vertex::parse(""));
}

TEST_CASE("rate_of reproduces the modified-tree case split") {
  const auto m = brw::make_agelooptree(4, 1.0, 2.0, 1.5, 0.2, 0.3);
  CHECK(m.rate_of(v("o"), v("o")) == RateFunction::exp_decay(2.0, 0.2));
  CHECK(m.rate_of(v("o"), v("o/1")) == RateFunction::exp_decay(1.0, 0.2));
  CHECK(m.rate_of(v("o/1"), v("o/1/0")) == RateFunction::exp_decay(1.0, 1.5));
  CHECK(m.rate_of(v("o/1"), v("o")) == RateFunction::exp_decay(1.0, 1.5));
  CHECK(m.rate_of(v("o/1"), v("o/1")).is_zero());      // no loop off the root
  CHECK(m.rate_of(v("o"), v("o/1/0")).is_zero());      // not adjacent
  CHECK_THROWS_AS(m.rate_of(v("o/9"), v("o")), brw::ConfigError);

  const auto hl = brw::make_homloops(4, 1.0, 2.0, 1.0, 0.5, 0.3);
  CHECK(hl.rate_of(v("o"), v("o")) == RateFunction::exp_decay(2.0, 0.5));
  CHECK(hl.rate_of(v("o/1"), v("o/1")) == RateFunction::exp_decay(2.0, 1.0));
}

TEST_CASE("neighbors") {
  CHECK(brw::make_homtree(4, 1.0, 1.0).neighbors(v("o")).size() == 4);
  CHECK(brw::make_homtree(4, 1.0, 1.0).neighbors(v("o/0")).size() == 4);
  CHECK(brw::make_homloops(4, 1.0, 1.0, 1.0, 1.0, 1.0).neighbors(v("o/2")).size() == 5);

  BrwModel single{brw::GraphSpace{1, {}},
                  {{RateFunction::zero(), RateFunction::constant(2.0)}, {}},
                  1.0};
  CHECK(single.neighbors(Vertex::finite(0)).size() == 1);
}

TEST_CASE("moment_matrix_ball") {
  const auto homtree = brw::make_homtree(3, 1.0, 1.0);
  const auto mm = brw::moment_matrix_ball(homtree, v("o"), 1);
  REQUIRE(mm.size() == 4);
  CHECK(mm.at(0, 0) == 0.0);
  for (std::size_t j = 1; j < 4; ++j) {
    CHECK(mm.at(0, j) == 1.0);
    CHECK(mm.at(j, 0) == 1.0);
    CHECK(mm.at(j, j) == 0.0);
  }

  const auto ageing = brw::make_agelooptree(4, 1.0, 0.0, 1.5, 1.5, 1.0);
  const auto mm0 = brw::moment_matrix_ball(ageing, v("o"), 0);
  REQUIRE(mm0.size() == 1);
  CHECK(mm0.at(0, 0) == 0.0);

  const auto treeloop = brw::make_treeloop(3, 1.0, 2.0, 1.0);
  const auto mm1 = brw::moment_matrix_ball(treeloop, v("o"), 1);
  CHECK(mm1.at(0, 0) == 2.0);
  CHECK(mm1.at(0, 1) == 1.0);

  // speed factor scales entries
  const auto fast = brw::make_treeloop(3, 1.0, 2.0, 0.5);
  CHECK(brw::moment_matrix_ball(fast, v("o"), 1).at(0, 0) == 1.0);
  CHECK(brw::moment_matrix_ball(fast, v("o"), 1, 64, true).at(0, 0) == 2.0);

  CHECK_THROWS_AS(brw::moment_matrix_ball(homtree, v("o"), 10, 16),
                  brw::ConfigError);
}

TEST_CASE("ball matrix is invariant under child permutations away from the root") {
  const auto m = brw::make_treeloop(3, 1.0, 2.0, 1.0);
  const auto mm = brw::moment_matrix_ball(m, v("o"), 3);
  // swap the two subtrees below o/0: words o/0/0... <-> o/0/1...
  const auto sigma = [&](const Vertex& x) {
    Vertex y = x;
    if (y.word.size() >= 2 && y.word[0] == 0) y.word[1] ^= 1;
    return y;
  };
  for (std::size_t i = 0; i < mm.size(); ++i) {
    for (std::size_t j = 0; j < mm.size(); ++j) {
      const auto si = mm.index_of(sigma(mm.verts[i]));
      const auto sj = mm.index_of(sigma(mm.verts[j]));
      REQUIRE(si);
      REQUIRE(sj);
      CHECK(mm.at(i, j) == mm.at(*si, *sj));
    }
  }
}

TEST_CASE("row sums stay bounded") {
  const auto m = brw::make_homloops(4, 2.0, 3.0, 0.5, 0.2, 1.7);
  const auto mm = brw::moment_matrix_ball(m, v("o"), 3);
  const double bound = m.lambda * (4 * 2.0 + 3.0) / (0.2 + 1.0) + 1e-12;
  for (std::size_t i = 0; i < mm.size(); ++i) CHECK(mm.row_sum(i) <= bound);
}

TEST_CASE("is_local_modification") {
  const auto modified = brw::make_agelooptree(4, 1.0, 2.0, 1.5, 0.2, 0.3);
  const auto base = brw::scenario_base_model(
      brw::ScenarioParams{"agelooptree", 4, 1.0, 2.0, 0.0, 1.5, 0.2, 0.3});
  CHECK(brw::is_local_modification(base, modified));
  CHECK(brw::is_local_modification(modified, modified));

  const auto other_alpha = brw::make_agelooptree(4, 1.0, 2.0, 0.9, 0.2, 0.3);
  CHECK_FALSE(brw::is_local_modification(base, other_alpha));

  const auto d5 = brw::make_homtree(5, 1.0, 0.3);
  CHECK_THROWS_AS(brw::is_local_modification(d5, modified), brw::ConfigError);
}

TEST_CASE("graph space") {
  brw::GraphSpace cycle{3, {{0, 1}, {1, 2}, {2, 0}}};
  CHECK(cycle.is_irreducible());
  brw::GraphSpace split{4, {{0, 1}, {1, 0}, {2, 3}, {3, 2}}};
  CHECK_FALSE(split.is_irreducible());

  BrwModel bad{brw::GraphSpace{2, {{0, 0}}},
               {{RateFunction::constant(1.0), {}}, {}},
               1.0};
  CHECK_THROWS_AS(bad.validate(), brw::ConfigError);
}

TEST_CASE("radial view") {
  const auto m = brw::make_homloops(4, 1.0, 2.0, 1.0, 0.5, 0.3);
  const auto rm = brw::radial_view(m);
  REQUIRE(rm);
  CHECK(rm->edge == doctest::Approx(0.5));
  CHECK(rm->loop == doctest::Approx(1.0));
  CHECK(rm->root_edge == doctest::Approx(1.0 / 1.5));
  CHECK(rm->root_loop == doctest::Approx(2.0 / 1.5));

  BrwModel off = m;
  off.rates.overrides[v("o/1")] = off.rates.base;
  CHECK_FALSE(brw::radial_view(off));
}

TEST_CASE("json model schema") {
  const auto j = nlohmann::json::parse(R"({
    "space": {"tree": {"d": 4}},
    "base": {"edge": {"type": "exp_decay", "k": 1.0, "alpha": 1.5}, "loop": null},
    "overrides": [{"vertex": "o",
                   "edge": {"type": "exp_decay", "k": 1.0, "alpha": 0.2},
                   "loop": {"type": "exp_decay", "k": 2.0, "alpha": 0.2}}],
    "lambda": 0.3
  })");
  const auto m = brw::model_from_json(j);
  const auto reference = brw::make_agelooptree(4, 1.0, 2.0, 1.5, 0.2, 0.3);
  CHECK(nlohmann::json(m) == nlohmann::json(reference));

  const auto scen = nlohmann::json::parse(
      R"({"scenario":"agelooptree","d":4,"k":1,"k_oo":2,"alpha":1.5,"alpha_o":0.2,"lambda":0.3})");
  CHECK(nlohmann::json(brw::model_from_json(scen)) == nlohmann::json(reference));

  CHECK_THROWS_AS(
      brw::model_from_json(nlohmann::json::parse(R"({"scenario":"nope"})")),
      brw::ConfigError);
  CHECK_THROWS_AS(brw::make_scenario({"homtree", 2, 1.0}), brw::ConfigError);
}
