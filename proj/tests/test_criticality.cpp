#include <doctest.h>

#include <cmath>
#include <vector>

#include "brw/criticality.hpp"
#include "brw/model.hpp"
#include "brw/rng.hpp"

using brw::BrwModel;
using brw::RateFunction;
using brw::ScenarioParams;
using brw::Vertex;

namespace {

Vertex rt() { return Vertex::root(); }

BrwModel single_loop(double k) {
  return BrwModel{brw::GraphSpace{1, {}},
                  {{RateFunction::zero(), RateFunction::constant(k)}, {}},
                  1.0};
}

// Exhaustive taboo-path oracle: sum of weight products over all length-n
// paths x -> y whose intermediate vertices avoid y.
double enumerate_taboo(const std::vector<double>& K, std::size_t n,
                       std::size_t x, std::size_t y, int len) {
  if (len == 1) return K[x * n + y];
  double acc = 0.0;
  for (std::size_t w = 0; w < n; ++w) {
    if (w == y || K[x * n + w] == 0.0) continue;
    acc += K[x * n + w] * enumerate_taboo(K, n, w, y, len - 1);
  }
  return acc;
}

}  // namespace

TEST_CASE("taboo coefficients on trees") {
  const auto homtree3 = brw::make_homtree(3, 1.0, 1.0);
  const auto s = brw::phi_coefficients(homtree3, rt(), rt(), 9);
  for (int n = 1; n <= 9; n += 2) CHECK(s.coeff[n - 1] == 0.0);  // no odd returns
  CHECK(s.coeff[1] == 3.0);
  CHECK(s.coeff[3] == 6.0);
  CHECK(s.coeff[5] == 24.0);  // d (d-1)^2 Catalan(2)

  const auto loop = brw::phi_coefficients(single_loop(2.0), Vertex::finite(0),
                                          Vertex::finite(0), 6);
  CHECK(loop.coeff[0] == 2.0);
  for (int n = 2; n <= 6; ++n) CHECK(loop.coeff[n - 1] == 0.0);
}

TEST_CASE("radial recursion agrees with the explicit ball") {
  // a no-op override away from the root forces the explicit-ball path
  const auto m = brw::make_treeloop(3, 1.0, 2.0, 1.0);
  const auto radial = brw::phi_coefficients(m, rt(), rt(), 10);
  BrwModel shifted = m;
  shifted.rates.overrides[Vertex::parse("o/0/0/0/0/0/0/0/0/0/0/0")] =
      shifted.rates.base;
  const auto ball = brw::phi_coefficients(shifted, rt(), rt(), 10);
  for (int n = 0; n < 10; ++n)
    CHECK(radial.coeff[n] == doctest::Approx(ball.coeff[n]).epsilon(1e-13));
}

TEST_CASE("recursion equals exhaustive enumeration on random digraphs") {
  brw::Rng rng(2025);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 2 + rng.next() % 5;  // up to 6 vertices
    std::vector<double> K(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (rng.uniform() < 0.6)
          K[i * n + j] = static_cast<double>(1 + rng.next() % 32) / 16.0;
    const std::size_t x = rng.next() % n, y = rng.next() % n;
    const auto coeff = brw::taboo_coefficients(K, n, x, y, 6);
    for (int len = 1; len <= 6; ++len)
      CHECK(coeff[len - 1] == enumerate_taboo(K, n, x, y, len));  // exact
  }
}

TEST_CASE("phi_eval") {
  const auto s =
      brw::phi_coefficients(brw::make_homtree(3, 1.0, 1.0), rt(), rt(), 200);
  CHECK(brw::phi_eval(s, 0.0) == 0.0);
  CHECK(brw::phi_eval(s, 0.2) ==
        doctest::Approx(0.13153415615735092).epsilon(1e-9));
  double prev = 0.0;
  for (int N = 1; N <= 200; N += 10) {
    brw::PhiSeries head{s.x, s.y, {s.coeff.begin(), s.coeff.begin() + N}};
    const double val = brw::phi_eval(head, 0.3);
    CHECK(val >= prev);
    prev = val;
  }
}

TEST_CASE("closed-form phi") {
  const ScenarioParams homtree4{"homtree", 4, 1.0};
  const double end4 = brw::phi_domain_end(homtree4);
  CHECK(end4 == doctest::Approx(0.28867513459481289).epsilon(1e-15));
  CHECK(*brw::phi_closed_tree(homtree4, end4) == doctest::Approx(2.0 / 3.0));
  CHECK_FALSE(brw::phi_closed_tree(homtree4, end4 * 1.01));

  // trivial root loop + equal decay collapses to the plain tree at a
  // rescaled speed
  const ScenarioParams aged{"agelooptree", 4, 1.0, 0.0, 0.0, 1.5, 1.5, 1.0};
  const ScenarioParams plain{"homtree", 4, 1.0};
  for (double lam : {0.1, 0.3, 0.5, 0.7}) {
    const auto a = brw::phi_closed_tree(aged, lam);
    const auto b = brw::phi_closed_tree(plain, lam / 2.5);
    REQUIRE(a);
    REQUIRE(b);
    CHECK(*a == doctest::Approx(*b).epsilon(1e-14));
  }

  const ScenarioParams homloops{"homloops", 4, 1.0, 0.0, 1.0, 1.0, 1.0, 1.0};
  CHECK(brw::lambda_s_from_phi_closed(homloops) ==
        doctest::Approx(0.44801847547959174).epsilon(1e-12));
}

TEST_CASE("series bracket for the local critical speed") {
  const auto b = brw::lambda_s_series(single_loop(2.0), Vertex::finite(0), 8);
  CHECK(b.hi == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(b.lo == b.hi);  // terminating series: the bracket closes
  CHECK_FALSE(b.heuristic_lo);

  const auto homtree4 = brw::make_homtree(4, 1.0, 1.0);
  const double ls = 0.28867513459481289;
  const auto b4 = brw::lambda_s_series(homtree4, rt(), 200);
  CHECK(b4.hi >= ls - 1e-12);  // truncation underestimates phi
  CHECK(b4.hi <= 1.10 * ls);   // the root closes in slowly from above
  CHECK(b4.lo <= b4.hi);
  CHECK(b4.heuristic_lo);
  CHECK(b4.n_root_sequence.size() == 200);

  const ScenarioParams hl{"homloops", 4, 1.0, 0.0, 1.0, 1.0, 1.0, 1.0};
  const auto bs = brw::lambda_s_series(brw::make_scenario(hl), rt(), 300);
  const double closed = brw::lambda_s_from_phi_closed(hl);
  CHECK(bs.hi >= closed - 1e-10);
  CHECK(bs.hi - closed <= 0.1 * closed);
}

TEST_CASE("spectral route on finite graphs") {
  CHECK(brw::lambda_s_spectral(single_loop(2.0), Vertex::finite(0)) ==
        doctest::Approx(0.5).epsilon(1e-10));

  BrwModel k3{brw::GraphSpace{3, {{0, 1}, {1, 0}, {0, 2}, {2, 0}, {1, 2}, {2, 1}}},
              {{RateFunction::constant(1.0), {}}, {}},
              1.0};
  CHECK(brw::lambda_s_spectral(k3, Vertex::finite(0)) ==
        doctest::Approx(0.5).epsilon(1e-10));  // adjacency spectrum {2,-1,-1}

  BrwModel two_cycle{brw::GraphSpace{2, {{0, 1}, {1, 0}}},
                     {{RateFunction::constant(1.0), {}}, {}},
                     1.0};
  CHECK(brw::lambda_s_spectral(two_cycle, Vertex::finite(0)) ==
        doctest::Approx(1.0).epsilon(1e-10));

  BrwModel reducible{brw::GraphSpace{2, {{0, 1}}},
                     {{RateFunction::constant(1.0), {}}, {}},
                     1.0};
  CHECK_THROWS_AS(brw::lambda_s_spectral(reducible, Vertex::finite(0)),
                  brw::ConfigError);

  BrwModel ring{brw::GraphSpace{5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}, {2, 0}}},
                {{RateFunction::constant(1.3), {}}, {}},
                1.0};
  const double ref = brw::lambda_s_spectral(ring, Vertex::finite(0));
  for (std::uint32_t i = 1; i < 5; ++i)
    CHECK(brw::lambda_s_spectral(ring, Vertex::finite(i)) == ref);
}

TEST_CASE("row-sum route to the global critical speed") {
  const auto b4 = brw::lambda_w_bound(brw::make_homtree(4, 1.0, 1.0), rt(), 40);
  for (double r : b4.sequence) CHECK(r == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(b4.lo == doctest::Approx(0.25).epsilon(1e-12));

  const auto aged = brw::make_agelooptree(4, 1.0, 0.0, 1.5, 1.5, 1.0);
  const auto ba = brw::lambda_w_bound(aged, rt(), 40);
  for (double r : ba.sequence)
    CHECK(r == doctest::Approx(4.0 / 2.5).epsilon(1e-12));
  CHECK(ba.lo == doctest::Approx(2.5 / 4.0).epsilon(1e-12));

  const auto hl =
      brw::scenario_base_model({"homloops", 4, 1.0, 0.0, 1.0, 1.0, 1.0, 1.0});
  const auto bh = brw::lambda_w_bound(hl, rt(), 40);
  CHECK(bh.lo == doctest::Approx(2.0 / 5.0).epsilon(1e-12));
}

TEST_CASE("closed-form reports: constant-rate root loop") {
  const auto th = brw::treeloop_thresholds(3, 1.0);
  CHECK(th.local_onset == doctest::Approx(0.70710678118654752).epsilon(1e-14));
  CHECK(th.merge == doctest::Approx(1.5).epsilon(1e-14));

  const auto weak = brw::closed_form_critical({"treeloop", 3, 1.0, 0.5});
  CHECK(*weak.lambda_s.value ==
        doctest::Approx(0.35355339059327376).epsilon(1e-12));
  CHECK(*weak.lambda_w.value == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  const auto mid = brw::closed_form_critical({"treeloop", 3, 1.0, 1.0});
  CHECK(*mid.lambda_s.value ==
        doctest::Approx((1.0 + 3.0 * std::sqrt(5.0)) / 22.0));
  CHECK(*mid.lambda_s.value < 0.35355339059327376);
  CHECK(*mid.lambda_w.value == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  const auto strong = brw::closed_form_critical({"treeloop", 3, 1.0, 3.0});
  CHECK(*strong.lambda_s.value ==
        doctest::Approx(0.25586395974799941).epsilon(1e-12));
  CHECK(*strong.lambda_w.value == *strong.lambda_s.value);

  CHECK(brw::lambda_s_from_phi_closed({"treeloop", 3, 1.0, 3.0}) ==
        doctest::Approx(0.25586395974799941).epsilon(1e-10));
}

TEST_CASE("closed-form reports: ageing scenarios") {
  // k1 > 0 requires slow decay at the root relative to the bulk
  const auto th = brw::agelooptree_thresholds(4, 1.0, 0.2, 1.5);
  CHECK(th.k1 > 0.0);
  CHECK(th.k2 > th.k1);

  const ScenarioParams base_like{"agelooptree", 4, 1.0, 0.0, 0.0, 1.5, 1.5, 1.0};
  const auto rep = brw::closed_form_critical(base_like);
  CHECK(*rep.lambda_w.value == doctest::Approx(2.5 / 4.0).epsilon(1e-12));
  CHECK(*rep.lambda_s.value ==
        doctest::Approx(2.5 / (2.0 * std::sqrt(3.0))).epsilon(1e-12));

  // below k1 both critical values sit at the unmodified ones
  ScenarioParams p{"agelooptree", 4, 1.0, 0.5 * th.k1, 0.0, 0.2, 1.5, 1.0};
  auto r = brw::closed_form_critical(p);
  CHECK(*r.lambda_s.value ==
        doctest::Approx(1.2 / (2.0 * std::sqrt(3.0))).epsilon(1e-12));
  CHECK(*r.lambda_w.value == doctest::Approx(1.2 / 4.0).epsilon(1e-12));

  // beyond k1 the local value drops strictly
  p.k_oo = th.k1 * 1.05;
  r = brw::closed_form_critical(p);
  CHECK(*r.lambda_s.value < 1.2 / (2.0 * std::sqrt(3.0)) - 1e-9);
  CHECK(*r.lambda_w.value == doctest::Approx(1.2 / 4.0).epsilon(1e-12));

  // at and beyond k2 the two values coincide below the unmodified global one
  p.k_oo = th.k2 * 1.2;
  r = brw::closed_form_critical(p);
  CHECK(*r.lambda_w.value == *r.lambda_s.value);
  CHECK(*r.lambda_w.value < 1.2 / 4.0);
}

TEST_CASE("maximality relations") {
  const ScenarioParams base{"agelooptree", 4, 1.0, 0.0, 0.0, 1.5, 1.5, 1.0};
  const auto base_rep = brw::closed_form_critical(base);
  const auto th = brw::agelooptree_thresholds(4, 1.0, 1.5, 0.2);
  for (int i = 0; i <= 20; ++i) {
    ScenarioParams p{"agelooptree", 4, 1.0,
                     th.k2 * 2.0 * static_cast<double>(i) / 20.0,
                     0.0, 1.5, 0.2, 1.0};
    const auto rels =
        brw::maximality_check(base_rep, brw::closed_form_critical(p));
    REQUIRE(rels.size() == 3);
    CHECK(rels[0].status == brw::RelationStatus::holds);
    for (const auto& rel : rels)
      CHECK(rel.status != brw::RelationStatus::violated);
  }

  // unmodified all-loops model: every applicable relation holds with equality
  const ScenarioParams hl{"homloops", 4, 1.0, 0.0, 1.0, 1.0, 1.0, 1.0};
  const auto hl_rep = brw::closed_form_critical(hl);
  const auto rels = brw::maximality_check(hl_rep, hl_rep);
  CHECK(rels[0].status == brw::RelationStatus::holds);
  CHECK(rels[1].status == brw::RelationStatus::holds);
  CHECK(rels[2].status == brw::RelationStatus::holds);

  // constant-rate loop beyond the merge point takes the first branch
  const auto tl_base = brw::closed_form_critical({"homtree", 3, 1.0});
  for (double k_oo : {1.6, 2.5, 4.0}) {
    const auto mod = brw::closed_form_critical({"treeloop", 3, 1.0, k_oo});
    const auto r3 = brw::maximality_check(tl_base, mod)[2];
    CHECK(r3.status == brw::RelationStatus::holds);
    CHECK(*mod.lambda_s.value <= *tl_base.lambda_w.value + 1e-12);
  }

  // no pure global phase in the base: nothing to check
  const auto strong = brw::closed_form_critical({"treeloop", 3, 1.0, 3.0});
  for (const auto& rel : brw::maximality_check(strong, strong))
    CHECK(rel.status == brw::RelationStatus::not_applicable);
}

TEST_CASE("phase classification") {
  const auto rep = brw::closed_form_critical({"homtree", 4, 1.0});
  CHECK(brw::classify_phase(0.27, rep) == brw::Phase::pure_global);
  CHECK(brw::classify_phase(0.10, rep) == brw::Phase::globally_subcritical);
  CHECK(brw::classify_phase(0.50, rep) == brw::Phase::locally_supercritical);
  CHECK(brw::classify_phase(0.25, rep) == brw::Phase::at_boundary);
  CHECK(brw::phase_name(brw::Phase::pure_global) == "pure_global");

  brw::CriticalReport bracketed;
  bracketed.lambda_s = {std::nullopt, 0.28, 0.30, "series_root"};
  bracketed.lambda_w = {0.25, std::nullopt, std::nullopt, "rowsum_bound"};
  CHECK(brw::classify_phase(0.29, bracketed) == brw::Phase::at_boundary);
  CHECK(brw::classify_phase(0.26, bracketed) == brw::Phase::pure_global);
}

TEST_CASE("critical speeds scale inversely with a global rate factor") {
  const auto reports = [](double c) {
    std::vector<brw::CriticalReport> out;
    out.push_back(brw::closed_form_critical({"homtree", 4, c}));
    out.push_back(brw::closed_form_critical({"treeloop", 3, c, 1.2 * c}));
    out.push_back(brw::closed_form_critical(
        {"agelooptree", 4, c, 2.0 * c, 0.0, 1.5, 0.2, 1.0}));
    out.push_back(brw::closed_form_critical(
        {"homloops", 4, c, 0.0, 1.5 * c, 1.0, 0.3, 1.0}));
    return out;
  };
  const auto unit = reports(1.0);
  for (double c : {0.5, 2.0, 3.7}) {
    const auto scaled = reports(c);
    for (std::size_t i = 0; i < unit.size(); ++i) {
      CHECK(*scaled[i].lambda_s.value ==
            doctest::Approx(*unit[i].lambda_s.value / c).epsilon(1e-9));
      CHECK(*scaled[i].lambda_w.value ==
            doctest::Approx(*unit[i].lambda_w.value / c).epsilon(1e-9));
    }
  }
}

TEST_CASE("global value never exceeds the local one") {
  const std::vector<ScenarioParams> ps = {
      {"homtree", 4, 1.0},
      {"treeloop", 3, 1.0, 1.0},
      {"agelooptree", 4, 1.0, 3.0, 0.0, 1.5, 0.2, 1.0},
      {"homloops", 4, 1.0, 0.0, 1.0, 1.0, 0.3, 1.0},
  };
  for (const auto& p : ps) {
    const auto rep = brw::closed_form_critical(p);
    CHECK(*rep.lambda_w.value <= *rep.lambda_s.value + 1e-12);
  }
}
