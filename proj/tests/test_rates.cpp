#include <doctest.h>

#include <cmath>
#include <nlohmann/json.hpp>

#include "brw/rates.hpp"
#include "brw/rng.hpp"

using brw::RateFunction;

namespace {

// Composite Simpson oracle, independent of the closed forms under test.
double simpson(double a, double b, int panels, const auto& f) {
  const double h = (b - a) / (2.0 * panels);
  double acc = f(a) + f(b);
  for (int i = 1; i < 2 * panels; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

double bisect_cumulative(const RateFunction& rf, double u, double hi) {
  double lo = 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    (rf.cumulative(mid) < u ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("value") {
  CHECK(RateFunction::constant(2.0).value(7.3) == 2.0);
  CHECK(RateFunction::exp_decay(1.0, 1.5).value(0.0) == 1.0);
  CHECK(RateFunction::exp_decay(1.0, 1.5).value(1.0) ==
        doctest::Approx(0.22313016014842982).epsilon(1e-14));
  CHECK_THROWS_AS(RateFunction::constant(1.0).value(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(RateFunction::exp_decay(1.0, 1.0).cumulative(-2.0),
                  std::invalid_argument);
}

TEST_CASE("cumulative against quadrature") {
  CHECK(RateFunction::constant(2.0).cumulative(3.0) == 6.0);
  const auto rf = RateFunction::exp_decay(4.0, 4.0);
  CHECK(rf.cumulative(1.0) ==
        doctest::Approx(0.98168436111126582).epsilon(1e-12));
  // total mass limit: quadrature of value() far into the tail
  brw::Rng rng(2024);
  for (int rep = 0; rep < 20; ++rep) {
    const double k = 10.0 * rng.uniform();
    const double alpha = 10.0 * rng.uniform();
    const auto r = RateFunction::exp_decay(k, alpha);
    const double q = simpson(0.0, 100.0 / alpha, 4000,
                             [&](double s) { return r.value(s); });
    CHECK(std::fabs(q - k / alpha) <= 1e-8 * (k / alpha));
    CHECK(std::fabs(r.cumulative(100.0 / alpha) - k / alpha) <=
          1e-8 * (k / alpha));
  }
}

TEST_CASE("inverse_cumulative") {
  CHECK(*RateFunction::constant(2.0).inverse_cumulative(6.0) == 3.0);
  CHECK_FALSE(RateFunction::exp_decay(4.0, 4.0).inverse_cumulative(2.0));
  CHECK_FALSE(RateFunction::constant(0.0).inverse_cumulative(0.5));
  const auto rf = RateFunction::exp_decay(1.0, 1.0);
  const double t = *rf.inverse_cumulative(0.5);
  CHECK(t == doctest::Approx(0.69314718055994531).epsilon(1e-13));
  CHECK(std::fabs(t - bisect_cumulative(rf, 0.5, 100.0)) < 1e-11);
}

TEST_CASE("first_moment equals quadrature of r(s)e^-s") {
  CHECK(RateFunction::constant(3.0).first_moment() == 3.0);
  CHECK(RateFunction::exp_decay(1.0, 1.5).first_moment() ==
        doctest::Approx(0.4).epsilon(1e-14));
  brw::Rng rng(7);
  for (int rep = 0; rep < 30; ++rep) {
    const double k = 0.01 + 10.0 * rng.uniform();
    const double alpha = 0.01 + 10.0 * rng.uniform();
    const auto r = RateFunction::exp_decay(k, alpha);
    const double L = 60.0 / (alpha + 1.0);
    const double q = simpson(0.0, L, 20000,
                             [&](double s) { return r.value(s) * std::exp(-s); });
    CHECK(std::fabs(q - r.first_moment()) <= 1e-8 * r.first_moment());
  }
}

TEST_CASE("cumulative/inverse round trip") {
  brw::Rng rng(99);
  for (int rep = 0; rep < 200; ++rep) {
    const bool constant = rng.next() & 1;
    const double k = 0.05 + 8.0 * rng.uniform();
    const auto rf = constant
                        ? RateFunction::constant(k)
                        : RateFunction::exp_decay(k, 0.05 + 8.0 * rng.uniform());
    const double mass = constant ? k * 50.0 : rf.total_mass();
    const double u = 0.999 * mass * rng.uniform();
    const auto t = rf.inverse_cumulative(u);
    REQUIRE(t);
    CHECK(std::fabs(rf.cumulative(*t) - u) <= 1e-10 * std::max(1.0, u));
  }
}

TEST_CASE("exp_decay flattens to constant as alpha -> 0") {
  const double k = 2.5, T = 4.0;
  for (double alpha : {1e-2, 1e-4, 1e-6}) {
    const auto rf = RateFunction::exp_decay(k, alpha);
    for (double t : {0.5, 1.7, T})
      CHECK(std::fabs(rf.cumulative(t) - k * t) <= alpha * k * t * t / 2.0 + 1e-12);
  }
}

TEST_CASE("json representation") {
  const nlohmann::json jc = RateFunction::constant(2.0);
  CHECK(jc == nlohmann::json({{"type", "constant"}, {"k", 2.0}}));
  const nlohmann::json je = RateFunction::exp_decay(1.0, 1.5);
  CHECK(je.at("type") == "exp_decay");
  CHECK(je.get<RateFunction>() == RateFunction::exp_decay(1.0, 1.5));
  CHECK_THROWS(nlohmann::json{{"type", "nope"}, {"k", 1.0}}.get<RateFunction>());
}
