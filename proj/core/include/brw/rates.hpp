#pragma once

#include <optional>
#include <nlohmann/json_fwd.hpp>

namespace brw {

enum class RateKind { constant, exp_decay };

// Reproduction-intensity profile r(t) of an individual of age t.
// A closed union of two shapes so that integral transforms stay exact:
//   constant:   r(t) = k
//   exp_decay:  r(t) = k * exp(-alpha * t),  alpha > 0
// k = 0 is allowed and stands for an absent edge or loop.
struct RateFunction {
  RateKind kind = RateKind::constant;
  double k = 0.0;
  double alpha = 0.0;

  static RateFunction constant(double k);
  static RateFunction exp_decay(double k, double alpha);
  static RateFunction zero() { return constant(0.0); }

  bool is_zero() const { return k == 0.0; }

  // r(t); rejects t < 0.
  double value(double t) const;

  // R(t) = integral of r over [0, t]; non-decreasing, R(0) = 0.
  double cumulative(double t) const;

  // Smallest t with R(t) = u, or nullopt when u exceeds the total mass.
  std::optional<double> inverse_cumulative(double u) const;

  // Total mass R(inf): k/alpha for exp_decay, +inf for constant k > 0.
  double total_mass() const;

  // integral of r(s) * exp(-s) ds over [0, inf): the expected offspring
  // count per unit speed along this rate (the speed factor is applied
  // by callers). constant -> k, exp_decay -> k / (alpha + 1).
  double first_moment() const;

  friend bool operator==(const RateFunction&, const RateFunction&) = default;
};

void to_json(nlohmann::json& j, const RateFunction& r);
void from_json(const nlohmann::json& j, RateFunction& r);

}  // namespace brw
