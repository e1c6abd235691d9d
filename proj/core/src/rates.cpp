#include "brw/rates.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace brw {

RateFunction RateFunction::constant(double k) {
  if (!(k >= 0.0)) throw std::invalid_argument("rate: k must be >= 0");
  return RateFunction{RateKind::constant, k, 0.0};
}

RateFunction RateFunction::exp_decay(double k, double alpha) {
  if (!(k >= 0.0)) throw std::invalid_argument("rate: k must be >= 0");
  if (!(alpha > 0.0)) throw std::invalid_argument("rate: alpha must be > 0");
  return RateFunction{RateKind::exp_decay, k, alpha};
}

double RateFunction::value(double t) const {
  if (!(t >= 0.0)) throw std::invalid_argument("rate: t must be >= 0");
  if (kind == RateKind::constant) return k;
  return k * std::exp(-alpha * t);
}

double RateFunction::cumulative(double t) const {
  if (!(t >= 0.0)) throw std::invalid_argument("rate: t must be >= 0");
  if (kind == RateKind::constant) return k * t;
  return -k * std::expm1(-alpha * t) / alpha;
}

std::optional<double> RateFunction::inverse_cumulative(double u) const {
  if (!(u >= 0.0)) throw std::invalid_argument("rate: u must be >= 0");
  if (u == 0.0) return 0.0;
  if (kind == RateKind::constant) {
    if (k == 0.0) return std::nullopt;
    return u / k;
  }
  const double z = alpha * u / k;  // u relative to the total mass k/alpha
  if (!(z < 1.0)) return std::nullopt;
  return -std::log1p(-z) / alpha;
}

double RateFunction::total_mass() const {
  if (kind == RateKind::exp_decay) return k / alpha;
  return k > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

double RateFunction::first_moment() const {
  if (kind == RateKind::constant) return k;
  return k / (alpha + 1.0);
}

void to_json(nlohmann::json& j, const RateFunction& r) {
  if (r.kind == RateKind::constant) {
    j = nlohmann::json{{"type", "constant"}, {"k", r.k}};
  } else {
    j = nlohmann::json{{"type", "exp_decay"}, {"k", r.k}, {"alpha", r.alpha}};
  }
}

void from_json(const nlohmann::json& j, RateFunction& r) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "constant") {
    r = RateFunction::constant(j.at("k").get<double>());
  } else if (type == "exp_decay") {
    r = RateFunction::exp_decay(j.at("k").get<double>(),
                                j.at("alpha").get<double>());
  } else {
    throw std::invalid_argument("rate: unknown type '" + type + "'");
  }
}

}  // namespace brw
