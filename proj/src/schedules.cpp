#include "adausm/schedules.hpp"

#include <cmath>
#include <stdexcept>

#include "adausm/textutil.hpp"

namespace adausm {

WeightSchedule WeightSchedule::constant() {
  return {ScheduleKind::Constant, 0.0};
}

WeightSchedule WeightSchedule::polynomial(double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha))
    throw std::invalid_argument("polynomial schedule: alpha must be finite and >= 0");
  return {ScheduleKind::Polynomial, alpha};
}

WeightSchedule WeightSchedule::acc_adagrad() {
  return {ScheduleKind::AccAdaGrad, 0.0};
}

WeightSchedule WeightSchedule::exponential_ratio(double beta) {
  if (!(beta > 0.0 && beta < 1.0))
    throw std::invalid_argument("exponential-ratio schedule: beta must be in (0, 1)");
  return {ScheduleKind::ExponentialRatio, beta};
}

double WeightSchedule::weight(std::int64_t t) const {
  if (t < 1) throw std::invalid_argument("weight: t must be >= 1");
  double w = 0.0;
  switch (kind_) {
    case ScheduleKind::Constant:
      return 1.0;
    case ScheduleKind::Polynomial:
      w = std::pow(double(t), param_);
      break;
    case ScheduleKind::AccAdaGrad: {
      if (t <= 2) return 1.0;
      double u = (1.0 + double(t)) / 4.0;
      w = u * u;
      break;
    }
    case ScheduleKind::ExponentialRatio:
      w = std::pow(param_, -double(t));
      break;
  }
  if (!std::isfinite(w))
    throw std::overflow_error("weight: a_t exceeds double range at t=" + fmt_int(t) +
                              " for schedule " + to_string());
  return w;
}

double WeightSchedule::ratio(std::int64_t t) const {
  if (t < 2) throw std::invalid_argument("ratio: t must be >= 2");
  switch (kind_) {
    case ScheduleKind::Constant:
      return 1.0;
    case ScheduleKind::Polynomial:
      return std::pow(double(t - 1) / double(t), param_);
    case ScheduleKind::AccAdaGrad: {
      // a_1 = a_2 = a_3 = 1, then the quadratic branch.
      if (t <= 3) return 1.0;
      double q = double(t) / double(t + 1);
      return q * q;
    }
    case ScheduleKind::ExponentialRatio:
      return param_;
  }
  return 1.0;  // unreachable
}

WeightSchedule WeightSchedule::parse(std::string_view text) {
  std::string_view s = trim(text);
  if (s == "constant") return constant();
  if (s == "accadagrad") return acc_adagrad();
  auto bad = [&]() -> std::invalid_argument {
    return std::invalid_argument(
        "unknown schedule '" + std::string(text) +
        "'; valid forms: constant, poly:<alpha>, accadagrad, exp:<beta>");
  };
  if (s.rfind("poly:", 0) == 0) {
    double a;
    if (!parse_double(s.substr(5), a)) throw bad();
    return polynomial(a);
  }
  if (s.rfind("exp:", 0) == 0) {
    double b;
    if (!parse_double(s.substr(4), b)) throw bad();
    return exponential_ratio(b);
  }
  throw bad();
}

std::string WeightSchedule::to_string() const {
  switch (kind_) {
    case ScheduleKind::Constant: return "constant";
    case ScheduleKind::Polynomial: return "poly:" + fmt_double(param_);
    case ScheduleKind::AccAdaGrad: return "accadagrad";
    case ScheduleKind::ExponentialRatio: return "exp:" + fmt_double(param_);
  }
  return "constant";  // unreachable
}

void ScheduleAccumulator::advance(const WeightSchedule& s) {
  if (t == 0) {
    t = 1;
    A_over_a = 1.0;  // A_1/a_1
    return;
  }
  ++t;
  // A_t/a_t = (A_{t-1}/a_{t-1}) * (a_{t-1}/a_t) + 1
  A_over_a = A_over_a * s.ratio(t) + 1.0;
}

double ScheduleAccumulator::weight_over_abar() const {
  if (!valid()) throw std::logic_error("weight_over_abar: no step taken yet");
  return double(t) / A_over_a;
}

double log_sum_weights(const WeightSchedule& s, std::int64_t T) {
  if (T < 1) throw std::invalid_argument("log_sum_weights: T must be >= 1");
  if (s.kind() == ScheduleKind::ExponentialRatio) {
    // sum = (1 - beta^T) / ((1 - beta) * beta^T), taken logarithmically.
    double beta = s.beta();
    return std::log1p(-std::pow(beta, double(T))) - std::log1p(-beta) -
           double(T) * std::log(beta);
  }
  double sum = 0.0;
  for (std::int64_t t = 1; t <= T; ++t) sum += s.weight(t);  // throws on a_t overflow
  if (!std::isfinite(sum))
    throw std::overflow_error("log_sum_weights: sum of weights exceeds double range for " +
                              s.to_string());
  return std::log(sum);
}

}  // namespace adausm
