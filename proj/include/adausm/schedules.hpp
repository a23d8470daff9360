#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace adausm {

enum class ScheduleKind { Constant, Polynomial, AccAdaGrad, ExponentialRatio };

// Per-step weight sequence a_t applied to squared gradients in the adaptive
// denominator. weight(t) can overflow for fast-growing sequences; everything
// the optimizer actually consumes is built from ratio(t) = a_{t-1}/a_t, which
// never overflows.
class WeightSchedule {
 public:
  static WeightSchedule constant();                      // a_t = 1
  static WeightSchedule polynomial(double alpha);        // a_t = t^alpha, alpha >= 0
  static WeightSchedule acc_adagrad();                   // 1, 1, then ((1+t)/4)^2
  static WeightSchedule exponential_ratio(double beta);  // a_t = beta^-t, 0 < beta < 1

  // a_t for t >= 1; throws std::overflow_error when not representable.
  double weight(std::int64_t t) const;
  // a_{t-1}/a_t for t >= 2; always in (0, 1] for non-decreasing weights.
  double ratio(std::int64_t t) const;

  ScheduleKind kind() const { return kind_; }
  double alpha() const { return param_; }
  double beta() const { return param_; }

  // Grammar: "constant" | "poly:<alpha>" | "accadagrad" | "exp:<beta>".
  static WeightSchedule parse(std::string_view text);
  std::string to_string() const;

  friend bool operator==(const WeightSchedule&, const WeightSchedule&) = default;

 private:
  WeightSchedule(ScheduleKind k, double p) : kind_(k), param_(p) {}
  ScheduleKind kind_;
  double param_;
};

// Running view of the total weight mass A_t = sum_{i<=t} a_i, stored as
// A_t/a_t so the value stays O(t) even when a_t itself would overflow.
struct ScheduleAccumulator {
  std::int64_t t = 0;
  double A_over_a = 0.0;

  bool valid() const { return t >= 1; }
  void advance(const WeightSchedule& s);
  // a_t / abar_t = t / (A_t/a_t): the factor that rescales the normalized
  // second-moment average inside the adaptive denominator. At least 1 for
  // non-decreasing weights.
  double weight_over_abar() const;
};

// log(sum_{t<=T} a_t). Closed form for ExponentialRatio (the raw sum
// overflows within a few thousand steps); direct summation otherwise.
// Throws std::overflow_error if the sum is not representable.
double log_sum_weights(const WeightSchedule& s, std::int64_t T);

}  // namespace adausm
