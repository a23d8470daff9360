#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "adausm/schedules.hpp"

namespace adausm {

// Inputs of the closed-form convergence guarantee for the unified-momentum
// weighted method on L-smooth objectives with sigma-bounded stochastic
// gradients.
struct BoundInputs {
  double f1_minus_fstar;  // f(x_1) - f*, >= 0
  double smooth_L;        // smoothness constant, > 0
  double sigma;           // second-moment bound, > 0
  std::int64_t dim;       // parameter dimension, >= 1
  std::int64_t T;         // horizon, >= 1
  double eta;
  double mu;
  double lambda;
  double epsilon;
  WeightSchedule schedule = WeightSchedule::constant();
};

// bound = prefactor * (c1 + c2 * log_term) with
//   prefactor = sqrt(2 eps^2 + 2 sigma^2 T) / (eta T)
//   c1        = 2 (f(x_1) - f*) / ((1 + lambda mu) eta)
//   c2        = 2 eta (1+2 lambda)^2 L d / ((1+lambda mu)(1-mu)^3) + 4 sigma d / (1-mu)
struct BoundBreakdown {
  double c1, c2, log_term, prefactor, bound;
};

// General-weights bound; log_term = log(1 + (sigma/epsilon)^2 * sum_t a_t),
// evaluated in log space so huge weight sums cannot overflow. Throws
// std::overflow_error when sum_t a_t itself is not representable and no
// closed form exists (that failure is meaningful: such schedules grow too
// fast for the log(sum a_t) = o(sqrt(T)) regime).
BoundBreakdown convergence_bound(const BoundInputs& in);

// Specialization to lambda = 1 with the accelerated quadratic-growth weights:
// same prefactor, c1 = 2(f(x_1)-f*)/((1+mu) eta), c2 = 18 eta L d/((1+mu)(1-mu)^3)
// + 4 sigma d/(1-mu), and log_term = log(1 + sigma^2 T^3 / epsilon^2). Requires
// schedule = accadagrad and lambda = 1.
BoundBreakdown acc_weights_bound(const BoundInputs& in);

struct InequalityCheck {
  double lhs, rhs;
  bool holds;
};

// sum_t a_t / S_t <= log(S_T) - log(S_0) with S_t = S_0 + sum_{i<=t} a_i.
// Requires S0 > 0 and a_t >= 0. holds uses an absolute 1e-12 slack.
InequalityCheck log_sum_inequality_check(double S0, std::span<const double> a);

// Simulates m_t = mu m_{t-1} - s_t from m_0 = 0 and checks
// sum_t ||m_t||^2 <= (1-mu)^-2 sum_t ||s_t||^2 (s_t = the per-step scaled
// gradient eta_t g_t). holds uses a 1e-9 relative slack.
InequalityCheck momentum_energy_check(double mu,
                                      std::span<const std::vector<double>> scaled_grads);

// The two learning-rate routes compared in the EMA-equivalence analysis, for
// one coordinate's gradient history g_1..g_t:
//  - adam_lr: EMA recursion v <- beta2 v + (1-beta2) g^2 with bias correction,
//    eta / (sqrt(t * v_corr) + sqrt(t) * epsilon);
//  - adausm_weighted_lr: normalized weighted accumulation via schedule ratios,
//    eta / (sqrt(r * t/(A/a)) + epsilon).
// With epsilon = 0 and schedule = exp:beta2 the two agree exactly in algebra;
// neither route ever forms a raw weight beta2^-i.
double adam_lr(std::span<const double> g_history, double beta2, double eta,
               double epsilon);
double adausm_weighted_lr(std::span<const double> g_history, const WeightSchedule& s,
                          double eta, double epsilon);

// value = (eta/(1-beta^t)) / (sqrt(t * S) + epsilon/(1-beta^t)) where S is the
// normalized weighted mean of squared gradients (the EMA-route evaluation);
// adausm_scaled_value = adausm_weighted_lr run with eta' = eta/(1-beta^t),
// epsilon' = epsilon/(1-beta^t). The two are the same quantity computed along
// the two routes.
struct RmsPropLr {
  double value, adausm_scaled_value;
};
RmsPropLr rmsprop_lr(std::span<const double> g_history, double beta, double eta,
                     double epsilon);

// (eta_t - eta_{t-1}) * m_{t-1}, per coordinate: the extra term an EMA-style
// learning rate injects relative to the weighted-accumulator form.
std::vector<double> ema_error_term(std::span<const double> lr_now,
                                   std::span<const double> lr_prev,
                                   std::span<const double> m_prev);

}  // namespace adausm
