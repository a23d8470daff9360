#include "adausm/theory.hpp"

#include <cmath>
#include <stdexcept>

namespace adausm {

namespace {

// log(1 + e^z), stable for any z.
double softplus(double z) {
  if (z > 0.0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

void validate_bound_inputs(const BoundInputs& in) {
  if (!(in.f1_minus_fstar >= 0.0))
    throw std::invalid_argument("f1_minus_fstar must be >= 0");
  if (!(in.smooth_L > 0.0)) throw std::invalid_argument("smooth_L must be > 0");
  if (!(in.sigma > 0.0)) throw std::invalid_argument("sigma must be > 0");
  if (in.dim < 1) throw std::invalid_argument("dim must be >= 1");
  if (in.T < 1) throw std::invalid_argument("T must be >= 1");
  if (!(in.eta > 0.0)) throw std::invalid_argument("eta must be > 0");
  if (!(in.mu >= 0.0 && in.mu < 1.0)) throw std::invalid_argument("mu must be in [0, 1)");
  if (!(in.lambda >= 0.0 && in.lambda <= 1.0 / (1.0 - in.mu)))
    throw std::invalid_argument("lambda must be in [0, 1/(1-mu)]");
  if (!(in.epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
}

BoundBreakdown assemble(const BoundInputs& in, double c1_denom_factor,
                        double first_term_scale, double log_term) {
  double d = double(in.dim);
  double one_minus_mu = 1.0 - in.mu;
  BoundBreakdown b;
  b.c1 = 2.0 * in.f1_minus_fstar / (c1_denom_factor * in.eta);
  b.c2 = first_term_scale * in.eta * in.smooth_L * d /
             (c1_denom_factor * one_minus_mu * one_minus_mu * one_minus_mu) +
         4.0 * in.sigma * d / one_minus_mu;
  b.log_term = log_term;
  b.prefactor = std::sqrt(2.0 * in.epsilon * in.epsilon +
                          2.0 * in.sigma * in.sigma * double(in.T)) /
                (in.eta * double(in.T));
  b.bound = b.prefactor * (b.c1 + b.c2 * b.log_term);
  return b;
}

}  // namespace

BoundBreakdown convergence_bound(const BoundInputs& in) {
  validate_bound_inputs(in);
  double lsw = log_sum_weights(in.schedule, in.T);  // may throw overflow_error
  double z = 2.0 * std::log(in.sigma) - 2.0 * std::log(in.epsilon) + lsw;
  double one_plus_2l = 1.0 + 2.0 * in.lambda;
  return assemble(in, 1.0 + in.lambda * in.mu, 2.0 * one_plus_2l * one_plus_2l,
                  softplus(z));
}

BoundBreakdown acc_weights_bound(const BoundInputs& in) {
  validate_bound_inputs(in);
  if (in.schedule.kind() != ScheduleKind::AccAdaGrad)
    throw std::invalid_argument("acc_weights_bound requires the accadagrad schedule");
  if (in.lambda != 1.0) throw std::invalid_argument("acc_weights_bound requires lambda = 1");
  double z = 2.0 * std::log(in.sigma) + 3.0 * std::log(double(in.T)) -
             2.0 * std::log(in.epsilon);
  return assemble(in, 1.0 + in.mu, 18.0, softplus(z));
}

InequalityCheck log_sum_inequality_check(double S0, std::span<const double> a) {
  if (!(S0 > 0.0)) throw std::invalid_argument("S0 must be > 0");
  double S = S0;
  double lhs = 0.0;
  for (double at : a) {
    if (!(at >= 0.0)) throw std::invalid_argument("weights must be >= 0");
    S += at;
    lhs += at / S;
  }
  double rhs = std::log(S) - std::log(S0);
  return {lhs, rhs, lhs <= rhs + 1e-12};
}

InequalityCheck momentum_energy_check(double mu,
                                      std::span<const std::vector<double>> scaled_grads) {
  if (!(mu >= 0.0 && mu < 1.0)) throw std::invalid_argument("mu must be in [0, 1)");
  std::size_t d = scaled_grads.empty() ? 0 : scaled_grads.front().size();
  std::vector<double> m(d, 0.0);
  double lhs = 0.0, sum_sq = 0.0;
  for (const auto& s : scaled_grads) {
    if (s.size() != d) throw std::invalid_argument("ragged scaled-gradient sequence");
    for (std::size_t k = 0; k < d; ++k) {
      m[k] = mu * m[k] - s[k];
      lhs += m[k] * m[k];
      sum_sq += s[k] * s[k];
    }
  }
  double scale = (1.0 - mu) * (1.0 - mu);
  double rhs = sum_sq / scale;
  return {lhs, rhs, lhs <= rhs * (1.0 + 1e-9) + 1e-12};
}

double adam_lr(std::span<const double> g_history, double beta2, double eta,
               double epsilon) {
  if (g_history.empty()) throw std::invalid_argument("empty gradient history");
  if (!(beta2 > 0.0 && beta2 < 1.0)) throw std::invalid_argument("beta2 must be in (0, 1)");
  double v = 0.0, bt = 1.0;
  for (double g : g_history) {
    v = beta2 * v + (1.0 - beta2) * g * g;
    bt *= beta2;
  }
  double t = double(g_history.size());
  double v_corr = v / (1.0 - bt);
  return eta / (std::sqrt(t * v_corr) + std::sqrt(t) * epsilon);
}

double adausm_weighted_lr(std::span<const double> g_history, const WeightSchedule& s,
                          double eta, double epsilon) {
  if (g_history.empty()) throw std::invalid_argument("empty gradient history");
  double r = 0.0;
  ScheduleAccumulator acc;
  for (double g : g_history) {
    acc.advance(s);
    double ratio = acc.t == 1 ? 1.0 : s.ratio(acc.t);
    r = ratio * r + g * g;
  }
  return eta / (std::sqrt(r * acc.weight_over_abar()) + epsilon);
}

RmsPropLr rmsprop_lr(std::span<const double> g_history, double beta, double eta,
                     double epsilon) {
  if (g_history.empty()) throw std::invalid_argument("empty gradient history");
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("beta must be in (0, 1)");
  double v = 0.0, bt = 1.0;
  for (double g : g_history) {
    v = beta * v + (1.0 - beta) * g * g;
    bt *= beta;
  }
  double t = double(g_history.size());
  double c = 1.0 - bt;
  RmsPropLr out;
  out.value = (eta / c) / (std::sqrt(t * (v / c)) + epsilon / c);
  out.adausm_scaled_value = adausm_weighted_lr(
      g_history, WeightSchedule::exponential_ratio(beta), eta / c, epsilon / c);
  return out;
}

std::vector<double> ema_error_term(std::span<const double> lr_now,
                                   std::span<const double> lr_prev,
                                   std::span<const double> m_prev) {
  if (lr_now.size() != lr_prev.size() || lr_now.size() != m_prev.size())
    throw std::invalid_argument("ema_error_term: dimension mismatch");
  std::vector<double> out(lr_now.size());
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = (lr_now[k] - lr_prev[k]) * m_prev[k];
  return out;
}

}  // namespace adausm
