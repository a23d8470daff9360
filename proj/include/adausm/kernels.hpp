#pragma once

#include <cstddef>
#include <span>

namespace adausm {

// Scalars of one unified-momentum step, shared by every coordinate.
struct UsmStepParams {
  double mu;                // momentum factor
  double lambda_mu;         // lambda * mu, the momentum-difference gain
  double epsilon;           // denominator floor
  double base_eta;          // eta or eta/sqrt(t) depending on lr_mode
  double ratio;             // a_{t-1}/a_t for this step (1 on the first step)
  double weight_over_abar;  // t / (A_t/a_t) after this step's schedule advance
};

// One coordinate-wise step:
//   r_k  <- ratio * r_k + g_k^2
//   lr_k <- base_eta / (sqrt(r_k * weight_over_abar) + epsilon)
//   m_k  <- mu * m_k - lr_k * g_k        (previous m_k retained for the line below)
//   x_k  <- x_k + m_k + lambda_mu * (m_k - m_k_prev)
// lr_out may be empty; when provided it receives lr_k.
//
// The serial and parallel kernels compute bit-identical results for any
// thread count: each coordinate is independent and the arithmetic per
// coordinate is the same expression in both.
void usm_step_serial(std::span<const double> g, const UsmStepParams& p,
                     std::span<double> x, std::span<double> m, std::span<double> r,
                     std::span<double> lr_out);
void usm_step_parallel(std::span<const double> g, const UsmStepParams& p,
                       std::span<double> x, std::span<double> m, std::span<double> r,
                       std::span<double> lr_out);
// Dispatches to the parallel kernel above this many coordinates.
inline constexpr std::size_t usm_parallel_cutoff = 32768;
void usm_step(std::span<const double> g, const UsmStepParams& p,
              std::span<double> x, std::span<double> m, std::span<double> r,
              std::span<double> lr_out);

double stable_sigmoid(double z);
// max(z,0) - y*z + log1p(exp(-|z|)): per-row logistic loss at margin z, label y.
double logistic_row_loss(double z, double y);

// Sum over the given rows of (sigmoid(w . x_i) - y_i) * x_i, accumulated in
// fixed-size blocks whose partials are combined in block order. The block
// structure makes the summation order independent of the thread count, so the
// parallel variant is bit-identical to the serial one. rows == nullptr means
// rows 0..n_rows-1.
inline constexpr std::size_t reduce_block = 256;
void logistic_grad_sum_serial(const double* features, const double* labels,
                              const std::size_t* rows, std::size_t n_rows, std::size_t d,
                              std::span<const double> w, std::span<double> out);
void logistic_grad_sum_parallel(const double* features, const double* labels,
                                const std::size_t* rows, std::size_t n_rows, std::size_t d,
                                std::span<const double> w, std::span<double> out);
inline constexpr std::size_t reduce_parallel_cutoff = 1 << 16;  // n_rows * d
void logistic_grad_sum(const double* features, const double* labels,
                       const std::size_t* rows, std::size_t n_rows, std::size_t d,
                       std::span<const double> w, std::span<double> out);

// Sum over all rows of logistic_row_loss(w . x_i, y_i), same blocked scheme.
double logistic_loss_sum_serial(const double* features, const double* labels,
                                std::size_t n_rows, std::size_t d,
                                std::span<const double> w);
double logistic_loss_sum_parallel(const double* features, const double* labels,
                                  std::size_t n_rows, std::size_t d,
                                  std::span<const double> w);
double logistic_loss_sum(const double* features, const double* labels,
                         std::size_t n_rows, std::size_t d, std::span<const double> w);

}  // namespace adausm
