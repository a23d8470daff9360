#include "adausm/kernels.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

namespace adausm {

namespace {

inline void usm_update_one(std::size_t k, std::span<const double> g,
                           const UsmStepParams& p, std::span<double> x,
                           std::span<double> m, std::span<double> r,
                           std::span<double> lr_out) {
  double rk = p.ratio * r[k] + g[k] * g[k];
  r[k] = rk;
  double lr = p.base_eta / (std::sqrt(rk * p.weight_over_abar) + p.epsilon);
  double m_prev = m[k];
  double mk = p.mu * m_prev - lr * g[k];
  m[k] = mk;
  x[k] += mk + p.lambda_mu * (mk - m_prev);
  if (!lr_out.empty()) lr_out[k] = lr;
}

}  // namespace

void usm_step_serial(std::span<const double> g, const UsmStepParams& p,
                     std::span<double> x, std::span<double> m, std::span<double> r,
                     std::span<double> lr_out) {
  for (std::size_t k = 0; k < g.size(); ++k) usm_update_one(k, g, p, x, m, r, lr_out);
}

void usm_step_parallel(std::span<const double> g, const UsmStepParams& p,
                       std::span<double> x, std::span<double> m, std::span<double> r,
                       std::span<double> lr_out) {
  const std::int64_t n = std::int64_t(g.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < n; ++k)
    usm_update_one(std::size_t(k), g, p, x, m, r, lr_out);
}

void usm_step(std::span<const double> g, const UsmStepParams& p,
              std::span<double> x, std::span<double> m, std::span<double> r,
              std::span<double> lr_out) {
  if (g.size() >= usm_parallel_cutoff)
    usm_step_parallel(g, p, x, m, r, lr_out);
  else
    usm_step_serial(g, p, x, m, r, lr_out);
}

double stable_sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

double logistic_row_loss(double z, double y) {
  return (z > 0.0 ? z : 0.0) - y * z + std::log1p(std::exp(-std::abs(z)));
}

namespace {

inline std::size_t row_at(const std::size_t* rows, std::size_t i) {
  return rows ? rows[i] : i;
}

// One block's contribution, rows [b*reduce_block, end) in order.
inline void grad_block(const double* features, const double* labels,
                       const std::size_t* rows, std::size_t begin, std::size_t end,
                       std::size_t d, std::span<const double> w, double* partial) {
  for (std::size_t k = 0; k < d; ++k) partial[k] = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    std::size_t row = row_at(rows, i);
    const double* f = features + row * d;
    double z = 0.0;
    for (std::size_t k = 0; k < d; ++k) z += w[k] * f[k];
    double s = stable_sigmoid(z) - labels[row];
    for (std::size_t k = 0; k < d; ++k) partial[k] += s * f[k];
  }
}

inline double loss_block(const double* features, const double* labels,
                         std::size_t begin, std::size_t end, std::size_t d,
                         std::span<const double> w) {
  double sum = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    const double* f = features + i * d;
    double z = 0.0;
    for (std::size_t k = 0; k < d; ++k) z += w[k] * f[k];
    sum += logistic_row_loss(z, labels[i]);
  }
  return sum;
}

}  // namespace

void logistic_grad_sum_serial(const double* features, const double* labels,
                              const std::size_t* rows, std::size_t n_rows, std::size_t d,
                              std::span<const double> w, std::span<double> out) {
  const std::size_t n_blocks = (n_rows + reduce_block - 1) / reduce_block;
  std::vector<double> partial(d);
  for (std::size_t k = 0; k < d; ++k) out[k] = 0.0;
  for (std::size_t b = 0; b < n_blocks; ++b) {
    std::size_t begin = b * reduce_block;
    std::size_t end = begin + reduce_block < n_rows ? begin + reduce_block : n_rows;
    grad_block(features, labels, rows, begin, end, d, w, partial.data());
    for (std::size_t k = 0; k < d; ++k) out[k] += partial[k];
  }
}

void logistic_grad_sum_parallel(const double* features, const double* labels,
                                const std::size_t* rows, std::size_t n_rows, std::size_t d,
                                std::span<const double> w, std::span<double> out) {
  const std::size_t n_blocks = (n_rows + reduce_block - 1) / reduce_block;
  std::vector<double> partials(n_blocks * d);
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < std::int64_t(n_blocks); ++b) {
    std::size_t begin = std::size_t(b) * reduce_block;
    std::size_t end = begin + reduce_block < n_rows ? begin + reduce_block : n_rows;
    grad_block(features, labels, rows, begin, end, d, w,
               partials.data() + std::size_t(b) * d);
  }
  for (std::size_t k = 0; k < d; ++k) out[k] = 0.0;
  for (std::size_t b = 0; b < n_blocks; ++b)
    for (std::size_t k = 0; k < d; ++k) out[k] += partials[b * d + k];
}

void logistic_grad_sum(const double* features, const double* labels,
                       const std::size_t* rows, std::size_t n_rows, std::size_t d,
                       std::span<const double> w, std::span<double> out) {
  if (n_rows * d >= reduce_parallel_cutoff)
    logistic_grad_sum_parallel(features, labels, rows, n_rows, d, w, out);
  else
    logistic_grad_sum_serial(features, labels, rows, n_rows, d, w, out);
}

double logistic_loss_sum_serial(const double* features, const double* labels,
                                std::size_t n_rows, std::size_t d,
                                std::span<const double> w) {
  const std::size_t n_blocks = (n_rows + reduce_block - 1) / reduce_block;
  double sum = 0.0;
  for (std::size_t b = 0; b < n_blocks; ++b) {
    std::size_t begin = b * reduce_block;
    std::size_t end = begin + reduce_block < n_rows ? begin + reduce_block : n_rows;
    sum += loss_block(features, labels, begin, end, d, w);
  }
  return sum;
}

double logistic_loss_sum_parallel(const double* features, const double* labels,
                                  std::size_t n_rows, std::size_t d,
                                  std::span<const double> w) {
  const std::size_t n_blocks = (n_rows + reduce_block - 1) / reduce_block;
  std::vector<double> partials(n_blocks);
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < std::int64_t(n_blocks); ++b) {
    std::size_t begin = std::size_t(b) * reduce_block;
    std::size_t end = begin + reduce_block < n_rows ? begin + reduce_block : n_rows;
    partials[std::size_t(b)] = loss_block(features, labels, begin, end, d, w);
  }
  double sum = 0.0;
  for (double p : partials) sum += p;
  return sum;
}

double logistic_loss_sum(const double* features, const double* labels,
                         std::size_t n_rows, std::size_t d, std::span<const double> w) {
  if (n_rows * d >= reduce_parallel_cutoff)
    return logistic_loss_sum_parallel(features, labels, n_rows, d, w);
  return logistic_loss_sum_serial(features, labels, n_rows, d, w);
}

}  // namespace adausm
