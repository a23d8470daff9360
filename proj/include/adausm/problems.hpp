#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace adausm {

struct Dataset {
  std::size_t n = 0, d = 0;
  std::vector<double> features;  // row-major n*d
  std::vector<double> labels;    // n entries

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

// A stochastic objective: full loss, a noisy gradient addressed by a 64-bit
// sample key (pure function of (x, key) - no hidden generator state), and the
// exact full gradient. All callables are immutable after construction and
// safe for concurrent calls.
//
// sigma_bound, when set, certifies ||stochastic_grad(x, key)||^2 <= sigma_bound^2
// for every key and every x in the reference box ||x||_inf <= 1 (for the
// logistic problem, for every x reachable in that box as well). Noise is
// bounded by construction so the certificate is exact, not statistical.
struct StochasticProblem {
  std::string name;
  std::size_t dim = 0;
  std::optional<double> f_star;
  std::optional<double> lipschitz_L;
  std::optional<double> sigma_bound;
  std::function<double(std::span<const double>)> loss;
  std::function<std::vector<double>(std::span<const double>, std::uint64_t)> stochastic_grad;
  std::function<std::vector<double>(std::span<const double>)> exact_grad;
};

// f(x) = 1/2 x^T D x with D log-spaced in [1, condition_number]; gradient
// noise is zero-mean, variance noise_sigma^2 per coordinate, bounded support.
StochasticProblem make_noisy_quadratic(std::size_t dim, double condition_number,
                                       double noise_sigma, std::uint64_t seed);

// d=2 banana valley f(x,y) = (1-x)^2 + 100(y - x^2)^2 with the same additive
// bounded noise.
StochasticProblem make_rosenbrock_noisy(double noise_sigma, std::uint64_t seed);

// Mean logistic loss over all rows plus (l2/2)||w||^2; stochastic gradients
// average a without-replacement batch chosen by the sample key. batch_size ==
// n uses the rows in natural order and equals exact_grad bit-for-bit.
StochasticProblem make_logistic(Dataset data, std::size_t batch_size, double l2,
                                std::uint64_t seed);

// Two Gaussian blobs with centers separation apart, alternating labels 0/1.
Dataset generate_synthetic_classification(std::size_t n, std::size_t d,
                                          double separation, std::uint64_t seed);

// Header row required; every non-label column is a feature, in header order.
// Bad cells raise CsvError with 1-based (row, column); a missing label column
// lists the available ones.
Dataset load_csv(const std::string& path, const std::string& label_column);
void save_csv(const Dataset& data, const std::string& path,
              const std::string& label_column = "label");

// Central differences of the full loss.
std::vector<double> finite_diff_grad(const StochasticProblem& problem,
                                     std::span<const double> x, double h);

}  // namespace adausm
