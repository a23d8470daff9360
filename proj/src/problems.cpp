#include "adausm/problems.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "adausm/errors.hpp"
#include "adausm/kernels.hpp"
#include "adausm/rng.hpp"
#include "adausm/textutil.hpp"

namespace adausm {

namespace {

void check_point(std::span<const double> x, std::size_t dim) {
  if (x.size() != dim)
    throw std::invalid_argument("point has dimension " + std::to_string(x.size()) +
                                ", problem has " + std::to_string(dim));
  for (std::size_t k = 0; k < x.size(); ++k)
    if (!std::isfinite(x[k])) throw NonFiniteError("non-finite point", k);
}

}  // namespace

StochasticProblem make_noisy_quadratic(std::size_t dim, double condition_number,
                                       double noise_sigma, std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("noisy quadratic: dim must be >= 1");
  if (!(condition_number >= 1.0))
    throw std::invalid_argument("noisy quadratic: condition_number must be >= 1");
  if (!(noise_sigma >= 0.0))
    throw std::invalid_argument("noisy quadratic: noise_sigma must be >= 0");

  std::vector<double> diag(dim);
  if (dim == 1) {
    diag[0] = condition_number;
  } else {
    for (std::size_t k = 0; k < dim; ++k)
      diag[k] = std::pow(condition_number, double(k) / double(dim - 1));
  }

  double diag_norm_sq = 0.0;
  for (double dv : diag) diag_norm_sq += dv * dv;

  StochasticProblem p;
  p.name = "noisy_quadratic";
  p.dim = dim;
  p.f_star = 0.0;
  p.lipschitz_L = condition_number;
  // ||D x|| + ||noise|| over the reference box ||x||_inf <= 1.
  p.sigma_bound = std::sqrt(diag_norm_sq) +
                  std::sqrt(3.0 * double(dim)) * noise_sigma;
  p.loss = [diag, dim](std::span<const double> x) {
    check_point(x, dim);
    double s = 0.0;
    for (std::size_t k = 0; k < dim; ++k) s += diag[k] * x[k] * x[k];
    return 0.5 * s;
  };
  p.exact_grad = [diag, dim](std::span<const double> x) {
    check_point(x, dim);
    std::vector<double> g(dim);
    for (std::size_t k = 0; k < dim; ++k) g[k] = diag[k] * x[k];
    return g;
  };
  p.stochastic_grad = [diag, dim, noise_sigma, seed](std::span<const double> x,
                                                     std::uint64_t key) {
    check_point(x, dim);
    std::vector<double> g(dim);
    for (std::size_t k = 0; k < dim; ++k)
      g[k] = diag[k] * x[k] + bounded_noise(noise_sigma, seed, key, k);
    return g;
  };
  return p;
}

StochasticProblem make_rosenbrock_noisy(double noise_sigma, std::uint64_t seed) {
  if (!(noise_sigma >= 0.0))
    throw std::invalid_argument("rosenbrock: noise_sigma must be >= 0");
  StochasticProblem p;
  p.name = "rosenbrock";
  p.dim = 2;
  p.f_star = 0.0;
  // Gradient sup over the box ||(x,y)||_inf <= 1: |df/dx| <= 2*2 + 400*1*2 = 804,
  // |df/dy| <= 200*2 = 400; noise adds at most sqrt(6)*sigma in norm.
  p.sigma_bound = std::sqrt(804.0 * 804.0 + 400.0 * 400.0) +
                  std::sqrt(6.0) * noise_sigma;
  p.loss = [](std::span<const double> v) {
    check_point(v, 2);
    double a = 1.0 - v[0];
    double b = v[1] - v[0] * v[0];
    return a * a + 100.0 * b * b;
  };
  p.exact_grad = [](std::span<const double> v) {
    check_point(v, 2);
    double b = v[1] - v[0] * v[0];
    return std::vector<double>{-2.0 * (1.0 - v[0]) - 400.0 * v[0] * b, 200.0 * b};
  };
  p.stochastic_grad = [noise_sigma, seed](std::span<const double> v, std::uint64_t key) {
    check_point(v, 2);
    double b = v[1] - v[0] * v[0];
    return std::vector<double>{
        -2.0 * (1.0 - v[0]) - 400.0 * v[0] * b + bounded_noise(noise_sigma, seed, key, 0),
        200.0 * b + bounded_noise(noise_sigma, seed, key, 1)};
  };
  return p;
}

StochasticProblem make_logistic(Dataset data, std::size_t batch_size, double l2,
                                std::uint64_t seed) {
  if (data.n == 0 || data.d == 0) throw std::invalid_argument("logistic: empty dataset");
  if (data.features.size() != data.n * data.d || data.labels.size() != data.n)
    throw std::invalid_argument("logistic: inconsistent dataset sizes");
  if (batch_size < 1 || batch_size > data.n)
    throw std::invalid_argument("logistic: batch_size must be in [1, n]");
  if (!(l2 >= 0.0)) throw std::invalid_argument("logistic: l2 must be >= 0");

  auto ds = std::make_shared<const Dataset>(std::move(data));
  std::size_t n = ds->n, d = ds->d;

  double max_row_norm_sq = 0.0, sum_row_norm_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      double f = ds->features[i * d + k];
      s += f * f;
    }
    max_row_norm_sq = std::max(max_row_norm_sq, s);
    sum_row_norm_sq += s;
  }

  StochasticProblem p;
  p.name = "logistic";
  p.dim = d;
  // Upper bound on the smoothness constant: lambda_max(X^T X / n)/4 + l2 is at
  // most trace(X^T X / n)/4 + l2.
  p.lipschitz_L = sum_row_norm_sq / double(n) / 4.0 + l2;
  // |sigmoid - y| <= 1 row-wise, so any batch mean is at most the largest row
  // norm; the ridge term adds l2*sqrt(d) on the box ||w||_inf <= 1.
  p.sigma_bound = std::sqrt(max_row_norm_sq) + l2 * std::sqrt(double(d));

  p.loss = [ds, n, d, l2](std::span<const double> w) {
    check_point(w, d);
    double ridge = 0.0;
    for (double wk : w) ridge += wk * wk;
    return logistic_loss_sum(ds->features.data(), ds->labels.data(), n, d, w) / double(n) +
           0.5 * l2 * ridge;
  };

  auto full_grad = [ds, n, d, l2](std::span<const double> w) {
    check_point(w, d);
    std::vector<double> g(d);
    logistic_grad_sum(ds->features.data(), ds->labels.data(), nullptr, n, d, w, g);
    for (std::size_t k = 0; k < d; ++k) g[k] = g[k] / double(n) + l2 * w[k];
    return g;
  };
  p.exact_grad = full_grad;

  if (batch_size == n) {
    p.stochastic_grad = [full_grad](std::span<const double> w, std::uint64_t) {
      return full_grad(w);
    };
  } else {
    p.stochastic_grad = [ds, n, d, l2, batch_size, seed](std::span<const double> w,
                                                         std::uint64_t key) {
      check_point(w, d);
      // Without-replacement batch: partial Fisher-Yates driven by the key,
      // then sorted so the accumulation order is canonical.
      std::vector<std::size_t> idx(n);
      for (std::size_t i = 0; i < n; ++i) idx[i] = i;
      for (std::size_t j = 0; j < batch_size; ++j) {
        std::size_t pick = j + std::size_t(mix64(seed, key, j) % std::uint64_t(n - j));
        std::swap(idx[j], idx[pick]);
      }
      idx.resize(batch_size);
      std::sort(idx.begin(), idx.end());
      std::vector<double> g(d);
      logistic_grad_sum(ds->features.data(), ds->labels.data(), idx.data(), batch_size,
                        d, w, g);
      for (std::size_t k = 0; k < d; ++k) g[k] = g[k] / double(batch_size) + l2 * w[k];
      return g;
    };
  }
  return p;
}

Dataset generate_synthetic_classification(std::size_t n, std::size_t d,
                                          double separation, std::uint64_t seed) {
  if (n < 1 || d < 1) throw std::invalid_argument("generator: n and d must be >= 1");
  if (!(separation >= 0.0) || !std::isfinite(separation))
    throw std::invalid_argument("generator: separation must be finite and >= 0");
  Dataset ds;
  ds.n = n;
  ds.d = d;
  ds.features.resize(n * d);
  ds.labels.resize(n);
  double offset = 0.5 * separation / std::sqrt(double(d));
  for (std::size_t i = 0; i < n; ++i) {
    double label = double(i % 2);
    ds.labels[i] = label;
    double center = label > 0.5 ? offset : -offset;
    for (std::size_t k = 0; k < d; ++k)
      ds.features[i * d + k] = center + standard_normal(seed, i, k);
  }
  return ds;
}

Dataset load_csv(const std::string& path, const std::string& label_column) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open CSV file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();

  auto lines = split(text, '\n');
  // Row numbers are 1-based file lines; the header is row 1.
  if (lines.empty() || trim(lines[0]).empty())
    throw CsvError("missing header row", 1, 1);
  auto header = split(trim(lines[0]), ',');
  std::size_t n_cols = header.size();
  std::size_t label_col = n_cols;
  std::string available;
  for (std::size_t c = 0; c < n_cols; ++c) {
    std::string name(trim(header[c]));
    if (name == label_column) label_col = c;
    if (!available.empty()) available += ", ";
    available += name;
  }
  if (label_col == n_cols)
    throw std::invalid_argument("label column '" + label_column +
                                "' not found; available columns: " + available);
  if (n_cols < 2)
    throw CsvError("need at least one feature column besides the label", 1, 1);

  Dataset ds;
  ds.d = n_cols - 1;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    std::size_t row = li + 1;
    if (trim(lines[li]).empty()) continue;
    auto cells = split(trim(lines[li]), ',');
    if (cells.size() != n_cols)
      throw CsvError("row has " + std::to_string(cells.size()) + " cells, expected " +
                         std::to_string(n_cols),
                     row, 1);
    for (std::size_t c = 0; c < n_cols; ++c) {
      double v;
      std::string_view cell = trim(cells[c]);
      if (!parse_double(cell, v) || !std::isfinite(v))
        throw CsvError("non-numeric cell '" + std::string(cell) + "'", row, c + 1);
      if (c == label_col)
        ds.labels.push_back(v);
      else
        ds.features.push_back(v);
    }
    ++ds.n;
  }
  if (ds.n == 0) throw CsvError("no data rows", 2, 1);
  return ds;
}

void save_csv(const Dataset& data, const std::string& path,
              const std::string& label_column) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write CSV file '" + path + "'");
  for (std::size_t k = 0; k < data.d; ++k) out << "f" << k << ",";
  out << label_column << "\n";
  for (std::size_t i = 0; i < data.n; ++i) {
    for (std::size_t k = 0; k < data.d; ++k)
      out << fmt_double(data.features[i * data.d + k]) << ",";
    out << fmt_double(data.labels[i]) << "\n";
  }
  if (!out) throw std::runtime_error("write failed for CSV file '" + path + "'");
}

std::vector<double> finite_diff_grad(const StochasticProblem& problem,
                                     std::span<const double> x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite_diff_grad: h must be > 0");
  std::vector<double> probe(x.begin(), x.end());
  std::vector<double> g(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    double xk = probe[k];
    probe[k] = xk + h;
    double fp = problem.loss(probe);
    probe[k] = xk - h;
    double fm = problem.loss(probe);
    probe[k] = xk;
    g[k] = (fp - fm) / (2.0 * h);
  }
  return g;
}

}  // namespace adausm
