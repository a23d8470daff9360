#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "adausm/errors.hpp"
#include "adausm/kernels.hpp"
#include "adausm/problems.hpp"
#include "adausm/rng.hpp"
#include "doctest.h"

using namespace adausm;
namespace fs = std::filesystem;

namespace {

std::vector<double> point_in_box(std::uint64_t seed, std::size_t d) {
  std::vector<double> x(d);
  for (std::size_t k = 0; k < d; ++k) x[k] = 2.0 * uniform01(mix64(seed, k)) - 1.0;
  return x;
}

void check_grad_matches_fd(const StochasticProblem& p, std::span<const double> x) {
  auto ex = p.exact_grad(x);
  auto fd = finite_diff_grad(p, x, 1e-5);
  for (std::size_t k = 0; k < p.dim; ++k) {
    double tol = 1e-5 * std::max(1.0, std::abs(ex[k]));
    CHECK(std::abs(fd[k] - ex[k]) <= tol);
  }
}

fs::path temp_file(const char* tag) {
  return fs::temp_directory_path() / (std::string("adausm_problems_") + tag + ".csv");
}

}  // namespace

TEST_SUITE("problems") {

TEST_CASE("quadratic curvature spectrum is log-spaced") {
  auto p1 = make_noisy_quadratic(1, 7.0, 0.0, 1);
  CHECK(p1.exact_grad(std::vector<double>{1.0})[0] == 7.0);
  CHECK(p1.loss(std::vector<double>{2.0}) == 14.0);

  auto p3 = make_noisy_quadratic(3, 100.0, 0.0, 1);
  std::vector<double> ones{1.0, 1.0, 1.0};
  auto g = p3.exact_grad(ones);
  CHECK(g[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(g[1] == doctest::Approx(10.0).epsilon(1e-14));
  CHECK(g[2] == doctest::Approx(100.0).epsilon(1e-14));
  CHECK(p3.loss(ones) == doctest::Approx(55.5).epsilon(1e-14));
  CHECK(p3.f_star == 0.0);
  CHECK(p3.lipschitz_L == 100.0);
}

TEST_CASE("quadratic input validation") {
  auto p = make_noisy_quadratic(2, 10.0, 0.1, 1);
  CHECK_THROWS_AS(p.loss(std::vector<double>{1.0}), std::invalid_argument);
  double nan = std::nan("");
  CHECK_THROWS_AS(p.exact_grad(std::vector<double>{1.0, nan}), NonFiniteError);
  CHECK_THROWS_AS(make_noisy_quadratic(0, 10.0, 0.1, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_noisy_quadratic(2, 0.5, 0.1, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_noisy_quadratic(2, 10.0, -0.1, 1), std::invalid_argument);
}

TEST_CASE("quadratic noise: bounded support, zero mean, key-pure") {
  const double sigma = 0.1;
  auto p = make_noisy_quadratic(2, 4.0, sigma, 9);
  auto x = std::vector<double>{0.3, -0.8};
  auto exact = p.exact_grad(x);

  const int n_keys = 2000;
  std::vector<double> mean(2, 0.0);
  for (int key = 0; key < n_keys; ++key) {
    auto g = p.stochastic_grad(x, std::uint64_t(key));
    for (std::size_t k = 0; k < 2; ++k) {
      double noise = g[k] - exact[k];
      CHECK(std::abs(noise) <= sigma * std::sqrt(3.0) + 1e-15);
      mean[k] += noise;
    }
  }
  // Mean of n_keys iid draws with std sigma: 5-sigma band plus a hair extra.
  for (std::size_t k = 0; k < 2; ++k)
    CHECK(std::abs(mean[k] / n_keys) <= 5.0 * sigma / std::sqrt(double(n_keys)) + 1e-6);

  auto a = p.stochastic_grad(x, 123);
  auto b = p.stochastic_grad(x, 123);
  CHECK(a == b);
  CHECK(a != p.stochastic_grad(x, 124));
}

TEST_CASE("quadratic gradient-norm certificate") {
  auto p = make_noisy_quadratic(2, 4.0, 0.5, 3);
  CHECK(*p.sigma_bound ==
        doctest::Approx(std::sqrt(17.0) + std::sqrt(6.0) * 0.5).epsilon(1e-14));
  for (int trial = 0; trial < 200; ++trial) {
    auto x = point_in_box(mix64(51, trial), 2);
    auto g = p.stochastic_grad(x, mix64(52, trial));
    double norm_sq = g[0] * g[0] + g[1] * g[1];
    CHECK(norm_sq <= (*p.sigma_bound) * (*p.sigma_bound));
  }
}

TEST_CASE("banana valley") {
  auto p = make_rosenbrock_noisy(0.0, 1);
  CHECK(p.dim == 2);
  CHECK(p.loss(std::vector<double>{0.0, 0.0}) == 1.0);
  CHECK(p.loss(std::vector<double>{1.0, 1.0}) == 0.0);
  auto g = p.exact_grad(std::vector<double>{-1.0, 1.0});
  CHECK(g[0] == -4.0);
  CHECK(g[1] == 0.0);
  CHECK(p.f_star == 0.0);
  CHECK_FALSE(p.lipschitz_L.has_value());

  auto pn = make_rosenbrock_noisy(0.25, 1);
  CHECK(*pn.sigma_bound ==
        doctest::Approx(std::sqrt(804.0 * 804.0 + 400.0 * 400.0) +
                        std::sqrt(6.0) * 0.25)
            .epsilon(1e-14));
  for (int trial = 0; trial < 200; ++trial) {
    auto x = point_in_box(mix64(61, trial), 2);
    auto gg = pn.stochastic_grad(x, mix64(62, trial));
    CHECK(gg[0] * gg[0] + gg[1] * gg[1] <= (*pn.sigma_bound) * (*pn.sigma_bound));
  }
}

TEST_CASE("logistic objective on a hand-checkable dataset") {
  Dataset ds;
  ds.n = 4;
  ds.d = 2;
  ds.features = {1.0, 0.0, 0.0, 1.0, -1.0, 0.0, 0.0, -1.0};
  ds.labels = {1.0, 0.0, 1.0, 0.0};
  const double l2 = 0.1;
  auto p = make_logistic(ds, 4, l2, 5);

  CHECK(p.dim == 2);
  // All row norms are 1: L = (4/4)/4 + l2, gradient cap = 1 + l2*sqrt(2).
  CHECK(*p.lipschitz_L == doctest::Approx(0.25 + l2).epsilon(1e-14));
  CHECK(*p.sigma_bound == doctest::Approx(1.0 + l2 * std::sqrt(2.0)).epsilon(1e-14));
  CHECK(p.loss(std::vector<double>{0.0, 0.0}) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-14));

  std::vector<double> w{0.7, -0.4};
  auto g = p.exact_grad(w);
  std::vector<double> expect(2, 0.0);
  for (std::size_t i = 0; i < ds.n; ++i) {
    double z = w[0] * ds.features[i * 2] + w[1] * ds.features[i * 2 + 1];
    double s = stable_sigmoid(z) - ds.labels[i];
    expect[0] += s * ds.features[i * 2];
    expect[1] += s * ds.features[i * 2 + 1];
  }
  for (std::size_t k = 0; k < 2; ++k) {
    expect[k] = expect[k] / 4.0 + l2 * w[k];
    CHECK(g[k] == doctest::Approx(expect[k]).epsilon(1e-13));
  }

  // Full-batch mode ignores the key and equals the exact gradient bitwise.
  auto sg = p.stochastic_grad(w, 999);
  CHECK(sg == g);
}

TEST_CASE("logistic mini-batches are without-replacement subsets of the declared size") {
  Dataset ds;
  ds.n = 4;
  ds.d = 2;
  ds.features = {1.0, 0.2, -0.3, 1.0, -1.0, 0.4, 0.6, -1.0};
  ds.labels = {1.0, 0.0, 1.0, 0.0};
  const double l2 = 0.05;
  const std::size_t batch = 2;
  auto p = make_logistic(ds, batch, l2, 7);
  std::vector<double> w{0.3, -0.2};

  // Candidate gradients of every sorted 2-subset, built the same way the
  // problem builds them.
  std::vector<std::vector<double>> candidates;
  for (std::size_t i = 0; i < ds.n; ++i)
    for (std::size_t j = i + 1; j < ds.n; ++j) {
      std::vector<std::size_t> rows{i, j};
      std::vector<double> g(2);
      logistic_grad_sum(ds.features.data(), ds.labels.data(), rows.data(), 2, 2, w, g);
      for (std::size_t k = 0; k < 2; ++k) g[k] = g[k] / double(batch) + l2 * w[k];
      candidates.push_back(g);
    }

  std::vector<bool> seen(candidates.size(), false);
  for (std::uint64_t key = 0; key < 200; ++key) {
    auto g = p.stochastic_grad(w, key);
    auto it = std::find(candidates.begin(), candidates.end(), g);
    REQUIRE(it != candidates.end());
    seen[std::size_t(it - candidates.begin())] = true;
    CHECK(p.stochastic_grad(w, key) == g);  // key purity
  }
  // 200 keys over 6 subsets: every subset shows up.
  CHECK(std::count(seen.begin(), seen.end(), true) == std::int64_t(candidates.size()));
}

TEST_CASE("logistic constructor validation") {
  Dataset ds;
  ds.n = 2;
  ds.d = 1;
  ds.features = {1.0, -1.0};
  ds.labels = {1.0, 0.0};
  CHECK_THROWS_AS(make_logistic(ds, 0, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_logistic(ds, 3, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_logistic(ds, 1, -0.1, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_logistic(Dataset{}, 1, 0.0, 1), std::invalid_argument);
  Dataset bad = ds;
  bad.labels.pop_back();
  CHECK_THROWS_AS(make_logistic(bad, 1, 0.0, 1), std::invalid_argument);
}

TEST_CASE("exact gradients agree with central differences") {
  auto quad = make_noisy_quadratic(5, 50.0, 0.0, 1);
  auto rosen = make_rosenbrock_noisy(0.0, 1);
  auto data = generate_synthetic_classification(60, 3, 2.0, 11);
  auto logi = make_logistic(std::move(data), 60, 0.1, 11);
  for (int trial = 0; trial < 10; ++trial) {
    check_grad_matches_fd(quad, point_in_box(mix64(71, trial), 5));
    check_grad_matches_fd(rosen, point_in_box(mix64(72, trial), 2));
    check_grad_matches_fd(logi, point_in_box(mix64(73, trial), 3));
  }
  CHECK_THROWS_AS(finite_diff_grad(quad, point_in_box(1, 5), 0.0), std::invalid_argument);
}

TEST_CASE("synthetic classification data generator") {
  auto a = generate_synthetic_classification(50, 4, 3.0, 21);
  auto b = generate_synthetic_classification(50, 4, 3.0, 21);
  CHECK(a == b);
  CHECK(a.n == 50);
  CHECK(a.d == 4);
  CHECK(a.features.size() == 200);
  for (std::size_t i = 0; i < a.n; ++i) CHECK(a.labels[i] == double(i % 2));
  CHECK(a != generate_synthetic_classification(50, 4, 3.0, 22));

  // With wide separation the per-class feature means straddle zero.
  auto wide = generate_synthetic_classification(400, 2, 20.0, 23);
  double mean0 = 0.0, mean1 = 0.0;
  for (std::size_t i = 0; i < wide.n; ++i)
    (wide.labels[i] > 0.5 ? mean1 : mean0) += wide.features[i * 2];
  CHECK(mean1 / 200.0 > 1.0);
  CHECK(mean0 / 200.0 < -1.0);

  CHECK_THROWS_AS(generate_synthetic_classification(0, 4, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(generate_synthetic_classification(5, 4, -1.0, 1), std::invalid_argument);
}

TEST_CASE("dataset CSV round trip is exact") {
  auto ds = generate_synthetic_classification(30, 3, 1.5, 31);
  auto path = temp_file("roundtrip");
  save_csv(ds, path.string());
  auto back = load_csv(path.string(), "label");
  CHECK(back == ds);
  fs::remove(path);
}

TEST_CASE("CSV loader error coordinates and messages") {
  auto path = temp_file("badcell");
  {
    std::ofstream out(path);
    out << "f0,f1,label\n1,2,0\n1,abc,1\n";
  }
  try {
    load_csv(path.string(), "label");
    FAIL("expected CsvError");
  } catch (const CsvError& e) {
    CHECK(e.row() == 3);
    CHECK(e.col() == 2);
    CHECK(std::string(e.what()) == "non-numeric cell 'abc' at (3,2)");
  }
  CHECK_THROWS_WITH_AS(load_csv(path.string(), "y"),
                       "label column 'y' not found; available columns: f0, f1, label",
                       std::invalid_argument);
  fs::remove(path);

  auto empty = temp_file("empty");
  { std::ofstream out(empty); }
  CHECK_THROWS_AS(load_csv(empty.string(), "label"), CsvError);
  fs::remove(empty);

  auto headeronly = temp_file("headeronly");
  {
    std::ofstream out(headeronly);
    out << "f0,label\n";
  }
  try {
    load_csv(headeronly.string(), "label");
    FAIL("expected CsvError");
  } catch (const CsvError& e) {
    CHECK(e.row() == 2);
    CHECK(e.col() == 1);
  }
  fs::remove(headeronly);

  auto labelonly = temp_file("labelonly");
  {
    std::ofstream out(labelonly);
    out << "label\n1\n";
  }
  CHECK_THROWS_AS(load_csv(labelonly.string(), "label"), CsvError);
  fs::remove(labelonly);

  auto ragged = temp_file("ragged");
  {
    std::ofstream out(ragged);
    out << "f0,f1,label\n1,2\n";
  }
  try {
    load_csv(ragged.string(), "label");
    FAIL("expected CsvError");
  } catch (const CsvError& e) {
    CHECK(e.row() == 2);
  }
  fs::remove(ragged);

  CHECK_THROWS_AS(load_csv("/nonexistent/nope.csv", "label"), std::invalid_argument);
}

}  // TEST_SUITE
