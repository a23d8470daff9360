#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "adausm/config.hpp"
#include "adausm/optimizers.hpp"
#include "adausm/problems.hpp"

namespace adausm {

// One recorded step. Column semantics (also the CSV column order):
//   t           1-based step index
//   loss        f(x_t), before step t applies
//   grad_norm   l2 norm of the exact full gradient at x_t
//   step_norm   ||x_{t+1} - x_t||
//   lr_mean / lr_max  statistics of the per-coordinate step sizes of step t
//   lemma2_lhs  cumulative sum_{i<=t} ||m_i||^2 for the momentum shadow
//               m_i = mu m_{i-1} - eta_i g_i started from zero
//   lemma2_rhs  cumulative (1-mu)^-2 sum_{i<=t} ||eta_i g_i||^2
// The shadow columns must satisfy lhs <= rhs on every row of every finished
// run; the runner asserts the final pair.
struct TraceRow {
  std::int64_t t;
  double loss, grad_norm, step_norm, lr_mean, lr_max, lemma2_lhs, lemma2_rhs;
};

inline constexpr std::string_view trace_header =
    "t,loss,grad_norm,step_norm,lr_mean,lr_max,lemma2_lhs,lemma2_rhs";

struct RunTrace {
  std::string optimizer;
  std::size_t opt_index = 0;  // position in the experiment's optimizer list
  std::uint64_t seed = 0;
  double eta = 0.0;
  std::string config_hash;
  bool diverged = false;
  std::vector<TraceRow> rows;
};

StochasticProblem build_problem(const ProblemSpec& spec);

// Explicit x1 list beats x1_fill beats the per-problem default fill.
std::vector<double> start_point(const RunSettings& run, const StochasticProblem& problem);

// Decorrelated per-step gradient sample key; pure in (seed, t).
std::uint64_t sample_key(std::uint64_t seed, std::int64_t t);

// Runs one optimizer for `steps` steps, recording rows at t == 1, t == steps,
// and multiples of record_every. A non-finite loss, gradient, or iterate stops
// the run early with diverged set. Throws std::logic_error if a finished run
// ends with its momentum energy columns in violation.
RunTrace run_single(const StochasticProblem& problem, const OptimizerSpec& spec,
                    std::span<const double> x1, std::uint64_t seed,
                    std::int64_t steps, std::int64_t record_every);

// Every optimizer x (eta_grid if non-empty, else the optimizer's own eta) x
// seed, in that nesting order. Runs execute in parallel; results and errors
// are reported in deterministic flattened order.
std::vector<RunTrace> run_experiment(const ExperimentConfig& cfg);

struct RunSummary {
  double final_loss;
  double min_grad_norm;
  // Log-log decay rate of the running minimum of grad_norm^2, fitted over the
  // recorded rows in the back half of the horizon; 0 when underdetermined.
  double slope;
};
RunSummary summarize(const RunTrace& trace);

// Least-squares slope of log y against log t, skipping non-positive entries.
double loglog_slope(std::span<const double> t, std::span<const double> y);

// Best eta per optimizer index: smallest mean final loss across seeds, ties
// to the smaller eta. An eta with any diverged or empty run is disqualified.
// Throws std::runtime_error when every eta of some optimizer failed.
std::map<std::size_t, double> grid_select(std::span<const RunTrace> traces);

std::string trace_filename(const RunTrace& trace);
std::string trace_to_csv(const RunTrace& trace);
std::vector<TraceRow> read_trace_rows(std::string_view text);

// Writes one CSV per trace plus a runs.csv manifest into dir (created if
// needed); returns the manifest path.
std::string write_experiment_outputs(std::span<const RunTrace> traces,
                                     const std::string& dir);

// Explicit flag beats the config's output_dir beats ADAUSM_OUT_DIR beats "out".
std::string resolve_output_dir(const std::string& cli_out, const ExperimentConfig& cfg);

}  // namespace adausm
