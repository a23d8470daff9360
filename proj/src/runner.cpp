#include "adausm/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "adausm/errors.hpp"
#include "adausm/rng.hpp"
#include "adausm/textutil.hpp"

namespace adausm {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace

StochasticProblem build_problem(const ProblemSpec& spec) {
  if (spec.name == "noisy_quadratic")
    return make_noisy_quadratic(spec.dim, spec.condition_number, spec.noise_sigma, spec.seed);
  if (spec.name == "rosenbrock")
    return make_rosenbrock_noisy(spec.noise_sigma, spec.seed);
  if (spec.name == "logistic") {
    Dataset data = spec.csv_path.empty()
                       ? generate_synthetic_classification(spec.n, spec.dim, spec.separation,
                                                           spec.seed)
                       : load_csv(spec.csv_path, spec.label_column);
    std::size_t batch = spec.batch_size == 0 ? data.n : spec.batch_size;
    return make_logistic(std::move(data), batch, spec.l2, spec.seed);
  }
  throw std::invalid_argument("unknown problem '" + spec.name +
                              "'; valid names: noisy_quadratic, rosenbrock, logistic");
}

std::vector<double> start_point(const RunSettings& run, const StochasticProblem& problem) {
  if (!run.x1.empty()) {
    if (run.x1.size() != problem.dim)
      throw std::invalid_argument("x1 has " + std::to_string(run.x1.size()) +
                                  " entries but the problem dimension is " +
                                  std::to_string(problem.dim));
    return run.x1;
  }
  double fill = run.x1_fill.value_or(problem.name == "logistic" ? 0.0 : 0.5);
  return std::vector<double>(problem.dim, fill);
}

std::uint64_t sample_key(std::uint64_t seed, std::int64_t t) {
  return mix64(mix64(seed) ^ std::uint64_t(t));
}

RunTrace run_single(const StochasticProblem& problem, const OptimizerSpec& spec,
                    std::span<const double> x1, std::uint64_t seed,
                    std::int64_t steps, std::int64_t record_every) {
  if (steps < 1) throw std::invalid_argument("steps must be >= 1");
  if (record_every < 1) throw std::invalid_argument("record_every must be >= 1");

  RunTrace trace;
  trace.optimizer = spec.name;
  trace.seed = seed;
  trace.eta = resolved_eta(spec);

  auto opt = make_optimizer_run(spec, x1);
  const double mu = opt->momentum_factor();
  const double rhs_scale = 1.0 / ((1.0 - mu) * (1.0 - mu));
  const std::size_t d = x1.size();

  std::vector<double> shadow_m(d, 0.0);
  std::vector<double> x_prev;
  double lhs_sum = 0.0, step_sq_sum = 0.0;

  for (std::int64_t t = 1; t <= steps; ++t) {
    bool record = t == 1 || t == steps || t % record_every == 0;
    double loss = kNan, grad_norm = kNan;
    if (record) {
      loss = problem.loss(opt->x());
      if (!std::isfinite(loss)) {
        trace.diverged = true;
        break;
      }
      grad_norm = l2_norm(problem.exact_grad(opt->x()));
      x_prev.assign(opt->x().begin(), opt->x().end());
    }

    std::vector<double> g;
    try {
      g = problem.stochastic_grad(opt->x(), sample_key(seed, t));
    } catch (const NonFiniteError&) {
      trace.diverged = true;
      break;
    }
    opt->step(g);

    auto lr = opt->last_lr();
    double m_sq = 0.0, s_sq = 0.0, lr_sum = 0.0, lr_max = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      double s = lr[k] * g[k];
      shadow_m[k] = mu * shadow_m[k] - s;
      m_sq += shadow_m[k] * shadow_m[k];
      s_sq += s * s;
      lr_sum += lr[k];
      lr_max = std::max(lr_max, lr[k]);
    }
    lhs_sum += m_sq;
    step_sq_sum += s_sq;

    if (!all_finite(opt->x())) {
      trace.diverged = true;
      break;
    }
    if (record) {
      double step_sq = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        double dx = opt->x()[k] - x_prev[k];
        step_sq += dx * dx;
      }
      trace.rows.push_back({t, loss, grad_norm, std::sqrt(step_sq), lr_sum / double(d),
                            lr_max, lhs_sum, rhs_scale * step_sq_sum});
    }
  }

  if (!trace.diverged) {
    double rhs = rhs_scale * step_sq_sum;
    if (!(lhs_sum <= rhs * (1.0 + 1e-9) + 1e-12))
      throw std::logic_error("momentum energy bound violated at end of run: " +
                             fmt_double(lhs_sum) + " > " + fmt_double(rhs));
  }
  return trace;
}

std::vector<RunTrace> run_experiment(const ExperimentConfig& cfg) {
  if (cfg.optimizers.empty())
    throw std::invalid_argument("config declares no [[optimizer]] blocks");

  StochasticProblem problem = build_problem(cfg.problem);
  std::vector<double> x1 = start_point(cfg.run, problem);
  std::string hash = config_hash(cfg);

  struct Request {
    OptimizerSpec spec;
    std::size_t opt_index;
    std::uint64_t seed;
  };
  std::vector<Request> requests;
  for (std::size_t i = 0; i < cfg.optimizers.size(); ++i) {
    std::vector<double> etas;
    if (cfg.run.eta_grid.empty())
      etas.push_back(resolved_eta(cfg.optimizers[i]));
    else
      etas = cfg.run.eta_grid;
    for (double eta : etas) {
      OptimizerSpec spec = cfg.optimizers[i];
      spec.eta = eta;
      make_optimizer_run(spec, x1);  // validate before committing to the sweep
      for (std::uint64_t seed : cfg.run.seeds) requests.push_back({spec, i, seed});
    }
  }

  std::vector<RunTrace> traces(requests.size());
  std::vector<std::exception_ptr> errors(requests.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < requests.size(); ++i) {
    try {
      traces[i] = run_single(problem, requests[i].spec, x1, requests[i].seed,
                             cfg.run.steps, cfg.run.record_every);
      traces[i].opt_index = requests[i].opt_index;
      traces[i].config_hash = hash;
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return traces;
}

double loglog_slope(std::span<const double> t, std::span<const double> y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < t.size() && i < y.size(); ++i) {
    if (!(t[i] > 0.0) || !(y[i] > 0.0)) continue;
    double lx = std::log(t[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return 0.0;
  double denom = double(n) * sxx - sx * sx;
  if (denom <= 0.0) return 0.0;
  return (double(n) * sxy - sx * sy) / denom;
}

RunSummary summarize(const RunTrace& trace) {
  if (trace.rows.empty()) return {kNan, kNan, kNan};
  RunSummary s;
  s.final_loss = trace.rows.back().loss;
  double running = std::numeric_limits<double>::infinity();
  std::int64_t half = trace.rows.back().t / 2;
  std::vector<double> ts, ys;
  for (const auto& row : trace.rows) {
    running = std::min(running, row.grad_norm);
    if (row.t > half) {
      ts.push_back(double(row.t));
      ys.push_back(std::max(running * running, 1e-300));
    }
  }
  s.min_grad_norm = running;
  s.slope = loglog_slope(ts, ys);
  return s;
}

std::map<std::size_t, double> grid_select(std::span<const RunTrace> traces) {
  // score[opt_index][eta] -> (sum of final losses, runs, disqualified)
  struct Cell {
    double loss_sum = 0.0;
    std::size_t n = 0;
    bool bad = false;
  };
  std::map<std::size_t, std::map<double, Cell>> table;
  for (const auto& tr : traces) {
    Cell& c = table[tr.opt_index][tr.eta];
    if (tr.diverged || tr.rows.empty() || !std::isfinite(tr.rows.back().loss)) {
      c.bad = true;
      continue;
    }
    c.loss_sum += tr.rows.back().loss;
    c.n += 1;
  }

  std::map<std::size_t, double> best;
  for (const auto& [idx, cells] : table) {
    bool found = false;
    double best_eta = 0.0, best_score = 0.0;
    for (const auto& [eta, cell] : cells) {  // ascending eta: ties keep the smaller
      if (cell.bad || cell.n == 0) continue;
      double score = cell.loss_sum / double(cell.n);
      if (!found || score < best_score) {
        found = true;
        best_eta = eta;
        best_score = score;
      }
    }
    if (!found)
      throw std::runtime_error("no finite run for optimizer index " + std::to_string(idx) +
                               "; every eta diverged");
    best[idx] = best_eta;
  }
  return best;
}

std::string trace_filename(const RunTrace& trace) {
  return trace.optimizer + "_i" + std::to_string(trace.opt_index) + "_s" +
         std::to_string(trace.seed) + "_eta" + fmt_double(trace.eta) + ".csv";
}

std::string trace_to_csv(const RunTrace& trace) {
  std::string out(trace_header);
  out += "\n";
  for (const auto& r : trace.rows) {
    out += fmt_int(r.t);
    out += ",";
    out += fmt_double(r.loss);
    out += ",";
    out += fmt_double(r.grad_norm);
    out += ",";
    out += fmt_double(r.step_norm);
    out += ",";
    out += fmt_double(r.lr_mean);
    out += ",";
    out += fmt_double(r.lr_max);
    out += ",";
    out += fmt_double(r.lemma2_lhs);
    out += ",";
    out += fmt_double(r.lemma2_rhs);
    out += "\n";
  }
  return out;
}

std::vector<TraceRow> read_trace_rows(std::string_view text) {
  auto lines = split(text, '\n');
  if (lines.empty() || trim(lines[0]) != trace_header)
    throw CsvError("trace header mismatch", 1, 1);
  std::vector<TraceRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto line = trim(lines[i]);
    if (line.empty()) continue;
    auto cells = split(line, ',');
    if (cells.size() != 8)
      throw CsvError("expected 8 columns, got " + std::to_string(cells.size()), i + 1, 1);
    TraceRow r;
    if (!parse_int(trim(cells[0]), r.t)) throw CsvError("bad step index", i + 1, 1);
    double* fields[7] = {&r.loss,    &r.grad_norm,  &r.step_norm, &r.lr_mean,
                         &r.lr_max,  &r.lemma2_lhs, &r.lemma2_rhs};
    for (std::size_t c = 0; c < 7; ++c)
      if (!parse_double(trim(cells[c + 1]), *fields[c]))
        throw CsvError("bad number '" + std::string(trim(cells[c + 1])) + "'", i + 1, c + 2);
    rows.push_back(r);
  }
  return rows;
}

std::string write_experiment_outputs(std::span<const RunTrace> traces,
                                     const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw std::runtime_error("cannot create output directory '" + dir + "'");

  std::string manifest =
      "file,optimizer,opt_index,seed,eta,config_hash,diverged,rows,final_loss,"
      "min_grad_norm,slope\n";
  for (const auto& tr : traces) {
    std::string name = trace_filename(tr);
    fs::path path = fs::path(dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write trace file '" + path.string() + "'");
    out << trace_to_csv(tr);
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");

    RunSummary s = summarize(tr);
    manifest += name + "," + tr.optimizer + "," + std::to_string(tr.opt_index) + "," +
                std::to_string(tr.seed) + "," + fmt_double(tr.eta) + "," + tr.config_hash +
                "," + (tr.diverged ? "1" : "0") + "," + std::to_string(tr.rows.size()) +
                "," + fmt_double(s.final_loss) + "," + fmt_double(s.min_grad_norm) + "," +
                fmt_double(s.slope) + "\n";
  }
  fs::path mpath = fs::path(dir) / "runs.csv";
  std::ofstream mout(mpath, std::ios::binary);
  if (!mout) throw std::runtime_error("cannot write manifest '" + mpath.string() + "'");
  mout << manifest;
  if (!mout) throw std::runtime_error("write failed for '" + mpath.string() + "'");
  return mpath.string();
}

std::string resolve_output_dir(const std::string& cli_out, const ExperimentConfig& cfg) {
  if (!cli_out.empty()) return cli_out;
  if (!cfg.run.output_dir.empty()) return cfg.run.output_dir;
  if (const char* env = std::getenv("ADAUSM_OUT_DIR"); env && *env) return env;
  return "out";
}

}  // namespace adausm
