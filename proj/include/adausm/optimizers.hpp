#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "adausm/schedules.hpp"

namespace adausm {

enum class LrMode {
  ConstantEta,    // base step size eta at every t (the analyzed form)
  EtaOverSqrtT,   // base step size eta/sqrt(t) (the common experimental form)
};

LrMode parse_lr_mode(std::string_view text);  // "constant" | "diminishing"
std::string to_string(LrMode mode);

// Weighted adaptive optimizer with unified momentum. lambda interpolates the
// momentum style: 0 is heavy-ball, 1 is Nesterov, anything up to 1/(1-mu) is
// admissible.
struct AdaUsmConfig {
  double eta;
  double mu;
  double lambda;
  double epsilon;
  WeightSchedule schedule = WeightSchedule::constant();
  LrMode lr_mode = LrMode::ConstantEta;

  static AdaUsmConfig make(double eta, double mu, double lambda, double epsilon,
                           WeightSchedule schedule, LrMode lr_mode);
  // Test-only: epsilon == 0 so step sizes match hand algebra exactly. Callers
  // must guarantee nonzero gradients; make() rejects epsilon == 0.
  static AdaUsmConfig testing_zero_epsilon(double eta, double mu, double lambda,
                                           WeightSchedule schedule, LrMode lr_mode);
};

// Benchmark-defaults presets: eta 0.001, linear weights (poly:1), mu 0.9,
// epsilon 1e-8, constant base step size.
AdaUsmConfig adahb_preset(double eta = 1e-3, double mu = 0.9, double epsilon = 1e-8,
                          WeightSchedule schedule = WeightSchedule::polynomial(1.0));
AdaUsmConfig adanag_preset(double eta = 1e-3, double mu = 0.9, double epsilon = 1e-8,
                           WeightSchedule schedule = WeightSchedule::polynomial(1.0));

struct AdaUsmState {
  std::int64_t t = 0;
  std::vector<double> x;
  std::vector<double> m;  // momentum, 0 at t = 0
  std::vector<double> r;  // v_t / a_t per coordinate, 0 at t = 0
  ScheduleAccumulator sched;
};

AdaUsmState adausm_init(const AdaUsmConfig& cfg, std::span<const double> x1);

// Advances one step. The input state is consumed; the advanced state is
// returned. lr_out, when non-empty, receives the per-coordinate step size
// this step applied (same values effective_lr reports afterwards).
AdaUsmState adausm_step(AdaUsmState state, const AdaUsmConfig& cfg,
                        std::span<const double> g, std::span<double> lr_out = {});

// Per-coordinate step size of the most recent step, recomputed from (r, t).
// Every coordinate lies in (0, base_eta(t)/epsilon].
std::vector<double> effective_lr(const AdaUsmState& state, const AdaUsmConfig& cfg);

double base_eta(const AdaUsmConfig& cfg, std::int64_t t);

// Flat one-record CSV snapshot of the full state: t, A_over_a, then x, m, r.
std::string snapshot_to_csv(const AdaUsmState& state);
AdaUsmState snapshot_from_csv(std::string_view text);

enum class BaselineKind { Sgd, SgdMomentum, Snag, AdaGrad, Adam, AmsGrad, RmsProp, AdaEma };

struct BaselineConfig {
  BaselineKind kind;
  double eta;
  double mu;     // momentum factor, or beta1 for the EMA family; unused by
                 // sgd/adagrad/rmsprop
  double beta2;  // second-moment decay (adam/amsgrad/rmsprop); adaema replaces
                 // it with 1 - 1/t
  double epsilon;
  LrMode lr_mode = LrMode::ConstantEta;

  static BaselineConfig make(BaselineKind kind, double eta, double mu, double beta2,
                             double epsilon, LrMode lr_mode);
  static BaselineConfig testing_zero_epsilon(BaselineKind kind, double eta, double mu,
                                             double beta2, LrMode lr_mode);
};

struct BaselineState {
  std::int64_t t = 0;
  std::vector<double> x;
  std::vector<double> m;      // momentum / raw first-moment EMA
  std::vector<double> v;      // raw second-moment accumulator or EMA
  std::vector<double> v_max;  // amsgrad running max of the corrected EMA
  std::vector<double> y;      // auxiliary sequence of the Nesterov y-form
};

BaselineState baseline_init(const BaselineConfig& cfg, std::span<const double> x1);
BaselineState baseline_step(BaselineState state, const BaselineConfig& cfg,
                            std::span<const double> g, std::span<double> lr_out = {});
std::vector<double> baseline_effective_lr(const BaselineState& state,
                                          const BaselineConfig& cfg);
// mu for momentum methods, beta1 for the EMA family, 0 otherwise; the factor
// the trace's cumulative momentum-energy columns use.
double baseline_momentum_factor(const BaselineConfig& cfg);

// One optimizer request as written in an experiment config. Unset fields fall
// back to per-method defaults (see resolve in make_optimizer_run).
struct OptimizerSpec {
  std::string name = "adahb";
  std::optional<double> eta;
  std::optional<double> mu;      // momentum factor or beta1
  std::optional<double> lambda;  // adausm only
  std::optional<double> beta2;
  std::optional<double> epsilon;
  std::optional<std::string> schedule;
  std::optional<LrMode> lr_mode;

  friend bool operator==(const OptimizerSpec&, const OptimizerSpec&) = default;
};

inline constexpr std::string_view optimizer_names[] = {
    "adausm", "adahb", "adanag", "adagrad", "sgd", "sgdm",
    "snag",   "adam",  "amsgrad", "rmsprop", "adaema"};

// Uniform stepping facade over the adaptive method and every baseline; what
// the experiment runner and the equivalence tests drive.
class OptimizerRun {
 public:
  virtual ~OptimizerRun() = default;
  virtual void step(std::span<const double> g) = 0;
  virtual std::span<const double> x() const = 0;
  virtual std::span<const double> last_lr() const = 0;  // empty before any step
  virtual double momentum_factor() const = 0;
  virtual std::int64_t t() const = 0;
  virtual const std::string& name() const = 0;
};

// Resolves defaults, validates, and builds a runnable optimizer. Throws
// std::invalid_argument for an unknown name, listing the valid ones.
std::unique_ptr<OptimizerRun> make_optimizer_run(const OptimizerSpec& spec,
                                                 std::span<const double> x1);
// The eta a spec will run at after defaulting (used by grid reporting).
double resolved_eta(const OptimizerSpec& spec);

}  // namespace adausm
