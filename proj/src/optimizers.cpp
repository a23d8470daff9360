#include "adausm/optimizers.hpp"

#include <cmath>
#include <stdexcept>

#include "adausm/errors.hpp"
#include "adausm/kernels.hpp"
#include "adausm/textutil.hpp"

namespace adausm {

namespace {

void check_finite_vector(std::span<const double> v, const char* what) {
  for (std::size_t k = 0; k < v.size(); ++k)
    if (!std::isfinite(v[k])) throw NonFiniteError(std::string("non-finite ") + what, k);
}

void check_dim(std::size_t got, std::size_t want, const char* what) {
  if (got != want)
    throw std::invalid_argument(std::string(what) + " has dimension " +
                                std::to_string(got) + ", state has " +
                                std::to_string(want));
}

double base_eta_for(double eta, LrMode mode, std::int64_t t) {
  return mode == LrMode::ConstantEta ? eta : eta / std::sqrt(double(t));
}

void validate_adausm(const AdaUsmConfig& c, bool allow_zero_epsilon) {
  if (!(c.eta > 0.0) || !std::isfinite(c.eta))
    throw std::invalid_argument("eta must be finite and > 0");
  if (!(c.mu >= 0.0 && c.mu < 1.0))
    throw std::invalid_argument("mu must be in [0, 1)");
  double lambda_max = 1.0 / (1.0 - c.mu);
  if (!(c.lambda >= 0.0 && c.lambda <= lambda_max))
    throw std::invalid_argument("lambda must be in [0, 1/(1-mu)] = [0, " +
                                fmt_double(lambda_max) + "]");
  bool eps_ok = allow_zero_epsilon ? c.epsilon >= 0.0 : c.epsilon > 0.0;
  if (!eps_ok || !std::isfinite(c.epsilon))
    throw std::invalid_argument("epsilon must be finite and > 0");
}

}  // namespace

LrMode parse_lr_mode(std::string_view text) {
  std::string_view s = trim(text);
  if (s == "constant") return LrMode::ConstantEta;
  if (s == "diminishing") return LrMode::EtaOverSqrtT;
  throw std::invalid_argument("unknown lr_mode '" + std::string(text) +
                              "'; valid: constant, diminishing");
}

std::string to_string(LrMode mode) {
  return mode == LrMode::ConstantEta ? "constant" : "diminishing";
}

AdaUsmConfig AdaUsmConfig::make(double eta, double mu, double lambda, double epsilon,
                                WeightSchedule schedule, LrMode lr_mode) {
  AdaUsmConfig c{eta, mu, lambda, epsilon, schedule, lr_mode};
  validate_adausm(c, /*allow_zero_epsilon=*/false);
  return c;
}

AdaUsmConfig AdaUsmConfig::testing_zero_epsilon(double eta, double mu, double lambda,
                                                WeightSchedule schedule, LrMode lr_mode) {
  AdaUsmConfig c{eta, mu, lambda, 0.0, schedule, lr_mode};
  validate_adausm(c, /*allow_zero_epsilon=*/true);
  return c;
}

AdaUsmConfig adahb_preset(double eta, double mu, double epsilon, WeightSchedule schedule) {
  return AdaUsmConfig::make(eta, mu, 0.0, epsilon, schedule, LrMode::ConstantEta);
}

AdaUsmConfig adanag_preset(double eta, double mu, double epsilon, WeightSchedule schedule) {
  return AdaUsmConfig::make(eta, mu, 1.0, epsilon, schedule, LrMode::ConstantEta);
}

AdaUsmState adausm_init(const AdaUsmConfig& cfg, std::span<const double> x1) {
  validate_adausm(cfg, /*allow_zero_epsilon=*/true);
  if (x1.empty()) throw std::invalid_argument("x1 must have dimension >= 1");
  check_finite_vector(x1, "x1");
  AdaUsmState s;
  s.x.assign(x1.begin(), x1.end());
  s.m.assign(x1.size(), 0.0);
  s.r.assign(x1.size(), 0.0);
  return s;
}

AdaUsmState adausm_step(AdaUsmState state, const AdaUsmConfig& cfg,
                        std::span<const double> g, std::span<double> lr_out) {
  check_dim(g.size(), state.x.size(), "gradient");
  if (!lr_out.empty()) check_dim(lr_out.size(), state.x.size(), "lr_out");
  check_finite_vector(g, "gradient");

  state.sched.advance(cfg.schedule);
  std::int64_t t = state.sched.t;
  state.t = t;
  UsmStepParams p;
  p.mu = cfg.mu;
  p.lambda_mu = cfg.lambda * cfg.mu;
  p.epsilon = cfg.epsilon;
  p.base_eta = base_eta_for(cfg.eta, cfg.lr_mode, t);
  p.ratio = t == 1 ? 1.0 : cfg.schedule.ratio(t);
  p.weight_over_abar = state.sched.weight_over_abar();
  usm_step(g, p, state.x, state.m, state.r, lr_out);
  return state;
}

std::vector<double> effective_lr(const AdaUsmState& state, const AdaUsmConfig& cfg) {
  if (state.t < 1) throw std::logic_error("effective_lr: no step taken yet");
  double base = base_eta_for(cfg.eta, cfg.lr_mode, state.t);
  double woa = state.sched.weight_over_abar();
  std::vector<double> lr(state.r.size());
  for (std::size_t k = 0; k < lr.size(); ++k)
    lr[k] = base / (std::sqrt(state.r[k] * woa) + cfg.epsilon);
  return lr;
}

double base_eta(const AdaUsmConfig& cfg, std::int64_t t) {
  if (t < 1) throw std::invalid_argument("base_eta: t must be >= 1");
  return base_eta_for(cfg.eta, cfg.lr_mode, t);
}

std::string snapshot_to_csv(const AdaUsmState& state) {
  std::size_t d = state.x.size();
  std::string header = "t,A_over_a";
  std::string row = fmt_int(state.t) + "," + fmt_double(state.sched.A_over_a);
  const char* names[3] = {"x", "m", "r"};
  const std::vector<double>* vecs[3] = {&state.x, &state.m, &state.r};
  for (int part = 0; part < 3; ++part)
    for (std::size_t k = 0; k < d; ++k) {
      header += ",";
      header += names[part];
      header += fmt_int(std::int64_t(k));
      row += "," + fmt_double((*vecs[part])[k]);
    }
  return header + "\n" + row + "\n";
}

AdaUsmState snapshot_from_csv(std::string_view text) {
  auto lines = split(trim(text), '\n');
  if (lines.size() != 2) throw CsvError("snapshot must be exactly header + one record", 1, 1);
  auto header = split(trim(lines[0]), ',');
  auto cells = split(trim(lines[1]), ',');
  if (header.size() != cells.size())
    throw CsvError("snapshot record width differs from header", 2, 1);
  if (header.size() < 2 || header[0] != "t" || header[1] != "A_over_a")
    throw CsvError("snapshot header must start with t,A_over_a", 1, 1);
  std::size_t n = header.size() - 2;
  if (n % 3 != 0 || n == 0)
    throw CsvError("snapshot needs equal-length x, m, r column groups", 1, 3);
  std::size_t d = n / 3;

  AdaUsmState s;
  if (!parse_int(trim(cells[0]), s.t)) throw CsvError("bad step counter", 2, 1);
  if (!parse_double(trim(cells[1]), s.sched.A_over_a))
    throw CsvError("bad accumulator value", 2, 2);
  s.sched.t = s.t;
  std::vector<double>* vecs[3] = {&s.x, &s.m, &s.r};
  for (std::size_t part = 0; part < 3; ++part) {
    vecs[part]->resize(d);
    for (std::size_t k = 0; k < d; ++k) {
      std::size_t col = 2 + part * d + k;
      if (!parse_double(trim(cells[col]), (*vecs[part])[k]))
        throw CsvError("bad numeric cell", 2, col + 1);
    }
  }
  return s;
}

namespace {

void validate_baseline(const BaselineConfig& c, bool allow_zero_epsilon) {
  if (!(c.eta > 0.0) || !std::isfinite(c.eta))
    throw std::invalid_argument("eta must be finite and > 0");
  if (!(c.mu >= 0.0 && c.mu < 1.0))
    throw std::invalid_argument("momentum factor must be in [0, 1)");
  if (!(c.beta2 >= 0.0 && c.beta2 < 1.0))
    throw std::invalid_argument("beta2 must be in [0, 1)");
  bool eps_ok = allow_zero_epsilon ? c.epsilon >= 0.0 : c.epsilon > 0.0;
  if (!eps_ok || !std::isfinite(c.epsilon))
    throw std::invalid_argument("epsilon must be finite and > 0");
}

}  // namespace

BaselineConfig BaselineConfig::make(BaselineKind kind, double eta, double mu, double beta2,
                                    double epsilon, LrMode lr_mode) {
  BaselineConfig c{kind, eta, mu, beta2, epsilon, lr_mode};
  validate_baseline(c, /*allow_zero_epsilon=*/false);
  return c;
}

BaselineConfig BaselineConfig::testing_zero_epsilon(BaselineKind kind, double eta, double mu,
                                                    double beta2, LrMode lr_mode) {
  BaselineConfig c{kind, eta, mu, beta2, 0.0, lr_mode};
  validate_baseline(c, /*allow_zero_epsilon=*/true);
  return c;
}

BaselineState baseline_init(const BaselineConfig& cfg, std::span<const double> x1) {
  validate_baseline(cfg, /*allow_zero_epsilon=*/true);
  if (x1.empty()) throw std::invalid_argument("x1 must have dimension >= 1");
  check_finite_vector(x1, "x1");
  BaselineState s;
  s.x.assign(x1.begin(), x1.end());
  std::size_t d = x1.size();
  switch (cfg.kind) {
    case BaselineKind::Sgd:
      break;
    case BaselineKind::SgdMomentum:
      s.m.assign(d, 0.0);
      break;
    case BaselineKind::Snag:
      s.y.assign(x1.begin(), x1.end());
      break;
    case BaselineKind::AdaGrad:
      s.v.assign(d, 0.0);
      break;
    case BaselineKind::Adam:
      s.m.assign(d, 0.0);
      s.v.assign(d, 0.0);
      break;
    case BaselineKind::AmsGrad:
      s.m.assign(d, 0.0);
      s.v.assign(d, 0.0);
      s.v_max.assign(d, 0.0);
      break;
    case BaselineKind::RmsProp:
      s.v.assign(d, 0.0);
      break;
    case BaselineKind::AdaEma:
      s.m.assign(d, 0.0);
      s.v.assign(d, 0.0);
      break;
  }
  return s;
}

namespace {

// Per-coordinate step size for the EMA family (adam/amsgrad/adaema), given the
// already-corrected (or deliberately uncorrected) second-moment value. In
// diminishing mode the 1/sqrt(t) base is absorbed as eta/(sqrt(t*v)+sqrt(t)*eps).
double ema_lr(double eta, double epsilon, LrMode mode, std::int64_t t, double v_corr) {
  double td = double(t);
  if (mode == LrMode::EtaOverSqrtT)
    return eta / (std::sqrt(td * v_corr) + std::sqrt(td) * epsilon);
  return eta / (std::sqrt(v_corr) + epsilon);
}

double rmsprop_step_lr(double eta, double epsilon, LrMode mode, std::int64_t t, double v) {
  if (mode == LrMode::EtaOverSqrtT) return eta / (std::sqrt(double(t) * v) + epsilon);
  return eta / (std::sqrt(v) + epsilon);
}

}  // namespace

BaselineState baseline_step(BaselineState state, const BaselineConfig& cfg,
                            std::span<const double> g, std::span<double> lr_out) {
  std::size_t d = state.x.size();
  check_dim(g.size(), d, "gradient");
  if (!lr_out.empty()) check_dim(lr_out.size(), d, "lr_out");
  check_finite_vector(g, "gradient");

  std::int64_t t = ++state.t;
  double base = base_eta_for(cfg.eta, cfg.lr_mode, t);
  auto put_lr = [&](std::size_t k, double lr) {
    if (!lr_out.empty()) lr_out[k] = lr;
  };

  switch (cfg.kind) {
    case BaselineKind::Sgd:
      for (std::size_t k = 0; k < d; ++k) {
        state.x[k] -= base * g[k];
        put_lr(k, base);
      }
      break;
    case BaselineKind::SgdMomentum:
      for (std::size_t k = 0; k < d; ++k) {
        state.m[k] = cfg.mu * state.m[k] - base * g[k];
        state.x[k] += state.m[k];
        put_lr(k, base);
      }
      break;
    case BaselineKind::Snag:
      for (std::size_t k = 0; k < d; ++k) {
        double y_new = state.x[k] - base * g[k];
        state.x[k] = y_new + cfg.mu * (y_new - state.y[k]);
        state.y[k] = y_new;
        put_lr(k, base);
      }
      break;
    case BaselineKind::AdaGrad:
      for (std::size_t k = 0; k < d; ++k) {
        state.v[k] += g[k] * g[k];
        double lr = base / (std::sqrt(state.v[k]) + cfg.epsilon);
        state.x[k] -= lr * g[k];
        put_lr(k, lr);
      }
      break;
    case BaselineKind::Adam: {
      double bc1 = 1.0 - std::pow(cfg.mu, double(t));
      double bc2 = 1.0 - std::pow(cfg.beta2, double(t));
      for (std::size_t k = 0; k < d; ++k) {
        state.m[k] = cfg.mu * state.m[k] + (1.0 - cfg.mu) * g[k];
        state.v[k] = cfg.beta2 * state.v[k] + (1.0 - cfg.beta2) * g[k] * g[k];
        double lr = ema_lr(cfg.eta, cfg.epsilon, cfg.lr_mode, t, state.v[k] / bc2);
        state.x[k] -= lr * (state.m[k] / bc1);
        put_lr(k, lr);
      }
      break;
    }
    case BaselineKind::AmsGrad: {
      double bc1 = 1.0 - std::pow(cfg.mu, double(t));
      double bc2 = 1.0 - std::pow(cfg.beta2, double(t));
      for (std::size_t k = 0; k < d; ++k) {
        state.m[k] = cfg.mu * state.m[k] + (1.0 - cfg.mu) * g[k];
        state.v[k] = cfg.beta2 * state.v[k] + (1.0 - cfg.beta2) * g[k] * g[k];
        double vc = state.v[k] / bc2;
        if (vc > state.v_max[k]) state.v_max[k] = vc;
        double lr = ema_lr(cfg.eta, cfg.epsilon, cfg.lr_mode, t, state.v_max[k]);
        state.x[k] -= lr * (state.m[k] / bc1);
        put_lr(k, lr);
      }
      break;
    }
    case BaselineKind::RmsProp:
      for (std::size_t k = 0; k < d; ++k) {
        state.v[k] = cfg.beta2 * state.v[k] + (1.0 - cfg.beta2) * g[k] * g[k];
        double lr = rmsprop_step_lr(cfg.eta, cfg.epsilon, cfg.lr_mode, t, state.v[k]);
        state.x[k] -= lr * g[k];
        put_lr(k, lr);
      }
      break;
    case BaselineKind::AdaEma: {
      // beta2(t) = 1 - 1/t, so t * v_t stays exactly the plain running sum of
      // squared gradients; no bias corrections on either moment.
      double inv_t = 1.0 / double(t);
      for (std::size_t k = 0; k < d; ++k) {
        state.m[k] = cfg.mu * state.m[k] + (1.0 - cfg.mu) * g[k];
        state.v[k] = (1.0 - inv_t) * state.v[k] + inv_t * g[k] * g[k];
        double lr = ema_lr(cfg.eta, cfg.epsilon, cfg.lr_mode, t, state.v[k]);
        state.x[k] -= lr * state.m[k];
        put_lr(k, lr);
      }
      break;
    }
  }
  return state;
}

std::vector<double> baseline_effective_lr(const BaselineState& state,
                                          const BaselineConfig& cfg) {
  if (state.t < 1) throw std::logic_error("baseline_effective_lr: no step taken yet");
  std::int64_t t = state.t;
  std::size_t d = state.x.size();
  double base = base_eta_for(cfg.eta, cfg.lr_mode, t);
  std::vector<double> lr(d);
  switch (cfg.kind) {
    case BaselineKind::Sgd:
    case BaselineKind::SgdMomentum:
    case BaselineKind::Snag:
      for (std::size_t k = 0; k < d; ++k) lr[k] = base;
      break;
    case BaselineKind::AdaGrad:
      for (std::size_t k = 0; k < d; ++k)
        lr[k] = base / (std::sqrt(state.v[k]) + cfg.epsilon);
      break;
    case BaselineKind::Adam: {
      double bc2 = 1.0 - std::pow(cfg.beta2, double(t));
      for (std::size_t k = 0; k < d; ++k)
        lr[k] = ema_lr(cfg.eta, cfg.epsilon, cfg.lr_mode, t, state.v[k] / bc2);
      break;
    }
    case BaselineKind::AmsGrad:
      for (std::size_t k = 0; k < d; ++k)
        lr[k] = ema_lr(cfg.eta, cfg.epsilon, cfg.lr_mode, t, state.v_max[k]);
      break;
    case BaselineKind::RmsProp:
      for (std::size_t k = 0; k < d; ++k)
        lr[k] = rmsprop_step_lr(cfg.eta, cfg.epsilon, cfg.lr_mode, t, state.v[k]);
      break;
    case BaselineKind::AdaEma:
      for (std::size_t k = 0; k < d; ++k)
        lr[k] = ema_lr(cfg.eta, cfg.epsilon, cfg.lr_mode, t, state.v[k]);
      break;
  }
  return lr;
}

double baseline_momentum_factor(const BaselineConfig& cfg) {
  switch (cfg.kind) {
    case BaselineKind::Sgd:
    case BaselineKind::AdaGrad:
    case BaselineKind::RmsProp:
      return 0.0;
    default:
      return cfg.mu;
  }
}

namespace {

struct MethodDefaults {
  double eta;
  double mu = 0.0;
  double beta2 = 0.0;
  bool takes_mu = false;
  bool takes_beta2 = false;
  bool takes_epsilon = false;
  bool takes_schedule = false;
  bool takes_lambda = false;
};

bool known_name(std::string_view name) {
  for (auto n : optimizer_names)
    if (n == name) return true;
  return false;
}

[[noreturn]] void unknown_optimizer(const std::string& name) {
  std::string list;
  for (auto n : optimizer_names) {
    if (!list.empty()) list += ", ";
    list += n;
  }
  throw std::invalid_argument("unknown optimizer '" + name + "'; valid names: " + list);
}

MethodDefaults defaults_for(const std::string& name) {
  if (name == "adausm" || name == "adahb" || name == "adanag")
    return {1e-3, 0.9, 0.0, true, false, true, true, name == "adausm"};
  if (name == "adagrad") return {1e-2, 0.0, 0.0, false, false, true, false, false};
  if (name == "sgd") return {0.1, 0.0, 0.0, false, false, false, false, false};
  if (name == "sgdm" || name == "snag")
    return {0.1, 0.9, 0.0, true, false, false, false, false};
  if (name == "adam" || name == "amsgrad")
    return {1e-2, 0.9, 0.999, true, true, true, false, false};
  if (name == "rmsprop") return {1e-2, 0.0, 0.999, false, true, true, false, false};
  if (name == "adaema") return {1e-2, 0.9, 0.0, true, false, true, false, false};
  unknown_optimizer(name);
}

void reject_extras(const OptimizerSpec& spec, const MethodDefaults& md) {
  auto refuse = [&](const char* key) {
    throw std::invalid_argument("optimizer '" + spec.name + "' does not take " + key);
  };
  if (spec.mu && !md.takes_mu) refuse("mu");
  if (spec.beta2 && !md.takes_beta2) refuse("beta2");
  if (spec.epsilon && !md.takes_epsilon) refuse("epsilon");
  if (spec.schedule && !md.takes_schedule) refuse("schedule");
  if (spec.lambda && !md.takes_lambda)
    refuse(md.takes_schedule ? "lambda (fixed by the preset)" : "lambda");
}

class AdaUsmRunImpl : public OptimizerRun {
 public:
  AdaUsmRunImpl(std::string name, AdaUsmConfig cfg, std::span<const double> x1)
      : name_(std::move(name)), cfg_(cfg), state_(adausm_init(cfg, x1)) {}

  void step(std::span<const double> g) override {
    lr_.resize(state_.x.size());
    state_ = adausm_step(std::move(state_), cfg_, g, lr_);
  }
  std::span<const double> x() const override { return state_.x; }
  std::span<const double> last_lr() const override { return lr_; }
  double momentum_factor() const override { return cfg_.mu; }
  std::int64_t t() const override { return state_.t; }
  const std::string& name() const override { return name_; }

 private:
  std::string name_;
  AdaUsmConfig cfg_;
  AdaUsmState state_;
  std::vector<double> lr_;
};

class BaselineRunImpl : public OptimizerRun {
 public:
  BaselineRunImpl(std::string name, BaselineConfig cfg, std::span<const double> x1)
      : name_(std::move(name)), cfg_(cfg), state_(baseline_init(cfg, x1)) {}

  void step(std::span<const double> g) override {
    lr_.resize(state_.x.size());
    state_ = baseline_step(std::move(state_), cfg_, g, lr_);
  }
  std::span<const double> x() const override { return state_.x; }
  std::span<const double> last_lr() const override { return lr_; }
  double momentum_factor() const override { return baseline_momentum_factor(cfg_); }
  std::int64_t t() const override { return state_.t; }
  const std::string& name() const override { return name_; }

 private:
  std::string name_;
  BaselineConfig cfg_;
  BaselineState state_;
  std::vector<double> lr_;
};

}  // namespace

std::unique_ptr<OptimizerRun> make_optimizer_run(const OptimizerSpec& spec,
                                                 std::span<const double> x1) {
  if (!known_name(spec.name)) unknown_optimizer(spec.name);
  MethodDefaults md = defaults_for(spec.name);
  reject_extras(spec, md);
  double eta = spec.eta.value_or(md.eta);
  double mu = spec.mu.value_or(md.mu);
  double epsilon = spec.epsilon.value_or(1e-8);
  LrMode mode = spec.lr_mode.value_or(LrMode::ConstantEta);

  if (spec.name == "adausm" || spec.name == "adahb" || spec.name == "adanag") {
    double lambda = spec.name == "adahb"   ? 0.0
                    : spec.name == "adanag" ? 1.0
                                            : spec.lambda.value_or(0.0);
    WeightSchedule sched = spec.schedule ? WeightSchedule::parse(*spec.schedule)
                                         : WeightSchedule::polynomial(1.0);
    return std::make_unique<AdaUsmRunImpl>(
        spec.name, AdaUsmConfig::make(eta, mu, lambda, epsilon, sched, mode), x1);
  }

  BaselineKind kind;
  if (spec.name == "sgd") kind = BaselineKind::Sgd;
  else if (spec.name == "sgdm") kind = BaselineKind::SgdMomentum;
  else if (spec.name == "snag") kind = BaselineKind::Snag;
  else if (spec.name == "adagrad") kind = BaselineKind::AdaGrad;
  else if (spec.name == "adam") kind = BaselineKind::Adam;
  else if (spec.name == "amsgrad") kind = BaselineKind::AmsGrad;
  else if (spec.name == "rmsprop") kind = BaselineKind::RmsProp;
  else kind = BaselineKind::AdaEma;
  double beta2 = spec.beta2.value_or(md.beta2);
  return std::make_unique<BaselineRunImpl>(
      spec.name, BaselineConfig::make(kind, eta, mu, beta2, epsilon, mode), x1);
}

double resolved_eta(const OptimizerSpec& spec) {
  if (!known_name(spec.name)) unknown_optimizer(spec.name);
  return spec.eta.value_or(defaults_for(spec.name).eta);
}

}  // namespace adausm
