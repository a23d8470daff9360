#include "adausm/config.hpp"

#include <fstream>
#include <functional>
#include <sstream>

#include "adausm/errors.hpp"
#include "adausm/textutil.hpp"

namespace adausm {

namespace {

enum class Section { None, Problem, Run, Optimizer };

// Strips a trailing comment, honoring double quotes.
std::string_view strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

std::string parse_string_value(std::string_view v, std::size_t line) {
  if (v.size() >= 2 && v.front() == '"') {
    if (v.back() != '"') throw ConfigError("unterminated quoted string", line);
    return std::string(v.substr(1, v.size() - 2));
  }
  if (!v.empty() && (v.front() == '"' || v.back() == '"'))
    throw ConfigError("unterminated quoted string", line);
  return std::string(v);
}

double parse_double_value(std::string_view v, std::size_t line) {
  double out;
  if (!parse_double(v, out)) throw ConfigError("expected a number, got '" + std::string(v) + "'", line);
  return out;
}

std::int64_t parse_int_value(std::string_view v, std::size_t line) {
  std::int64_t out;
  if (!parse_int(v, out)) throw ConfigError("expected an integer, got '" + std::string(v) + "'", line);
  return out;
}

std::uint64_t parse_uint_value(std::string_view v, std::size_t line) {
  std::uint64_t out;
  if (!parse_uint(v, out))
    throw ConfigError("expected a non-negative integer, got '" + std::string(v) + "'", line);
  return out;
}

std::vector<std::string_view> parse_list_items(std::string_view v, std::size_t line) {
  if (v.size() < 2 || v.front() != '[' || v.back() != ']')
    throw ConfigError("expected a list like [a, b, c]", line);
  std::string_view body = trim(v.substr(1, v.size() - 2));
  std::vector<std::string_view> items;
  if (body.empty()) return items;
  for (auto item : split(body, ',')) items.push_back(trim(item));
  return items;
}

struct KeyGuard {
  std::vector<std::string> seen;
  void check(const std::string& key, std::size_t line) {
    for (const auto& s : seen)
      if (s == key) throw ConfigError("duplicate key '" + key + "'", line);
    seen.push_back(key);
  }
  void reset() { seen.clear(); }
};

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  Section section = Section::None;
  KeyGuard guard;
  OptimizerSpec* opt = nullptr;

  std::size_t line_no = 0;
  for (auto raw : split(text, '\n')) {
    ++line_no;
    std::string_view line = trim(strip_comment(raw));
    if (line.empty()) continue;

    if (line == "[problem]") { section = Section::Problem; guard.reset(); continue; }
    if (line == "[run]") { section = Section::Run; guard.reset(); continue; }
    if (line == "[[optimizer]]") {
      section = Section::Optimizer;
      guard.reset();
      cfg.optimizers.emplace_back();
      opt = &cfg.optimizers.back();
      continue;
    }
    if (line.front() == '[')
      throw ConfigError("unknown section '" + std::string(line) +
                            "'; valid: [problem], [run], [[optimizer]]",
                        line_no);

    auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("expected 'key = value'", line_no);
    std::string key(trim(line.substr(0, eq)));
    std::string_view value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("expected 'key = value'", line_no);
    guard.check(key, line_no);

    switch (section) {
      case Section::None:
        throw ConfigError("key outside of any section", line_no);
      case Section::Problem: {
        auto& p = cfg.problem;
        if (key == "name") p.name = parse_string_value(value, line_no);
        else if (key == "dim") p.dim = std::size_t(parse_uint_value(value, line_no));
        else if (key == "condition_number") p.condition_number = parse_double_value(value, line_no);
        else if (key == "noise_sigma") p.noise_sigma = parse_double_value(value, line_no);
        else if (key == "seed") p.seed = parse_uint_value(value, line_no);
        else if (key == "n") p.n = std::size_t(parse_uint_value(value, line_no));
        else if (key == "separation") p.separation = parse_double_value(value, line_no);
        else if (key == "csv_path") p.csv_path = parse_string_value(value, line_no);
        else if (key == "label_column") p.label_column = parse_string_value(value, line_no);
        else if (key == "batch_size") p.batch_size = std::size_t(parse_uint_value(value, line_no));
        else if (key == "l2") p.l2 = parse_double_value(value, line_no);
        else
          throw ConfigError("unknown [problem] key '" + key +
                                "'; valid: name, dim, condition_number, noise_sigma, seed, "
                                "n, separation, csv_path, label_column, batch_size, l2",
                            line_no);
        break;
      }
      case Section::Run: {
        auto& r = cfg.run;
        if (key == "steps") {
          r.steps = parse_int_value(value, line_no);
          if (r.steps < 1) throw ConfigError("steps must be >= 1", line_no);
        } else if (key == "seeds") {
          r.seeds.clear();
          for (auto item : parse_list_items(value, line_no))
            r.seeds.push_back(parse_uint_value(item, line_no));
          if (r.seeds.empty()) throw ConfigError("seeds must be non-empty", line_no);
        } else if (key == "record_every") {
          r.record_every = parse_int_value(value, line_no);
          if (r.record_every < 1) throw ConfigError("record_every must be >= 1", line_no);
        } else if (key == "eta_grid") {
          r.eta_grid.clear();
          for (auto item : parse_list_items(value, line_no))
            r.eta_grid.push_back(parse_double_value(item, line_no));
        } else if (key == "output_dir") {
          r.output_dir = parse_string_value(value, line_no);
        } else if (key == "x1") {
          r.x1.clear();
          for (auto item : parse_list_items(value, line_no))
            r.x1.push_back(parse_double_value(item, line_no));
        } else if (key == "x1_fill") {
          r.x1_fill = parse_double_value(value, line_no);
        } else {
          throw ConfigError("unknown [run] key '" + key +
                                "'; valid: steps, seeds, record_every, eta_grid, "
                                "output_dir, x1, x1_fill",
                            line_no);
        }
        break;
      }
      case Section::Optimizer: {
        if (key == "name") opt->name = parse_string_value(value, line_no);
        else if (key == "eta") opt->eta = parse_double_value(value, line_no);
        else if (key == "mu") opt->mu = parse_double_value(value, line_no);
        else if (key == "lambda") opt->lambda = parse_double_value(value, line_no);
        else if (key == "beta2") opt->beta2 = parse_double_value(value, line_no);
        else if (key == "epsilon") opt->epsilon = parse_double_value(value, line_no);
        else if (key == "schedule") {
          std::string s = parse_string_value(value, line_no);
          try {
            WeightSchedule::parse(s);  // typo check at load time
          } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what(), line_no);
          }
          opt->schedule = s;
        } else if (key == "lr_mode") {
          try {
            opt->lr_mode = parse_lr_mode(parse_string_value(value, line_no));
          } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what(), line_no);
          }
        } else {
          throw ConfigError("unknown [[optimizer]] key '" + key +
                                "'; valid: name, eta, mu, lambda, beta2, epsilon, "
                                "schedule, lr_mode",
                            line_no);
        }
        break;
      }
    }
  }
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

namespace {

std::string quote_if_needed(const std::string& s) {
  if (s.empty() || s.find_first_of(" #[]\"\t") != std::string::npos) return "\"" + s + "\"";
  return s;
}

template <typename T, typename F>
std::string join_list(const std::vector<T>& v, F fmt) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += fmt(v[i]);
  }
  return out + "]";
}

}  // namespace

std::string serialize_config(const ExperimentConfig& cfg) {
  std::string out;
  const auto& p = cfg.problem;
  out += "[problem]\n";
  out += "name = " + quote_if_needed(p.name) + "\n";
  out += "dim = " + fmt_int(std::int64_t(p.dim)) + "\n";
  out += "condition_number = " + fmt_double(p.condition_number) + "\n";
  out += "noise_sigma = " + fmt_double(p.noise_sigma) + "\n";
  out += "seed = " + std::to_string(p.seed) + "\n";
  out += "n = " + fmt_int(std::int64_t(p.n)) + "\n";
  out += "separation = " + fmt_double(p.separation) + "\n";
  out += "csv_path = " + quote_if_needed(p.csv_path) + "\n";
  out += "label_column = " + quote_if_needed(p.label_column) + "\n";
  out += "batch_size = " + fmt_int(std::int64_t(p.batch_size)) + "\n";
  out += "l2 = " + fmt_double(p.l2) + "\n";

  const auto& r = cfg.run;
  out += "\n[run]\n";
  out += "steps = " + fmt_int(r.steps) + "\n";
  out += "seeds = " + join_list(r.seeds, [](std::uint64_t s) { return std::to_string(s); }) + "\n";
  out += "record_every = " + fmt_int(r.record_every) + "\n";
  if (!r.eta_grid.empty())
    out += "eta_grid = " + join_list(r.eta_grid, fmt_double) + "\n";
  if (!r.output_dir.empty()) out += "output_dir = " + quote_if_needed(r.output_dir) + "\n";
  if (!r.x1.empty()) out += "x1 = " + join_list(r.x1, fmt_double) + "\n";
  if (r.x1_fill) out += "x1_fill = " + fmt_double(*r.x1_fill) + "\n";

  for (const auto& o : cfg.optimizers) {
    out += "\n[[optimizer]]\n";
    out += "name = " + quote_if_needed(o.name) + "\n";
    if (o.eta) out += "eta = " + fmt_double(*o.eta) + "\n";
    if (o.mu) out += "mu = " + fmt_double(*o.mu) + "\n";
    if (o.lambda) out += "lambda = " + fmt_double(*o.lambda) + "\n";
    if (o.beta2) out += "beta2 = " + fmt_double(*o.beta2) + "\n";
    if (o.epsilon) out += "epsilon = " + fmt_double(*o.epsilon) + "\n";
    if (o.schedule) out += "schedule = " + quote_if_needed(*o.schedule) + "\n";
    if (o.lr_mode) out += "lr_mode = " + to_string(*o.lr_mode) + "\n";
  }
  return out;
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::string s = serialize_config(cfg);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  static const char* hex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[std::size_t(i)] = hex[h & 0xF];
    h >>= 4;
  }
  return out;
}

}  // namespace adausm
