#include "kvplate/config.hpp"

#include <fstream>
#include <sstream>

#include "kvplate/errors.hpp"
#include "json_fields.hpp"

namespace kvplate {

using detail::boolean;
using detail::integer;
using detail::number;
using detail::reject_unknown;
using detail::text;

namespace {

int count(const nlohmann::json& obj, const char* key, int fallback, const std::string& where) {
  const long long v = integer(obj, key, fallback, where);
  if (v < -2147483647LL || v > 2147483647LL) throw ConfigError(where + "." + key + ": out of range");
  return static_cast<int>(v);
}

std::vector<double> number_list(const nlohmann::json& obj, const char* key, std::vector<double> fallback,
                                const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_array()) throw ConfigError(where + "." + key + ": expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw ConfigError(where + "." + key + ": expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

const nlohmann::json& section(const nlohmann::json& config, const char* key) {
  static const nlohmann::json empty = nlohmann::json::object();
  return config.contains(key) ? config.at(key) : empty;
}

}  // namespace

RunConfig make_run_config(const nlohmann::json& config) {
  reject_unknown(config, {"model", "numerics", "initial", "sweep", "carleman", "weights", "output", "seed"}, "config");
  RunConfig c;
  c.model = make_model(section(config, "model"));

  const auto& num = section(config, "numerics");
  reject_unknown(num, {"n_cells", "dt", "T", "record_every"}, "numerics");
  c.numerics.n_cells = count(num, "n_cells", c.numerics.n_cells, "numerics");
  c.numerics.dt = number(num, "dt", c.numerics.dt, "numerics");
  c.numerics.T = number(num, "T", c.numerics.T, "numerics");
  c.numerics.record_every = count(num, "record_every", c.numerics.record_every, "numerics");

  const auto& ini = section(config, "initial");
  reject_unknown(ini, {"kind", "mode", "modes"}, "initial");
  c.initial.kind = text(ini, "kind", c.initial.kind, "initial");
  c.initial.mode = count(ini, "mode", c.initial.mode, "initial");
  c.initial.modes = count(ini, "modes", c.initial.modes, "initial");

  const auto& sw = section(config, "sweep");
  reject_unknown(sw, {"mu_min", "mu_max", "points"}, "sweep");
  c.sweep.mu_min = number(sw, "mu_min", c.sweep.mu_min, "sweep");
  c.sweep.mu_max = number(sw, "mu_max", c.sweep.mu_max, "sweep");
  c.sweep.points = count(sw, "points", c.sweep.points, "sweep");

  const auto& ca = section(config, "carleman");
  reject_unknown(ca, {"h_sweep", "n_cells", "lambda", "slopes", "h0", "skip_gamma1_checks"}, "carleman");
  c.carleman.h_sweep = number_list(ca, "h_sweep", c.carleman.h_sweep, "carleman");
  auto& co = c.carleman.options;
  co.n_cells = count(ca, "n_cells", co.n_cells, "carleman");
  co.lambda = number(ca, "lambda", co.lambda, "carleman");
  const auto slopes = number_list(ca, "slopes", {co.slopes[0], co.slopes[1]}, "carleman");
  if (slopes.size() != 2) throw ConfigError("carleman.slopes: expected two numbers");
  co.slopes = {slopes[0], slopes[1]};
  co.h0 = number(ca, "h0", co.h0, "carleman");
  co.skip_gamma1_checks = boolean(ca, "skip_gamma1_checks", co.skip_gamma1_checks, "carleman");

  const auto& we = section(config, "weights");
  reject_unknown(we, {"R", "hole_x", "hole_y", "hole_r", "lambda_cap", "grid", "boundary_samples"}, "weights");
  auto& d = c.weights.domain;
  d.outer_radius = number(we, "R", d.outer_radius, "weights");
  d.hole_center.x() = number(we, "hole_x", d.hole_center.x(), "weights");
  d.hole_center.y() = number(we, "hole_y", d.hole_center.y(), "weights");
  d.hole_radius = number(we, "hole_r", d.hole_radius, "weights");
  c.weights.lambda_cap = number(we, "lambda_cap", c.weights.lambda_cap, "weights");
  c.weights.grid = count(we, "grid", c.weights.grid, "weights");
  c.weights.boundary_samples = count(we, "boundary_samples", c.weights.boundary_samples, "weights");

  const auto& out = section(config, "output");
  reject_unknown(out, {"trace", "eig", "sweep", "ratio", "weights", "summary"}, "output");
  c.output.trace = text(out, "trace", c.output.trace, "output");
  c.output.eig = text(out, "eig", c.output.eig, "output");
  c.output.sweep = text(out, "sweep", c.output.sweep, "output");
  c.output.ratio = text(out, "ratio", c.output.ratio, "output");
  c.output.weights = text(out, "weights", c.output.weights, "output");
  c.output.summary = text(out, "summary", c.output.summary, "output");

  if (config.contains("seed")) {
    const auto& s = config.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
      throw ConfigError("seed: expected a non-negative integer");
    c.seed = s.get<std::uint64_t>();
  }
  validate(c);
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path.string() + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in, nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config: '" + path.string() + "' is not valid JSON (" + e.what() + ")");
  }
  return make_run_config(j);
}

void validate(const RunConfig& c) {
  validate(c.model);
  if (c.numerics.n_cells < 10) throw ConfigError("numerics.n_cells: must be >= 10");
  if (!(c.numerics.dt > 0.0)) throw ConfigError("numerics.dt: must be > 0");
  if (!(c.numerics.T > 0.0)) throw ConfigError("numerics.T: must be > 0");
  if (c.numerics.dt > c.numerics.T) throw ConfigError("numerics.dt: must not exceed numerics.T");
  if (c.numerics.record_every < 1) throw ConfigError("numerics.record_every: must be >= 1");
  if (c.initial.kind != "smooth" && c.initial.kind != "mode")
    throw ConfigError("initial.kind: expected \"smooth\" or \"mode\" (got \"" + c.initial.kind + "\")");
  if (c.initial.mode < 1) throw ConfigError("initial.mode: must be >= 1");
  if (c.initial.modes < 1) throw ConfigError("initial.modes: must be >= 1");
  if (!(c.sweep.mu_min > 0.0 && c.sweep.mu_max >= c.sweep.mu_min))
    throw ConfigError("sweep: need 0 < mu_min <= mu_max");
  if (c.sweep.points < 1) throw ConfigError("sweep.points: must be >= 1");
  const auto& co = c.carleman.options;
  if (c.carleman.h_sweep.empty()) throw ConfigError("carleman.h_sweep: must not be empty");
  for (double h : c.carleman.h_sweep)
    if (!(h > 0.0 && h <= co.h0)) {
      std::ostringstream os;
      os << "carleman.h_sweep: " << h << " is outside (0, h0 = " << co.h0 << "]";
      throw ConfigError(os.str());
    }
  if (co.n_cells < 1) throw ConfigError("carleman.n_cells: must be >= 1");
  if (!(co.lambda > 0.0)) throw ConfigError("carleman.lambda: must be > 0");
  if (!(co.h0 > 0.0)) throw ConfigError("carleman.h0: must be > 0");
  validate(c.weights.domain);
  if (!(c.weights.lambda_cap >= 1.0)) throw ConfigError("weights.lambda_cap: must be >= 1");
  if (c.weights.grid < 2) throw ConfigError("weights.grid: must be >= 2");
  if (c.weights.boundary_samples < 1) throw ConfigError("weights.boundary_samples: must be >= 1");
}

nlohmann::json to_json(const RunConfig& c) {
  const auto& co = c.carleman.options;
  const auto& d = c.weights.domain;
  return {{"model", to_json(c.model)},
          {"numerics",
           {{"n_cells", c.numerics.n_cells},
            {"dt", c.numerics.dt},
            {"T", c.numerics.T},
            {"record_every", c.numerics.record_every}}},
          {"initial", {{"kind", c.initial.kind}, {"mode", c.initial.mode}, {"modes", c.initial.modes}}},
          {"sweep", {{"mu_min", c.sweep.mu_min}, {"mu_max", c.sweep.mu_max}, {"points", c.sweep.points}}},
          {"carleman",
           {{"h_sweep", c.carleman.h_sweep},
            {"n_cells", co.n_cells},
            {"lambda", co.lambda},
            {"slopes", {co.slopes[0], co.slopes[1]}},
            {"h0", co.h0},
            {"skip_gamma1_checks", co.skip_gamma1_checks}}},
          {"weights",
           {{"R", d.outer_radius},
            {"hole_x", d.hole_center.x()},
            {"hole_y", d.hole_center.y()},
            {"hole_r", d.hole_radius},
            {"lambda_cap", c.weights.lambda_cap},
            {"grid", c.weights.grid},
            {"boundary_samples", c.weights.boundary_samples}}},
          {"output",
           {{"trace", c.output.trace},
            {"eig", c.output.eig},
            {"sweep", c.output.sweep},
            {"ratio", c.output.ratio},
            {"weights", c.output.weights},
            {"summary", c.output.summary}}},
          {"seed", c.seed}};
}

InitialData initial_data(const RunConfig& c) {
  if (c.initial.kind == "mode") return ModeData{c.initial.mode};
  return SmoothData{c.initial.modes, c.seed};
}

}  // namespace kvplate
