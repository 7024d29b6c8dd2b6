#include "kvplate/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>

#include "kvplate/carleman/ratio1d.hpp"
#include "kvplate/carleman/weights.hpp"
#include "kvplate/config.hpp"
#include "kvplate/csv.hpp"
#include "kvplate/disc.hpp"
#include "kvplate/errors.hpp"
#include "kvplate/evolution.hpp"
#include "kvplate/generator.hpp"
#include "kvplate/spectral.hpp"

namespace kvplate {

namespace {

using nlohmann::json;

struct Options {
  std::string config;
  std::string out;
  std::string diagnostic = "kv-plate-lab-diagnostic.json";
  bool show = false;
  std::optional<double> T, dt, mu_min, mu_max;
  std::optional<int> n_cells, points;
  std::vector<double> h_sweep;
  std::optional<double> hole_x, hole_y, hole_r, outer_r;
  std::optional<std::uint64_t> seed;
  std::string trace, eig, sweep, ratio, weights;
};

RunConfig load(const Options& o) {
  RunConfig c = o.config.empty() ? RunConfig{} : load_run_config(o.config);
  if (o.T) c.numerics.T = *o.T;
  if (o.dt) c.numerics.dt = *o.dt;
  if (o.n_cells) c.numerics.n_cells = *o.n_cells;
  if (o.mu_min) c.sweep.mu_min = *o.mu_min;
  if (o.mu_max) c.sweep.mu_max = *o.mu_max;
  if (o.points) c.sweep.points = *o.points;
  if (!o.h_sweep.empty()) c.carleman.h_sweep = o.h_sweep;
  if (o.hole_x) c.weights.domain.hole_center.x() = *o.hole_x;
  if (o.hole_y) c.weights.domain.hole_center.y() = *o.hole_y;
  if (o.hole_r) c.weights.domain.hole_radius = *o.hole_r;
  if (o.outer_r) c.weights.domain.outer_radius = *o.outer_r;
  if (o.seed) c.seed = *o.seed;
  validate(c);
  return c;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write '" + path + "'");
  return f;
}

void write_json(const std::string& path, const json& j) {
  auto f = open_out(path);
  f << j.dump(2) << '\n';
}

DiscreteGenerator generator_for(const RunConfig& c) {
  return assemble_generator(c.model, build_grid(c.model, c.numerics.n_cells), c.seed);
}

json grid_json(const Grid1D& g) {
  return {{"requested_cells", g.requested_cells},
          {"n_cells", g.n_cells},
          {"spacing", g.spacing},
          {"interface_left_node", g.interface_left_node},
          {"interface_right_node", g.interface_right_node}};
}

int cmd_model(const Options& o, std::ostream& out) {
  const RunConfig c = load(o);
  if (o.show) {
    out << to_json(c).dump(2) << '\n';
    return exit_ok;
  }
  const Grid1D g = build_grid(c.model, c.numerics.n_cells);
  json j = {{"model", to_json(c.model)}, {"grid", grid_json(g)}};
  if (!o.out.empty()) write_json(o.out, j);
  out << j.dump(2) << '\n';
  return exit_ok;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  const RunConfig c = load(o);
  const DiscreteGenerator gen = generator_for(c);
  const EnergyTrace trace = simulate(gen, initial_data(c), c.numerics.T, c.numerics.dt, c.numerics.record_every);
  const std::string path = o.out.empty() ? c.output.trace : o.out;
  auto f = open_out(path);
  CsvWriter w(f, {"t", "energy", "cumulative_dissipation", "identity_residual"});
  for (const auto& s : trace.samples) w.row({s.t, s.energy, s.cumulative_dissipation, s.identity_residual});
  out << "wrote " << path << ": " << trace.samples.size() << " samples, max identity residual "
      << format_number(trace.max_identity_residual()) << ", max relative increase "
      << format_number(trace.max_relative_increase()) << '\n';
  return exit_ok;
}

int cmd_spectrum(const Options& o, std::ostream& out) {
  const RunConfig c = load(o);
  const DiscreteGenerator gen = generator_for(c);
  const auto eig = spectrum(gen);
  const std::string path = o.out.empty() ? c.output.eig : o.out;
  auto f = open_out(path);
  CsvWriter w(f, {"index", "re", "im", "abs"});
  for (std::size_t i = 0; i < eig.size(); ++i)
    w.row({static_cast<double>(i), eig[i].real(), eig[i].imag(), std::abs(eig[i])});
  out << "wrote " << path << ": " << eig.size() << " eigenvalues\n";
  return exit_ok;
}

int cmd_resolvent(const Options& o, std::ostream& out) {
  const RunConfig c = load(o);
  const DiscreteGenerator gen = generator_for(c);
  const auto mus = log_spaced(c.sweep.mu_min, c.sweep.mu_max, c.sweep.points);
  ResolventOptions ro;
  ro.seed = c.seed;
  const ResolventSweep sw = resolvent_sweep(gen, mus, Exec::parallel, ro);
  const std::string path = o.out.empty() ? c.output.sweep : o.out;
  auto f = open_out(path);
  CsvWriter w(f, {"mu", "norm", "log_norm", "iterations"});
  for (const auto& s : sw.samples) w.row({s.mu, s.norm, std::log(s.norm), static_cast<double>(s.iterations)});
  out << "wrote " << path << ": " << sw.samples.size() << " samples, envelope C_a "
      << format_number(sw.envelope.c_a) << " C_b " << format_number(sw.envelope.c_b) << '\n';
  return exit_ok;
}

int cmd_carleman(const Options& o, std::ostream& out) {
  const RunConfig c = load(o);
  const auto setup = carleman::make_carleman_setup(c.model, c.carleman.options);
  const auto terms = carleman::carleman_sweep(setup, c.carleman.h_sweep, carleman::ManufacturedPair::cosine(setup));
  const std::string path = o.out.empty() ? c.output.ratio : o.out;
  auto f = open_out(path);
  std::vector<std::string> header{"h", "ratio", "lhs", "rhs", "log_scale"};
  for (auto n : carleman::CarlemanTerms::lhs_names()) header.push_back("lhs_" + std::string(n));
  for (auto n : carleman::CarlemanTerms::rhs_names()) header.push_back("rhs_" + std::string(n));
  CsvWriter w(f, header);
  double lo = INFINITY, hi = 0.0;
  for (const auto& t : terms) {
    std::vector<double> row{t.h, t.ratio, t.lhs_total, t.rhs_total, t.log_scale};
    row.insert(row.end(), t.lhs.begin(), t.lhs.end());
    row.insert(row.end(), t.rhs.begin(), t.rhs.end());
    w.row(row);
    lo = std::min(lo, t.ratio);
    hi = std::max(hi, t.ratio);
  }
  out << "wrote " << path << ": ratio in [" << format_number(lo) << ", " << format_number(hi) << "], max/min "
      << format_number(hi / lo) << '\n';
  return exit_ok;
}

json point_json(const Eigen::Vector2d& p) { return json::array({p.x(), p.y()}); }

json critical_json(const std::vector<carleman::CriticalPoint>& cps) {
  json a = json::array();
  for (const auto& c : cps)
    a.push_back({{"x", point_json(c.x)},
                 {"value", c.value},
                 {"kind", std::string(carleman::to_string(c.kind))},
                 {"gradient_norm", c.gradient_norm},
                 {"curvatures", {c.curvatures[0], c.curvatures[1]}}});
  return a;
}

json certificate_json(const carleman::SubellipticityCertificate& c) {
  return {{"certified", c.certified},
          {"lambda_used", c.lambda_used},
          {"min_bracket", c.min_bracket},
          {"samples", c.samples},
          {"worst_point", point_json(c.worst_point)}};
}

int cmd_weights(const Options& o, std::ostream& out, json& diag) {
  const RunConfig c = load(o);
  carleman::WeightOptions wo;
  wo.seed = c.seed;
  const auto pair = carleman::build_weight_pair(c.weights.domain, wo);
  const auto check = carleman::verify(pair);
  carleman::CertifyOptions co;
  co.lambda_cap = c.weights.lambda_cap;
  co.grid = c.weights.grid;
  co.boundary_samples = c.weights.boundary_samples;
  const auto cert1 = carleman::certify_subellipticity(pair, 1, co);
  const auto cert2 = carleman::certify_subellipticity(pair, 2, co);
  json arcs = json::array();
  for (const auto& a : pair.arcs)
    arcs.push_back({{"center", point_json(a.center)},
                    {"direction", point_json(a.direction)},
                    {"length", a.length},
                    {"rise", a.rise},
                    {"end_mismatch", a.end_mismatch}});
  const auto& d = pair.domain;
  json j = {{"domain",
             {{"R", d.outer_radius}, {"hole_center", point_json(d.hole_center)}, {"hole_r", d.hole_radius}}},
            {"seed", c.seed},
            {"seed_used", pair.seed_used},
            {"attempts", pair.attempts},
            {"concentric", pair.concentric},
            {"epsilon", pair.epsilon},
            {"bump",
             {{"center", point_json(pair.bump.center)},
              {"amplitude", pair.bump.amplitude},
              {"width", pair.bump.width}}},
            {"critical_points", {{"psi1", critical_json(pair.critical1)}, {"psi2", critical_json(pair.critical2)}}},
            {"arcs", arcs},
            {"checks",
             {{"valid", check.valid()},
              {"min_order_gap", check.min_order_gap},
              {"min_partner_gradient", check.min_partner_gradient},
              {"min_ball_separation", check.min_ball_separation},
              {"min_ball_clearance", check.min_ball_clearance},
              {"min_ball_gap", check.min_ball_gap},
              {"max_hole_normal", check.max_hole_normal},
              {"min_outer_normal", check.min_outer_normal},
              {"normal_mismatch", check.normal_mismatch},
              {"prediction_error", check.prediction_error},
              {"has_maximum", check.has_maximum}}},
            {"certificates", {{"psi1", certificate_json(cert1)}, {"psi2", certificate_json(cert2)}}}};
  const std::string path = o.out.empty() ? c.output.weights : o.out;
  write_json(path, j);
  out << "wrote " << path << ": " << pair.critical1.size() << " critical points, lambda "
      << format_number(cert1.lambda_used) << " / " << format_number(cert2.lambda_used) << ", valid "
      << (check.valid() ? "yes" : "no") << '\n';
  if (!check.valid() || !cert1.certified || !cert2.certified) {
    diag["weights"] = j;
    throw NumericalError(!check.valid() ? "weights: pair invariants fail (see checks)"
                                        : "weights: sub-ellipticity not certified below the lambda cap");
  }
  return exit_ok;
}

template <class F>
json section_or_null(const std::string& path, F&& build) {
  if (path.empty() || !std::filesystem::exists(path)) return nullptr;
  return build(path);
}

json energy_section(const std::string& path) {
  const CsvTable t = read_csv(path);
  if (t.rows.empty()) throw ConfigError("report: trace '" + path + "' has no samples");
  const auto ts = t.values("t"), es = t.values("energy"), rs = t.values("identity_residual");
  double max_res = 0.0, max_inc = 0.0;
  for (std::size_t i = 0; i < es.size(); ++i) {
    max_res = std::max(max_res, rs[i]);
    if (i) max_inc = std::max(max_inc, (es[i] - es[i - 1]) / es[0]);
  }
  json j = {{"samples", es.size()},
            {"t_end", ts.back()},
            {"energy_initial", es.front()},
            {"energy_final", es.back()},
            {"max_identity_residual", max_res},
            {"max_relative_increase", max_inc},
            {"monotone", max_inc <= 0.0}};
  EnergyTrace trace;
  for (std::size_t i = 0; i < es.size(); ++i) trace.samples.push_back({ts[i], es[i], 0.0, rs[i]});
  json fits = json::array();
  for (int k : {1, 2}) {
    try {
      const DecayFit f = fit_decay(trace, k);
      fits.push_back({{"k", k},
                      {"log_law_constant", f.log_law_constant},
                      {"log_law_residual", f.log_law_residual},
                      {"exp_constant", f.exp_constant},
                      {"exp_rate", f.exp_rate},
                      {"exp_residual", f.exp_residual},
                      {"tail_samples", f.tail_samples},
                      {"exponential_preferred", f.exponential_preferred()}});
    } catch (const std::exception& e) {
      fits.push_back({{"k", k}, {"error", e.what()}});
    }
  }
  j["decay_fits"] = fits;
  return j;
}

json spectrum_section(const std::string& path) {
  const CsvTable t = read_csv(path);
  if (t.rows.empty()) throw ConfigError("report: '" + path + "' has no eigenvalues");
  const auto re = t.values("re"), ab = t.values("abs");
  return {{"count", re.size()},
          {"min_abs", *std::min_element(ab.begin(), ab.end())},
          {"max_abs", *std::max_element(ab.begin(), ab.end())},
          {"max_real", *std::max_element(re.begin(), re.end())},
          {"min_real", *std::min_element(re.begin(), re.end())}};
}

json resolvent_section(const std::string& path) {
  const CsvTable t = read_csv(path);
  if (t.rows.empty()) throw ConfigError("report: '" + path + "' has no samples");
  std::vector<ResolventSample> samples;
  const auto mu = t.values("mu"), nrm = t.values("norm");
  for (std::size_t i = 0; i < mu.size(); ++i) {
    ResolventSample s;
    s.mu = mu[i];
    s.norm = nrm[i];
    s.singular = !std::isfinite(nrm[i]);
    samples.push_back(s);
  }
  const GrowthEnvelope env = fit_envelope(samples);
  return {{"samples", samples.size()},
          {"finite_samples", env.finite_samples},
          {"C_a", env.valid() ? json(env.c_a) : json(nullptr)},
          {"C_b", env.valid() ? json(env.c_b) : json(nullptr)},
          {"max_norm", *std::max_element(nrm.begin(), nrm.end())}};
}

json carleman_section(const std::string& path) {
  const CsvTable t = read_csv(path);
  if (t.rows.empty()) throw ConfigError("report: '" + path + "' has no rows");
  const auto r = t.values("ratio");
  const double lo = *std::min_element(r.begin(), r.end()), hi = *std::max_element(r.begin(), r.end());
  return {{"h", t.values("h")}, {"ratio", r}, {"min_ratio", lo}, {"max_ratio", hi}, {"max_over_min", hi / lo}};
}

json weights_section(const std::string& path) {
  std::ifstream in(path);
  json w;
  try {
    w = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("report: '" + path + "' is not valid JSON (" + e.what() + ")");
  }
  if (!w.contains("certificates") || !w.contains("checks"))
    throw ConfigError("report: '" + path + "' lacks certificates or checks");
  return {{"seed_used", w.value("seed_used", json(nullptr))},
          {"valid", w["checks"].value("valid", false)},
          {"critical_points", w["critical_points"]["psi1"].size()},
          {"certificates", w["certificates"]}};
}

int cmd_report(const Options& o, std::ostream& out) {
  const RunConfig c = load(o);
  const auto pick = [](const std::string& flag, const std::string& fallback) { return flag.empty() ? fallback : flag; };
  json j = {{"energy", section_or_null(pick(o.trace, c.output.trace), energy_section)},
            {"spectrum", section_or_null(pick(o.eig, c.output.eig), spectrum_section)},
            {"resolvent", section_or_null(pick(o.sweep, c.output.sweep), resolvent_section)},
            {"carleman", section_or_null(pick(o.ratio, c.output.ratio), carleman_section)},
            {"weights", section_or_null(pick(o.weights, c.output.weights), weights_section)}};
  const std::string path = o.out.empty() ? c.output.summary : o.out;
  write_json(path, j);
  out << "wrote " << path << '\n';
  return exit_ok;
}

void write_diagnostic(const std::string& path, json diag, std::ostream& err) {
  std::ofstream f(path);
  if (!f) {
    err << "could not write diagnostic file '" << path << "'\n";
    return;
  }
  f << diag.dump(2) << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kelvin-Voigt transmission plate lab", "kv-plate-lab"};
  app.require_subcommand(1);
  Options o;

  const auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "Output file");
    sub->add_option("--seed", o.seed, "Override the configuration seed");
    sub->add_option("--diagnostic", o.diagnostic, "Where to write the JSON diagnostic on numerical failure");
  };
  auto* model = app.add_subcommand("model", "Validate the model and print the grid");
  common(model);
  model->add_flag("--show", o.show, "Print the full configuration with defaults");
  model->add_option("--n-cells", o.n_cells);

  auto* simulate_cmd = app.add_subcommand("simulate", "Energy trace of the Cayley scheme");
  common(simulate_cmd);
  simulate_cmd->add_option("--T", o.T);
  simulate_cmd->add_option("--dt", o.dt);
  simulate_cmd->add_option("--n-cells", o.n_cells);

  auto* spectrum_cmd = app.add_subcommand("spectrum", "Eigenvalues of the discrete generator");
  common(spectrum_cmd);
  spectrum_cmd->add_option("--n-cells", o.n_cells);

  auto* resolvent_cmd = app.add_subcommand("resolvent", "Resolvent norm sweep along the imaginary axis");
  common(resolvent_cmd);
  resolvent_cmd->add_option("--mu-min", o.mu_min);
  resolvent_cmd->add_option("--mu-max", o.mu_max);
  resolvent_cmd->add_option("--points", o.points);
  resolvent_cmd->add_option("--n-cells", o.n_cells);

  auto* carleman_cmd = app.add_subcommand("carleman", "Weighted estimate terms for a manufactured pair");
  common(carleman_cmd);
  carleman_cmd->add_option("--h-sweep", o.h_sweep)->delimiter(',');

  auto* weights_cmd = app.add_subcommand("weights", "Build and certify a weight pair on the annulus");
  common(weights_cmd);
  weights_cmd->add_option("--hole-x", o.hole_x);
  weights_cmd->add_option("--hole-y", o.hole_y);
  weights_cmd->add_option("--hole-r", o.hole_r);
  weights_cmd->add_option("--R", o.outer_r);

  auto* report_cmd = app.add_subcommand("report", "Summarize emitted artifacts");
  common(report_cmd);
  report_cmd->add_option("--trace", o.trace);
  report_cmd->add_option("--eig", o.eig);
  report_cmd->add_option("--sweep", o.sweep);
  report_cmd->add_option("--ratio", o.ratio);
  report_cmd->add_option("--weights", o.weights);

  for (const auto& a : args) {
    if (a.empty() || a.front() == '-') continue;
    bool known = false;
    for (const auto* sub : app.get_subcommands({})) known = known || sub->get_name() == a;
    if (!known) {
      err << "error: unknown subcommand '" << a << "'\n\n" << app.help();
      return exit_config;
    }
    break;
  }
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return exit_config;
  }

  json diag = {{"command", app.get_subcommands().front()->get_name()}, {"arguments", args}};
  try {
    if (model->parsed()) return cmd_model(o, out);
    if (simulate_cmd->parsed()) return cmd_simulate(o, out);
    if (spectrum_cmd->parsed()) return cmd_spectrum(o, out);
    if (resolvent_cmd->parsed()) return cmd_resolvent(o, out);
    if (carleman_cmd->parsed()) return cmd_carleman(o, out);
    if (weights_cmd->parsed()) return cmd_weights(o, out, diag);
    if (report_cmd->parsed()) return cmd_report(o, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return exit_config;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    diag["error"] = e.what();
    diag["exit_code"] = exit_numerical;
    write_diagnostic(o.diagnostic, diag, err);
    err << "diagnostic written to " << o.diagnostic << '\n';
    return exit_numerical;
  }
  return exit_config;
}

}  // namespace kvplate
