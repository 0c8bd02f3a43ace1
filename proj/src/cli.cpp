#include "rpi/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "rpi/backreaction.hpp"
#include "rpi/engine.hpp"
#include "rpi/errors.hpp"
#include "rpi/probe.hpp"
#include "rpi/rpi_core.hpp"
#include "rpi/sampler.hpp"

namespace rpi::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || text.empty())
    throw UsageError("--" + key + ": '" + text + "' is not a number");
  if (!std::isfinite(v)) throw UsageError("--" + key + ": value must be finite");
  return v;
}

template <typename Int>
Int parse_int(const std::string& key, const std::string& text) {
  Int v{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    throw UsageError("--" + key + ": '" + text + "' is not an integer");
  return v;
}

double positive(const std::string& key, const std::string& text) {
  const double v = parse_double(key, text);
  if (!(v > 0.0)) throw ConstraintError("--" + key + ": must be positive (got " + text + ")");
  return v;
}

int positive_int(const std::string& key, const std::string& text) {
  const int v = parse_int<int>(key, text);
  if (v < 1) throw ConstraintError("--" + key + ": must be a positive integer");
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw UsageError("--" + key + ": '" + text + "' is not a boolean");
}

// subcommand -> keys it accepts besides the global ones
const std::map<std::string, std::vector<std::string>>& subcommand_keys() {
  static const std::map<std::string, std::vector<std::string>> keys{
      {"regime", {"l", "tau", "dE", "dH", "threshold"}},
      {"probe", {"m", "tau", "Omega", "omega", "Q"}},
      {"limit", {"l", "tau", "dx"}},
      {"map", {"l-min", "l-max", "tau-min", "tau-max", "grid"}},
      {"engine", {"modes", "steps", "l", "tau", "sweep", "zero-mode"}},
      {"sample", {"l", "tau", "dE", "dH", "n", "seed", "cells", "stats-only"}},
  };
  return keys;
}

const std::map<std::string, std::vector<std::string>>& required_keys() {
  static const std::map<std::string, std::vector<std::string>> keys{
      {"regime", {"l", "tau", "dE"}},
      {"probe", {"m", "tau", "Omega", "Q"}},
      {"limit", {"l", "tau"}},
      {"map", {"l-min", "l-max", "tau-min", "tau-max", "grid"}},
      {"engine", {"l", "tau"}},
      {"sample", {"l", "tau", "dE", "n"}},
  };
  return keys;
}

bool is_set(const RunConfig& c, const std::string& key) {
  if (key == "l") return c.l.has_value();
  if (key == "tau") return c.tau.has_value();
  if (key == "dE") return c.dE.has_value();
  if (key == "m") return c.m.has_value();
  if (key == "Omega") return c.Omega.has_value();
  if (key == "Q") return c.Q.has_value();
  if (key == "l-min") return c.l_min.has_value();
  if (key == "l-max") return c.l_max.has_value();
  if (key == "tau-min") return c.tau_min.has_value();
  if (key == "tau-max") return c.tau_max.has_value();
  if (key == "grid") return c.grid.has_value();
  if (key == "n") return c.n.has_value();
  return true;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "units", "alpha", "format", "out",   "l",    "tau",  "dE",       "dH",      "dx",      "threshold",
      "m",     "Omega", "omega",  "Q",     "l-min", "l-max", "tau-min", "tau-max", "grid",    "modes",
      "steps", "sweep", "zero-mode", "n", "seed", "cells", "stats-only"};
  return keys;
}

void apply_setting(RunConfig& c, const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "units") {
    if (v == "natural")
      c.units = UnitKind::Natural;
    else if (v == "cgs")
      c.units = UnitKind::GaussianCGS;
    else
      throw UsageError("--units: expected natural or cgs, got '" + v + "'");
  } else if (key == "alpha") {
    if (v == "paper")
      c.alpha = AlphaMode::PaperExact;
    else if (v == "codata")
      c.alpha = AlphaMode::Codata;
    else
      throw UsageError("--alpha: expected paper or codata, got '" + v + "'");
  } else if (key == "format") {
    if (v == "text")
      c.format = OutputFormat::Text;
    else if (v == "csv")
      c.format = OutputFormat::CSV;
    else
      throw UsageError("--format: expected text or csv, got '" + v + "'");
  } else if (key == "out") {
    c.out_path = v;
  } else if (key == "l") {
    c.l = positive(key, v);
  } else if (key == "tau") {
    c.tau = positive(key, v);
  } else if (key == "dE") {
    c.dE = positive(key, v);
  } else if (key == "dH") {
    c.dH = positive(key, v);
  } else if (key == "dx") {
    c.dx = positive(key, v);
  } else if (key == "threshold") {
    c.threshold = parse_double(key, v);
    if (!(c.threshold > 1.0)) throw ConstraintError("--threshold: must exceed 1");
  } else if (key == "m") {
    c.m = positive(key, v);
  } else if (key == "Omega") {
    c.Omega = parse_double(key, v);
    if (*c.Omega < 0.0) throw ConstraintError("--Omega: must be non-negative");
  } else if (key == "omega") {
    c.omega = parse_double(key, v);
    if (c.omega < 0.0) throw ConstraintError("--omega: must be non-negative");
  } else if (key == "Q") {
    c.Q = positive(key, v);
  } else if (key == "l-min") {
    c.l_min = positive(key, v);
  } else if (key == "l-max") {
    c.l_max = positive(key, v);
  } else if (key == "tau-min") {
    c.tau_min = positive(key, v);
  } else if (key == "tau-max") {
    c.tau_max = positive(key, v);
  } else if (key == "grid") {
    c.grid = positive_int(key, v);
  } else if (key == "modes") {
    c.modes = positive_int(key, v);
  } else if (key == "steps") {
    c.steps = positive_int(key, v);
  } else if (key == "sweep") {
    c.sweep = positive(key, v);
  } else if (key == "zero-mode") {
    c.zero_mode = parse_bool(key, v);
  } else if (key == "n") {
    c.n = parse_int<std::int64_t>(key, v);
    if (*c.n < 1) throw ConstraintError("--n: must be a positive integer");
  } else if (key == "seed") {
    c.seed = parse_int<std::uint64_t>(key, v);
  } else if (key == "cells") {
    c.cells = positive_int(key, v);
  } else if (key == "stats-only") {
    c.stats_only = parse_bool(key, v);
  } else {
    throw UsageError("unknown key '" + key + "'");
  }
}

RunConfig parse_config_text(const std::string& text, const std::string& source) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto where = source + ":" + std::to_string(number) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError(where + "expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const auto& keys = config_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) throw UsageError(where + "unknown key '" + key + "'");
    try {
      apply_setting(cfg, key, line.substr(eq + 1));
    } catch (const ConstraintError& e) {
      throw ConstraintError(where + e.what());
    } catch (const UsageError& e) {
      throw UsageError(where + e.what());
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  auto cfg = parse_config_text(buf.str(), path);
  cfg.config_path = path;
  return cfg;
}

RunConfig parse_args(const std::vector<std::string>& args) {
  CLI::App app{"Quantum measurability limits of the electromagnetic field", "rpi-meter"};
  app.require_subcommand(1);
  app.fallthrough();

  std::map<std::string, std::string> raw;
  std::map<std::string, CLI::Option*> given;
  std::string config_path;
  auto* config_opt = app.add_option("--config", config_path, "flat key=value file; flags override it");
  given["units"] = app.add_option("--units", raw["units"], "natural | cgs (default natural)");
  given["alpha"] = app.add_option("--alpha", raw["alpha"], "paper (1/137) | codata (default paper)");
  given["out"] = app.add_option("--out", raw["out"], "write output to this path");
  given["format"] = app.add_option("--format", raw["format"], "text | csv (default text)");

  const std::map<std::string, std::string> help{
      {"l", "region size l"},
      {"tau", "measurement duration tau"},
      {"dE", "electric resolution Delta_E"},
      {"dH", "magnetic resolution Delta_H (default Delta_E)"},
      {"dx", "probe position error, at most the charge-rule default"},
      {"threshold", "regime ratio threshold R (default 10)"},
      {"m", "probe mass"},
      {"Omega", "frequency of the measured motion"},
      {"omega", "probe eigenfrequency (default 0, free charge)"},
      {"Q", "probe charge"},
      {"l-min", "smallest l"},
      {"l-max", "largest l"},
      {"tau-min", "smallest tau"},
      {"tau-max", "largest tau"},
      {"grid", "points per axis (log spaced)"},
      {"modes", "number of box mode shells (default 1)"},
      {"steps", "time slices N_t (default 64)"},
      {"sweep", "decades of resolution around the optimum (default 4)"},
      {"zero-mode", "use a single zero-frequency mode instead of box shells"},
      {"n", "sample count"},
      {"seed", "random seed (default 0)"},
      {"cells", "coarse cells K (default 1)"},
      {"stats-only", "print statistics without raw samples"},
  };
  std::map<std::string, std::map<std::string, CLI::Option*>> sub_opts;
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, keys] : subcommand_keys()) {
    auto* sub = app.add_subcommand(name);
    subs[name] = sub;
    for (const auto& key : keys) {
      if (key == "zero-mode" || key == "stats-only") {
        sub_opts[name][key] = sub->add_flag("--" + key, help.at(key));
      } else {
        std::string& slot = raw[name + "/" + key];
        const bool integral = key == "grid" || key == "modes" || key == "steps" || key == "n" ||
                              key == "seed" || key == "cells";
        sub_opts[name][key] = sub->add_option("--" + key, slot, help.at(key))->type_name(integral ? "INT" : "FLOAT");
      }
    }
  }
  subs["regime"]->description("RPI output uncertainty and regime for a region");
  subs["probe"]->description("mechanical probe errors");
  subs["limit"]->description("absolute undisturbing-measurement limit");
  subs["map"]->description("CSV measurability map over an (l, tau) grid");
  subs["engine"]->description("lattice Gaussian path-integral verification sweep");
  subs["sample"]->description("Monte Carlo measurement outputs");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    std::ostringstream os;
    app.exit(e, os, os);
    throw HelpRequested{os.str()};
  } catch (const CLI::CallForAllHelp& e) {
    std::ostringstream os;
    app.exit(e, os, os);
    throw HelpRequested{os.str()};
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  RunConfig cfg = config_opt->count() ? load_config(config_path) : RunConfig{};
  for (const auto& [key, opt] : given)
    if (opt->count()) apply_setting(cfg, key, raw[key]);
  for (const auto& [name, sub] : subs) {
    if (!sub->parsed()) continue;
    cfg.subcommand = name;
    for (const auto& [key, opt] : sub_opts[name]) {
      if (!opt->count()) continue;
      if (key == "zero-mode" || key == "stats-only")
        apply_setting(cfg, key, "true");
      else
        apply_setting(cfg, key, raw[name + "/" + key]);
    }
  }
  for (const auto& key : required_keys().at(cfg.subcommand))
    if (!is_set(cfg, key)) throw UsageError("--" + key + " is required for '" + cfg.subcommand + "'");
  if (cfg.subcommand == "map" && (*cfg.l_min > *cfg.l_max || *cfg.tau_min > *cfg.tau_max))
    throw UsageError("map ranges need min <= max");
  cfg.threads = default_threads();
  return cfg;
}

unsigned default_threads() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("RPI_METER_THREADS")) {
    unsigned cap = 0;
    const std::string s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), cap);
    if (ec == std::errc() && ptr == s.data() + s.size() && cap >= 1) return std::min(hw, cap);
  }
  return hw;
}

namespace {

const std::vector<std::string> kMapHeader{"l", "tau", "rho", "regime", "delta_E_abs", "Q_opt", "lambda", "subregions"};

Record map_row(double l, double tau, const LimitBreakdown& b) {
  return {{"l", l},
          {"tau", tau},
          {"rho", b.rho},
          {"regime", std::string(to_string(b.regime))},
          {"delta_E_abs", b.delta_E_abs},
          {"Q_opt", b.Q_opt},
          {"lambda", b.lambda},
          {"subregions", b.subregion_count}};
}

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> out;
  if (n == 1) return {lo};
  for (int i = 0; i < n; ++i) {
    const double t = double(i) / double(n - 1);
    out.push_back(i == n - 1 ? hi : lo * std::pow(hi / lo, t));
  }
  return out;
}

Record header_record(const RunConfig& c) {
  return {{"units", std::string(to_string(c.units))}, {"alpha", std::string(to_string(c.alpha))}};
}

void run_regime(const RunConfig& c, std::ostream& out) {
  const auto sys = c.system();
  const auto region = Regiond::from_units(*c.l, *c.tau, sys);
  const double dE = field_to_natural(*c.dE, sys);
  const double dH = field_to_natural(c.dH.value_or(*c.dE), sys);
  const auto r = output_uncertainty(region, Resolutiond(dE, dH), c.threshold);
  auto field = [&](double v) { return field_from_natural(v, sys); };
  Record rec = header_record(c);
  rec.insert(rec.end(), {{"l", *c.l},
                         {"tau", *c.tau},
                         {"four_volume", region.four_volume()},
                         {"delta_E_in", *c.dE},
                         {"delta_H_in", c.dH.value_or(*c.dE)},
                         {"delta_E_out", field(r.delta_E_out)},
                         {"delta_H_out", field(r.delta_H_out)},
                         {"regime", std::string(to_string(r.regime))},
                         {"regime_H", std::string(to_string(r.regime_H))},
                         {"delta_opt", field(r.delta_opt)},
                         {"delta_min", field(r.delta_min)}});
  std::vector<std::string> header;
  for (const auto& f : rec) header.push_back(f.key);
  emit(out, header, std::span(&rec, 1), c.format);
}

void run_probe(const RunConfig& c, std::ostream& out) {
  const auto sys = c.system();
  ProbeBody body{*c.Q, *c.m, c.omega, *c.Omega, 0.0};
  const auto b = probe_budget(body, *c.tau, sys);
  Record rec = header_record(c);
  rec.insert(rec.end(), {{"m", *c.m},
                         {"tau", *c.tau},
                         {"Omega", *c.Omega},
                         {"omega", c.omega},
                         {"Q", *c.Q},
                         {"delta_x", b.delta_x},
                         {"delta_F", b.delta_F},
                         {"delta_E_mech", b.delta_E_mech}});
  std::vector<std::string> header;
  for (const auto& f : rec) header.push_back(f.key);
  emit(out, header, std::span(&rec, 1), c.format);
}

void run_limit(const RunConfig& c, std::ostream& out) {
  const auto sys = c.system();
  const auto b = c.dx ? evaluate_plan({*c.l, *c.tau, c.dx, true, sys}) : absolute_limit(*c.l, *c.tau, sys);
  if (c.format == OutputFormat::CSV) {
    const Record row = map_row(*c.l, *c.tau, b);
    emit(out, kMapHeader, std::span(&row, 1), OutputFormat::CSV);
    return;
  }
  Record rec = header_record(c);
  rec.insert(rec.end(), {{"l", *c.l},
                         {"tau", *c.tau},
                         {"rho", b.rho},
                         {"regime", std::string(to_string(b.regime))},
                         {"delta_E_abs", b.delta_E_abs},
                         {"Q_opt", b.Q_opt},
                         {"delta_x_used", b.delta_x_used},
                         {"E_meas", b.E_meas},
                         {"lambda", b.lambda},
                         {"subregion_count", b.subregion_count},
                         {"charge_clamped", std::string(b.charge_clamped ? "true" : "false")}});
  write_text(out, rec);
}

void run_map(const RunConfig& c, std::ostream& out) {
  const auto sys = c.system();
  std::vector<Record> rows;
  for (double l : log_grid(*c.l_min, *c.l_max, *c.grid))
    for (double tau : log_grid(*c.tau_min, *c.tau_max, *c.grid)) rows.push_back(map_row(l, tau, absolute_limit(l, tau, sys)));
  emit(out, kMapHeader, rows, OutputFormat::CSV);
}

void run_engine(const RunConfig& c, std::ostream& out) {
  const auto sys = c.system();
  const auto region = Regiond::from_units(*c.l, *c.tau, sys);
  const double omega = region.four_volume();
  const auto model = c.zero_mode ? engine::build_mode_model(region, std::vector<double>{0.0},
                                                            std::vector<double>{omega}, c.steps)
                                 : engine::build_mode_model(region, c.modes, c.steps);
  const auto deltas = engine::log_sweep(omega, c.sweep);
  const auto sweep = engine::variance_sweep(model, deltas, c.threads);
  const auto fit = engine::fit_variance_law(sweep, omega);

  const std::vector<std::string> header{"delta", "variance", "fit_C", "fit_p"};
  std::vector<Record> rows;
  for (const auto& p : sweep) {
    const double spread = field_from_natural(std::sqrt(p.variance), sys);
    rows.push_back({{"delta", field_from_natural(p.delta, sys)},
                    {"variance", spread * spread},
                    {"fit_C", fit.C},
                    {"fit_p", fit.quantum_exponent}});
  }
  emit(out, header, rows, OutputFormat::CSV);
  Record summary{{"modes", std::int64_t(model.blocks.size())},
                 {"steps", std::int64_t(c.steps)},
                 {"four_volume", omega},
                 {"delta_opt", field_from_natural(std::sqrt(2.0 / omega), sys)},
                 {"fit_C", fit.C},
                 {"fit_p", fit.quantum_exponent},
                 {"fit_residual", fit.residual},
                 {"fit_points", std::int64_t(fit.points_used)},
                 {"C_relative_to_4", fit.C / 4.0}};
  write_text(out, summary, "# ");
}

void run_sample(const RunConfig& c, std::ostream& out) {
  const auto sys = c.system();
  const auto region = Regiond::from_units(*c.l, *c.tau, sys);
  const double dE = field_to_natural(*c.dE, sys);
  const double dH = field_to_natural(c.dH.value_or(*c.dE), sys);
  const FieldConfiguration classical(c.cells);
  const auto samples =
      sample_outputs(classical, region, Resolutiond(dE, dH), std::size_t(*c.n), c.seed, c.threads);
  const auto st = empirical_stats(samples, classical);
  auto field = [&](double v) { return field_from_natural(v, sys); };
  auto field2 = [&](double v) {
    const double f = field(std::sqrt(v));
    return f * f;
  };
  Record stats{{"n", std::int64_t(st.n)},
               {"cells", std::int64_t(c.cells)},
               {"seed", c.seed},
               {"delta_E_out", field(output_uncertainty(region, Resolutiond(dE, dH)).delta_E_out)},
               {"norm_deviation_E", field2(st.norm_deviation_E)},
               {"norm_deviation_H", field2(st.norm_deviation_H)},
               {"per_component_sd_E", field(st.per_component_sd_E)},
               {"per_component_sd_H", field(st.per_component_sd_H)}};
  if (c.stats_only) {
    write_text(out, stats);
    return;
  }
  const std::vector<std::string> header{"sample", "cell", "Ex", "Ey", "Ez", "Hx", "Hy", "Hz"};
  write_csv_header(out, header);
  for (std::size_t i = 0; i < samples.size(); ++i)
    for (Eigen::Index k = 0; k < samples[i].cells(); ++k) {
      const auto& s = samples[i];
      write_csv_row(out, {{"sample", std::uint64_t(i)},
                          {"cell", std::int64_t(k)},
                          {"Ex", field(s.E(0, k))},
                          {"Ey", field(s.E(1, k))},
                          {"Ez", field(s.E(2, k))},
                          {"Hx", field(s.H(0, k))},
                          {"Hy", field(s.H(1, k))},
                          {"Hz", field(s.H(2, k))}});
    }
  write_text(out, stats, "# ");
}

}  // namespace

void execute(const RunConfig& c, std::ostream& out) {
  if (c.subcommand == "regime")
    run_regime(c, out);
  else if (c.subcommand == "probe")
    run_probe(c, out);
  else if (c.subcommand == "limit")
    run_limit(c, out);
  else if (c.subcommand == "map")
    run_map(c, out);
  else if (c.subcommand == "engine")
    run_engine(c, out);
  else if (c.subcommand == "sample")
    run_sample(c, out);
  else
    throw UsageError("unknown subcommand '" + c.subcommand + "'");
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    const RunConfig cfg = parse_args(args);
    if (cfg.out_path) {
      std::ofstream file(*cfg.out_path);
      if (!file) throw UsageError("cannot write output file '" + *cfg.out_path + "'");
      execute(cfg, file);
      if (!file) throw UsageError("failed writing output file '" + *cfg.out_path + "'");
    } else {
      execute(cfg, out);
    }
    return int(ExitCode::Success);
  } catch (const HelpRequested& h) {
    out << h.text;
    return int(ExitCode::Success);
  } catch (const UsageError& e) {
    err << "rpi-meter: " << e.what() << '\n';
    return int(ExitCode::Usage);
  } catch (const ConstraintError& e) {
    err << "rpi-meter: " << e.what() << '\n';
    return int(ExitCode::Constraint);
  } catch (const NumericalError& e) {
    err << "rpi-meter: numerical failure: " << e.what() << '\n';
    return int(ExitCode::Numerical);
  }
}

}  // namespace rpi::cli
