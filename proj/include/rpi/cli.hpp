#ifndef RPI_CLI_HPP
#define RPI_CLI_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rpi/format.hpp"
#include "rpi/units.hpp"

namespace rpi::cli {

enum class ExitCode : int { Success = 0, Usage = 1, Constraint = 2, Numerical = 3 };

struct RunConfig {
  std::string subcommand;
  UnitKind units = UnitKind::Natural;
  AlphaMode alpha = AlphaMode::PaperExact;
  OutputFormat format = OutputFormat::Text;
  std::optional<std::string> config_path;
  std::optional<std::string> out_path;

  // region / resolution
  std::optional<double> l, tau, dE, dH, dx;
  double threshold = 10.0;

  // probe
  std::optional<double> m, Omega, Q;
  double omega = 0.0;

  // map
  std::optional<double> l_min, l_max, tau_min, tau_max;
  std::optional<int> grid;

  // engine
  int modes = 1;
  int steps = 64;
  double sweep = 4.0;
  bool zero_mode = false;

  // sample
  std::optional<std::int64_t> n;
  std::uint64_t seed = 0;
  int cells = 1;
  bool stats_only = false;

  unsigned threads = 1;

  UnitSystem system() const { return make_units(units, alpha); }
};

/// Thrown by parse_args for --help; carries the rendered help text.
struct HelpRequested {
  std::string text;
};

/// Keys accepted in config files; identical to the long flag names.
const std::vector<std::string>& config_keys();

/// Applies one `key=value` to `cfg`, validating the value. Throws UsageError
/// or ConstraintError.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// Flat `key=value` file; `#` starts a comment. Errors carry the line number.
RunConfig load_config(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& source = "config");

/// Parses argv (without the program name). Values from --config are applied
/// first; explicit flags override them. Validates required parameters.
RunConfig parse_args(const std::vector<std::string>& args);

/// Worker cap from RPI_METER_THREADS, else hardware concurrency.
unsigned default_threads();

/// Runs a parsed configuration, writing results to `out`.
void execute(const RunConfig& cfg, std::ostream& out);

/// Full front end: parse, run, map errors to exit codes.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rpi::cli

#endif  // RPI_CLI_HPP
