#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cpe/grid.hpp"
#include "cpe/nondim.hpp"
#include "cpe/solver.hpp"

namespace cpe {

/// Bad configuration. `line()` is the 1-based line of the offending entry,
/// 0 when the problem is a missing key or a command-line override.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line, std::string key)
      : std::runtime_error(what), line_(line), key_(std::move(key)) {}
  int line() const { return line_; }
  const std::string& key() const { return key_; }

 private:
  int line_;
  std::string key_;
};

struct InitSpec {
  std::string profile = "rest";  // rest | wave | random | dump
  double xi_amplitude = 0.1;
  double u_amplitude = 0.1;
  int wavenumber = 1;
  std::uint64_t seed = 1;
  std::string path;  // field dump, profile = dump

  bool operator==(const InitSpec&) const = default;
};

struct StudySpec {
  int count = 5;
  double base_amplitude = 1.0;  // delta_n = base_amplitude * 2^-n, n = 1..count
  std::string field = "xi";     // xi | u

  bool operator==(const StudySpec&) const = default;
};

struct MmsSpec {
  int levels = 3;  // base grid, then refined by 2 per level

  bool operator==(const MmsSpec&) const = default;
};

/// Dimensional inputs of the scale audit; V and T are derived.
struct ScaleInputs {
  double U = 0.0, L = 0.0, H = 0.0, rho_bar = 0.0;
  double mu1 = 0.0, mu2 = 0.0, mu3 = 0.0, lambda = 0.0;
  double c = 0.0, g = 0.0;

  nondim::ScaleSet scale_set() const;
  bool operator==(const ScaleInputs&) const = default;
};

struct RunConfig {
  GridSpec grid;
  Params params;
  SolverConfig solver;
  InitSpec init;
  std::string output_dir = "out";
  StudySpec study;
  MmsSpec mms;
  std::optional<ScaleInputs> scales;

  bool operator==(const RunConfig&) const = default;
};

using Overrides = std::vector<std::pair<std::string, std::string>>;

/// Parses `section.key = value` lines; `#` starts a comment. Unknown or
/// repeated keys, malformed values, out-of-range values and missing required
/// keys (grid.nx1, grid.nx2, grid.nz, solver.t_end) throw ConfigError.
/// Overrides replace file entries and must name known keys. With
/// `require_run_keys = false` the required-key check is skipped.
RunConfig parse_config(const std::string& text, const Overrides& overrides = {},
                       bool require_run_keys = true);

/// Text that parses back to an equal config.
std::string serialize(const RunConfig& cfg);

/// Every accepted key, in serialization order.
const std::vector<std::string>& config_keys();

}  // namespace cpe
