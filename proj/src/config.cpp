#include "cpe/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

namespace cpe {

nondim::ScaleSet ScaleInputs::scale_set() const {
  return nondim::ScaleSet::from_horizontal(U, L, H, rho_bar, mu1, mu2, mu3, lambda, c, g);
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double to_double(const std::string& v, const std::string& key, int line) {
  double x = 0.0;
  const char* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || p != end || !std::isfinite(x))
    throw ConfigError(key + ": expected a finite number, got '" + v + "'", line, key);
  return x;
}

template <class Int>
Int to_int(const std::string& v, const std::string& key, int line) {
  Int x = 0;
  const char* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || p != end)
    throw ConfigError(key + ": expected an integer, got '" + v + "'", line, key);
  return x;
}

struct Entry {
  std::string key;
  std::function<void(RunConfig&, const std::string&, int)> set;
  std::function<std::string(const RunConfig&)> get;
  bool scale = false;
};

template <class F>
Entry number(std::string key, F field) {
  return {key,
          [field, key](RunConfig& c, const std::string& v, int line) {
            field(c) = to_double(v, key, line);
          },
          [field](const RunConfig& c) { return fmt(field(const_cast<RunConfig&>(c))); }};
}

template <class Int, class F>
Entry integer(std::string key, F field) {
  return {key,
          [field, key](RunConfig& c, const std::string& v, int line) {
            field(c) = to_int<Int>(v, key, line);
          },
          [field](const RunConfig& c) {
            return std::to_string(field(const_cast<RunConfig&>(c)));
          }};
}

template <class F>
Entry text(std::string key, F field) {
  return {key, [field](RunConfig& c, const std::string& v, int) { field(c) = v; },
          [field](const RunConfig& c) { return field(const_cast<RunConfig&>(c)); }};
}

template <class F>
Entry scale(std::string key, F field) {
  Entry e{key,
          [field, key](RunConfig& c, const std::string& v, int line) {
            if (!c.scales) c.scales.emplace();
            field(*c.scales) = to_double(v, key, line);
          },
          [field](const RunConfig& c) {
            return c.scales ? fmt(field(const_cast<ScaleInputs&>(*c.scales))) : std::string();
          },
          true};
  return e;
}

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = {
      integer<int>("grid.nx1", [](RunConfig& c) -> int& { return c.grid.nx1; }),
      integer<int>("grid.nx2", [](RunConfig& c) -> int& { return c.grid.nx2; }),
      integer<int>("grid.nz", [](RunConfig& c) -> int& { return c.grid.nz; }),
      number("grid.lx1", [](RunConfig& c) -> double& { return c.grid.lx1; }),
      number("grid.lx2", [](RunConfig& c) -> double& { return c.grid.lx2; }),
      number("grid.h", [](RunConfig& c) -> double& { return c.grid.h; }),
      number("params.nu", [](RunConfig& c) -> double& { return c.params.nu; }),
      number("params.r", [](RunConfig& c) -> double& { return c.params.r; }),
      number("params.kappa", [](RunConfig& c) -> double& { return c.params.kappa; }),
      number("params.xi_floor", [](RunConfig& c) -> double& { return c.params.xi_floor; }),
      number("solver.cfl", [](RunConfig& c) -> double& { return c.solver.cfl; }),
      number("solver.t_end", [](RunConfig& c) -> double& { return c.solver.t_end; }),
      number("solver.dt", [](RunConfig& c) -> double& { return c.solver.dt; }),
      integer<int>("solver.dump_every", [](RunConfig& c) -> int& { return c.solver.dump_every; }),
      Entry{"solver.integrator",
            [](RunConfig& c, const std::string& v, int line) {
              if (v != "ssp-rk2")
                throw ConfigError("solver.integrator: unknown integrator '" + v + "'", line,
                                  "solver.integrator");
              c.solver.integrator = Integrator::ssp_rk2;
            },
            [](const RunConfig&) { return std::string("ssp-rk2"); }},
      text("init.profile", [](RunConfig& c) -> std::string& { return c.init.profile; }),
      number("init.xi_amplitude", [](RunConfig& c) -> double& { return c.init.xi_amplitude; }),
      number("init.u_amplitude", [](RunConfig& c) -> double& { return c.init.u_amplitude; }),
      integer<int>("init.wavenumber", [](RunConfig& c) -> int& { return c.init.wavenumber; }),
      integer<std::uint64_t>("init.seed",
                             [](RunConfig& c) -> std::uint64_t& { return c.init.seed; }),
      text("init.path", [](RunConfig& c) -> std::string& { return c.init.path; }),
      text("output.dir", [](RunConfig& c) -> std::string& { return c.output_dir; }),
      integer<int>("study.count", [](RunConfig& c) -> int& { return c.study.count; }),
      number("study.base_amplitude",
             [](RunConfig& c) -> double& { return c.study.base_amplitude; }),
      text("study.field", [](RunConfig& c) -> std::string& { return c.study.field; }),
      integer<int>("mms.levels", [](RunConfig& c) -> int& { return c.mms.levels; }),
      scale("scales.U", [](ScaleInputs& s) -> double& { return s.U; }),
      scale("scales.L", [](ScaleInputs& s) -> double& { return s.L; }),
      scale("scales.H", [](ScaleInputs& s) -> double& { return s.H; }),
      scale("scales.rho_bar", [](ScaleInputs& s) -> double& { return s.rho_bar; }),
      scale("scales.mu1", [](ScaleInputs& s) -> double& { return s.mu1; }),
      scale("scales.mu2", [](ScaleInputs& s) -> double& { return s.mu2; }),
      scale("scales.mu3", [](ScaleInputs& s) -> double& { return s.mu3; }),
      scale("scales.lambda", [](ScaleInputs& s) -> double& { return s.lambda; }),
      scale("scales.c", [](ScaleInputs& s) -> double& { return s.c; }),
      scale("scales.g", [](ScaleInputs& s) -> double& { return s.g; }),
  };
  return table;
}

const Entry* find(const std::string& key) {
  for (const Entry& e : entries())
    if (e.key == key) return &e;
  return nullptr;
}

struct Value {
  std::string text;
  int line = 0;
};

void check(bool ok, const std::string& key, const std::string& msg,
           const std::map<std::string, Value>& seen) {
  if (ok) return;
  const auto it = seen.find(key);
  throw ConfigError(key + ": " + msg, it == seen.end() ? 0 : it->second.line, key);
}

void validate(const RunConfig& c, const std::map<std::string, Value>& seen) {
  // Range checks the library validators would also make, reported with the
  // key and line instead.
  auto guarded = [&](const std::function<void()>& f) {
    try {
      f();
    } catch (const std::invalid_argument& e) {
      std::string msg = e.what();
      const std::string key = msg.substr(0, msg.find(' '));
      const auto it = seen.find(key);
      throw ConfigError(msg, it == seen.end() ? 0 : it->second.line, key);
    }
  };
  check(c.grid.nx1 >= 4 && c.grid.nx1 % 2 == 0, "grid.nx1", "must be even and >= 4", seen);
  check(c.grid.nx2 >= 4 && c.grid.nx2 % 2 == 0, "grid.nx2", "must be even and >= 4", seen);
  check(c.grid.nz >= 2, "grid.nz", "must be >= 2", seen);
  check(c.grid.lx1 > 0.0, "grid.lx1", "must be > 0", seen);
  check(c.grid.lx2 > 0.0, "grid.lx2", "must be > 0", seen);
  check(c.grid.h > 0.0 && c.grid.h < 1.0, "grid.h", "must lie in (0, 1)", seen);
  guarded([&] { c.params.validate(); });
  guarded([&] { c.solver.validate(); });

  const std::string& pr = c.init.profile;
  check(pr == "rest" || pr == "wave" || pr == "random" || pr == "dump", "init.profile",
        "must be rest, wave, random or dump", seen);
  check(std::abs(c.init.xi_amplitude) < 1.0, "init.xi_amplitude", "must satisfy |a| < 1", seen);
  check(c.init.u_amplitude >= 0.0, "init.u_amplitude", "must be >= 0", seen);
  check(c.init.wavenumber >= 1, "init.wavenumber", "must be >= 1", seen);
  check(pr != "dump" || !c.init.path.empty(), "init.path", "required for profile dump", seen);
  check(!c.output_dir.empty(), "output.dir", "must not be empty", seen);
  check(c.study.count >= 1 && c.study.count <= 20, "study.count", "must lie in [1, 20]", seen);
  check(c.study.base_amplitude > 0.0 && c.study.base_amplitude <= 1.0, "study.base_amplitude",
        "must lie in (0, 1]", seen);
  check(c.study.field == "xi" || c.study.field == "u", "study.field", "must be xi or u", seen);
  check(c.mms.levels >= 2 && c.mms.levels <= 6, "mms.levels", "must lie in [2, 6]", seen);

  if (c.scales) {
    for (const Entry& e : entries())
      if (e.scale && !seen.count(e.key))
        throw ConfigError(e.key + ": missing (scales.* keys come as a complete set)", 0, e.key);
    try {
      (void)c.scales->scale_set();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("scales: ") + e.what(), seen.at("scales.U").line,
                        "scales.U");
    }
  }
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const Entry& e : entries()) k.push_back(e.key);
    return k;
  }();
  return keys;
}

RunConfig parse_config(const std::string& text, const Overrides& overrides,
                       bool require_run_keys) {
  std::map<std::string, Value> seen;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected 'section.key = value', got '" + s + "'", line, "");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (!find(key)) throw ConfigError("unknown key '" + key + "'", line, key);
    if (seen.count(key))
      throw ConfigError("duplicate key '" + key + "' (first on line " +
                            std::to_string(seen[key].line) + ")",
                        line, key);
    seen[key] = {value, line};
  }
  for (const auto& [key, value] : overrides) {
    if (!find(key)) throw ConfigError("unknown override '--" + key + "'", 0, key);
    seen[key] = {trim(value), 0};
  }

  if (require_run_keys)
    for (const char* k : {"grid.nx1", "grid.nx2", "grid.nz", "solver.t_end"})
      if (!seen.count(k)) throw ConfigError(std::string(k) + ": required key missing", 0, k);

  RunConfig cfg;
  for (const Entry& e : entries()) {
    const auto it = seen.find(e.key);
    if (it != seen.end()) e.set(cfg, it->second.text, it->second.line);
  }
  validate(cfg, seen);
  return cfg;
}

std::string serialize(const RunConfig& cfg) {
  std::string out;
  for (const Entry& e : entries()) {
    if (e.scale && !cfg.scales) continue;
    out += e.key + " = " + e.get(cfg) + "\n";
  }
  return out;
}

}  // namespace cpe
