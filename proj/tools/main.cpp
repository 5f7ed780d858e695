#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cpe/app.hpp"
#include "cpe/config.hpp"
#include "cpe/io.hpp"
#include "cpe/solver.hpp"

namespace {

int fail(const std::string& kind, int code, const std::string& message,
         nlohmann::json extra = nlohmann::json::object()) {
  extra["error"] = kind;
  extra["exit_code"] = code;
  extra["message"] = message;
  std::cerr << extra.dump() << "\n";
  return code;
}

cpe::Overrides overrides_from(const std::vector<std::string>& rest) {
  cpe::Overrides o;
  for (std::size_t n = 0; n < rest.size(); ++n) {
    const std::string& a = rest[n];
    if (a.rfind("--", 0) != 0)
      throw cpe::ConfigError("unexpected argument '" + a + "'", 0, "");
    const std::string body = a.substr(2);
    const auto eq = body.find('=');
    if (eq != std::string::npos) {
      o.emplace_back(body.substr(0, eq), body.substr(eq + 1));
    } else {
      if (n + 1 >= rest.size()) throw cpe::ConfigError("missing value for '" + a + "'", 0, body);
      o.emplace_back(body, rest[++n]);
    }
  }
  return o;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw cpe::IoError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Simulator for the stratified compressible primitive equations model problem"};
  cli.require_subcommand(1);
  std::string config_path;

  const char* names[][2] = {
      {"simulate", "Run the model from the configured initial state"},
      {"mms", "Manufactured-solution convergence study"},
      {"study", "Perturbation-convergence (stability) study"},
      {"scale-audit", "Scaled term table and reduced system"},
      {"transform-check", "Map a trajectory to physical variables and check residuals"},
  };
  std::vector<CLI::App*> subs;
  for (auto& n : names) {
    CLI::App* s = cli.add_subcommand(n[0], n[1]);
    s->add_option("-c,--config", config_path, "Config file (section.key = value)");
    s->allow_extras();
    s->footer("Any config key may be overridden as --section.key value.");
    subs.push_back(s);
  }

  try {
    cli.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return cli.exit(e);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return cli.exit(e);
    return fail("config", cpe::app::config_error, e.what());
  }

  CLI::App* sub = cli.get_subcommands().front();
  const std::string name = sub->get_name();
  try {
    const cpe::Overrides ov = overrides_from(sub->remaining());
    const std::string text = config_path.empty() ? std::string() : read_file(config_path);

    if (name == "scale-audit") {
      std::optional<cpe::RunConfig> cfg;
      if (!text.empty() || !ov.empty()) cfg = cpe::parse_config(text, ov, false);
      if (!cpe::app::scale_audit(cfg, std::cout))
        return fail("scale-audit", cpe::app::numerical_failure,
                    "reduced system differs from the simplified system");
      return cpe::app::ok;
    }

    const cpe::RunConfig cfg = cpe::parse_config(text, ov);
    if (name == "simulate") cpe::app::simulate(cfg, std::cout);
    else if (name == "mms") cpe::app::mms(cfg, std::cout);
    else if (name == "study") cpe::app::study(cfg, std::cout);
    else cpe::app::transform_check(cfg, std::cout);
    return cpe::app::ok;
  } catch (const cpe::ConfigError& e) {
    return fail("config", cpe::app::config_error, e.what(), {{"line", e.line()}, {"key", e.key()}});
  } catch (const cpe::NumericalError& e) {
    return fail("numerical", cpe::app::numerical_failure, e.what(),
                {{"step", e.step()}, {"field", e.field()}});
  } catch (const cpe::IoError& e) {
    return fail("io", cpe::app::io_failure, e.what());
  } catch (const std::invalid_argument& e) {
    return fail("config", cpe::app::config_error, e.what());
  } catch (const std::exception& e) {
    return fail("numerical", cpe::app::numerical_failure, e.what());
  }
}
