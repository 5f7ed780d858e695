#pragma once

#include <iosfwd>
#include <optional>

#include "cpe/config.hpp"

namespace cpe::app {

/// Exit codes shared by every subcommand.
enum ExitCode { ok = 0, config_error = 2, numerical_failure = 3, io_failure = 4 };

/// Each subcommand writes its files under cfg.output_dir and a short report
/// to `out`. Failures are thrown (ConfigError, NumericalError, IoError).

/// diagnostics.csv (streamed), final.cpe1, config.txt.
void simulate(const RunConfig& cfg, std::ostream& out);

/// mms.csv: errors and observed orders over cfg.mms.levels grids.
void mms(const RunConfig& cfg, std::ostream& out);

/// study.csv: distances of perturbed runs to the reference run.
void study(const RunConfig& cfg, std::ostream& out);

/// Term table of the scaled system with the regime applied and the kept
/// set; returns false if the kept set differs from the canonical one.
bool scale_audit(const std::optional<RunConfig>& cfg, std::ostream& out);

/// transform.csv: per-snapshot stratification, hydrostatic and physical
/// mass residuals of the mapped trajectory.
void transform_check(const RunConfig& cfg, std::ostream& out);

}  // namespace cpe::app
