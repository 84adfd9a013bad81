#pragma once

#include <array>
#include <string>
#include <vector>

#include "fracpass/config.hpp"
#include "fracpass/grid.hpp"

namespace fracpass {

/// Small-scale expansion of the cut bubble family t -> cutoff * z_mu on one
/// grid: after the energy-identity rescaling fixed at mu = 1, reports the
/// excess of the cut-bubble seminorm over the reference threshold power and
/// the critical mass removed by the cutoff, for mu in {mu_top/4, mu_top/2,
/// mu_top}, with log-log slopes in mu.
struct ExpansionStudy {
  double cutoff_radius = 0.0;
  double scale_sq = 0.0;               ///< energy-identity rescaling c^2 at mu = 1
  std::vector<double> mus;
  std::vector<double> energy_excess;   ///< c^2 [phi z_mu]^2 - anchor_S_pow
  std::vector<double> cutoff_mass;     ///< c^p int (1 - phi^p) z_mu^p
  double energy_slope = 0.0;           ///< NaN when a value is nonpositive
  double mass_slope = 0.0;
  bool energy_positive = false;
  bool mass_positive = false;
};

/// anchor_S_pow is the reference-grid quotient power S_hat^{N/(2s)} the excess
/// is measured against.
ExpansionStudy bubble_expansion_study(const Grid& grid, double s, double mu_top,
                                      double cutoff_radius, const std::array<double, 3>& center,
                                      double anchor_S_pow);

/// Dispatch one CLI command under a parsed configuration. Writes report.json
/// (and report.csv when format == "csv") plus any field files into out_dir.
/// Returns the process exit code: 0 success, 3 solver non-convergence,
/// 4 failed verification check. Configuration problems throw ConfigError and
/// numerical breakdowns throw NumericsError; the CLI maps those to 2 and 3.
int run_command(const std::string& command, const RunConfig& config, const std::string& out_dir,
                const std::string& format, int threads);

/// The command names run_command accepts.
const std::vector<std::string>& command_names();

}  // namespace fracpass
