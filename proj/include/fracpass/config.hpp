#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "fracpass/energies.hpp"
#include "fracpass/grid.hpp"
#include "fracpass/profiles.hpp"
#include "fracpass/solvers.hpp"

namespace fracpass {

/// Mountain-pass block of the run configuration.
struct MpConfig {
  int max_iters = 400;
  double grad_tol = 0.7;
  double step0 = 0.02;
  int path_nodes = 33;
  int t_steps = 257;   ///< resolution of the path-supremum scan
  double mu = 0.1;     ///< concentration scale of the path endpoint

  bool operator==(const MpConfig&) const = default;
};

struct VerifyConfig {
  int samples = 100000;
  std::uint64_t seed = 1;
  bool include_dyadic = false;  ///< also run the dyadic vanishing study

  bool operator==(const VerifyConfig&) const = default;
};

struct AppendixConfig {
  std::vector<double> R_list{4.0, 8.0, 16.0, 32.0};
  int resolution = 64;
  /// (N, s) cases to evaluate.
  std::vector<std::pair<int, double>> cases{{2, 0.75}, {2, 0.6}, {1, 0.25}};

  bool operator==(const AppendixConfig&) const = default;
};

struct ConcentrationConfig {
  std::string kind = "bubbling";
  int n_max = 4;
  double delta = 0.1;

  bool operator==(const ConcentrationConfig&) const = default;
};

/// Wide, fine auxiliary grid for reference-quality constants. M = 0 picks the
/// dimension-dependent default (N = 1: L = 65536, M = 2^22, otherwise
/// L = 128, M = 4096).
struct ReferenceGridConfig {
  double L = 0.0;
  int M = 0;

  bool operator==(const ReferenceGridConfig&) const = default;
};

/// Whole run configuration; every block has defaults, so a minimal config
/// needs only the pieces it wants to override.
struct RunConfig {
  GridSpec grid;
  double s = 0.25;
  double q = 0.5;
  double eps = 0.01;
  HSpec h{.family = "gaussian_bump", .amplitude = 1.3, .center = {0., 0., 0.}, .width = 0.5};
  BubbleSpec bubble;       ///< seed mu and xi; c_ns is always derived
  CutoffSpec cutoff_spec{.r = 0.0, .x0 = {0., 0., 0.}};  ///< r = 0: automatic radius
  SolveOptions solve;
  MpConfig solve_mp;
  VerifyConfig verify;
  AppendixConfig appendix;
  ConcentrationConfig concentration;
  ReferenceGridConfig reference_grid;
  double s_hat = 0.0;      ///< optional override for derived-constant recipes

  bool operator==(const RunConfig&) const = default;
};

/// Parse and validate a JSON config file. Unknown keys are rejected with the
/// offending field path; embedded invariants are re-validated here.
RunConfig parse_config(const std::string& path);

/// Same, from an in-memory JSON string (used by round-trip tests).
RunConfig parse_config_text(const std::string& text);

/// Canonical JSON serialization; parse_config_text(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& config);

/// Reference grid spec implied by the config (defaults resolved).
GridSpec resolve_reference_grid(const RunConfig& config);

/// Cutoff radius rule: explicit config value, else the h-positivity ball
/// capped at L/2.
double resolve_cutoff_radius(const RunConfig& config, const Params& params);

}  // namespace fracpass
