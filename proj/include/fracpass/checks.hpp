#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fracpass/energies.hpp"
#include "fracpass/nonlocal.hpp"

namespace fracpass {

/// Outcome of one property sweep. `violations` counts margins below -1e-12;
/// `worst_margin` is the smallest margin seen (>= 0 means the property held
/// everywhere with room to spare).
struct LemmaReport {
  std::string lemma_id;
  long samples = 0;
  long violations = 0;
  double worst_margin = 0.0;
  double derived_constant = 0.0;
};

/// Controls for the elementary power-inequality sweeps.
struct PowerCheckConfig {
  std::vector<double> p_super{2.0, 2.5, 3.0, 4.0, 1.5, 1.2};  ///< p > 1
  std::vector<double> p_cross{2.0, 2.5, 3.0, 4.0};            ///< p >= 2
  std::vector<std::pair<double, double>> pk{{1.5, 1.0}, {1.2, 2.0}, {1.8, 0.5}};
  std::vector<double> q_diff{0.5};                            ///< q in (0,1)
  int samples = 100000;
  std::uint64_t seed = 1;
};

/// Split-form evaluator of f(p,t) = ((1+t)^p - 1 - t^p)/t, stable for both
/// tiny and huge t. Its infimum over t > 0 (resp. over (0,k]) is the derived
/// cross-term constant.
double cross_term_ratio(double p, double t);

/// Four families of pointwise inequalities:
///  - power_sum_superadditive[p]: (a+b)^p >= a^p + b^p for p > 1;
///  - power_cross_term[p]: (a+b)^p >= a^p + b^p + c_p a^{p-1} b for p >= 2,
///    c_p derived as the grid infimum of cross_term_ratio;
///  - power_cross_term_ratio[p,k]: same shape for p in (1,2) restricted to
///    b/a <= k, constant derived over (0,k];
///  - power_diff_holder[q]: |a^q - b^q| <= L |a-b|^q for q in (0,1), L the
///    grid supremum of |(1+t)^q - 1|/|t|^q over t >= -1.
/// Constants come from deterministic grids; the random samples only validate.
std::vector<LemmaReport> check_power_inequalities(const PowerCheckConfig& cfg);

/// Fits the smallest C with ds_squared(cutoff) <= C min(r^{-2s},
/// r^N |x-x0|^{-(N+2s)}) at every node, for each radius/center combination,
/// and checks the fitted constants agree within a factor 2.
/// derived_constant = largest fitted C; worst_margin = 2 - (Cmax/Cmin).
LemmaReport check_cutoff_bounds(const NonlocalOperator& op, const std::vector<double>& radii,
                                const std::vector<std::array<double, 3>>& centers);

/// Per-scale localized masses for a concentrating or escaping family.
struct ConcentrationTerm {
  int n = 0;
  double scale = 0.0;        ///< mu_n (bubbling) or center offset (escaping)
  double mu_hat = 0.0;       ///< seminorm-density mass in the probe ball
  double nu_hat = 0.0;       ///< critical-power mass in the probe ball
  double total_mass = 0.0;   ///< whole-box critical-power mass
  double ball_fraction = 0.0;
};

/// Whole-box extremality ratio S^{1/2} nu^{1/2*} / mu^{1/2} for one probe
/// field (== sqrt(S_hat / rayleigh_quotient), 1 at the extremal bubble).
struct ConcentrationRelation {
  std::string field;
  double ratio = 0.0;
};

struct ConcentrationReport {
  std::string kind;   ///< bubbling | escaping
  double delta = 0.0; ///< probe-ball radius
  std::vector<ConcentrationTerm> terms;
  std::vector<ConcentrationRelation> relations;
  bool truncation_warning = false;
};

/// kind = "bubbling": scales mu_n = 2^{-n}, n = 0..n_max, centered at the
/// origin; the probe ball B_delta(0) should capture a growing fraction of the
/// critical-power mass. kind = "escaping": unit-scale profiles centered at
/// 0, L/4, L/2, L/2+2, 3L/4 along the first axis; the mass in the fixed ball
/// B_delta(0) should vanish while the whole-box mass stays comparable.
/// Relations are evaluated for the unit bubble, the mu = 1/2 bubble, and a
/// width-1/2 gaussian.
ConcentrationReport concentration_diagnostics(const NonlocalOperator& op,
                                              const std::string& kind, int n_max,
                                              double delta, double S_hat);

/// Localized quadratic mass against the cutoff gradient density:
/// value(r) = integral of u^2 * ds_squared(cutoff(r, x0)).
struct DyadicReport {
  std::vector<double> radii;
  std::vector<double> values;
  double ratio = 0.0;   ///< last / first
  bool monotone = false;
};

/// Shrinking inner radii around x0; expected to vanish like the cutoff
/// concentrates away from smooth u.
DyadicReport dyadic_inner(const NonlocalOperator& op, const Field& u,
                          const std::array<double, 3>& x0, const std::vector<double>& radii);

/// Growing outer radii (complement cutoffs centered at the origin).
DyadicReport dyadic_outer(const NonlocalOperator& op, const Field& u,
                          const std::vector<double>& radii);

/// Random-sample validation of the threshold inequality
/// (s/N) a^{2*} - eps (1/(q+1) - 1/2) norm_h_r a^{q+1} >= -C_star eps^r.
LemmaReport check_threshold_inequality(const Params& params, double norm_h_r, double C_star,
                                       int samples, std::uint64_t seed);

/// Weighted trace-ratio quotient of a smooth bump at height R in the upper
/// half space R^{N+1}_+ with weight y^{1-2s}:
/// Q(R) = (int y^{1-2s} U^{2 gamma})^{1/(2 gamma)} / (int y^{1-2s} |grad U|^2)^{1/2},
/// gamma = 1 + 2/(N-2s), U a radius-1 quintic bump centered at (0, R),
/// midpoint quadrature on [-1,1]^N x [R-1, R+1]. Throws std::domain_error for
/// R <= 1 (support touches the boundary).
double appendix_ratio(double s, int N, double R, int resolution);

/// Least-squares slope of log Q vs log R over a geometric R list (>= 3
/// values). Positive slope certifies divergence of the quotient family.
double appendix_rate_fit(double s, int N, const std::vector<double>& R_list,
                         int resolution = 64);

/// Least-squares slope of log y vs log x.
double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace fracpass
