#pragma once

#include <array>
#include <memory>
#include <string>
#include <utility>

#include "fracpass/grid.hpp"
#include "fracpass/nonlocal.hpp"

namespace fracpass {

/// Parametric family for the weight h(x).
struct HSpec {
  std::string family = "gaussian_bump";  ///< gaussian_bump | compact_bump | signed_pair
  double amplitude = 1.0;
  std::array<double, 3> center{0., 0., 0.};
  double width = 1.0;

  bool operator==(const HSpec&) const = default;
};

/// Sample the weight family on the grid:
///  - gaussian_bump: A exp(-|x - c|^2 / width)
///  - compact_bump:  A * (quintic radial cutoff of radius width), vanishing
///    outside B_width(c)
///  - signed_pair:   compact bump minus 0.5 * the same bump shifted by
///    4*width along the first axis (sign-changing, positive core kept)
Field sample_h(const Grid& grid, const HSpec& spec);

/// Problem data: exponents, perturbation size, weight, and the shared
/// nonlocal operator for this (grid, s).
struct Params {
  GridSpec grid;
  double s = 0.0;
  double q = 0.0;
  double eps = 0.0;
  double two_star = 0.0;
  Field h;

  // Largest grid ball around the strongest positive node of h on which h
  // stays strictly positive (radius capped by the box boundary); used to
  // place cutoffs where the weight helps.
  std::array<double, 3> ball_center{0., 0., 0.};
  double ball_radius = 0.0;
  double h_min_ball = 0.0;

  std::shared_ptr<const NonlocalOperator> op;
  const NonlocalOperator& oper() const { return *op; }
};

/// Validates exponents and the weight, locates the positivity ball of h, and
/// builds the shared nonlocal operator.
Params make_params(const Grid& grid, double s, double q, double eps, Field h);

/// max(v, 0)^p with the 0^p := 0 guard.
double pow_plus(double v, double p);

/// Free energy: (1/2)[u]_s^2 - (eps/(q+1)) int h u_+^{q+1} - (1/2*) int u_+^{2*}.
double eval_f(const Params& params, const Field& u);

/// First variation of eval_f at u in direction v.
double pair_df(const Params& params, const Field& u, const Field& v);

/// Discrete Riesz representer: w * sum(grad_f(u) * v) == pair_df(u, v).
Field grad_f(const Params& params, const Field& u);

/// Pointwise translated nonlinearity g(x, t) and its t-antiderivative G(x, t)
/// at a node with background value u_eps_val >= 0 and weight value h_val.
/// Both vanish for t <= 0.
double g_point(const Params& params, double u_eps_val, double h_val, double t);
double G_point(const Params& params, double u_eps_val, double h_val, double t);

/// Critical part: g* = (u+t_+)^{p-1} - u^{p-1},
/// G* = (1/p)[(u+t_+)^p - u^p] - u^{p-1} t_+.
std::pair<double, double> gstar_Gstar_point(const Params& params, double u_eps_val, double t);

/// Subcritical part: gt = (u+t_+)^q - u^q,
/// Gt = (1/(q+1))[(u+t_+)^{q+1} - u^{q+1}] - u^q t_+.
std::pair<double, double> gtilde_Gtilde_point(const Params& params, double u_eps_val, double t);

/// Translated energy: (1/2)[v]_s^2 - int G(x, v). Requires u_eps >= -1e-10
/// pointwise (tiny negatives are clamped to 0).
double eval_I(const Params& params, const Field& u_eps, const Field& v);

/// Discrete Riesz representer of the first variation of eval_I at v.
Field grad_I(const Params& params, const Field& u_eps, const Field& v);

/// First variation of eval_I at v in direction dir (pairs with grad_I).
double pair_dI(const Params& params, const Field& u_eps, const Field& v, const Field& dir);

}  // namespace fracpass
