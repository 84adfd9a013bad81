#include "fracpass/energies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fracpass/profiles.hpp"

namespace fracpass {

Field sample_h(const Grid& grid, const HSpec& spec) {
  if (!(spec.width > 0.0)) throw ConfigError("h.width must be positive");
  if (spec.family == "gaussian_bump") {
    Field out = zero_field(grid);
    for (std::size_t i = 0; i < out.values.size(); ++i)
      out.values[i] = spec.amplitude * std::exp(-grid.r2(i, spec.center) / spec.width);
    return out;
  }
  if (spec.family == "compact_bump" || spec.family == "signed_pair") {
    CutoffSpec bump;
    bump.r = spec.width;
    bump.x0 = spec.center;
    Field out = cutoff(grid, bump);
    for (double& v : out.values) v *= spec.amplitude;
    if (spec.family == "signed_pair") {
      CutoffSpec shifted = bump;
      shifted.x0[0] += 4.0 * spec.width;
      Field neg = cutoff(grid, shifted);
      for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] -= 0.5 * spec.amplitude * neg.values[i];
    }
    return out;
  }
  throw ConfigError("h.family must be gaussian_bump, compact_bump or signed_pair");
}

Params make_params(const Grid& grid, double s, double q, double eps, Field h) {
  if (!(s > 0.0 && s < 1.0)) throw ConfigError("params.s must lie in (0,1)");
  if (!(grid.N() > 2.0 * s)) throw ConfigError("need N > 2s for a finite critical exponent");
  if (!(q > 0.0 && q < 1.0)) throw ConfigError("params.q must lie in (0,1)");
  if (!(eps > 0.0)) throw ConfigError("params.eps must be positive");
  if (h.spec != grid.spec()) throw ConfigError("weight h sampled on a different grid");

  double linf = 0.0, l1 = 0.0;
  for (double v : h.values) {
    if (!std::isfinite(v)) throw ConfigError("weight h contains a non-finite value");
    linf = std::max(linf, std::abs(v));
    l1 += std::abs(v);
  }
  l1 *= grid.w();
  if (!(std::isfinite(l1) && std::isfinite(linf)))
    throw ConfigError("weight h must have finite L1 and Linf norms");

  Params p;
  p.grid = grid.spec();
  p.s = s;
  p.q = q;
  p.eps = eps;
  p.two_star = 2.0 * grid.N() / (grid.N() - 2.0 * s);
  p.h = std::move(h);
  p.op = std::make_shared<NonlocalOperator>(grid, s);

  // Positivity ball: center at the strongest node of h, radius up to the
  // nearest nonpositive node, capped by the distance to the box boundary.
  std::size_t imax = 0;
  for (std::size_t i = 1; i < p.h.values.size(); ++i)
    if (p.h.values[i] > p.h.values[imax]) imax = i;
  if (!(p.h.values[imax] > 0.0))
    throw ConfigError("weight h is nowhere positive; no positivity ball exists");
  p.ball_center = grid.point(imax);

  double radius = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.h.values.size(); ++i)
    if (p.h.values[i] <= 0.0) radius = std::min(radius, std::sqrt(grid.r2(i, p.ball_center)));
  for (int a = 0; a < grid.N(); ++a) {
    radius = std::min(radius, grid.L() - p.ball_center[a]);
    radius = std::min(radius, grid.L() + p.ball_center[a]);
  }
  p.ball_radius = radius;

  double hmin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.h.values.size(); ++i)
    if (std::sqrt(grid.r2(i, p.ball_center)) < radius) hmin = std::min(hmin, p.h.values[i]);
  p.h_min_ball = hmin;
  return p;
}

double pow_plus(double v, double p) { return v > 0.0 ? std::pow(v, p) : 0.0; }

namespace {

void require_params_grid(const Params& params, const Field& u, const char* where) {
  if (u.spec != params.grid)
    throw ConfigError(std::string(where) + ": field sampled on a different grid");
}

void require_nonneg(double u_eps_val, const char* where) {
  if (u_eps_val < 0.0)
    throw std::domain_error(std::string(where) + ": background value must be nonnegative");
}

}  // namespace

double eval_f(const Params& params, const Field& u) {
  require_params_grid(params, u, "eval_f");
  const double p = params.two_star;
  double sub = 0.0, crit = 0.0;
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    sub += params.h.values[i] * pow_plus(u.values[i], params.q + 1.0);
    crit += pow_plus(u.values[i], p);
  }
  const double w = params.op->grid().w();
  return 0.5 * params.op->seminorm_sq(u) - params.eps / (params.q + 1.0) * w * sub -
         w * crit / p;
}

double pair_df(const Params& params, const Field& u, const Field& v) {
  require_params_grid(params, u, "pair_df");
  require_params_grid(params, v, "pair_df");
  const double p = params.two_star;
  double sub = 0.0, crit = 0.0;
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    sub += params.h.values[i] * pow_plus(u.values[i], params.q) * v.values[i];
    crit += pow_plus(u.values[i], p - 1.0) * v.values[i];
  }
  const double w = params.op->grid().w();
  return params.op->bilinear(u, v) - params.eps * w * sub - w * crit;
}

Field grad_f(const Params& params, const Field& u) {
  require_params_grid(params, u, "grad_f");
  const double p = params.two_star;
  Field out = params.op->frac_laplacian(u);
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    out.values[i] -= params.eps * params.h.values[i] * pow_plus(u.values[i], params.q) +
                     pow_plus(u.values[i], p - 1.0);
  }
  return out;
}

std::pair<double, double> gstar_Gstar_point(const Params& params, double u_eps_val, double t) {
  require_nonneg(u_eps_val, "gstar_Gstar_point");
  const double p = params.two_star;
  if (t <= 0.0) return {0.0, 0.0};
  const double a = u_eps_val + t;
  const double up1 = pow_plus(u_eps_val, p - 1.0);
  const double gs = std::pow(a, p - 1.0) - up1;
  const double Gs = (std::pow(a, p) - pow_plus(u_eps_val, p)) / p - up1 * t;
  return {gs, Gs};
}

std::pair<double, double> gtilde_Gtilde_point(const Params& params, double u_eps_val, double t) {
  require_nonneg(u_eps_val, "gtilde_Gtilde_point");
  const double q = params.q;
  if (t <= 0.0) return {0.0, 0.0};
  const double a = u_eps_val + t;
  const double uq = pow_plus(u_eps_val, q);
  const double gt = std::pow(a, q) - uq;
  const double Gt = (std::pow(a, q + 1.0) - pow_plus(u_eps_val, q + 1.0)) / (q + 1.0) - uq * t;
  return {gt, Gt};
}

double g_point(const Params& params, double u_eps_val, double h_val, double t) {
  const auto [gs, Gs] = gstar_Gstar_point(params, u_eps_val, t);
  const auto [gt, Gt] = gtilde_Gtilde_point(params, u_eps_val, t);
  (void)Gs;
  (void)Gt;
  return params.eps * h_val * gt + gs;
}

double G_point(const Params& params, double u_eps_val, double h_val, double t) {
  const auto [gs, Gs] = gstar_Gstar_point(params, u_eps_val, t);
  const auto [gt, Gt] = gtilde_Gtilde_point(params, u_eps_val, t);
  (void)gs;
  (void)gt;
  return params.eps * h_val * Gt + Gs;
}

namespace {

void require_background(const Params& params, const Field& u_eps, const char* where) {
  require_params_grid(params, u_eps, where);
  for (double v : u_eps.values)
    if (v < -1e-10)
      throw std::domain_error(std::string(where) +
                              ": background field has negative values beyond slack");
}

}  // namespace

double eval_I(const Params& params, const Field& u_eps, const Field& v) {
  require_background(params, u_eps, "eval_I");
  require_params_grid(params, v, "eval_I");
  double acc = 0.0;
  for (std::size_t i = 0; i < v.values.size(); ++i) {
    acc += G_point(params, std::max(u_eps.values[i], 0.0), params.h.values[i], v.values[i]);
  }
  return 0.5 * params.op->seminorm_sq(v) - params.op->grid().w() * acc;
}

Field grad_I(const Params& params, const Field& u_eps, const Field& v) {
  require_background(params, u_eps, "grad_I");
  require_params_grid(params, v, "grad_I");
  Field out = params.op->frac_laplacian(v);
  for (std::size_t i = 0; i < v.values.size(); ++i) {
    out.values[i] -= g_point(params, std::max(u_eps.values[i], 0.0), params.h.values[i],
                             v.values[i]);
  }
  return out;
}

double pair_dI(const Params& params, const Field& u_eps, const Field& v, const Field& dir) {
  require_background(params, u_eps, "pair_dI");
  require_params_grid(params, v, "pair_dI");
  require_params_grid(params, dir, "pair_dI");
  double acc = 0.0;
  for (std::size_t i = 0; i < v.values.size(); ++i) {
    acc += g_point(params, std::max(u_eps.values[i], 0.0), params.h.values[i], v.values[i]) *
           dir.values[i];
  }
  return params.op->bilinear(v, dir) - params.op->grid().w() * acc;
}

}  // namespace fracpass
