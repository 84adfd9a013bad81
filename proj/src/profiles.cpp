#include "fracpass/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace fracpass {

double smoothstep_quintic(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

bool bubble_support_inside(const Grid& grid, const BubbleSpec& spec) {
  double xi_norm2 = 0.0;
  for (int a = 0; a < grid.N(); ++a) xi_norm2 += spec.xi[a] * spec.xi[a];
  return std::sqrt(xi_norm2) + 4.0 * spec.mu < grid.L();
}

Field bubble(const Grid& grid, double s, const BubbleSpec& spec) {
  if (!(spec.mu > 0.0)) throw ConfigError("bubble.mu must be positive");
  if (!(spec.c_ns > 0.0)) throw ConfigError("bubble.c_ns must be positive");
  if (!bubble_support_inside(grid, spec)) {
    std::fprintf(stderr,
                 "warning: bubble with |xi| + 4*mu >= L; mass near the box edge "
                 "(mu=%g, L=%g)\n",
                 spec.mu, grid.L());
  }
  const double half_exp = (grid.N() - 2.0 * s) / 2.0;
  const double amp = spec.c_ns * std::pow(spec.mu, -half_exp);
  const double inv_mu2 = 1.0 / (spec.mu * spec.mu);
  Field out = zero_field(grid);
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    const double r2 = grid.r2(i, spec.xi);
    out.values[i] = amp * std::pow(1.0 + r2 * inv_mu2, -half_exp);
  }
  return out;
}

Field cutoff(const Grid& grid, const CutoffSpec& spec) {
  if (!(spec.r > 0.0)) throw ConfigError("cutoff.r must be positive");
  Field out = zero_field(grid);
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    const double rho = std::sqrt(grid.r2(i, spec.x0)) / spec.r;
    out.values[i] = smoothstep_quintic(2.0 * (1.0 - rho));
  }
  return out;
}

Field outer_cutoff(const Grid& grid, double R) {
  CutoffSpec spec;
  spec.r = R;
  Field out = cutoff(grid, spec);
  for (double& v : out.values) v = 1.0 - v;
  return out;
}

Calibration calibrate_bubble_constant(const Grid& grid, double s) {
  NonlocalOperator op(grid, s);
  const double p = op.two_star();

  BubbleSpec unit;  // mu = 1, origin, c = 1
  Field z = bubble(grid, s, unit);
  Field az = op.frac_laplacian(z);

  // Moments of the residual over the ball B_{L/2}: with zp = z^{p-1},
  //   F(c)^2 = (c^2 A - 2 c^p B + c^{2p-2} C) / (c^{2p-2} C),
  // where A = ||Az||^2, B = <Az, zp>, C = ||zp||^2, all over the ball.
  const double ball_r2 = 0.25 * grid.L() * grid.L();
  const std::array<double, 3> origin{0.0, 0.0, 0.0};
  double A = 0.0, B = 0.0, C = 0.0;
  double z_semi_sq_w = 0.0, z_pow_int = 0.0;
  for (std::size_t i = 0; i < z.values.size(); ++i) {
    const double zp = std::pow(z.values[i], p - 1.0);
    z_pow_int += std::pow(z.values[i], p);
    if (grid.r2(i, origin) <= ball_r2) {
      A += az.values[i] * az.values[i];
      B += az.values[i] * zp;
      C += zp * zp;
    }
  }
  const double w = grid.w();
  A *= w;
  B *= w;
  C *= w;
  z_pow_int *= w;
  z_semi_sq_w = op.seminorm_sq(z);

  auto rel_res_sq = [&](double c) {
    const double denom = std::pow(c, 2.0 * p - 2.0) * C;
    return (c * c * A - 2.0 * std::pow(c, p) * B + denom) / denom;
  };

  // Coarse log scan, then golden-section refinement of the bracket.
  const int n_coarse = 200;
  const double lo = 1e-3, hi = 1e3;
  int best = -1;
  double best_val = 0.0;
  std::vector<double> cs(n_coarse);
  for (int k = 0; k < n_coarse; ++k) {
    cs[k] = lo * std::pow(hi / lo, static_cast<double>(k) / (n_coarse - 1));
    const double v = rel_res_sq(cs[k]);
    if (best < 0 || v < best_val) {
      best = k;
      best_val = v;
    }
  }
  if (best == 0 || best == n_coarse - 1) {
    std::ostringstream msg;
    msg << "bubble calibration: no interior minimum in [" << lo << ", " << hi
        << "]; residual^2 at edges " << rel_res_sq(lo) << " / " << rel_res_sq(hi);
    throw CalibrationError(msg.str());
  }
  double a = cs[best - 1], b = cs[best + 1];
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = rel_res_sq(x1), f2 = rel_res_sq(x2);
  for (int it = 0; it < 200 && (b - a) > 1e-13 * b; ++it) {
    if (f1 < f2) {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - gr * (b - a); f1 = rel_res_sq(x1);
    } else {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + gr * (b - a); f2 = rel_res_sq(x2);
    }
  }
  Calibration cal;
  cal.c_residual = 0.5 * (a + b);
  cal.rel_residual = std::sqrt(std::max(0.0, rel_res_sq(cal.c_residual)));
  // Energy-identity constant: [cz]^2 = integral (cz)^p <=> c^{p-2} = [z]^2 / int z^p.
  cal.c_energy = std::pow(z_semi_sq_w / z_pow_int, 1.0 / (p - 2.0));
  return cal;
}

SobolevEstimate sobolev_constant_estimate(const Grid& grid, double s) {
  NonlocalOperator op(grid, s);
  BubbleSpec unit;
  Field z = bubble(grid, s, unit);
  const double semi = op.seminorm_sq(z);
  const double norm = lp_norm(z, op.two_star());
  SobolevEstimate est;
  est.S_hat = semi / (norm * norm);
  est.S_pow = std::pow(est.S_hat, grid.N() / (2.0 * s));
  est.threshold = (s / grid.N()) * est.S_pow;
  return est;
}

Field path_point(const Grid& grid, double t, double s, const BubbleSpec& spec,
                 const CutoffSpec& cut) {
  if (!(t >= 0.0)) throw ConfigError("path parameter t must be >= 0");
  Field z = bubble(grid, s, spec);
  Field phi = cutoff(grid, cut);
  for (std::size_t i = 0; i < z.values.size(); ++i) z.values[i] *= t * phi.values[i];
  return z;
}

}  // namespace fracpass
