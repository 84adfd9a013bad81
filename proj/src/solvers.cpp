#include "fracpass/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fracpass {

namespace {

constexpr int kRayScales = 80;        // geometric initializer ray, factor 2^{-1/2}
constexpr int kMinBacktracks = 60;    // halvings allowed in the minimizer line search
constexpr int kMpBacktracks = 50;     // halvings allowed in the path descent
constexpr double kStepGrowth = 1.3;   // accepted-step growth factor (capped at 1.5 step0)

double min_of(const Field& u) {
  double m = std::numeric_limits<double>::infinity();
  for (double v : u.values) m = std::min(m, v);
  return m;
}

Field scaled(const Field& u, double c) {
  Field out = u;
  for (double& v : out.values) v *= c;
  return out;
}

}  // namespace

double rho_of_eps(const Params& params, double c1, double c2) {
  if (!(c1 > 0.0 && c2 > 0.0)) throw ConfigError("rho_of_eps: c1 and c2 must be positive");
  const double q = params.q, p = params.two_star, eps = params.eps;
  auto ff = [&](double t) {
    return 0.5 * t * t - eps * c1 * std::pow(t, q + 1.0) - c2 * std::pow(t, p);
  };
  double t = 1e-12;
  while (ff(t) < 0.0 && t < 1e9) t *= 2.0;
  if (!(ff(t) >= 0.0))
    throw NumericsError("rho_of_eps: no positive zero below t = 1e9 (eps too large)");
  double lo = 0.5 * t, hi = t;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (ff(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

LocalMinSetup local_min_setup(const Params& params, double s_hat) {
  if (!(s_hat > 0.0))
    throw ConfigError("local_min_setup: s_hat must be positive (quotient estimate required)");
  LocalMinSetup setup;
  setup.s_hat = s_hat;
  const double p = params.two_star, q = params.q;
  setup.r_exp = p / (p - q - 1.0);
  setup.norm_h_r = lp_norm(params.h, setup.r_exp);
  setup.c1 = setup.norm_h_r * std::pow(setup.s_hat, -(q + 1.0) / 2.0) / (q + 1.0);
  setup.c2 = std::pow(setup.s_hat, -p / 2.0) / p;
  setup.rho = rho_of_eps(params, setup.c1, setup.c2);
  return setup;
}

SolveResult solve_local_min(const Params& params, const SolveOptions& opts,
                            const LocalMinSetup& setup) {
  if (opts.max_iters < 1) throw ConfigError("solve.max_iters must be >= 1");
  if (!(opts.grad_tol > 0.0 && opts.step0 > 0.0))
    throw ConfigError("solve.grad_tol and solve.step0 must be positive");
  const Grid& g = params.op->grid();
  const double rho = setup.rho;

  CutoffSpec ball;
  ball.r = std::min(params.ball_radius, g.L() / 2.0);
  ball.x0 = params.ball_center;
  Field phi = cutoff(g, ball);
  const double phi_norm = std::sqrt(params.op->seminorm_sq(phi));
  if (!(phi_norm > 0.0)) throw NumericsError("solve_local_min: degenerate positivity ball");
  for (double& v : phi.values) v /= phi_norm;

  // Geometric ray down from the sphere radius; keep the lowest energy.
  Field u = zero_field(g);
  double fu = std::numeric_limits<double>::infinity();
  for (int k = 0; k < kRayScales; ++k) {
    const double t = rho * std::pow(2.0, -0.5 * k);
    Field cand = scaled(phi, t);
    const double fc = eval_f(params, cand);
    if (fc < fu) {
      fu = fc;
      u = std::move(cand);
    }
  }
  if (!(fu < 0.0))
    throw NumericsError(
        "solve_local_min: no scale on the positivity-ball ray has negative energy "
        "(weight positivity too weak for this eps)");

  SolveResult out;
  double step = opts.step0;
  const double step_cap = 1.5 * opts.step0;
  int nit = 0;
  double res = 0.0;
  for (nit = 0; nit < opts.max_iters; ++nit) {
    Field gr = grad_f(params, u);
    res = l2_norm(gr);
    out.residual_trace.push_back(res);
    if (res < opts.grad_tol) {
      out.converged = true;
      break;
    }
    double st = step;
    bool ok = false;
    Field u2 = u;
    double f2 = fu;
    for (int half = 0; half < kMinBacktracks; ++half) {
      u2 = u;
      for (std::size_t i = 0; i < u2.values.size(); ++i) u2.values[i] -= st * gr.values[i];
      const double ss = params.op->seminorm_sq(u2);
      if (ss > rho * rho) {
        const double scale = rho / std::sqrt(ss);
        for (double& v : u2.values) v *= scale;
      }
      f2 = eval_f(params, u2);
      if (f2 <= fu - opts.decrease_coeff * st * res * res) {
        ok = true;
        break;
      }
      st *= opts.backtrack_factor;
    }
    if (!ok) break;  // line search stalled: flagged result below
    u = std::move(u2);
    fu = f2;
    out.energy_trace.push_back(fu);
    step = std::min(st * kStepGrowth, step_cap);
  }

  out.u = std::move(u);
  out.energy = fu;
  out.seminorm = std::sqrt(params.op->seminorm_sq(out.u));
  out.residual = res;
  out.residual_full = res;
  out.iters = nit;
  out.min_value = min_of(out.u);
  return out;
}

ThresholdReport threshold_C_star(const Params& params, double norm_h_r, double S_hat,
                                 double level) {
  const double p = params.two_star, q = params.q;
  const int N = params.op->grid().N();
  ThresholdReport rep;
  rep.S_hat = S_hat;
  rep.r = p / (p - q - 1.0);
  const double alpha = params.s / N;
  const double beta = (1.0 / (q + 1.0) - 0.5) * norm_h_r;
  const double xstar = std::pow(beta * (q + 1.0) / (alpha * p), 1.0 / (p - q - 1.0));
  rep.C_star = beta * std::pow(xstar, q + 1.0) - alpha * std::pow(xstar, p);
  rep.level = level;
  rep.bound = (params.s / N) * std::pow(S_hat, N / (2.0 * params.s)) -
              rep.C_star * std::pow(params.eps, rep.r);
  rep.pass = std::isfinite(level) && level < rep.bound;
  return rep;
}

double c_star_grid_search(double alpha, double beta, double p, double q) {
  auto val = [&](double x) { return beta * std::pow(x, q + 1.0) - alpha * std::pow(x, p); };
  const int n1 = 200001;
  const double lo = 1e-6, hi = 1e3;
  int best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < n1; ++k) {
    const double x = lo * std::pow(hi / lo, static_cast<double>(k) / (n1 - 1));
    const double v = val(x);
    if (v > best_val) {
      best_val = v;
      best = k;
    }
  }
  const double xa = lo * std::pow(hi / lo, static_cast<double>(std::max(0, best - 1)) / (n1 - 1));
  const double xb =
      lo * std::pow(hi / lo, static_cast<double>(std::min(n1 - 1, best + 1)) / (n1 - 1));
  const int n2 = 20001;
  for (int k = 0; k < n2; ++k) {
    const double x = xa + (xb - xa) * static_cast<double>(k) / (n2 - 1);
    best_val = std::max(best_val, val(x));
  }
  return best_val;
}

double find_path_endpoint(const Params& params, const Field& u_eps, const BubbleSpec& spec,
                          const CutoffSpec& cut) {
  const Grid& g = params.op->grid();
  Field base = path_point(g, 1.0, params.s, spec, cut);
  double T1 = 1.0;
  for (int it = 0; it < 60; ++it) {
    if (eval_I(params, u_eps, scaled(base, T1)) <= 0.0) return T1;
    T1 *= 2.0;
  }
  throw NumericsError("find_path_endpoint: translated energy stayed positive up to 2^60");
}

PathSupReport mp_path_sup(const Params& params, const Field& u_eps, const BubbleSpec& spec,
                          const CutoffSpec& cut, double t_max, int t_steps) {
  if (t_steps < 2) throw ConfigError("mp_path_sup: t_steps must be >= 2");
  if (!(t_max > 0.0)) throw ConfigError("mp_path_sup: t_max must be positive");
  const Grid& g = params.op->grid();
  Field base = path_point(g, 1.0, params.s, spec, cut);
  const double w = g.w();

  for (int retry = 0; retry <= 3; ++retry) {
    const double tm = t_max * std::pow(2.0, retry);
    std::vector<double> Is(t_steps), Istars(t_steps), hterms(t_steps);
    for (int j = 0; j < t_steps; ++j) {
      const double t = tm * static_cast<double>(j) / (t_steps - 1);
      Field v = scaled(base, t);
      const double semi = params.op->seminorm_sq(v);
      double gs_sum = 0.0, hgt_sum = 0.0;
      for (std::size_t i = 0; i < v.values.size(); ++i) {
        const double ue = std::max(u_eps.values[i], 0.0);
        gs_sum += gstar_Gstar_point(params, ue, v.values[i]).second;
        hgt_sum += params.h.values[i] * gtilde_Gtilde_point(params, ue, v.values[i]).second;
      }
      Istars[j] = 0.5 * semi - w * gs_sum;
      hterms[j] = params.eps * w * hgt_sum;
      Is[j] = Istars[j] - hterms[j];
    }
    int jmax = 0, jstar = 0;
    for (int j = 1; j < t_steps; ++j) {
      if (Is[j] > Is[jmax]) jmax = j;
      if (Istars[j] > Istars[jstar]) jstar = j;
    }
    if (jmax == t_steps - 1) continue;  // widen and retry

    PathSupReport rep;
    rep.sup_I = Is[jmax];
    rep.t_at_sup = tm * static_cast<double>(jmax) / (t_steps - 1);
    rep.sup_Istar = Istars[jstar];
    rep.t_at_sup_star = tm * static_cast<double>(jstar) / (t_steps - 1);
    rep.endpoint_I = Is[t_steps - 1];
    rep.t_max_used = tm;
    rep.retries = retry;
    rep.min_h_term = std::numeric_limits<double>::infinity();
    rep.max_violation = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < t_steps; ++j) {
      if (j >= 1) rep.min_h_term = std::min(rep.min_h_term, hterms[j]);
      rep.max_violation = std::max(rep.max_violation, Is[j] - Istars[j]);
    }
    return rep;
  }
  throw NumericsError("mp_path_sup: argmax pinned to the right boundary after 3 widenings");
}

namespace {

/// Equal-arclength (L2) reinterpolation of the path, endpoints fixed.
void reinterp_path(const Grid& g, std::vector<Field>& path) {
  const int nn = static_cast<int>(path.size());
  std::vector<double> seg(nn, 0.0);
  for (int j = 1; j < nn; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < path[j].values.size(); ++i) {
      const double d = path[j].values[i] - path[j - 1].values[i];
      acc += d * d;
    }
    seg[j] = seg[j - 1] + std::sqrt(g.w() * acc);
  }
  const double total = seg[nn - 1];
  std::vector<Field> fresh;
  fresh.reserve(nn);
  fresh.push_back(path.front());
  for (int j = 1; j < nn - 1; ++j) {
    const double tg = total * static_cast<double>(j) / (nn - 1);
    int k = static_cast<int>(std::lower_bound(seg.begin(), seg.end(), tg) - seg.begin()) - 1;
    k = std::clamp(k, 0, nn - 2);
    const double denom = seg[k + 1] - seg[k];
    const double ww = denom > 0.0 ? (tg - seg[k]) / denom : 0.0;
    Field mix = path[k];
    for (std::size_t i = 0; i < mix.values.size(); ++i)
      mix.values[i] = (1.0 - ww) * mix.values[i] + ww * path[k + 1].values[i];
    fresh.push_back(std::move(mix));
  }
  fresh.push_back(path.back());
  path = std::move(fresh);
}

}  // namespace

SolveResult solve_mountain_pass(const Params& params, const Field& u_eps, const MpOptions& mp) {
  if (mp.path_nodes < 3) throw ConfigError("solve_mp.path_nodes must be >= 3");
  const SolveOptions& opts = mp.opts;
  const Grid& g = params.op->grid();

  BubbleSpec spec;
  spec.mu = mp.mu;
  spec.xi = params.ball_center;
  CutoffSpec cut;
  cut.r = std::min(params.ball_radius, g.L() / 2.0);
  cut.x0 = params.ball_center;

  Field base = path_point(g, 1.0, params.s, spec, cut);
  if (!(params.op->seminorm_sq(base) > 0.0))
    throw NumericsError("solve_mountain_pass: degenerate path profile");
  const double T1 = find_path_endpoint(params, u_eps, spec, cut);

  const int nn = mp.path_nodes;
  std::vector<Field> path;
  path.reserve(nn);
  for (int j = 0; j < nn; ++j)
    path.push_back(scaled(base, T1 * static_cast<double>(j) / (nn - 1)));

  SolveResult out;
  bool have_best = false;
  double best_res = std::numeric_limits<double>::infinity();
  SolveResult best;

  for (int rnd = 0; rnd < opts.max_iters; ++rnd) {
    std::vector<double> Is(nn);
    for (int j = 0; j < nn; ++j) Is[j] = eval_I(params, u_eps, path[j]);
    int jmax = 0;
    for (int j = 1; j < nn; ++j)
      if (Is[j] > Is[jmax]) jmax = j;
    if (Is[jmax] < 1e-12)
      throw NumericsError(
          "solve_mountain_pass: path collapsed to zero energy; try a different mu");

    const Field& v = path[jmax];
    Field gr = grad_I(params, u_eps, v);
    double mean = 0.0;
    for (double x : gr.values) mean += x;
    mean /= static_cast<double>(gr.values.size());
    Field gr0 = gr;
    for (double& x : gr0.values) x -= mean;
    const double res_proj = l2_norm(gr0);
    const double res_full = l2_norm(gr);
    out.energy_trace.push_back(Is[jmax]);
    out.residual_trace.push_back(res_proj);

    const bool interior = jmax > 0 && jmax < nn - 1;
    if (interior && res_proj < opts.grad_tol) {
      out.u = v;
      out.energy = Is[jmax];
      out.seminorm = std::sqrt(params.op->seminorm_sq(v));
      out.residual = res_proj;
      out.residual_full = res_full;
      out.iters = rnd;
      out.converged = true;
      out.min_value = min_of(v);
      return out;
    }
    if (interior && res_proj < best_res) {
      best_res = res_proj;
      best.u = v;
      best.energy = Is[jmax];
      best.seminorm = std::sqrt(params.op->seminorm_sq(v));
      best.residual = res_proj;
      best.residual_full = res_full;
      best.iters = rnd;
      best.min_value = min_of(v);
      have_best = true;
    }
    if (interior) {
      const double fv = Is[jmax];
      double st = opts.step0;
      Field v2 = v;
      for (int half = 0; half < kMpBacktracks; ++half) {
        v2 = v;
        for (std::size_t i = 0; i < v2.values.size(); ++i)
          v2.values[i] = std::max(v2.values[i] - st * gr0.values[i], 0.0);
        if (eval_I(params, u_eps, v2) < fv) break;
        st *= opts.backtrack_factor;
      }
      path[jmax] = std::move(v2);
    }
    reinterp_path(g, path);
  }

  if (!have_best)
    throw NumericsError("solve_mountain_pass: the path maximum never moved to the interior");
  best.converged = false;
  best.energy_trace = std::move(out.energy_trace);
  best.residual_trace = std::move(out.residual_trace);
  return best;
}

}  // namespace fracpass
