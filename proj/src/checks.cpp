#include "fracpass/checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "fracpass/profiles.hpp"

namespace fracpass {

namespace {

constexpr double kSlack = 1e-12;  // margins below -kSlack count as violations

std::string tag(const std::string& base, double v) {
  std::ostringstream os;
  os << base << "[" << v << "]";
  return os.str();
}

std::string tag2(const std::string& base, double a, double b) {
  std::ostringstream os;
  os << base << "[" << a << "," << b << "]";
  return os.str();
}

double logspace_point(double lo, double hi, int j, int n) {
  return lo * std::pow(hi / lo, static_cast<double>(j) / (n - 1));
}

}  // namespace

double cross_term_ratio(double p, double t) {
  if (t <= 1.0) return (std::expm1(p * std::log1p(t)) - std::pow(t, p)) / t;
  return (std::pow(t, p) * std::expm1(p * std::log1p(1.0 / t)) - 1.0) / t;
}

namespace {

constexpr int kOracleGrid = 1200000;

double derive_cross_constant(double p, double t_hi) {
  double c = std::numeric_limits<double>::infinity();
  for (int j = 0; j < kOracleGrid; ++j)
    c = std::min(c, cross_term_ratio(p, logspace_point(1e-6, t_hi, j, kOracleGrid)));
  // The analytic endpoint matters when the infimum sits at t = t_hi.
  return std::min(c, cross_term_ratio(p, t_hi));
}

double derive_diff_constant(double q) {
  auto f = [&](double t) {
    return std::abs(std::pow(1.0 + t, q) - 1.0) / std::pow(std::abs(t), q);
  };
  double L = f(-1.0);  // exact endpoint of the admissible range
  const int half = kOracleGrid / 2;
  for (int j = 0; j < half; ++j) {
    const double tp = logspace_point(1e-6, 1e6, j, half);
    L = std::max(L, f(tp));
    const double tn = -1.0 + logspace_point(1e-9, 1.0, j, half);  // covers (-1, 0)
    if (tn < 0.0) L = std::max(L, f(tn));
  }
  return L;
}

}  // namespace

std::vector<LemmaReport> check_power_inequalities(const PowerCheckConfig& cfg) {
  if (cfg.samples < 1) throw ConfigError("verify.samples must be >= 1");
  for (double p : cfg.p_super)
    if (!(p > 1.0)) throw ConfigError("superadditivity exponent must satisfy p > 1");
  for (double p : cfg.p_cross)
    if (!(p >= 2.0)) throw ConfigError("cross-term exponent must satisfy p >= 2");
  for (auto [p, k] : cfg.pk)
    if (!(p > 1.0 && p < 2.0 && k > 0.0))
      throw ConfigError("ratio-bounded cross term needs p in (1,2) and k > 0");
  for (double q : cfg.q_diff)
    if (!(q > 0.0 && q < 1.0)) throw ConfigError("difference bound needs q in (0,1)");

  std::vector<LemmaReport> out;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> ulog(-3.0, 2.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  auto sweep = [&](const std::string& id, double constant, auto margin_fn) {
    LemmaReport rep;
    rep.lemma_id = id;
    rep.derived_constant = constant;
    rep.samples = cfg.samples;
    rep.worst_margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < cfg.samples; ++i) {
      double a = std::pow(10.0, ulog(rng));
      double b = std::pow(10.0, ulog(rng));
      if (i % 97 == 1) b = 0.0;       // boundary: one argument vanishes
      if (i % 97 == 2) a = 0.0;
      if (i % 97 == 3) b = a;         // boundary: equal arguments
      const double m = margin_fn(a, b);
      rep.worst_margin = std::min(rep.worst_margin, m);
      if (m < -kSlack) ++rep.violations;
    }
    out.push_back(std::move(rep));
  };

  for (double p : cfg.p_super) {
    sweep(tag("power_sum_superadditive", p), 0.0, [p](double a, double b) {
      return std::pow(a + b, p) - std::pow(a, p) - std::pow(b, p);
    });
  }
  for (double p : cfg.p_cross) {
    const double cp = derive_cross_constant(p, 1e6);
    sweep(tag("power_cross_term", p), cp, [p, cp](double a, double b) {
      return std::pow(a + b, p) - std::pow(a, p) - std::pow(b, p) -
             cp * std::pow(a, p - 1.0) * b;
    });
  }
  for (auto [p, k] : cfg.pk) {
    const double cpk = derive_cross_constant(p, k);
    LemmaReport rep;
    rep.lemma_id = tag2("power_cross_term_ratio", p, k);
    rep.derived_constant = cpk;
    rep.samples = cfg.samples;
    rep.worst_margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < cfg.samples; ++i) {
      const double a = std::pow(10.0, ulog(rng));
      double ratio = k * unit(rng);
      if (i % 97 == 1) ratio = 0.0;
      if (i % 97 == 2) ratio = k;  // the binding edge of the ratio range
      const double b = ratio * a;
      const double m = std::pow(a + b, p) - std::pow(a, p) - std::pow(b, p) -
                       cpk * std::pow(a, p - 1.0) * b;
      rep.worst_margin = std::min(rep.worst_margin, m);
      if (m < -kSlack) ++rep.violations;
    }
    out.push_back(std::move(rep));
  }
  for (double q : cfg.q_diff) {
    const double L = derive_diff_constant(q);
    sweep(tag("power_diff_holder", q), L, [q, L](double a, double b) {
      return L * std::pow(std::abs(a - b), q) - std::abs(std::pow(a, q) - std::pow(b, q));
    });
  }
  return out;
}

LemmaReport check_cutoff_bounds(const NonlocalOperator& op, const std::vector<double>& radii,
                                const std::vector<std::array<double, 3>>& centers) {
  if (radii.empty() || centers.empty())
    throw ConfigError("check_cutoff_bounds needs at least one radius and one center");
  const Grid& g = op.grid();
  const int N = g.N();
  const double s = op.s();
  double c_min = std::numeric_limits<double>::infinity();
  double c_max = 0.0;
  LemmaReport rep;
  rep.lemma_id = "cutoff_gradient_envelope";
  for (double r : radii) {
    for (const auto& x0 : centers) {
      CutoffSpec spec;
      spec.r = r;
      spec.x0 = x0;
      Field d = op.ds_squared(cutoff(g, spec));
      const double near_arm = std::pow(r, -2.0 * s);
      double c_fit = 0.0;
      for (std::size_t i = 0; i < d.values.size(); ++i) {
        const double far_arm =
            std::pow(r, N) * std::pow(g.r2(i, x0), -(N + 2.0 * s) / 2.0);
        c_fit = std::max(c_fit, d.values[i] / std::min(near_arm, far_arm));
      }
      c_min = std::min(c_min, c_fit);
      c_max = std::max(c_max, c_fit);
      rep.samples += static_cast<long>(d.values.size());
    }
  }
  rep.derived_constant = c_max;
  const double spread = c_max / c_min;
  rep.worst_margin = 2.0 - spread;
  rep.violations = spread <= 2.0 ? 0 : 1;
  return rep;
}

namespace {

void ball_masses(const NonlocalOperator& op, const Field& f,
                 const std::array<double, 3>& center, double delta, ConcentrationTerm& term) {
  const Grid& g = op.grid();
  Field ds = op.ds_squared(f);
  const double p = op.two_star();
  const double d2 = delta * delta;
  double mu = 0.0, nu = 0.0, total = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    const double mass = std::pow(std::abs(f.values[i]), p);
    total += mass;
    if (g.r2(i, center) <= d2) {
      mu += ds.values[i];
      nu += mass;
    }
  }
  term.mu_hat = g.w() * mu;
  term.nu_hat = g.w() * nu;
  term.total_mass = g.w() * total;
  term.ball_fraction = total > 0.0 ? nu / total : 0.0;
}

double extremality_ratio(const NonlocalOperator& op, const Field& f, double S_hat) {
  const double p = op.two_star();
  double total = 0.0;
  for (double v : f.values) total += std::pow(std::abs(v), p);
  total *= op.grid().w();
  const double semi = op.seminorm_sq(f);
  return std::sqrt(S_hat) * std::pow(total, 1.0 / p) / std::sqrt(semi);
}

}  // namespace

ConcentrationReport concentration_diagnostics(const NonlocalOperator& op,
                                              const std::string& kind, int n_max,
                                              double delta, double S_hat) {
  if (n_max < 0) throw ConfigError("concentration.n_max must be >= 0");
  if (!(delta > 0.0)) throw ConfigError("concentration.delta must be positive");
  const Grid& g = op.grid();
  const double s = op.s();
  ConcentrationReport rep;
  rep.kind = kind;
  rep.delta = delta;

  if (kind == "bubbling") {
    for (int n = 0; n <= n_max; ++n) {
      BubbleSpec spec;
      spec.mu = std::pow(2.0, -n);
      Field z = bubble(g, s, spec);
      ConcentrationTerm term;
      term.n = n;
      term.scale = spec.mu;
      ball_masses(op, z, spec.xi, delta, term);
      rep.terms.push_back(term);
    }
  } else if (kind == "escaping") {
    const double L = g.L();
    const std::vector<double> ladder{0.0, L / 4.0, L / 2.0, L / 2.0 + 2.0, 3.0 * L / 4.0};
    const int count = std::min<int>(n_max + 1, static_cast<int>(ladder.size()));
    const std::array<double, 3> origin{0.0, 0.0, 0.0};
    for (int n = 0; n < count; ++n) {
      BubbleSpec spec;
      spec.xi[0] = ladder[static_cast<std::size_t>(n)];
      if (!bubble_support_inside(g, spec)) rep.truncation_warning = true;
      Field z = bubble(g, s, spec);
      ConcentrationTerm term;
      term.n = n;
      term.scale = spec.xi[0];
      ball_masses(op, z, origin, delta, term);  // fixed probe ball at the origin
      rep.terms.push_back(term);
    }
  } else {
    throw ConfigError("concentration.kind must be bubbling or escaping");
  }

  {
    BubbleSpec unit;
    rep.relations.push_back({"bubble_mu_1", extremality_ratio(op, bubble(g, s, unit), S_hat)});
    BubbleSpec half;
    half.mu = 0.5;
    rep.relations.push_back(
        {"bubble_mu_0.5", extremality_ratio(op, bubble(g, s, half), S_hat)});
    Field gauss = sample_field(g, [](const std::array<double, 3>& x, int n) {
      double r2 = 0.0;
      for (int a = 0; a < n; ++a) r2 += x[a] * x[a];
      return std::exp(-r2 / 0.5);
    });
    rep.relations.push_back({"gaussian_w_0.5", extremality_ratio(op, gauss, S_hat)});
  }
  return rep;
}

namespace {

DyadicReport dyadic_generic(const NonlocalOperator& op, const Field& u,
                            const std::vector<double>& radii, bool outer,
                            const std::array<double, 3>& x0) {
  if (radii.size() < 2) throw ConfigError("dyadic check needs at least two radii");
  require_same_grid(u, op.row_sums(), "dyadic check");
  const Grid& g = op.grid();
  DyadicReport rep;
  rep.radii = radii;
  for (double r : radii) {
    Field phi;
    if (outer) {
      phi = outer_cutoff(g, r);
    } else {
      CutoffSpec spec;
      spec.r = r;
      spec.x0 = x0;
      phi = cutoff(g, spec);
    }
    Field d = op.ds_squared(phi);
    double acc = 0.0;
    for (std::size_t i = 0; i < u.values.size(); ++i)
      acc += u.values[i] * u.values[i] * d.values[i];
    rep.values.push_back(g.w() * acc);
  }
  rep.ratio = rep.values.back() / rep.values.front();
  rep.monotone = true;
  for (std::size_t j = 1; j < rep.values.size(); ++j)
    if (rep.values[j] >= rep.values[j - 1]) rep.monotone = false;
  return rep;
}

}  // namespace

DyadicReport dyadic_inner(const NonlocalOperator& op, const Field& u,
                          const std::array<double, 3>& x0, const std::vector<double>& radii) {
  return dyadic_generic(op, u, radii, false, x0);
}

DyadicReport dyadic_outer(const NonlocalOperator& op, const Field& u,
                          const std::vector<double>& radii) {
  return dyadic_generic(op, u, radii, true, {0.0, 0.0, 0.0});
}

LemmaReport check_threshold_inequality(const Params& params, double norm_h_r, double C_star,
                                       int samples, std::uint64_t seed) {
  if (samples < 1) throw ConfigError("threshold check needs samples >= 1");
  const double p = params.two_star, q = params.q;
  const int N = params.op->grid().N();
  const double r = p / (p - q - 1.0);
  const double alpha = params.s / N;
  const double beta = (1.0 / (q + 1.0) - 0.5) * norm_h_r;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ua(-3.0, 2.0), ue(-4.0, 0.0);
  LemmaReport rep;
  rep.lemma_id = "threshold_lower_bound";
  rep.derived_constant = C_star;
  rep.samples = samples;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const double a = std::pow(10.0, ua(rng));
    const double eps = std::pow(10.0, ue(rng));
    const double m = alpha * std::pow(a, p) - eps * beta * std::pow(a, q + 1.0) +
                     C_star * std::pow(eps, r);
    rep.worst_margin = std::min(rep.worst_margin, m);
    if (m < -kSlack) ++rep.violations;
  }
  return rep;
}

double appendix_ratio(double s, int N, double R, int resolution) {
  if (!(s > 0.0 && s < 1.0)) throw ConfigError("appendix: s must lie in (0,1)");
  if (N < 1 || N > 3) throw ConfigError("appendix: N must be 1, 2 or 3");
  if (s > 0.5 && N < 2)
    throw ConfigError("appendix: the weighted quotient needs N >= 2 when s > 1/2");
  if (resolution < 4) throw ConfigError("appendix: resolution must be >= 4");
  if (!(R > 1.0))
    throw std::domain_error("appendix: R must exceed 1 (bump support touches y = 0)");

  const double gamma = 1.0 + 2.0 / (N - 2.0 * s);
  const double cell = 2.0 / resolution;
  double vol = 1.0;
  for (int a = 0; a <= N; ++a) vol *= cell;

  std::size_t nx = 1;
  for (int a = 0; a < N; ++a) nx *= static_cast<std::size_t>(resolution);

  double num = 0.0, den = 0.0;
  for (std::size_t flat = 0; flat < nx; ++flat) {
    double rx2 = 0.0;
    std::size_t rem = flat;
    for (int a = 0; a < N; ++a) {
      const int idx = static_cast<int>(rem % static_cast<std::size_t>(resolution));
      rem /= static_cast<std::size_t>(resolution);
      const double xa = -1.0 + (idx + 0.5) * cell;
      rx2 += xa * xa;
    }
    for (int j = 0; j < resolution; ++j) {
      const double y = R - 1.0 + (j + 0.5) * cell;
      const double rho = std::sqrt(rx2 + (y - R) * (y - R));
      const double t = std::clamp(2.0 * (1.0 - rho), 0.0, 1.0);
      const double weight = std::pow(y, 1.0 - 2.0 * s);
      const double U = t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
      const double dss = 30.0 * t * t * (1.0 - t) * (1.0 - t);  // smoothstep slope
      num += weight * std::pow(U, 2.0 * gamma);
      den += weight * 4.0 * dss * dss;  // |grad U|^2 = (2 dss)^2
    }
  }
  num *= vol;
  den *= vol;
  return std::pow(num, 1.0 / (2.0 * gamma)) / std::sqrt(den);
}

double appendix_rate_fit(double s, int N, const std::vector<double>& R_list, int resolution) {
  if (R_list.size() < 3) throw ConfigError("appendix.R_list needs at least 3 values");
  const double ratio0 = R_list[1] / R_list[0];
  for (std::size_t j = 1; j + 1 < R_list.size(); ++j) {
    const double ratio = R_list[j + 1] / R_list[j];
    if (std::abs(ratio - ratio0) > 1e-9 * ratio0)
      throw ConfigError("appendix.R_list must be geometric");
  }
  std::vector<double> qs;
  qs.reserve(R_list.size());
  for (double R : R_list) qs.push_back(appendix_ratio(s, N, R, resolution));
  return fit_loglog_slope(R_list, qs);
}

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw ConfigError("slope fit needs matching lists with >= 2 points");
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

}  // namespace fracpass
