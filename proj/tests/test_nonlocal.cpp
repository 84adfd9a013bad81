#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "fracpass/grid.hpp"
#include "fracpass/nonlocal.hpp"

using namespace fracpass;

namespace {

/// Textbook all-pairs reference, written independently of the library code:
/// w^2 sum_{i != j} (u_i - u_j)^2 |x_i - x_j|^{-(N+2s)} over in-box pairs.
double reference_seminorm_sq(const Grid& g, double s, const Field& u) {
  const int N = g.N();
  const double kexp = -(N + 2.0 * s) / 2.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto xi = g.point(i);
    for (std::size_t j = i + 1; j < g.size(); ++j) {
      const auto xj = g.point(j);
      double r2 = 0.0;
      for (int a = 0; a < N; ++a) r2 += (xi[a] - xj[a]) * (xi[a] - xj[a]);
      const double d = u.values[i] - u.values[j];
      acc += d * d * std::pow(r2, kexp);
    }
  }
  return 2.0 * g.w() * g.w() * acc;
}

Field smooth_probe(const Grid& g) {
  return sample_field(g, [](const std::array<double, 3>& x, int N) {
    double r2 = 0.0;
    for (int a = 0; a < N; ++a) r2 += x[a] * x[a];
    double wave = 1.0;
    for (int a = 0; a < N; ++a) wave += 0.3 * std::sin(1.7 * x[a] + 0.2 * a);
    return std::exp(-0.5 * r2) * wave;
  });
}

}  // namespace

TEST_CASE("operator construction guards") {
  Grid g = make_grid(GridSpec{1, 4.0, 16});
  CHECK_THROWS_AS(NonlocalOperator(g, 1.2), ConfigError);
  CHECK_THROWS_AS(NonlocalOperator(g, 0.0), ConfigError);
  CHECK_THROWS_AS(NonlocalOperator(g, 0.75), ConfigError);  // needs N > 2s
  CHECK_NOTHROW(NonlocalOperator(g, 0.25));
}

TEST_CASE("critical exponent") {
  Grid g1 = make_grid(GridSpec{1, 4.0, 16});
  CHECK(NonlocalOperator(g1, 0.25).two_star() == doctest::Approx(4.0));
  Grid g2 = make_grid(GridSpec{2, 4.0, 16});
  CHECK(NonlocalOperator(g2, 0.75).two_star() == doctest::Approx(8.0));
}

TEST_CASE("all three seminorm routes match the textbook pair sum, 1d") {
  Grid g = make_grid(GridSpec{1, 4.0, 64});
  NonlocalOperator op(g, 0.25);
  Field u = smooth_probe(g);
  const double ref = reference_seminorm_sq(g, 0.25, u);
  CHECK(op.seminorm_sq(u) == doctest::Approx(ref).epsilon(1e-12));
  CHECK(op.seminorm_sq(u, SeminormMethod::direct_pairsum) == doctest::Approx(ref).epsilon(1e-12));
  CHECK(op.seminorm_sq(u, SeminormMethod::spectral_multiplier) ==
        doctest::Approx(ref).epsilon(1e-12));
}

TEST_CASE("all three seminorm routes match the textbook pair sum, 2d") {
  Grid g = make_grid(GridSpec{2, 4.0, 16});
  NonlocalOperator op(g, 0.75);
  Field u = smooth_probe(g);
  const double ref = reference_seminorm_sq(g, 0.75, u);
  CHECK(op.seminorm_sq(u) == doctest::Approx(ref).epsilon(1e-12));
  CHECK(op.seminorm_sq(u, SeminormMethod::direct_pairsum) == doctest::Approx(ref).epsilon(1e-12));
  CHECK(op.seminorm_sq(u, SeminormMethod::spectral_multiplier) ==
        doctest::Approx(ref).epsilon(1e-12));
}

TEST_CASE("threaded pair sum: reproducible per count, consistent across counts") {
  Grid g = make_grid(GridSpec{1, 4.0, 128});
  NonlocalOperator op(g, 0.4);
  Field u = smooth_probe(g);
  const double one = op.seminorm_sq_direct(u, 1);
  // same thread count twice: identical partial-sum splits, identical bits
  CHECK(op.seminorm_sq_direct(u, 3) == op.seminorm_sq_direct(u, 3));
  // different counts change the reduction tree only at rounding level
  CHECK(op.seminorm_sq_direct(u, 2) == doctest::Approx(one).epsilon(1e-13));
  CHECK(op.seminorm_sq_direct(u, 5) == doctest::Approx(one).epsilon(1e-13));
}

TEST_CASE("seminorm density integrates to the seminorm") {
  Grid g = make_grid(GridSpec{2, 4.0, 32});
  NonlocalOperator op(g, 0.6);
  Field u = smooth_probe(g);
  CHECK(integrate(op.ds_squared(u)) == doctest::Approx(op.seminorm_sq(u)).epsilon(1e-13));
}

TEST_CASE("seminorm density is invariant under u -> const - u") {
  Grid g = make_grid(GridSpec{1, 4.0, 64});
  NonlocalOperator op(g, 0.25);
  Field phi = sample_field(g, [](const std::array<double, 3>& x, int) {
    return 1.0 / (1.0 + std::exp(-x[0]));  // generic profile in [0, 1]
  });
  Field comp = phi;
  for (double& v : comp.values) v = 1.0 - v;
  Field a = op.ds_squared(phi);
  Field b = op.ds_squared(comp);
  double scale = 0.0;
  for (double v : a.values) scale = std::max(scale, std::abs(v));
  for (std::size_t i = 0; i < a.values.size(); ++i)
    CHECK(std::abs(a.values[i] - b.values[i]) <= 1e-12 * scale);
}

TEST_CASE("bilinear form: symmetry, diagonal, and pairing with the operator") {
  Grid g = make_grid(GridSpec{1, 4.0, 128});
  NonlocalOperator op(g, 0.25);
  Field u = smooth_probe(g);
  Field v = sample_field(g, [](const std::array<double, 3>& x, int) {
    return std::cos(0.9 * x[0]) * std::exp(-0.3 * x[0] * x[0]);
  });
  const double buv = op.bilinear(u, v);
  CHECK(op.bilinear(v, u) == doctest::Approx(buv).epsilon(1e-12));
  CHECK(op.bilinear(u, u) == doctest::Approx(op.seminorm_sq(u)).epsilon(1e-12));

  Field au = op.frac_laplacian(u);
  double paired = 0.0;
  for (std::size_t i = 0; i < au.values.size(); ++i) paired += au.values[i] * v.values[i];
  paired *= g.w();
  CHECK(paired == doctest::Approx(buv).epsilon(1e-12));
}

TEST_CASE("polarization identity ties the bilinear form to the seminorm") {
  Grid g = make_grid(GridSpec{1, 4.0, 64});
  NonlocalOperator op(g, 0.3);
  Field u = smooth_probe(g);
  Field v = sample_field(g, [](const std::array<double, 3>& x, int) {
    return std::sin(1.1 * x[0]) * std::exp(-0.4 * x[0] * x[0]);
  });
  Field sum = u, diff = u;
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    sum.values[i] += v.values[i];
    diff.values[i] -= v.values[i];
  }
  const double pol = 0.25 * (op.seminorm_sq(sum) - op.seminorm_sq(diff));
  CHECK(op.bilinear(u, v) == doctest::Approx(pol).epsilon(1e-10));
}

TEST_CASE("kernel row sums match direct summation") {
  Grid g = make_grid(GridSpec{1, 4.0, 32});
  NonlocalOperator op(g, 0.25);
  const Field& rs = op.row_sums();
  const double kexp = -(1.0 + 0.5) / 2.0;
  for (std::size_t i : {std::size_t(0), std::size_t(15), std::size_t(31)}) {
    double want = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (j == i) continue;
      const double d = g.axis_coord(static_cast<int>(i)) - g.axis_coord(static_cast<int>(j));
      want += std::pow(d * d, kexp);
    }
    CHECK(rs.values[i] == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("periodized operator applies its own symbol exactly") {
  Grid g = make_grid(GridSpec{1, 4.0, 32});
  NonlocalOperator op(g, 0.25);
  const int M = 32, k = 5;
  Field u = zero_field(g);
  for (int i = 0; i < M; ++i)
    u.values[i] = std::cos(2.0 * M_PI * k * i / M + 0.3);
  const double mk = op.spectral_symbol({k, 0, 0});
  Field au = op.frac_laplacian_spectral(u);
  for (int i = 0; i < M; ++i)
    CHECK(au.values[i] == doctest::Approx(mk * u.values[i]).epsilon(1e-11));
}

TEST_CASE("spectral symbols are nonnegative and vanish at zero frequency") {
  Grid g = make_grid(GridSpec{2, 4.0, 16});
  NonlocalOperator op(g, 0.75);
  CHECK(op.spectral_symbol({0, 0, 0}) == doctest::Approx(0.0).epsilon(1e-12));
  for (int k0 : {0, 1, 5, 8, 12})
    for (int k1 : {0, 3, 9, 15}) CHECK(op.spectral_symbol({k0, k1, 0}) >= 0.0);
  // conjugate-fold consistency: m_k == m_{M-k}
  CHECK(op.spectral_symbol({3, 11, 0}) ==
        doctest::Approx(op.spectral_symbol({13, 5, 0})).epsilon(1e-12));
}

TEST_CASE("documented closed-form symbol prefactor") {
  CHECK(NonlocalOperator::symbol_constant(1, 0.25) == doctest::Approx(10.02651310).epsilon(1e-7));
  CHECK(NonlocalOperator::symbol_constant(2, 0.75) == doctest::Approx(11.68448641).epsilon(1e-7));
}

TEST_CASE("constants are annihilated by every route") {
  Grid g = make_grid(GridSpec{1, 4.0, 32});
  NonlocalOperator op(g, 0.25);
  Field zero = zero_field(g);
  CHECK(op.seminorm_sq(zero) == doctest::Approx(0.0));
  Field one = zero_field(g);
  for (double& v : one.values) v = 1.0;
  // in-box pair differences of a constant vanish identically
  CHECK(std::abs(op.seminorm_sq(one)) <= 1e-10);
  CHECK(std::abs(op.seminorm_sq(one, SeminormMethod::spectral_multiplier)) <= 1e-9);
  // and the periodized operator kills constants through its zero symbol
  Field a = op.frac_laplacian_spectral(one);
  for (double v : a.values) CHECK(std::abs(v) <= 1e-10);
}
