#pragma once

#include <array>
#include <memory>
#include <mutex>
#include <vector>

#include "fracpass/fft.hpp"
#include "fracpass/grid.hpp"

namespace fracpass {

/// Which evaluation route to use for the Gagliardo seminorm.
enum class SeminormMethod {
  direct_pairsum,       ///< literal O(M^2N) double sum over node pairs
  spectral_multiplier,  ///< Fourier-multiplier evaluation on the padded torus
};

/// Discrete nonlocal machinery for one (grid, s) pair.
///
/// Everything is built from the singular kernel K(x) = |x|^{-(N+2s)} sampled
/// at node offsets, with the diagonal excluded and zero extension outside the
/// box. The seminorm is the in-box pair sum
///     [u]_s^2 = w^2 sum_{i != j} (u_i - u_j)^2 K(x_i - x_j),
/// and every production quantity (pointwise density, bilinear form, operator
/// application) is an exact regrouping of that sum, evaluated fast through
/// zero-padded circulant convolution. The literal pair loop and the
/// Fourier-multiplier form are kept as two independent cross-checking routes.
///
/// The operator application is normalized so that
///     integrate(frac_laplacian(u) * v) == bilinear(u, v)
/// holds exactly: frac_laplacian is the L2 gradient of (1/2)[u]_s^2.
///
/// Immutable after construction; safe to share across threads.
class NonlocalOperator {
 public:
  NonlocalOperator(const Grid& grid, double s);

  const Grid& grid() const { return grid_; }
  double s() const { return s_; }
  /// Critical exponent 2N/(N - 2s).
  double two_star() const { return two_star_; }

  /// Production seminorm [u]_s^2 (convolution evaluation of the pair sum).
  double seminorm_sq(const Field& u) const;
  /// Seminorm through the selected cross-validation route.
  double seminorm_sq(const Field& u, SeminormMethod method, int threads = 1) const;
  /// Literal pair-sum route. Deterministic for a fixed thread count: each
  /// thread reduces a fixed contiguous block of rows, blocks combined in order.
  double seminorm_sq_direct(const Field& u, int threads = 1) const;
  /// Fourier-multiplier route on the zero-padded torus. Algebraically equal to
  /// the pair sum; shares no code with the literal loop.
  double seminorm_sq_spectral(const Field& u) const;

  /// Pointwise density |D^s u|^2(x_i); integrates exactly to the seminorm.
  Field ds_squared(const Field& u) const;
  /// Symmetric pairing w^2 sum_{i != j} (u_i - u_j)(v_i - v_j) K(x_i - x_j).
  double bilinear(const Field& u, const Field& v) const;
  /// Operator application: frac_laplacian(u)_i = 2w (u_i R_i - (K*u)_i) with
  /// R the in-box kernel row sums; exact L2 gradient of (1/2)[u]_s^2.
  Field frac_laplacian(const Field& u) const;
  /// Periodic spectral variant: circulant on the M-torus with the
  /// nearest-image wrapped kernel. Plane waves cos(pi k x / L) are exact
  /// eigenvectors with eigenvalue spectral_symbol(k).
  Field frac_laplacian_spectral(const Field& u) const;
  /// Multiplier of the periodic spectral path at integer mode k (per axis).
  /// Approaches symbol_constant(N,s) * |pi k / L|^{2s} as the mode is
  /// resolved; the deviation is the documented lattice/truncation bias.
  double spectral_symbol(const std::array<int, 3>& mode) const;

  /// In-box kernel convolution (K * u)_i = sum_{j != i} K(x_i - x_j) u_j.
  Field kernel_conv(const Field& u) const;
  /// Row sums R_i = sum_{j != i} K(x_i - x_j).
  const Field& row_sums() const { return rowsum_; }

  /// Continuum normalization c(N,s) = 2 pi^{N/2} Gamma(1-s) /
  /// (s 4^s Gamma(N/2+s)), the plane-wave constant the discrete multipliers
  /// approach under refinement.
  static double symbol_constant(int N, double s);

 private:
  Grid grid_;
  double s_;
  double two_star_;
  double kexp_;  // exponent applied to squared distance: -(N+2s)/2

  RealDft pad_;        // transform on the (2M)^N padded torus
  AlignedArray ksp_;   // kernel spectrum in padded layout
  Field rowsum_;

  // Lazily built pieces (logically immutable; guarded by call-once flags).
  mutable std::once_flag boxsp_once_;
  mutable std::unique_ptr<AlignedArray> boxsp_;  // spectrum of the box indicator
  mutable std::once_flag torus_once_;
  mutable std::unique_ptr<RealDft> tor_;
  mutable std::unique_ptr<std::vector<double>> tor_symbol_;  // per r2c mode

  void conv_into(const double* box_in, double* box_out) const;
  void ensure_boxsp() const;
  void ensure_torus() const;
  double pair_sum_block(const Field& u, std::size_t begin, std::size_t end) const;
};

}  // namespace fracpass
