#pragma once

#include <array>

#include "fracpass/grid.hpp"
#include "fracpass/nonlocal.hpp"

namespace fracpass {

/// The one-dimensional search for the bubble normalization failed to bracket
/// an interior minimum.
class CalibrationError : public NumericsError {
 public:
  explicit CalibrationError(const std::string& msg) : NumericsError(msg) {}
};

/// Concentration profile z_{mu,xi}: scale, center and normalization constant.
struct BubbleSpec {
  double mu = 1.0;                      ///< concentration scale, > 0
  std::array<double, 3> xi{0., 0., 0.}; ///< center
  double c_ns = 1.0;                    ///< normalization constant, > 0

  bool operator==(const BubbleSpec&) const = default;
};

/// Radial cutoff: identically 1 on B_{r/2}(x0), 0 outside B_r(x0), quintic
/// smoothstep in between (C^2, hence Lipschitz).
struct CutoffSpec {
  double r = 1.0;                       ///< outer radius, > 0
  std::array<double, 3> x0{0., 0., 0.}; ///< center

  bool operator==(const CutoffSpec&) const = default;
};

/// Quintic smoothstep t^3 (10 - 15t + 6t^2), clamped to [0,1] outside [0,1].
double smoothstep_quintic(double t);

/// z_{mu,xi}(x) = mu^{-(N-2s)/2} c_ns / (1 + |(x - xi)/mu|^2)^{(N-2s)/2}.
/// Emits a stderr warning when |xi| + 4 mu >= L (profile mass near the box
/// edge); report files are unaffected.
Field bubble(const Grid& grid, double s, const BubbleSpec& spec);

/// True when |xi| + 4 mu < L, the rule of thumb for the profile being
/// essentially supported inside the box.
bool bubble_support_inside(const Grid& grid, const BubbleSpec& spec);

/// Radial cutoff field per CutoffSpec.
Field cutoff(const Grid& grid, const CutoffSpec& spec);

/// 1 - cutoff(R, origin): equals 0 on B_{R/2}, 1 outside B_R.
Field outer_cutoff(const Grid& grid, double R);

/// Result of the bubble-constant calibration. Two internally consistent
/// normalizations are reported:
///  - c_residual minimizes the relative strong-form residual
///    || c A z - (c z)^{p-1} || / || (c z)^{p-1} || over the ball B_{L/2}
///    (A the nonlocal operator, p the critical exponent);
///  - c_energy = ([z]_s^2 / integral z^p)^{1/(p-2)} makes the energy identity
///    [c z]_s^2 = integral (c z)^p exact on this grid.
/// c_residual carries the operator's in-box truncation bias; c_energy is the
/// constant used by the scaling-identity checks.
struct Calibration {
  double c_residual = 0.0;
  double c_energy = 0.0;
  double rel_residual = 0.0;  ///< relative residual at c_residual
};

/// One-dimensional search for the bubble normalization on this grid.
/// Throws CalibrationError when the coarse scan puts the minimum at the edge
/// of the search range.
Calibration calibrate_bubble_constant(const Grid& grid, double s);

/// Rayleigh-quotient estimate of the Sobolev constant and derived threshold.
struct SobolevEstimate {
  double S_hat = 0.0;      ///< [z]_s^2 / ||z||_{2*}^2 at the unit bubble
  double S_pow = 0.0;      ///< S_hat^{N/(2s)}
  double threshold = 0.0;  ///< (s/N) S_hat^{N/(2s)}, the compactness level
};

/// Evaluates the Rayleigh quotient at the mu = 1 bubble on this grid. The
/// quotient is homogeneous of degree zero, so the normalization constant
/// drops out and no calibration is required.
SobolevEstimate sobolev_constant_estimate(const Grid& grid, double s);

/// Mountain-pass path sample t * cutoff * bubble (pointwise product).
Field path_point(const Grid& grid, double t, double s, const BubbleSpec& spec,
                 const CutoffSpec& cut);

}  // namespace fracpass
