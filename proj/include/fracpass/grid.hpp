#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracpass {

/// Error raised by configuration / precondition violations (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Error raised when a numerical search fails (bracketing, calibration).
class NumericsError : public std::runtime_error {
 public:
  explicit NumericsError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Shape of the truncated uniform tensor grid on [-L, L]^N.
struct GridSpec {
  int N = 1;       ///< dimension, 1..3
  double L = 8.0;  ///< half-width of the box
  int M = 512;     ///< points per axis; power of two, >= 8

  bool operator==(const GridSpec&) const = default;
};

/// Cell-centered uniform grid: x_i = -L + (i + 1/2) h per axis, h = 2L/M,
/// quadrature weight w = h^N per node, zero extension outside the box.
/// Node ordering is row-major with the last axis fastest.
class Grid {
 public:
  explicit Grid(const GridSpec& spec);

  const GridSpec& spec() const { return spec_; }
  int N() const { return spec_.N; }
  double L() const { return spec_.L; }
  int M() const { return spec_.M; }
  double h() const { return h_; }
  double w() const { return w_; }
  std::size_t size() const { return size_; }

  /// Coordinate of index i along any axis (all axes are identical).
  double axis_coord(int i) const { return -spec_.L + (i + 0.5) * h_; }
  const std::vector<double>& axis() const { return axis_; }

  /// Decode a flat node index into per-axis indices (last axis fastest).
  std::array<int, 3> unflatten(std::size_t flat) const;
  /// Coordinates of a flat node index.
  std::array<double, 3> point(std::size_t flat) const;
  /// Squared distance from node `flat` to a point x0 (length N).
  double r2(std::size_t flat, const std::array<double, 3>& x0) const;

 private:
  GridSpec spec_;
  double h_ = 0.0;
  double w_ = 0.0;
  std::size_t size_ = 0;
  std::vector<double> axis_;
};

/// Scalar samples on a grid. Values are finite; the field is implicitly zero
/// outside the box.
struct Field {
  GridSpec spec;
  std::vector<double> values;

  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  std::size_t size() const { return values.size(); }
};

/// Validate the spec and build the grid. Throws ConfigError on invalid shape.
Grid make_grid(const GridSpec& spec);

/// Zero field on the grid.
Field zero_field(const Grid& grid);

/// Sample a pointwise function f(x) at every node. Throws if a sample is not
/// finite, naming the node.
Field sample_field(const Grid& grid,
                   const std::function<double(const std::array<double, 3>&, int N)>& f);

/// w * sum(values): the discrete integral over R^N under zero extension.
double integrate(const Field& u);

/// (integral of |u|^p)^(1/p). Requires p >= 1.
double lp_norm(const Field& u, double p);

/// L2 norm sqrt(w * sum(u^2)); used for gradient residuals.
double l2_norm(const Field& u);

/// Assert two fields share a grid shape; throws ConfigError otherwise.
void require_same_grid(const Field& a, const Field& b, const char* where);

/// Write a field file: header `fracpass-field v1 N=<n> L=<l> M=<m>` followed
/// by one ASCII value per line, row-major.
void write_field_file(const std::string& path, const Field& u);

/// Read a field file written by write_field_file. Throws ConfigError on a
/// malformed header or wrong value count.
Field read_field_file(const std::string& path);

}  // namespace fracpass
