#pragma once

#include <cstddef>
#include <vector>

namespace fracpass {

/// FFTW-backed buffer with the alignment fftw_malloc guarantees.
class AlignedArray {
 public:
  explicit AlignedArray(std::size_t n_doubles);
  ~AlignedArray();
  AlignedArray(const AlignedArray&) = delete;
  AlignedArray& operator=(const AlignedArray&) = delete;
  AlignedArray(AlignedArray&& other) noexcept;
  AlignedArray& operator=(AlignedArray&& other) noexcept;

  double* data() { return data_; }
  const double* data() const { return data_; }
  std::size_t size() const { return n_; }
  void zero();

 private:
  double* data_ = nullptr;
  std::size_t n_ = 0;
};

/// In-place real-to-complex / complex-to-real DFT on an n-dimensional array.
///
/// The real data lives in the padded in-place layout: the last dimension is
/// stored with stride 2*(n_last/2 + 1) doubles. After forward(), the buffer
/// holds interleaved complex coefficients (n_complex of them). inverse()
/// applies the 1/prod(dims) normalization so inverse(forward(x)) == x.
class RealDft {
 public:
  explicit RealDft(std::vector<int> dims);
  ~RealDft();
  RealDft(const RealDft&) = delete;
  RealDft& operator=(const RealDft&) = delete;

  const std::vector<int>& dims() const { return dims_; }
  std::size_t logical_size() const { return logical_; }
  /// Doubles to allocate for an in-place transform (padded layout).
  std::size_t alloc_doubles() const { return alloc_; }
  /// Stride in doubles of the last dimension in the padded layout.
  std::size_t padded_last() const { return padded_last_; }
  /// Number of complex coefficients after forward().
  std::size_t n_complex() const { return n_complex_; }

  void forward(double* buf) const;
  void inverse(double* buf) const;

 private:
  std::vector<int> dims_;
  std::size_t logical_ = 0;
  std::size_t padded_last_ = 0;
  std::size_t alloc_ = 0;
  std::size_t n_complex_ = 0;
  void* plan_fwd_ = nullptr;
  void* plan_inv_ = nullptr;
};

}  // namespace fracpass
