#include "fracpass/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>
#include <stdexcept>

namespace fracpass {

namespace {
// FFTW plan creation/destruction is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

AlignedArray::AlignedArray(std::size_t n_doubles) : n_(n_doubles) {
  data_ = static_cast<double*>(fftw_malloc(n_doubles * sizeof(double)));
  if (!data_) throw std::bad_alloc();
  zero();
}

AlignedArray::~AlignedArray() {
  if (data_) fftw_free(data_);
}

AlignedArray::AlignedArray(AlignedArray&& other) noexcept : data_(other.data_), n_(other.n_) {
  other.data_ = nullptr;
  other.n_ = 0;
}

AlignedArray& AlignedArray::operator=(AlignedArray&& other) noexcept {
  if (this != &other) {
    if (data_) fftw_free(data_);
    data_ = other.data_;
    n_ = other.n_;
    other.data_ = nullptr;
    other.n_ = 0;
  }
  return *this;
}

void AlignedArray::zero() { std::memset(data_, 0, n_ * sizeof(double)); }

RealDft::RealDft(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.empty() || dims_.size() > 3)
    throw std::invalid_argument("RealDft: rank must be 1..3");
  logical_ = 1;
  for (int d : dims_) logical_ *= static_cast<std::size_t>(d);
  const int nlast = dims_.back();
  padded_last_ = 2 * (static_cast<std::size_t>(nlast) / 2 + 1);
  alloc_ = padded_last_;
  for (std::size_t i = 0; i + 1 < dims_.size(); ++i)
    alloc_ *= static_cast<std::size_t>(dims_[i]);
  n_complex_ = alloc_ / 2;

  AlignedArray scratch(alloc_);
  std::lock_guard<std::mutex> lock(planner_mutex());
  plan_fwd_ = fftw_plan_dft_r2c(static_cast<int>(dims_.size()), dims_.data(), scratch.data(),
                                reinterpret_cast<fftw_complex*>(scratch.data()), FFTW_ESTIMATE);
  plan_inv_ = fftw_plan_dft_c2r(static_cast<int>(dims_.size()), dims_.data(),
                                reinterpret_cast<fftw_complex*>(scratch.data()), scratch.data(),
                                FFTW_ESTIMATE);
  if (!plan_fwd_ || !plan_inv_) throw std::runtime_error("RealDft: FFTW plan creation failed");
}

RealDft::~RealDft() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (plan_fwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  if (plan_inv_) fftw_destroy_plan(static_cast<fftw_plan>(plan_inv_));
}

void RealDft::forward(double* buf) const {
  fftw_execute_dft_r2c(static_cast<fftw_plan>(plan_fwd_), buf,
                       reinterpret_cast<fftw_complex*>(buf));
}

void RealDft::inverse(double* buf) const {
  fftw_execute_dft_c2r(static_cast<fftw_plan>(plan_inv_),
                       reinterpret_cast<fftw_complex*>(buf), buf);
  const double scale = 1.0 / static_cast<double>(logical_);
  for (std::size_t i = 0; i < alloc_; ++i) buf[i] *= scale;
}

}  // namespace fracpass
