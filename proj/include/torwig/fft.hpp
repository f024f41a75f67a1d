#pragma once
// Thin wrapper over FFTW for the in-place complex transforms used throughout
// the library. Plans are created once per (dimension, size, direction) and
// cached for the lifetime of the process; plan creation is serialized, plan
// execution on distinct buffers is thread-safe.

#include <complex>
#include <span>

namespace torwig {

using Complex = std::complex<double>;

class FourierTransform {
 public:
  // Transform on an n-dimensional cube with `size` points per axis
  // (axis 0 fastest in memory).
  FourierTransform(int dim, int size);

  // data[k] <- sum_j data[j] exp(-2 pi i j.k / size), unnormalized.
  void forward(std::span<Complex> data) const;
  // data[j] <- sum_k data[k] exp(+2 pi i j.k / size), unnormalized.
  void backward(std::span<Complex> data) const;

  std::size_t length() const { return length_; }

 private:
  void* forward_plan_;
  void* backward_plan_;
  std::size_t length_;
};

}  // namespace torwig
