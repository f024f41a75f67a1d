#include "torwig/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

#include "torwig/errors.hpp"

namespace torwig {
namespace {

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

fftw_plan cached_plan(int dim, int size, int sign) {
  static std::map<std::tuple<int, int, int>, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(plan_mutex());
  const auto key = std::make_tuple(dim, size, sign);
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  std::size_t length = static_cast<std::size_t>(size);
  if (dim == 2) length *= static_cast<std::size_t>(size);
  auto* buffer = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * length));
  if (buffer == nullptr) throw std::bad_alloc();
  // Rows are stored with axis 0 fastest; FFTW's last dimension is fastest, so
  // the dimension list is simply (size, size) for the square case.
  fftw_plan plan = nullptr;
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  if (dim == 1) {
    plan = fftw_plan_dft_1d(size, buffer, buffer, sign, flags);
  } else {
    plan = fftw_plan_dft_2d(size, size, buffer, buffer, sign, flags);
  }
  fftw_free(buffer);
  if (plan == nullptr) throw std::runtime_error("FFTW plan creation failed");
  cache.emplace(key, plan);
  return plan;
}

}  // namespace

FourierTransform::FourierTransform(int dim, int size) {
  if ((dim != 1 && dim != 2) || size < 1) {
    throw ConfigError("unsupported transform shape");
  }
  length_ = static_cast<std::size_t>(size);
  if (dim == 2) length_ *= static_cast<std::size_t>(size);
  forward_plan_ = cached_plan(dim, size, FFTW_FORWARD);
  backward_plan_ = cached_plan(dim, size, FFTW_BACKWARD);
}

void FourierTransform::forward(std::span<Complex> data) const {
  if (data.size() != length_) throw std::invalid_argument("transform length mismatch");
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), p, p);
}

void FourierTransform::backward(std::span<Complex> data) const {
  if (data.size() != length_) throw std::invalid_argument("transform length mismatch");
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(static_cast<fftw_plan>(backward_plan_), p, p);
}

}  // namespace torwig
