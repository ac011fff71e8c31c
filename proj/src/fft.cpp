#include "lensless/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <utility>

namespace lensless {

namespace detail {

template <typename T>
AlignedBuffer<T>::AlignedBuffer(std::size_t n)
    : data_(static_cast<T*>(fftw_malloc(sizeof(T) * std::max<std::size_t>(n, 1)))), size_(n) {
  if (data_ == nullptr) throw std::bad_alloc();
  std::fill_n(data_, n, T{});
}

template <typename T>
AlignedBuffer<T>::~AlignedBuffer() {
  if (data_ != nullptr) fftw_free(data_);
}

template <typename T>
AlignedBuffer<T>::AlignedBuffer(AlignedBuffer&& other) noexcept
    : data_(std::exchange(other.data_, nullptr)), size_(std::exchange(other.size_, 0)) {}

template <typename T>
AlignedBuffer<T>& AlignedBuffer<T>::operator=(AlignedBuffer&& other) noexcept {
  if (this != &other) {
    if (data_ != nullptr) fftw_free(data_);
    data_ = std::exchange(other.data_, nullptr);
    size_ = std::exchange(other.size_, 0);
  }
  return *this;
}

template class AlignedBuffer<double>;
template class AlignedBuffer<std::complex<double>>;

}  // namespace detail

namespace {

enum class PlanKind { kR2C, kC2R, kForwardC2C, kInverseC2C };

// FFTW planning is not thread-safe; execution with new-array functions is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_plan shared_plan(const ImageGrid& grid, PlanKind kind) {
  static std::map<std::tuple<std::size_t, std::size_t, PlanKind>, fftw_plan> cache;
  std::lock_guard lock(planner_mutex());
  const auto key = std::make_tuple(grid.height(), grid.width(), kind);
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  const int h = static_cast<int>(grid.height());
  const int w = static_cast<int>(grid.width());
  const std::size_t spec = grid.height() * (grid.width() / 2 + 1);
  detail::AlignedBuffer<double> real(grid.size());
  detail::AlignedBuffer<std::complex<double>> cplx(std::max(spec, grid.size()));
  auto* c = reinterpret_cast<fftw_complex*>(cplx.data());

  fftw_plan plan = nullptr;
  switch (kind) {
    case PlanKind::kR2C:
      plan = fftw_plan_dft_r2c_2d(h, w, real.data(), c, FFTW_ESTIMATE);
      break;
    case PlanKind::kC2R:
      plan = fftw_plan_dft_c2r_2d(h, w, c, real.data(), FFTW_ESTIMATE);
      break;
    case PlanKind::kForwardC2C:
      plan = fftw_plan_dft_2d(h, w, c, c, FFTW_FORWARD, FFTW_ESTIMATE);
      break;
    case PlanKind::kInverseC2C:
      plan = fftw_plan_dft_2d(h, w, c, c, FFTW_BACKWARD, FFTW_ESTIMATE);
      break;
  }
  if (plan == nullptr) throw std::runtime_error("FFTW plan creation failed");
  cache.emplace(key, plan);
  return plan;
}

}  // namespace

RealFft2d::RealFft2d(const ImageGrid& grid)
    : grid_(grid),
      spectrum_size_(grid.height() * (grid.width() / 2 + 1)),
      real_(grid.size()),
      spec_(spectrum_size_),
      forward_plan_(shared_plan(grid, PlanKind::kR2C)),
      inverse_plan_(shared_plan(grid, PlanKind::kC2R)) {}

void RealFft2d::forward(std::span<const double> in, std::span<std::complex<double>> out) {
  if (in.size() != grid_.size() || out.size() != spectrum_size_) {
    throw std::invalid_argument("RealFft2d::forward: size mismatch");
  }
  std::copy(in.begin(), in.end(), real_.data());
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), real_.data(),
                       reinterpret_cast<fftw_complex*>(spec_.data()));
  std::copy_n(spec_.data(), spectrum_size_, out.begin());
}

void RealFft2d::inverse(std::span<const std::complex<double>> in, std::span<double> out) {
  if (in.size() != spectrum_size_ || out.size() != grid_.size()) {
    throw std::invalid_argument("RealFft2d::inverse: size mismatch");
  }
  // c2r overwrites its input, so always work on the scratch copy.
  std::copy(in.begin(), in.end(), spec_.data());
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_),
                       reinterpret_cast<fftw_complex*>(spec_.data()), real_.data());
  const double scale = 1.0 / static_cast<double>(grid_.size());
  for (std::size_t i = 0; i < grid_.size(); ++i) out[i] = real_.data()[i] * scale;
}

void complex_fft2d(const ImageGrid& grid, std::span<std::complex<double>> data, bool inverse) {
  if (data.size() != grid.size()) throw std::invalid_argument("complex_fft2d: size mismatch");
  auto plan = shared_plan(grid, inverse ? PlanKind::kInverseC2C : PlanKind::kForwardC2C);
  detail::AlignedBuffer<std::complex<double>> buf(grid.size());
  std::copy(data.begin(), data.end(), buf.data());
  auto* c = reinterpret_cast<fftw_complex*>(buf.data());
  fftw_execute_dft(plan, c, c);
  const double scale = inverse ? 1.0 / static_cast<double>(grid.size()) : 1.0;
  for (std::size_t i = 0; i < grid.size(); ++i) data[i] = buf.data()[i] * scale;
}

}  // namespace lensless
