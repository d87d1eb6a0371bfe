// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <mutex>

namespace wpdyn::detail {

// FFTW's planner is not thread-safe; executing a plan is. All plan
// creation/destruction in the project goes through this mutex. Plans use
// FFTW_ESTIMATE so the chosen algorithm, and therefore every last bit of the
// output, is reproducible from run to run.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

template <typename T>
class FftwBuffer {
 public:
  explicit FftwBuffer(std::size_t n) : n_(n) {
    p_ = static_cast<T*>(fftw_malloc(sizeof(T) * n));
  }
  ~FftwBuffer() { fftw_free(p_); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;

  T* data() { return p_; }
  const T* data() const { return p_; }
  std::size_t size() const { return n_; }
  T& operator[](std::size_t i) { return p_[i]; }
  const T& operator[](std::size_t i) const { return p_[i]; }

 private:
  T* p_ = nullptr;
  std::size_t n_ = 0;
};

class FftwPlan {
 public:
  FftwPlan() = default;
  explicit FftwPlan(fftw_plan p) : p_(p) {}
  ~FftwPlan() {
    if (p_) {
      std::lock_guard<std::mutex> lock(fftw_planner_mutex());
      fftw_destroy_plan(p_);
    }
  }
  FftwPlan(FftwPlan&& other) noexcept : p_(other.p_) { other.p_ = nullptr; }
  FftwPlan& operator=(FftwPlan&& other) noexcept {
    if (this != &other) {
      this->~FftwPlan();
      p_ = other.p_;
      other.p_ = nullptr;
    }
    return *this;
  }
  FftwPlan(const FftwPlan&) = delete;
  FftwPlan& operator=(const FftwPlan&) = delete;

  void execute() const { fftw_execute(p_); }
  fftw_plan get() const { return p_; }

 private:
  fftw_plan p_ = nullptr;
};

/// In-place, unnormalized DST-I of an interleaved complex array of m points:
/// real and imaginary parts are transformed as two strided r2r passes in one
/// plan. Applying it twice multiplies by 2(m+1).
class ComplexDst {
 public:
  explicit ComplexDst(std::size_t m) : buf_(2 * m), m_(m) {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    int n = static_cast<int>(m);
    fftw_r2r_kind kind = FFTW_RODFT00;
    plan_ = FftwPlan(fftw_plan_many_r2r(1, &n, 2, buf_.data(), nullptr, 2, 1, buf_.data(),
                                        nullptr, 2, 1, &kind, FFTW_ESTIMATE));
  }

  std::size_t size() const { return m_; }
  std::complex<double>* data() { return reinterpret_cast<std::complex<double>*>(buf_.data()); }
  const std::complex<double>* data() const {
    return reinterpret_cast<const std::complex<double>*>(buf_.data());
  }
  void execute() { plan_.execute(); }

 private:
  FftwBuffer<double> buf_;
  std::size_t m_;
  FftwPlan plan_;
};

}  // namespace wpdyn::detail
