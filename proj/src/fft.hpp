#pragma once

#include <fftw3.h>

#include <complex>
#include <mutex>
#include <vector>

namespace uwbpulse::detail {

// FFTW's planner is not thread-safe; execution on a built plan is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

class FftPlan {
 public:
  FftPlan(int n, int sign) : n_(n) {
    std::vector<std::complex<double>> a(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(n));
    std::lock_guard lock(fftw_planner_mutex());
    plan_ = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(a.data()), reinterpret_cast<fftw_complex*>(b.data()),
                             sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  ~FftPlan() {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan_);
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  int size() const { return n_; }
  // Unnormalized transform, in[] and out[] of length size().
  void run(const std::complex<double>* in, std::complex<double>* out) const {
    fftw_execute_dft(plan_, reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
  }

 private:
  int n_;
  fftw_plan plan_;
};

}  // namespace uwbpulse::detail
