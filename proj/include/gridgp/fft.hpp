#ifndef GRIDGP_FFT_HPP
#define GRIDGP_FFT_HPP

#include <complex>
#include <memory>
#include <mutex>
#include <numeric>
#include <vector>

#include <Eigen/Dense>
#include <fftw3.h>

namespace gridgp {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;

namespace detail {
// FFTW's planner is not thread-safe; executing a plan on distinct buffers is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}
} // namespace detail

/// Cached complex-to-complex D-dimensional DFT plans for one tensor shape
/// (C-order layout). forward() is the unnormalized DFT, inverse() divides
/// by the total size. Safe for concurrent execution on caller buffers.
class FftPlan {
public:
  explicit FftPlan(std::vector<int> dims) : dims_(std::move(dims)) {
    size_ = 1;
    for (int d : dims_) size_ *= static_cast<std::ptrdiff_t>(d);
    CVec dummy(size_);
    auto* p = reinterpret_cast<fftw_complex*>(dummy.data());
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    fwd_ = fftw_plan_dft(static_cast<int>(dims_.size()), dims_.data(), p, p,
                         FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    bwd_ = fftw_plan_dft(static_cast<int>(dims_.size()), dims_.data(), p, p,
                         FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  }

  ~FftPlan() {
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
  }

  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  std::ptrdiff_t size() const { return size_; }
  const std::vector<int>& dims() const { return dims_; }

  // In-place unnormalized forward DFT.
  void forward(CVec& buf) const {
    auto* p = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_execute_dft(fwd_, p, p);
  }

  // In-place inverse DFT, normalized by 1/size.
  void inverse(CVec& buf) const {
    auto* p = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_execute_dft(bwd_, p, p);
    buf /= static_cast<double>(size_);
  }

  // Inverse without the 1/size normalization.
  void inverse_unnormalized(CVec& buf) const {
    auto* p = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_execute_dft(bwd_, p, p);
  }

private:
  std::vector<int> dims_;
  std::ptrdiff_t size_ = 0;
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
};

} // namespace gridgp

#endif
