#pragma once

// Thin FFTW wrapper: cached in-place complex-to-complex plans keyed by
// (dim, points_per_axis, direction). Planning is serialized; execution
// through fftw_execute_dft is reentrant.

#include <fftw3.h>

#include <complex>
#include <map>
#include <mutex>
#include <span>
#include <tuple>
#include <vector>

namespace nlcl::detail {

class PlanCache {
public:
  PlanCache() = default;
  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int dim, int n, int sign) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_tuple(dim, n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;

    std::size_t total = 1;
    std::vector<int> dims(static_cast<std::size_t>(dim), n);
    for (int d = 0; d < dim; ++d) total *= static_cast<std::size_t>(n);
    std::vector<std::complex<double>> scratch(total);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    // FFTW_ESTIMATE keeps planning deterministic; UNALIGNED lets us execute
    // on std::vector storage of any alignment.
    fftw_plan plan = fftw_plan_dft(dim, dims.data(), buf, buf, sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, plan);
    return plan;
  }

private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

inline PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

/// Unnormalized in-place transform; sign = FFTW_FORWARD (e^{-i}) or FFTW_BACKWARD (e^{+i}).
inline void fft_inplace(std::span<std::complex<double>> data, int dim, int n, int sign) {
  fftw_plan plan = plan_cache().get(dim, n, sign);
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, buf, buf);
}

}  // namespace nlcl::detail
