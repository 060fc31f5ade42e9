#include "schatten/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

namespace schatten::fft {
namespace {

// FFTW planning is not thread-safe; execution through fftw_execute_dft is.
class PlanCache {
 public:
  fftw_plan get(int rank, int n, int sign) {
    const auto key = std::make_tuple(rank, n, sign);
    std::lock_guard lock(mutex_);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::vector<int> dims(static_cast<std::size_t>(rank), n);
    std::size_t total = 1;
    for (int i = 0; i < rank; ++i) total *= static_cast<std::size_t>(n);
    fftw_complex* scratch = fftw_alloc_complex(total);
    fftw_plan plan = fftw_plan_dft(rank, dims.data(), scratch, scratch, sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(scratch);
    plans_.emplace(key, plan);
    return plan;
  }

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

void run(int rank, int n, std::span<cplx> data, int sign) {
  fftw_plan plan = cache().get(rank, n, sign);
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, ptr, ptr);
}

}  // namespace

void transform(const Grid& g, std::span<cplx> data, int sign) {
  run(g.dim(), g.n(), data, sign);
}

void transform_kernel(const Grid& g, std::span<cplx> data, int sign) {
  run(2 * g.dim(), g.n(), data, sign);
}

}  // namespace schatten::fft
