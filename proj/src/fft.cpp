#include "sta/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace sta {

namespace {

struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

std::mutex g_plan_mutex;
std::map<int, PlanPair>& plan_cache() {
  static std::map<int, PlanPair> cache;
  return cache;
}

PlanPair get_plans(int n) {
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  auto& cache = plan_cache();
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  // in-place plans with FFTW_ESTIMATE: deterministic algorithm choice
  std::vector<cplx> buf(n);
  auto* p = reinterpret_cast<fftw_complex*>(buf.data());
  PlanPair pp;
  pp.fwd = fftw_plan_dft_1d(n, p, p, FFTW_FORWARD, FFTW_ESTIMATE);
  pp.bwd = fftw_plan_dft_1d(n, p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
  if (!pp.fwd || !pp.bwd) throw std::runtime_error("fftw plan failed");
  cache[n] = pp;
  return pp;
}

}  // namespace

void fft_forward(std::vector<cplx>& data) {
  PlanPair pp = get_plans(static_cast<int>(data.size()));
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(pp.fwd, p, p);
}

void fft_backward(std::vector<cplx>& data) {
  int n = static_cast<int>(data.size());
  PlanPair pp = get_plans(n);
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(pp.bwd, p, p);
  double inv = 1.0 / n;
  for (auto& v : data) v *= inv;
}

double fft_wavenumber(int j, int n, double dx) {
  int jj = (j < n / 2) ? j : j - n;
  return 2.0 * M_PI * jj / (n * dx);
}

}  // namespace sta
