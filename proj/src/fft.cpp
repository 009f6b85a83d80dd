#include "heitler/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>

namespace heitler::fft {
namespace {

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

std::vector<cplx> dft(std::span<const cplx> in, Sign sign) {
  const int n = static_cast<int>(in.size());
  std::vector<cplx> out(in.size());
  if (n == 0) return out;
  auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * in.size()));
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_1d(n, buf, buf, static_cast<int>(sign), FFTW_ESTIMATE);
  }
  std::memcpy(buf, in.data(), sizeof(fftw_complex) * in.size());
  fftw_execute(plan);
  std::memcpy(static_cast<void*>(out.data()), buf, sizeof(fftw_complex) * in.size());
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(buf);
  return out;
}

std::vector<cplx> rdft(std::span<const double> in) {
  const std::size_t n = in.size();
  std::vector<cplx> out(n / 2 + 1);
  if (n == 0) return {};
  auto* rbuf = static_cast<double*>(fftw_malloc(sizeof(double) * n));
  auto* cbuf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * out.size()));
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), rbuf, cbuf, FFTW_ESTIMATE);
  }
  std::memcpy(rbuf, in.data(), sizeof(double) * n);
  fftw_execute(plan);
  std::memcpy(static_cast<void*>(out.data()), cbuf, sizeof(fftw_complex) * out.size());
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(cbuf);
  fftw_free(rbuf);
  return out;
}

std::vector<double> shifted_frequencies(std::size_t n, double dt) {
  std::vector<double> f(n);
  const double df = 1.0 / (static_cast<double>(n) * dt);
  const auto half = static_cast<long long>(n / 2);
  for (std::size_t i = 0; i < n; ++i) {
    f[i] = static_cast<double>(static_cast<long long>(i) - half) * df;
  }
  return f;
}

}  // namespace heitler::fft
