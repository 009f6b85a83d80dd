#pragma once

#include <span>
#include <vector>

#include "heitler/common.hpp"

// Thin wrapper over FFTW. Plans use FFTW_ESTIMATE so results are bit-stable
// from run to run.
namespace heitler::fft {

enum class Sign { forward = -1, backward = +1 };

// Unnormalized complex DFT: out[k] = sum_n in[n] exp(sign * 2 pi i k n / N).
std::vector<cplx> dft(std::span<const cplx> in, Sign sign);

// Unnormalized real-to-complex forward DFT, N/2 + 1 outputs.
std::vector<cplx> rdft(std::span<const double> in);

// Index shift mapping DFT order to ascending frequency (-N/2 .. N/2-1).
template <typename T>
std::vector<T> shift(const std::vector<T>& in) {
  const std::size_t n = in.size();
  std::vector<T> out(n);
  const std::size_t half = n / 2;
  for (std::size_t i = 0; i < n; ++i) out[i] = in[(i + n - half) % n];
  return out;
}

// Ascending DFT frequencies matching shift(): (k - N/2) / (N dt).
std::vector<double> shifted_frequencies(std::size_t n, double dt);

}  // namespace heitler::fft
