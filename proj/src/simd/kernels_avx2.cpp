// AVX2 + FMA variants. This translation unit is compiled with -mavx2 -mfma and
// only reached after the dispatcher has confirmed CPU support.

#include "heitler/simd/kernels.hpp"

#include <algorithm>
#include <immintrin.h>

#include <cmath>
#include <numbers>

namespace heitler::simd::detail {
namespace {

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, _mm256_add_pd(acc0, acc1));
  double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void norm_sq_avx2(const std::complex<double>* in, double* out, std::size_t n) {
  const double* p = reinterpret_cast<const double*>(in);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(p + 2 * i);
    const __m256d y = _mm256_loadu_pd(p + 2 * i + 4);
    const __m256d h = _mm256_hadd_pd(_mm256_mul_pd(x, x), _mm256_mul_pd(y, y));
    _mm256_storeu_pd(out + i, _mm256_permute4x64_pd(h, 0b11011000));
  }
  for (; i < n; ++i) {
    const double re = in[i].real(), im = in[i].imag();
    out[i] = re * re + im * im;
  }
}

void zoom_dft_avx2(const double* x, std::size_t n, double f0, double df,
                   std::complex<double>* out, std::size_t m) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  std::size_t k = 0;
  for (; k + 4 <= m; k += 4) {
    alignas(32) double f[4], s_re[4], s_im[4], p_re[4], p_im[4];
    for (int l = 0; l < 4; ++l) {
      f[l] = f0 + static_cast<double>(k + l) * df;
      s_re[l] = std::cos(two_pi * f[l]);
      s_im[l] = -std::sin(two_pi * f[l]);
    }
    const __m256d step_re = _mm256_load_pd(s_re);
    const __m256d step_im = _mm256_load_pd(s_im);
    __m256d acc_re = _mm256_setzero_pd();
    __m256d acc_im = _mm256_setzero_pd();
    for (std::size_t start = 0; start < n; start += kZoomResyncBlock) {
      for (int l = 0; l < 4; ++l) {
        const double cycles = f[l] * static_cast<double>(start);
        const double frac = cycles - std::floor(cycles);
        p_re[l] = std::cos(two_pi * frac);
        p_im[l] = -std::sin(two_pi * frac);
      }
      __m256d ph_re = _mm256_load_pd(p_re);
      __m256d ph_im = _mm256_load_pd(p_im);
      const std::size_t stop = std::min(n, start + kZoomResyncBlock);
      for (std::size_t i = start; i < stop; ++i) {
        const __m256d xv = _mm256_broadcast_sd(x + i);
        acc_re = _mm256_fmadd_pd(xv, ph_re, acc_re);
        acc_im = _mm256_fmadd_pd(xv, ph_im, acc_im);
        const __m256d nr = _mm256_fmsub_pd(ph_re, step_re, _mm256_mul_pd(ph_im, step_im));
        const __m256d ni = _mm256_fmadd_pd(ph_re, step_im, _mm256_mul_pd(ph_im, step_re));
        ph_re = nr;
        ph_im = ni;
      }
    }
    alignas(32) double r[4], im[4];
    _mm256_store_pd(r, acc_re);
    _mm256_store_pd(im, acc_im);
    for (int l = 0; l < 4; ++l) out[k + l] = {r[l], im[l]};
  }
  if (k < m) scalar_table.zoom_dft(x, n, f0 + static_cast<double>(k) * df, df, out + k, m - k);
}

// Four lanes at p + i.
inline std::size_t propagate4(const Propagator2& u, double* g_re, double* g_im, double* e_re,
                              double* e_im, const double* thresholds, double* norms) {
  const __m256d a_re = _mm256_set1_pd(u.u00.real()), a_im = _mm256_set1_pd(u.u00.imag());
  const __m256d b_re = _mm256_set1_pd(u.u01.real()), b_im = _mm256_set1_pd(u.u01.imag());
  const __m256d c_re = _mm256_set1_pd(u.u10.real()), c_im = _mm256_set1_pd(u.u10.imag());
  const __m256d d_re = _mm256_set1_pd(u.u11.real()), d_im = _mm256_set1_pd(u.u11.imag());
  const __m256d gr = _mm256_loadu_pd(g_re), gi = _mm256_loadu_pd(g_im);
  const __m256d er = _mm256_loadu_pd(e_re), ei = _mm256_loadu_pd(e_im);
  // ngr = a_re gr - a_im gi + b_re er - b_im ei, etc.
  __m256d ngr = _mm256_mul_pd(a_re, gr);
  ngr = _mm256_fnmadd_pd(a_im, gi, ngr);
  ngr = _mm256_fmadd_pd(b_re, er, ngr);
  ngr = _mm256_fnmadd_pd(b_im, ei, ngr);
  __m256d ngi = _mm256_mul_pd(a_re, gi);
  ngi = _mm256_fmadd_pd(a_im, gr, ngi);
  ngi = _mm256_fmadd_pd(b_re, ei, ngi);
  ngi = _mm256_fmadd_pd(b_im, er, ngi);
  __m256d ner = _mm256_mul_pd(c_re, gr);
  ner = _mm256_fnmadd_pd(c_im, gi, ner);
  ner = _mm256_fmadd_pd(d_re, er, ner);
  ner = _mm256_fnmadd_pd(d_im, ei, ner);
  __m256d nei = _mm256_mul_pd(c_re, gi);
  nei = _mm256_fmadd_pd(c_im, gr, nei);
  nei = _mm256_fmadd_pd(d_re, ei, nei);
  nei = _mm256_fmadd_pd(d_im, er, nei);
  _mm256_storeu_pd(g_re, ngr);
  _mm256_storeu_pd(g_im, ngi);
  _mm256_storeu_pd(e_re, ner);
  _mm256_storeu_pd(e_im, nei);
  __m256d nrm = _mm256_mul_pd(ngr, ngr);
  nrm = _mm256_fmadd_pd(ngi, ngi, nrm);
  nrm = _mm256_fmadd_pd(ner, ner, nrm);
  nrm = _mm256_fmadd_pd(nei, nei, nrm);
  _mm256_storeu_pd(norms, nrm);
  const __m256d below = _mm256_cmp_pd(nrm, _mm256_loadu_pd(thresholds), _CMP_LT_OQ);
  return static_cast<std::size_t>(__builtin_popcount(_mm256_movemask_pd(below)));
}

std::size_t propagate_lanes_avx2(const Propagator2& u, double* g_re, double* g_im,
                                 double* e_re, double* e_im, const double* thresholds,
                                 double* norms, std::size_t lanes) {
  std::size_t crossed = 0;
  std::size_t i = 0;
  for (; i + 4 <= lanes; i += 4) {
    crossed += propagate4(u, g_re + i, g_im + i, e_re + i, e_im + i, thresholds + i, norms + i);
  }
  if (i < lanes) {
    // The tail goes through the same FMA sequence in a padded block, so a
    // lane's result does not depend on its position in the batch.
    const std::size_t m = lanes - i;
    alignas(32) double gr[4] = {}, gi[4] = {}, er[4] = {}, ei[4] = {}, th[4] = {}, nr[4];
    std::copy_n(g_re + i, m, gr);
    std::copy_n(g_im + i, m, gi);
    std::copy_n(e_re + i, m, er);
    std::copy_n(e_im + i, m, ei);
    std::copy_n(thresholds + i, m, th);
    crossed += propagate4(u, gr, gi, er, ei, th, nr);
    std::copy_n(gr, m, g_re + i);
    std::copy_n(gi, m, g_im + i);
    std::copy_n(er, m, e_re + i);
    std::copy_n(ei, m, e_im + i);
    std::copy_n(nr, m, norms + i);
  }
  return crossed;
}

}  // namespace

const KernelTable avx2_table{dot_avx2, norm_sq_avx2, zoom_dft_avx2, propagate_lanes_avx2};

}  // namespace heitler::simd::detail
