// AArch64 NEON variants (two double lanes per register). NEON is mandatory on
// AArch64, so no runtime probe is needed beyond the build check.

#include "heitler/simd/kernels.hpp"

#include <arm_neon.h>

#include <cmath>
#include <numbers>

namespace heitler::simd::detail {
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void norm_sq_neon(const std::complex<double>* in, double* out, std::size_t n) {
  const double* p = reinterpret_cast<const double*>(in);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t x = vld1q_f64(p + 2 * i);
    const float64x2_t y = vld1q_f64(p + 2 * i + 2);
    vst1q_f64(out + i, vpaddq_f64(vmulq_f64(x, x), vmulq_f64(y, y)));
  }
  for (; i < n; ++i) {
    const double re = in[i].real(), im = in[i].imag();
    out[i] = re * re + im * im;
  }
}

void zoom_dft_neon(const double* x, std::size_t n, double f0, double df,
                   std::complex<double>* out, std::size_t m) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  std::size_t k = 0;
  for (; k + 2 <= m; k += 2) {
    double f[2], s_re[2], s_im[2], p_re[2], p_im[2];
    for (int l = 0; l < 2; ++l) {
      f[l] = f0 + static_cast<double>(k + l) * df;
      s_re[l] = std::cos(two_pi * f[l]);
      s_im[l] = -std::sin(two_pi * f[l]);
    }
    const float64x2_t step_re = vld1q_f64(s_re);
    const float64x2_t step_im = vld1q_f64(s_im);
    float64x2_t acc_re = vdupq_n_f64(0.0);
    float64x2_t acc_im = vdupq_n_f64(0.0);
    for (std::size_t start = 0; start < n; start += kZoomResyncBlock) {
      for (int l = 0; l < 2; ++l) {
        const double cycles = f[l] * static_cast<double>(start);
        const double frac = cycles - std::floor(cycles);
        p_re[l] = std::cos(two_pi * frac);
        p_im[l] = -std::sin(two_pi * frac);
      }
      float64x2_t ph_re = vld1q_f64(p_re);
      float64x2_t ph_im = vld1q_f64(p_im);
      const std::size_t stop = std::min(n, start + kZoomResyncBlock);
      for (std::size_t i = start; i < stop; ++i) {
        const float64x2_t xv = vdupq_n_f64(x[i]);
        acc_re = vfmaq_f64(acc_re, xv, ph_re);
        acc_im = vfmaq_f64(acc_im, xv, ph_im);
        const float64x2_t nr = vfmsq_f64(vmulq_f64(ph_re, step_re), ph_im, step_im);
        const float64x2_t ni = vfmaq_f64(vmulq_f64(ph_re, step_im), ph_im, step_re);
        ph_re = nr;
        ph_im = ni;
      }
    }
    out[k] = {vgetq_lane_f64(acc_re, 0), vgetq_lane_f64(acc_im, 0)};
    out[k + 1] = {vgetq_lane_f64(acc_re, 1), vgetq_lane_f64(acc_im, 1)};
  }
  if (k < m) scalar_table.zoom_dft(x, n, f0 + static_cast<double>(k) * df, df, out + k, m - k);
}

// Two lanes at the given pointers.
inline std::size_t propagate2(const Propagator2& u, double* g_re, double* g_im, double* e_re,
                              double* e_im, const double* thresholds, double* norms) {
  const float64x2_t a_re = vdupq_n_f64(u.u00.real()), a_im = vdupq_n_f64(u.u00.imag());
  const float64x2_t b_re = vdupq_n_f64(u.u01.real()), b_im = vdupq_n_f64(u.u01.imag());
  const float64x2_t c_re = vdupq_n_f64(u.u10.real()), c_im = vdupq_n_f64(u.u10.imag());
  const float64x2_t d_re = vdupq_n_f64(u.u11.real()), d_im = vdupq_n_f64(u.u11.imag());
  const float64x2_t gr = vld1q_f64(g_re), gi = vld1q_f64(g_im);
  const float64x2_t er = vld1q_f64(e_re), ei = vld1q_f64(e_im);
  float64x2_t ngr = vmulq_f64(a_re, gr);
  ngr = vfmsq_f64(ngr, a_im, gi);
  ngr = vfmaq_f64(ngr, b_re, er);
  ngr = vfmsq_f64(ngr, b_im, ei);
  float64x2_t ngi = vmulq_f64(a_re, gi);
  ngi = vfmaq_f64(ngi, a_im, gr);
  ngi = vfmaq_f64(ngi, b_re, ei);
  ngi = vfmaq_f64(ngi, b_im, er);
  float64x2_t ner = vmulq_f64(c_re, gr);
  ner = vfmsq_f64(ner, c_im, gi);
  ner = vfmaq_f64(ner, d_re, er);
  ner = vfmsq_f64(ner, d_im, ei);
  float64x2_t nei = vmulq_f64(c_re, gi);
  nei = vfmaq_f64(nei, c_im, gr);
  nei = vfmaq_f64(nei, d_re, ei);
  nei = vfmaq_f64(nei, d_im, er);
  vst1q_f64(g_re, ngr);
  vst1q_f64(g_im, ngi);
  vst1q_f64(e_re, ner);
  vst1q_f64(e_im, nei);
  float64x2_t nrm = vmulq_f64(ngr, ngr);
  nrm = vfmaq_f64(nrm, ngi, ngi);
  nrm = vfmaq_f64(nrm, ner, ner);
  nrm = vfmaq_f64(nrm, nei, nei);
  vst1q_f64(norms, nrm);
  const uint64x2_t below = vcltq_f64(nrm, vld1q_f64(thresholds));
  return (vgetq_lane_u64(below, 0) ? 1 : 0) + (vgetq_lane_u64(below, 1) ? 1 : 0);
}

std::size_t propagate_lanes_neon(const Propagator2& u, double* g_re, double* g_im,
                                 double* e_re, double* e_im, const double* thresholds,
                                 double* norms, std::size_t lanes) {
  std::size_t crossed = 0;
  std::size_t i = 0;
  for (; i + 2 <= lanes; i += 2) {
    crossed += propagate2(u, g_re + i, g_im + i, e_re + i, e_im + i, thresholds + i, norms + i);
  }
  if (i < lanes) {
    // Odd lane through the same FMA sequence, padded.
    double gr[2] = {g_re[i], 0.0}, gi[2] = {g_im[i], 0.0}, er[2] = {e_re[i], 0.0};
    double ei[2] = {e_im[i], 0.0}, th[2] = {thresholds[i], 0.0}, nr[2];
    crossed += propagate2(u, gr, gi, er, ei, th, nr);
    g_re[i] = gr[0];
    g_im[i] = gi[0];
    e_re[i] = er[0];
    e_im[i] = ei[0];
    norms[i] = nr[0];
  }
  return crossed;
}

}  // namespace

const KernelTable neon_table{dot_neon, norm_sq_neon, zoom_dft_neon, propagate_lanes_neon};

}  // namespace heitler::simd::detail
