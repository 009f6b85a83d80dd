#include "heitler/simd/kernels.hpp"

#include <cmath>
#include <numbers>

namespace heitler::simd::detail {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void norm_sq_scalar(const std::complex<double>* in, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double re = in[i].real(), im = in[i].imag();
    out[i] = re * re + im * im;
  }
}

void zoom_dft_scalar(const double* x, std::size_t n, double f0, double df,
                     std::complex<double>* out, std::size_t m) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t k = 0; k < m; ++k) {
    const double f = f0 + static_cast<double>(k) * df;
    const double step_re = std::cos(two_pi * f), step_im = -std::sin(two_pi * f);
    double acc_re = 0.0, acc_im = 0.0;
    for (std::size_t start = 0; start < n; start += kZoomResyncBlock) {
      // Phase reduced to one cycle before the trig call keeps the resync exact.
      const double cycles = f * static_cast<double>(start);
      const double frac = cycles - std::floor(cycles);
      double ph_re = std::cos(two_pi * frac), ph_im = -std::sin(two_pi * frac);
      const std::size_t stop = std::min(n, start + kZoomResyncBlock);
      for (std::size_t i = start; i < stop; ++i) {
        acc_re += x[i] * ph_re;
        acc_im += x[i] * ph_im;
        const double nr = ph_re * step_re - ph_im * step_im;
        const double ni = ph_re * step_im + ph_im * step_re;
        ph_re = nr;
        ph_im = ni;
      }
    }
    out[k] = {acc_re, acc_im};
  }
}

std::size_t propagate_lanes_scalar(const Propagator2& u, double* g_re, double* g_im,
                                   double* e_re, double* e_im, const double* thresholds,
                                   double* norms, std::size_t lanes) {
  const double a_re = u.u00.real(), a_im = u.u00.imag();
  const double b_re = u.u01.real(), b_im = u.u01.imag();
  const double c_re = u.u10.real(), c_im = u.u10.imag();
  const double d_re = u.u11.real(), d_im = u.u11.imag();
  std::size_t crossed = 0;
  for (std::size_t i = 0; i < lanes; ++i) {
    const double gr = g_re[i], gi = g_im[i], er = e_re[i], ei = e_im[i];
    const double ngr = a_re * gr - a_im * gi + b_re * er - b_im * ei;
    const double ngi = a_re * gi + a_im * gr + b_re * ei + b_im * er;
    const double ner = c_re * gr - c_im * gi + d_re * er - d_im * ei;
    const double nei = c_re * gi + c_im * gr + d_re * ei + d_im * er;
    g_re[i] = ngr;
    g_im[i] = ngi;
    e_re[i] = ner;
    e_im[i] = nei;
    const double nrm = ngr * ngr + ngi * ngi + ner * ner + nei * nei;
    norms[i] = nrm;
    crossed += nrm < thresholds[i] ? 1 : 0;
  }
  return crossed;
}

}  // namespace

const KernelTable scalar_table{dot_scalar, norm_sq_scalar, zoom_dft_scalar,
                               propagate_lanes_scalar};

}  // namespace heitler::simd::detail
