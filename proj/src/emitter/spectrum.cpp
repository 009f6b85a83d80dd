#include "heitler/emitter/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numeric>

#include "heitler/fft.hpp"
#include "heitler/simd/kernels.hpp"

namespace heitler {

double Spectrum::bin_width() const {
  if (freq_hz.size() < 2) return 0.0;
  return (freq_hz.back() - freq_hz.front()) / static_cast<double>(freq_hz.size() - 1);
}

double Spectrum::continuum() const {
  return std::accumulate(power.begin(), power.end(), 0.0) * bin_width();
}

std::size_t Spectrum::peak_index() const {
  return static_cast<std::size_t>(std::max_element(power.begin(), power.end()) - power.begin());
}

Spectrum emission_spectrum(const CorrelationFunction& g1) {
  if (g1.kind != CorrelationKind::first_order) {
    throw PreconditionError("emission_spectrum: needs a first-order correlation");
  }
  const std::size_t n = g1.tau.size();
  if (n < 16 || g1.values.size() != n) {
    throw PreconditionError("emission_spectrum: correlation needs at least 16 samples");
  }
  const double dtau = g1.tau[1] - g1.tau[0];
  if (std::abs(g1.tau[0]) > 1e-9 * dtau) {
    throw PreconditionError("emission_spectrum: tau grid must start at 0");
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (std::abs(g1.tau[i] - g1.tau[i - 1] - dtau) > 1e-6 * dtau) {
      throw PreconditionError("emission_spectrum: tau grid must be uniform");
    }
  }
  const double need = 20.0 / g1.decay_rate;
  if (!(g1.tau.back() >= need * (1.0 - 1e-9))) {
    throw PreconditionError(fmt::format(
        "emission_spectrum: tau_max = {:.6g} s too short; required tau_max >= {:.6g} s",
        g1.tau.back(), need));
  }

  const std::size_t tail = std::max<std::size_t>(1, n / 10);
  double plateau = 0.0;
  for (std::size_t i = n - tail; i < n; ++i) plateau += g1.values[i].real();
  plateau = std::max(0.0, plateau / static_cast<double>(tail));

  // Hermitian extension of g1 - plateau onto 2n - 2 points with a cosine
  // taper over the last tail samples.
  const std::size_t m = 2 * n - 2;
  std::vector<cplx> y(m);
  const std::size_t taper_start = n - tail;
  for (std::size_t k = 0; k < n; ++k) {
    double w = 1.0;
    if (k > taper_start) {
      const double x = static_cast<double>(k - taper_start) / static_cast<double>(n - 1 - taper_start);
      w = 0.5 * (1.0 + std::cos(std::numbers::pi * x));
    }
    const cplx c = w * (g1.values[k] - plateau);
    y[k] = c;
    if (k > 0 && k < n - 1) y[m - k] = std::conj(c);
  }
  const std::vector<cplx> f = fft::shift(fft::dft(y, fft::Sign::backward));

  Spectrum out;
  out.freq_hz = fft::shifted_frequencies(m, dtau);
  out.power.resize(m);
  for (std::size_t j = 0; j < m; ++j) out.power[j] = std::max(0.0, dtau * f[j].real());
  out.elastic_weight = plateau;
  out.elastic_freq_hz = 0.0;
  return out;
}

Spectrum apply_instrument_response(const Spectrum& spectrum, double resolution_fwhm_hz) {
  if (!(resolution_fwhm_hz > 0.0)) {
    throw PreconditionError("apply_instrument_response: resolution must be > 0");
  }
  const std::size_t n = spectrum.freq_hz.size();
  if (n < 2) throw PreconditionError("apply_instrument_response: spectrum too short");
  const double df = spectrum.bin_width();
  const double span = spectrum.freq_hz.back() - spectrum.freq_hz.front();
  if (resolution_fwhm_hz > span) {
    throw PreconditionError(fmt::format(
        "apply_instrument_response: resolution {:.6g} Hz exceeds the grid span {:.6g} Hz",
        resolution_fwhm_hz, span));
  }

  // Bin-integrated Lorentzian: mass landing d bins away.
  const double hw = 0.5 * resolution_fwhm_hz;
  auto mass = [&](double lo, double hi) {
    return (std::atan(hi * df / hw) - std::atan(lo * df / hw)) / std::numbers::pi;
  };
  std::vector<double> kk(2 * n - 1);
  for (std::size_t m = 0; m < kk.size(); ++m) {
    const double d = static_cast<double>(m) - static_cast<double>(n - 1);
    kk[m] = mass(d - 0.5, d + 0.5);
  }
  // Column j keeps only the mass that lands on the grid; rescale it so power
  // is conserved.
  auto column = [&](std::size_t j) {
    const double jd = static_cast<double>(j);
    return mass(-jd - 0.5, static_cast<double>(n - 1) - jd + 0.5);
  };
  std::vector<double> x(n);
  for (std::size_t j = 0; j < n; ++j) x[j] = spectrum.power[j] / column(j);
  if (spectrum.elastic_weight > 0.0) {
    const double pos = (spectrum.elastic_freq_hz - spectrum.freq_hz.front()) / df;
    const auto j0 = static_cast<std::size_t>(
        std::clamp(std::llround(pos), 0LL, static_cast<long long>(n - 1)));
    x[j0] += spectrum.elastic_weight / df / column(j0);
  }

  Spectrum out;
  out.freq_hz = spectrum.freq_hz;
  out.power.resize(n);
  const std::span<const double> xs(x);
  for (std::size_t i = 0; i < n; ++i) {
    out.power[i] = std::max(0.0, simd::dot(xs, std::span<const double>(kk).subspan(n - 1 - i, n)));
  }
  return out;
}

}  // namespace heitler
