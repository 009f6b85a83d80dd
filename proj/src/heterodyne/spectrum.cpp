#include "heitler/heterodyne/spectrum.hpp"

#include <algorithm>
#include <cmath>

#include "heitler/common.hpp"
#include "heitler/fft.hpp"
#include "heitler/simd/kernels.hpp"

namespace heitler {

namespace {

std::vector<double> window_weights(Window w, std::size_t n) {
  std::vector<double> out(n, 1.0);
  if (w == Window::hann && n > 1) {
    // Periodic Hann.
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = 0.5 * (1.0 - std::cos(kTwoPi * static_cast<double>(i) / static_cast<double>(n)));
    }
  }
  return out;
}

}  // namespace

Window window_from_name(const std::string& name) {
  if (name == "rectangular") return Window::rectangular;
  if (name == "hann") return Window::hann;
  throw ValidationError("unknown window '" + name + "' (expected rectangular or hann)");
}

const char* window_name(Window w) { return w == Window::hann ? "hann" : "rectangular"; }

double resolution_bandwidth(Window w, double acquisition_time) {
  return (w == Window::hann ? 1.4405825801 : 0.8858929642) / acquisition_time;
}

std::size_t PowerSpectrum::peak_index() const {
  return static_cast<std::size_t>(std::max_element(power.begin(), power.end()) - power.begin());
}

PowerSpectrum power_spectrum(const BeatTrace& trace, Window window) {
  const std::size_t n = trace.samples.size();
  if (n < 2) throw PreconditionError("power_spectrum: trace needs at least 2 samples");
  const std::vector<double> w = window_weights(window, n);
  std::vector<double> xw(n);
  for (std::size_t i = 0; i < n; ++i) xw[i] = trace.samples[i] * w[i];
  const double w2 = simd::dot(w, w);
  const std::vector<cplx> x = fft::rdft(xw);

  PowerSpectrum out;
  out.window = window;
  out.bin = trace.sample_rate / static_cast<double>(n);
  out.resolution_bandwidth = resolution_bandwidth(window, static_cast<double>(n) / trace.sample_rate);
  out.freq_hz.resize(x.size());
  out.power.resize(x.size());
  simd::norm_sq(x, out.power);
  const double scale = 1.0 / (trace.sample_rate * w2);
  for (std::size_t k = 0; k < x.size(); ++k) {
    out.freq_hz[k] = static_cast<double>(k) * out.bin;
    const bool edge = k == 0 || (n % 2 == 0 && k == n / 2);
    out.power[k] *= (edge ? 1.0 : 2.0) * scale;
  }
  return out;
}

PowerSpectrum zoom_spectrum(const BeatTrace& trace, Window window, double f_center,
                            double half_span, int oversample) {
  const std::size_t n = trace.samples.size();
  if (n < 2) throw PreconditionError("zoom_spectrum: trace needs at least 2 samples");
  if (oversample < 1) throw PreconditionError("zoom_spectrum: oversample must be >= 1");
  const double fs = trace.sample_rate;
  const double T = static_cast<double>(n) / fs;
  const double df = 1.0 / (static_cast<double>(oversample) * T);
  const auto m = static_cast<std::size_t>(std::ceil(half_span / df));
  const double f0 = f_center - static_cast<double>(m) * df;
  const std::size_t count = 2 * m + 1;

  const std::vector<double> w = window_weights(window, n);
  std::vector<double> xw(n);
  for (std::size_t i = 0; i < n; ++i) xw[i] = trace.samples[i] * w[i];
  const double w2 = simd::dot(w, w);
  std::vector<cplx> x(count);
  simd::zoom_dft(xw, f0 / fs, df / fs, x);

  PowerSpectrum out;
  out.window = window;
  out.bin = df;
  out.resolution_bandwidth = resolution_bandwidth(window, T);
  out.freq_hz.resize(count);
  out.power.resize(count);
  simd::norm_sq(x, out.power);
  const double scale = 2.0 / (fs * w2);
  for (std::size_t k = 0; k < count; ++k) {
    out.freq_hz[k] = f0 + static_cast<double>(k) * df;
    out.power[k] *= scale;
  }
  return out;
}

}  // namespace heitler
