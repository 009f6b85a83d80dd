#include "heitler/heterodyne/linefit.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numbers>
#include <Eigen/LU>
#include <unsupported/Eigen/LevenbergMarquardt>

#include "heitler/common.hpp"

namespace heitler {

namespace {

// Residuals of A exp(-x^2 / (2 s^2)) + B over x = f - f_ref; p = (A, mu, s, B).
struct GaussianResidual : Eigen::DenseFunctor<double> {
  GaussianResidual(const Eigen::VectorXd& x, const Eigen::VectorXd& y)
      : DenseFunctor<double>(4, static_cast<int>(x.size())), x_(x), y_(y) {}

  int operator()(const Eigen::VectorXd& p, Eigen::VectorXd& r) const {
    for (Eigen::Index i = 0; i < x_.size(); ++i) {
      const double u = (x_[i] - p[1]) / p[2];
      r[i] = p[0] * std::exp(-0.5 * u * u) + p[3] - y_[i];
    }
    return 0;
  }

  int df(const Eigen::VectorXd& p, Eigen::MatrixXd& j) const {
    for (Eigen::Index i = 0; i < x_.size(); ++i) {
      const double u = (x_[i] - p[1]) / p[2];
      const double g = std::exp(-0.5 * u * u);
      j(i, 0) = g;
      j(i, 1) = p[0] * g * u / p[2];
      j(i, 2) = p[0] * g * u * u / p[2];
      j(i, 3) = 1.0;
    }
    return 0;
  }

  Eigen::VectorXd x_, y_;
};

}  // namespace

LineFit fit_gaussian_line(const PowerSpectrum& spectrum, double around) {
  const std::size_t n = spectrum.freq_hz.size();
  const double rbw = spectrum.resolution_bandwidth;
  if (n < 8 || !(rbw > 0.0)) throw PreconditionError("fit_gaussian_line: spectrum too short");
  const double reach = 10.0 * rbw;
  auto range = [&](double c) {
    const auto lo = std::lower_bound(spectrum.freq_hz.begin(), spectrum.freq_hz.end(), c - reach);
    const auto hi = std::upper_bound(spectrum.freq_hz.begin(), spectrum.freq_hz.end(), c + reach);
    return std::pair<std::size_t, std::size_t>(lo - spectrum.freq_hz.begin(),
                                               hi - spectrum.freq_hz.begin());
  };
  auto [s0, s1] = range(around);
  if (s1 <= s0) {
    throw PreconditionError(fmt::format("fit_gaussian_line: no data near {:.6g} Hz", around));
  }
  std::size_t peak = s0;
  for (std::size_t i = s0; i < s1; ++i) {
    if (spectrum.power[i] > spectrum.power[peak]) peak = i;
  }
  const auto [a, b] = range(spectrum.freq_hz[peak]);
  const std::size_t m = b - a;
  if (m < 6) throw PreconditionError("fit_gaussian_line: fewer than 6 points in the fit window");

  std::vector<double> win(spectrum.power.begin() + static_cast<std::ptrdiff_t>(a),
                          spectrum.power.begin() + static_cast<std::ptrdiff_t>(b));
  std::vector<double> sorted = win;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(m / 2), sorted.end());
  const double median = sorted[m / 2];
  const double top = spectrum.power[peak];
  if (!(top > 3.0 * median) || !(top > 0.0)) {
    throw PreconditionError(fmt::format(
        "fit_gaussian_line: no identifiable peak near {:.6g} Hz (peak/median = {:.3g})", around,
        median > 0.0 ? top / median : 0.0));
  }

  const double f_ref = spectrum.freq_hz[peak];
  Eigen::VectorXd x(static_cast<Eigen::Index>(m)), y(static_cast<Eigen::Index>(m));
  double lo_val = top;
  for (std::size_t i = 0; i < m; ++i) {
    x[static_cast<Eigen::Index>(i)] = spectrum.freq_hz[a + i] - f_ref;
    y[static_cast<Eigen::Index>(i)] = win[i];
    lo_val = std::min(lo_val, win[i]);
  }
  // Half-maximum crossings for the starting width.
  const double half = 0.5 * (top + lo_val);
  std::size_t l = peak, r = peak;
  while (l > a && spectrum.power[l] > half) --l;
  while (r + 1 < b && spectrum.power[r] > half) ++r;
  const double width0 = std::max(spectrum.freq_hz[r] - spectrum.freq_hz[l], spectrum.bin);

  Eigen::VectorXd p(4);
  p << top - lo_val, 0.0, width0 / kFwhmPerSigma, lo_val;
  GaussianResidual fn(x, y);
  Eigen::LevenbergMarquardt<GaussianResidual> lm(fn);
  lm.setMaxfev(2000);
  lm.minimize(p);

  Eigen::VectorXd res(static_cast<Eigen::Index>(m));
  fn(p, res);
  Eigen::MatrixXd jac(static_cast<Eigen::Index>(m), 4);
  fn.df(p, jac);
  const double dof = static_cast<double>(m) - 4.0;
  const double s2 = res.squaredNorm() / std::max(1.0, dof);
  const Eigen::MatrixXd cov = s2 * (jac.transpose() * jac).inverse();
  if (!std::isfinite(p[2]) || p[2] == 0.0 || !(p[0] > 0.0)) {
    throw PreconditionError("fit_gaussian_line: fit did not converge to a peak");
  }

  LineFit out;
  out.fwhm = kFwhmPerSigma * std::abs(p[2]);
  out.fwhm_sigma = kFwhmPerSigma * std::sqrt(std::max(0.0, cov(2, 2)));
  out.center = f_ref + p[1];
  out.center_sigma = std::sqrt(std::max(0.0, cov(1, 1)));
  out.amplitude = p[0];
  out.background = p[3];
  out.points = m;
  return out;
}

MutualCoherence mutual_coherence(double fwhm) {
  if (!(fwhm > 0.0)) throw PreconditionError("mutual_coherence: fwhm must be > 0");
  const double tau = std::sqrt(2.0 * std::numbers::ln2 / std::numbers::pi) / fwhm;
  return {tau, kSpeedOfLight * tau};
}

HeterodyneAnalysis analyze_beat(const BeatTrace& trace, const HeterodyneConfig& config,
                                Window window) {
  const double T = static_cast<double>(trace.samples.size()) / trace.sample_rate;
  const double rbw = resolution_bandwidth(window, T);
  HeterodyneAnalysis out;
  out.spectrum = zoom_spectrum(trace, window, config.delta_nu, 20.0 * rbw);
  out.fit = fit_gaussian_line(out.spectrum, config.delta_nu);
  out.coherence = mutual_coherence(out.fit.fwhm);
  return out;
}

DiffusionCalibration calibrate_diffusion(const HeterodyneConfig& config,
                                         const PhaseNoiseModel& base, double target_fwhm,
                                         std::uint64_t seed, Window window, double tolerance) {
  auto fwhm_at = [&](double d) {
    PhaseNoiseModel noise = base;
    noise.random_walk_diffusion = d;
    return analyze_beat(beat_signal(config, noise, seed), config, window).fit.fwhm;
  };
  DiffusionCalibration out;
  const double floor_fwhm = fwhm_at(0.0);
  if (!(target_fwhm > floor_fwhm)) {
    throw PreconditionError(fmt::format(
        "calibrate_diffusion: target {:.4g} Hz below the noise-free width {:.4g} Hz",
        target_fwhm, floor_fwhm));
  }
  // The width of one realization is not monotonic in D, so scan upward in
  // factors of two and bisect in log D on the first crossing.
  double lo = 0.0, hi = 1e-2;
  double f_hi = fwhm_at(hi);
  while (f_hi < target_fwhm) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e3) {
      throw PreconditionError(fmt::format(
          "calibrate_diffusion: target {:.4g} Hz not reached for D <= 1e3 rad^2/s with seed {}",
          target_fwhm, seed));
    }
    f_hi = fwhm_at(hi);
  }
  if (lo == 0.0) lo = 0.5 * hi;
  double d = hi, f = f_hi;
  for (out.iterations = 0; out.iterations < 40; ++out.iterations) {
    if (std::abs(f - target_fwhm) <= tolerance) break;
    d = std::sqrt(lo * hi);
    f = fwhm_at(d);
    (f < target_fwhm ? lo : hi) = d;
  }
  out.diffusion = d;
  out.fwhm = f;
  return out;
}

}  // namespace heitler
