#include "heitler/photon/correlate.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "heitler/common.hpp"

namespace heitler {

namespace {

void check_sorted(std::span<const PhotonRecord> s, const char* name) {
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i].timestamp_ps < s[i - 1].timestamp_ps) {
      throw PreconditionError(
          fmt::format("correlate_g2: stream {} not time-ordered at record {}", name, i));
    }
  }
}

}  // namespace

CoincidenceHistogram correlate_g2(std::span<const PhotonRecord> a,
                                  std::span<const PhotonRecord> b, double bin_width,
                                  double window, double duration, double period) {
  if (a.empty() || b.empty()) throw PreconditionError("correlate_g2: empty photon stream");
  if (!(bin_width > 0.0)) throw PreconditionError("correlate_g2: bin_width must be > 0");
  if (!(window >= bin_width)) throw PreconditionError("correlate_g2: window shorter than a bin");
  if (period > 0.0 && window < 2.0 * period) {
    throw PreconditionError(fmt::format(
        "correlate_g2: window {:.6g} s must cover two pulse periods ({:.6g} s)", window,
        2.0 * period));
  }
  check_sorted(a, "a");
  check_sorted(b, "b");

  const auto half = static_cast<long long>(std::llround(window / bin_width));
  const std::size_t nbins = static_cast<std::size_t>(2 * half + 1);
  const double w_ps = bin_width * 1e12;
  const double reach = (static_cast<double>(half) + 0.5) * w_ps;
  const auto reach_ps = static_cast<std::int64_t>(std::floor(reach));

  CoincidenceHistogram h;
  h.bin_width = bin_width;
  h.tau.resize(nbins);
  for (std::size_t i = 0; i < nbins; ++i) {
    h.tau[i] = static_cast<double>(static_cast<long long>(i) - half) * bin_width;
  }
  std::vector<std::uint64_t> counts(nbins, 0);
  std::size_t lo = 0;
  for (const PhotonRecord& ra : a) {
    const std::int64_t t = ra.timestamp_ps;
    while (lo < b.size() && b[lo].timestamp_ps < t - reach_ps) ++lo;
    for (std::size_t j = lo; j < b.size() && b[j].timestamp_ps <= t + reach_ps; ++j) {
      const double d = static_cast<double>(b[j].timestamp_ps - t);
      const long long k = std::llround(d / w_ps);
      if (k >= -half && k <= half) ++counts[static_cast<std::size_t>(k + half)];
    }
  }

  if (duration <= 0.0) {
    const std::int64_t first = std::min(a.front().timestamp_ps, b.front().timestamp_ps);
    const std::int64_t last = std::max(a.back().timestamp_ps, b.back().timestamp_ps);
    duration = static_cast<double>(last - first) * 1e-12;
  }
  if (!(duration > 0.0)) throw PreconditionError("correlate_g2: streams span zero time");
  h.duration = duration;
  h.n_a = a.size();
  h.n_b = b.size();
  h.expectation = static_cast<double>(a.size()) * static_cast<double>(b.size()) * bin_width /
                  duration;
  h.counts.assign(counts.begin(), counts.end());
  h.normalized.resize(nbins);
  for (std::size_t i = 0; i < nbins; ++i) h.normalized[i] = h.counts[i] / h.expectation;
  return h;
}

Area window_area(const CoincidenceHistogram& h, double center, double period) {
  Area out;
  const double lo = center - 0.5 * period, hi = center + 0.5 * period;
  // A bin centred exactly on a boundary goes to the upper window, regardless
  // of rounding in the centres.
  const double eps = 1e-6 * h.bin_width;
  for (std::size_t i = 0; i < h.tau.size(); ++i) {
    if (h.tau[i] >= lo - eps && h.tau[i] < hi - eps) out.value += h.counts[i];
  }
  out.sigma = std::sqrt(out.value);
  return out;
}

PeakAreas pulsed_peak_areas(const CoincidenceHistogram& h, double period, int n_side) {
  if (!(period > 0.0) || n_side < 1) {
    throw PreconditionError("pulsed_peak_areas: need period > 0 and at least one side peak");
  }
  const double reach = h.tau.back() + 0.5 * h.bin_width;
  if ((static_cast<double>(n_side) + 0.5) * period > reach * (1.0 + 1e-9)) {
    throw PreconditionError(
        fmt::format("pulsed_peak_areas: histogram window too short for {} side peaks", n_side));
  }
  PeakAreas out;
  const Area c = window_area(h, 0.0, period);
  out.central = c.value;
  out.central_sigma = c.sigma;
  double sum = 0.0;
  for (int k = -n_side; k <= n_side; ++k) {
    if (k == 0) continue;
    const double v = window_area(h, static_cast<double>(k) * period, period).value;
    out.side.push_back(v);
    sum += v;
  }
  const double n = static_cast<double>(out.side.size());
  out.side_mean = sum / n;
  out.side_mean_sigma = std::sqrt(sum) / n;
  if (out.side_mean > 0.0) {
    out.ratio = out.central / out.side_mean;
    const double rc = out.central > 0.0 ? out.central_sigma / out.central : 0.0;
    const double rs = out.side_mean_sigma / out.side_mean;
    out.ratio_sigma = out.ratio > 0.0 ? out.ratio * std::hypot(rc, rs)
                                      : 1.0 / out.side_mean;  // one count upper scale
  }
  return out;
}

}  // namespace heitler
