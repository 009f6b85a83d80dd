#include "heitler/hom/interferometer.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <random>

#include "heitler/common.hpp"

namespace heitler {

namespace {

constexpr double kSumTol = 1e-9;
constexpr std::int64_t kSlotsPerBlock = 1 << 16;

std::mt19937_64 block_rng(std::uint64_t seed, std::uint64_t stage, std::int64_t block) {
  const auto b = static_cast<std::uint64_t>(block);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stage), static_cast<std::uint32_t>(b),
                    static_cast<std::uint32_t>(b >> 32)};
  return std::mt19937_64(seq);
}

bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }

struct Arrival {
  std::int64_t slot;
  std::int64_t time_ps;  // at BS2
  std::uint8_t port;     // 0 short arm, 1 long arm
};

}  // namespace

void InterferometerConfig::validate() const {
  if (!in_unit(t1) || !in_unit(r1) || std::abs(t1 + r1 - 1.0) > kSumTol) {
    throw PreconditionError(fmt::format("interferometer: t1 + r1 = {:.12g}, expected 1", t1 + r1));
  }
  if (!in_unit(t2) || !in_unit(r2) || std::abs(t2 + r2 - 1.0) > kSumTol) {
    throw PreconditionError(fmt::format("interferometer: t2 + r2 = {:.12g}, expected 1", t2 + r2));
  }
  if (!(delay > 0.0)) throw PreconditionError("interferometer: delay must be > 0");
  if (!in_unit(pol_overlap_parallel) || !in_unit(pol_overlap_orthogonal) ||
      !in_unit(mode_overlap)) {
    throw PreconditionError("interferometer: overlaps must lie in [0, 1]");
  }
}

InterferometerConfig InterferometerConfig::from_ratio(double t1_over_r1, double t2, double delay,
                                                      double p_pa, double p_or) {
  if (!(t1_over_r1 > 0.0)) throw PreconditionError("interferometer: t1/r1 must be > 0");
  InterferometerConfig c;
  c.t1 = t1_over_r1 / (1.0 + t1_over_r1);
  c.r1 = 1.0 - c.t1;
  c.t2 = t2;
  c.r2 = 1.0 - t2;
  c.delay = delay;
  c.pol_overlap_parallel = p_pa;
  c.pol_overlap_orthogonal = p_or;
  c.validate();
  return c;
}

Polarization polarization_from_name(const std::string& name) {
  if (name == "parallel") return Polarization::parallel;
  if (name == "orthogonal") return Polarization::orthogonal;
  throw ValidationError("unknown polarization '" + name + "' (expected parallel or orthogonal)");
}

const char* polarization_name(Polarization p) {
  return p == Polarization::parallel ? "parallel" : "orthogonal";
}

double indistinguishability(const InterferometerConfig& config, Polarization pol) {
  const double p = pol == Polarization::parallel ? config.pol_overlap_parallel
                                                 : config.pol_overlap_orthogonal;
  return p * config.mode_overlap;
}

CorrelationFunction hom_model(const CorrelationFunction& g2, double t1, double r1, double eta) {
  if (!in_unit(eta)) throw PreconditionError(fmt::format("hom_model: eta = {} outside [0, 1]", eta));
  if (!in_unit(t1) || !in_unit(r1) || std::abs(t1 + r1 - 1.0) > kSumTol) {
    throw PreconditionError("hom_model: t1 + r1 must equal 1");
  }
  CorrelationFunction out = g2;
  const double same = t1 * t1 + r1 * r1;
  const double cross = 2.0 * r1 * t1;
  for (cplx& v : out.values) v = same * v + cross * (1.0 - eta + eta * v);
  return out;
}

void HomDetection::validate(const InterferometerConfig& config) const {
  if (!(period > 0.0)) throw PreconditionError("hom: period must be > 0");
  if (!(jitter_fwhm >= 0.0)) throw PreconditionError("hom: jitter must be >= 0");
  if (!(bin_width > 0.0)) throw PreconditionError("hom: bin_width must be > 0");
  if (!(duration >= 100.0 * config.delay)) {
    throw PreconditionError(fmt::format(
        "hom: stream of {:.4g} s too short, need at least 100 interferometer delays ({:.4g} s)",
        duration, 100.0 * config.delay));
  }
}

CoincidenceHistogram simulate_hom(std::span<const PhotonRecord> records,
                                  const InterferometerConfig& config, Polarization pol,
                                  std::uint64_t seed, const HomDetection& detection) {
  config.validate();
  detection.validate(config);
  const double eta = indistinguishability(config, pol);
  const double period_ps = detection.period * 1e12;
  const auto delay_ps = static_cast<std::int64_t>(std::llround(config.delay * 1e12));
  const std::int64_t slot_shift = std::llround(config.delay / detection.period);

  // BS1. Source slots are processed in fixed blocks so each block has its
  // own generator.
  std::vector<Arrival> arrivals;
  arrivals.reserve(records.size());
  {
    std::bernoulli_distribution long_arm(config.r1);
    std::int64_t block = std::numeric_limits<std::int64_t>::min();
    std::mt19937_64 rng;
    for (const PhotonRecord& r : records) {
      const auto slot = static_cast<std::int64_t>(
          std::floor(static_cast<double>(r.timestamp_ps) / period_ps));
      const std::int64_t b = slot >= 0 ? slot / kSlotsPerBlock : (slot + 1) / kSlotsPerBlock - 1;
      if (b != block) {
        block = b;
        rng = block_rng(seed, 1, b);
      }
      const bool l = long_arm(rng);
      arrivals.push_back({slot + (l ? slot_shift : 0), r.timestamp_ps + (l ? delay_ps : 0),
                          static_cast<std::uint8_t>(l ? 1 : 0)});
    }
  }
  std::stable_sort(arrivals.begin(), arrivals.end(),
                   [](const Arrival& a, const Arrival& b) { return a.slot < b.slot; });

  // BS2 and detection.
  const double sigma_ps = detection.jitter_fwhm * 1e12 / kFwhmPerSigma;
  const double p_split_pair = (config.t2 - config.r2) * (config.t2 - config.r2);
  PhotonStream c, d;
  c.reserve(arrivals.size());
  d.reserve(arrivals.size());
  std::normal_distribution<double> jitter(0.0, 1.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::mt19937_64 rng;
  std::int64_t block = std::numeric_limits<std::int64_t>::min();
  auto emit = [&](const Arrival& a, bool to_c) {
    const double t = static_cast<double>(a.time_ps) + (sigma_ps > 0.0 ? sigma_ps * jitter(rng) : 0.0);
    const std::int64_t ps = std::llround(t);
    if (ps < 0) return;
    if (to_c) {
      c.push_back({ps, 0});
    } else {
      d.push_back({ps, 1});
    }
  };
  for (std::size_t i = 0; i < arrivals.size();) {
    std::size_t j = i + 1;
    while (j < arrivals.size() && arrivals[j].slot == arrivals[i].slot) ++j;
    const std::int64_t slot = arrivals[i].slot;
    const std::int64_t b = slot >= 0 ? slot / kSlotsPerBlock : (slot + 1) / kSlotsPerBlock - 1;
    if (b != block) {
      block = b;
      rng = block_rng(seed, 2, b);
    }
    if (j - i == 2 && arrivals[i].port != arrivals[i + 1].port && u01(rng) < eta) {
      const double u = u01(rng);
      if (u < p_split_pair) {
        // One photon per output; which one goes where is irrelevant.
        emit(arrivals[i], true);
        emit(arrivals[i + 1], false);
      } else {
        const bool to_c = u < p_split_pair + 0.5 * (1.0 - p_split_pair);
        emit(arrivals[i], to_c);
        emit(arrivals[i + 1], to_c);
      }
    } else {
      for (std::size_t k = i; k < j; ++k) {
        // Input 0 transmits into c, input 1 transmits into d.
        const bool transmitted = u01(rng) < config.t2;
        emit(arrivals[k], (arrivals[k].port == 0) == transmitted);
      }
    }
    i = j;
  }
  auto by_time = [](const PhotonRecord& a, const PhotonRecord& b) {
    return a.timestamp_ps < b.timestamp_ps;
  };
  std::stable_sort(c.begin(), c.end(), by_time);
  std::stable_sort(d.begin(), d.end(), by_time);

  if (c.empty() || d.empty()) {
    // Too few photons for any coincidence: an empty histogram on the same grid.
    const auto half = static_cast<long long>(std::llround(detection.window / detection.bin_width));
    CoincidenceHistogram h;
    h.bin_width = detection.bin_width;
    h.duration = detection.duration;
    h.n_a = c.size();
    h.n_b = d.size();
    for (long long k = -half; k <= half; ++k) h.tau.push_back(static_cast<double>(k) * h.bin_width);
    h.counts.assign(h.tau.size(), 0.0);
    h.normalized.assign(h.tau.size(), 0.0);
    return h;
  }
  return correlate_g2(c, d, detection.bin_width, detection.window, detection.duration,
                      detection.period);
}

DifferenceCurve normalized_difference(const CoincidenceHistogram& g_hom,
                                      const CoincidenceHistogram& g2) {
  const std::size_t n = g_hom.tau.size();
  bool same = n == g2.tau.size() &&
              std::abs(g_hom.bin_width - g2.bin_width) <= 1e-9 * g2.bin_width;
  for (std::size_t i = 0; same && i < n; ++i) {
    same = std::abs(g_hom.tau[i] - g2.tau[i]) <= 1e-6 * g2.bin_width;
  }
  if (!same) {
    throw PreconditionError(fmt::format(
        "normalized_difference: bin grids differ ({} bins of {:.4g} s vs {} bins of {:.4g} s)", n,
        g_hom.bin_width, g2.tau.size(), g2.bin_width));
  }
  DifferenceCurve out;
  out.tau = g_hom.tau;
  out.value.resize(n);
  out.sigma.resize(n);
  out.masked.resize(n);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < n; ++i) {
    out.masked[i] = !(g2.normalized[i] >= 0.05);
    if (out.masked[i]) {
      out.value[i] = out.sigma[i] = nan;
      continue;
    }
    const double q = g_hom.normalized[i] / g2.normalized[i];
    out.value[i] = q - 1.0;
    // An empty g_hom bin still carries the one-count scale.
    const double rel_h = 1.0 / std::max(1.0, g_hom.counts[i]);
    out.sigma[i] = std::max(q, 1.0 / (g_hom.expectation * g2.normalized[i])) *
                   std::sqrt(rel_h + 1.0 / g2.counts[i]);
  }
  return out;
}

Area difference_area(const DifferenceCurve& curve, double period) {
  if (curve.tau.size() < 2) throw PreconditionError("difference_area: curve too short");
  const double w = curve.tau[1] - curve.tau[0];
  const double lo = -0.5 * period, hi = 0.5 * period, eps = 1e-6 * w;
  Area out;
  double var = 0.0;
  for (std::size_t i = 0; i < curve.tau.size(); ++i) {
    if (curve.masked[i] || curve.tau[i] < lo - eps || curve.tau[i] >= hi - eps) continue;
    out.value += curve.value[i];
    var += curve.sigma[i] * curve.sigma[i];
  }
  out.sigma = std::sqrt(var);
  return out;
}

Area central_area(const CoincidenceHistogram& h, double period) {
  if (!(h.expectation > 0.0)) throw PreconditionError("central_area: histogram has no normalization");
  const Area raw = window_area(h, 0.0, period);
  return {raw.value / h.expectation, raw.sigma / h.expectation};
}

Contrast contrast(const Area& a_parallel, const Area& a_orthogonal) {
  if (!(a_orthogonal.value > 0.0)) {
    throw PreconditionError("contrast: orthogonal area must be > 0");
  }
  const double q = a_parallel.value / a_orthogonal.value;
  Contrast out;
  out.value = 1.0 - q;
  out.sigma = std::hypot(a_parallel.sigma / a_orthogonal.value,
                         q * a_orthogonal.sigma / a_orthogonal.value);
  return out;
}

CorrectedContrast corrected_contrast(const Contrast& raw, double p_pa, double p_or, double t1,
                                     double r1, double t2, double r2, CorrectionMode mode,
                                     double p_pa_sigma) {
  if (!in_unit(p_pa) || !in_unit(p_or)) {
    throw PreconditionError("corrected_contrast: overlaps must lie in [0, 1]");
  }
  if (!(p_pa > p_or)) {
    throw PreconditionError(fmt::format(
        "corrected_contrast: p_pa = {} not above p_or = {}, no polarization discrimination", p_pa,
        p_or));
  }
  if (!in_unit(t1) || !in_unit(r1) || std::abs(t1 + r1 - 1.0) > kSumTol || t1 * r1 == 0.0) {
    throw PreconditionError("corrected_contrast: need 0 < t1, r1 with t1 + r1 = 1");
  }
  if (!in_unit(t2) || !in_unit(r2) || std::abs(t2 + r2 - 1.0) > kSumTol) {
    throw PreconditionError("corrected_contrast: t2 + r2 must equal 1");
  }
  if (!(p_pa_sigma >= 0.0)) throw PreconditionError("corrected_contrast: sigma must be >= 0");

  CorrectedContrast out;
  out.polarization_factor = 1.0 / p_pa;
  out.value = raw.value / p_pa;
  if (mode == CorrectionMode::full) {
    out.beamsplitter_factor = (t1 * t1 + r1 * r1) / (2.0 * t1 * r1);
    out.value *= out.beamsplitter_factor;
    out.approximate = true;
  }
  const double rel_raw = raw.value != 0.0 ? raw.sigma / raw.value : 0.0;
  out.sigma = std::abs(out.value) * std::hypot(rel_raw, p_pa_sigma / p_pa);
  if (raw.value == 0.0) out.sigma = raw.sigma * out.polarization_factor * out.beamsplitter_factor;
  return out;
}

}  // namespace heitler
