#include <doctest.h>

#include <cmath>

#include "gen.hpp"
#include "heitler/common.hpp"
#include "heitler/emitter/bloch.hpp"
#include "heitler/hom/interferometer.hpp"

using namespace heitler;

namespace {

CorrelationFunction random_g2(gen::Gen& g, std::size_t n) {
  CorrelationFunction f;
  f.tau = linear_grid(-1e-8, 1e-8, n);
  for (std::size_t i = 0; i < n; ++i) f.values.emplace_back(g.uniform(0.0, 1.0), 0.0);
  return f;
}

// One photon in every pulse slot, at the start of the slot.
PhotonStream ideal_source(std::size_t slots, std::int64_t period_ps) {
  PhotonStream s;
  for (std::size_t k = 0; k < slots; ++k) s.push_back({static_cast<std::int64_t>(k) * period_ps, 0});
  return s;
}

}  // namespace

TEST_CASE("interferometer configuration") {
  const InterferometerConfig c = InterferometerConfig::from_ratio(1.3, 0.41, 3.33e-9, 0.97, 0.05);
  CHECK(c.t1 / c.r1 == doctest::Approx(1.3));
  CHECK(c.t1 + c.r1 == doctest::Approx(1.0));
  CHECK(c.r2 == doctest::Approx(0.59));
  CHECK(indistinguishability(c, Polarization::parallel) == 0.97);
  CHECK(indistinguishability(c, Polarization::orthogonal) == 0.05);
  InterferometerConfig m = c;
  m.mode_overlap = 0.5;
  CHECK(indistinguishability(m, Polarization::parallel) == doctest::Approx(0.485));
  CHECK(polarization_from_name("orthogonal") == Polarization::orthogonal);
  CHECK(std::string(polarization_name(Polarization::parallel)) == "parallel");
  CHECK_THROWS_AS(polarization_from_name("circular"), ValidationError);
  InterferometerConfig bad = c;
  bad.t2 = 0.6;
  CHECK_THROWS_AS(bad.validate(), PreconditionError);
  bad = c;
  bad.delay = 0.0;
  CHECK_THROWS_AS(bad.validate(), PreconditionError);
  CHECK_THROWS_AS(InterferometerConfig::from_ratio(-1.0, 0.5, 1e-9, 1, 0), PreconditionError);
}

TEST_CASE("hom_model at the eta extremes on a 1000-point grid") {
  for (int c = 0; c < 20; ++c) {
    gen::Gen g(1500 + c);
    const CorrelationFunction g2 = random_g2(g, 1000);
    const double t1 = g.uniform(0.05, 0.95), r1 = 1.0 - t1;
    const CorrelationFunction one = hom_model(g2, t1, r1, 1.0), zero = hom_model(g2, t1, r1, 0.0);
    CHECK(one.tau == g2.tau);
    for (std::size_t i = 0; i < 1000; ++i) {
      const double x = g2.values[i].real();
      CHECK(std::abs(one.values[i].real() - x) <= 1e-12);
      CHECK(std::abs(zero.values[i].real() - ((t1 * t1 + r1 * r1) * x + 2.0 * r1 * t1)) <= 1e-12);
    }
  }
}

TEST_CASE("hom_model bounds and monotonicity in eta") {
  for (int c = 0; c < 50; ++c) {
    gen::Gen g(1600 + c);
    const CorrelationFunction g2 = random_g2(g, 50);
    const double t1 = g.uniform(0.0, 1.0), r1 = 1.0 - t1;
    const double e1 = g.uniform(0.0, 1.0), e2 = g.uniform(0.0, 1.0);
    const auto lo = hom_model(g2, t1, r1, std::min(e1, e2));
    const auto hi = hom_model(g2, t1, r1, std::max(e1, e2));
    for (std::size_t i = 0; i < 50; ++i) {
      CHECK(lo.values[i].real() >= -1e-15);
      CHECK(lo.values[i].real() <= 1.0 + 1e-15);
      CHECK(hi.values[i].real() <= lo.values[i].real() + 1e-15);
    }
  }
  gen::Gen g(1);
  const CorrelationFunction g2 = random_g2(g, 5);
  CHECK_THROWS_AS(hom_model(g2, 0.5, 0.5, 1.5), PreconditionError);
  CHECK_THROWS_AS(hom_model(g2, 0.5, 0.6, 0.5), PreconditionError);
}

TEST_CASE("contrast is a pure ratio") {
  for (int c = 0; c < 50; ++c) {
    gen::Gen g(1700 + c);
    const Area pa{g.uniform(0.0, 10.0), g.uniform(0.0, 1.0)}, orth{g.uniform(1.0, 10.0), g.uniform(0.0, 1.0)};
    const double k = g.log_uniform(1e-3, 1e3);
    const Contrast a = contrast(pa, orth);
    const Contrast b = contrast({k * pa.value, k * pa.sigma}, {k * orth.value, k * orth.sigma});
    CHECK(a.value == doctest::Approx(1.0 - pa.value / orth.value).epsilon(1e-14));
    CHECK(b.value == doctest::Approx(a.value).epsilon(1e-12));
    CHECK(b.sigma == doctest::Approx(a.sigma).epsilon(1e-12));
  }
  CHECK_THROWS_AS(contrast({1.0, 0.1}, {0.0, 0.1}), PreconditionError);
}

TEST_CASE("corrected contrast") {
  const Contrast raw{0.926, 0.016};
  const double t1 = 1.3 / 2.3, r1 = 1.0 / 2.3;
  const CorrectedContrast pol =
      corrected_contrast(raw, 0.97, 0.05, t1, r1, 0.41, 0.59, CorrectionMode::polarization_only);
  CHECK(pol.value == raw.value / 0.97);
  CHECK(pol.polarization_factor == doctest::Approx(1.0 / 0.97));
  CHECK(pol.beamsplitter_factor == 1.0);
  CHECK(!pol.approximate);
  const CorrectedContrast full =
      corrected_contrast(raw, 0.97, 0.05, t1, r1, 0.41, 0.59, CorrectionMode::full, 0.02);
  CHECK(full.beamsplitter_factor == doctest::Approx((t1 * t1 + r1 * r1) / (2 * t1 * r1)));
  CHECK(full.beamsplitter_factor == doctest::Approx(1.0346).epsilon(1e-4));
  CHECK(full.value == doctest::Approx(0.9877).epsilon(1e-3));
  CHECK(full.approximate);
  CHECK(full.sigma > pol.sigma);
  const CorrectedContrast ideal =
      corrected_contrast(raw, 1.0, 0.0, 0.5, 0.5, 0.5, 0.5, CorrectionMode::full);
  CHECK(ideal.value == raw.value);
  CHECK_THROWS_AS(corrected_contrast(raw, 0.05, 0.97, t1, r1, 0.41, 0.59, CorrectionMode::full),
                  PreconditionError);
}

TEST_CASE("simulate_hom edge cases") {
  InterferometerConfig c = InterferometerConfig::from_ratio(1.0, 0.5, 3.33e-9, 1.0, 0.0);
  HomDetection det;
  det.duration = 1e-6;
  const PhotonStream one = {{1000, 0}};
  const CoincidenceHistogram h = simulate_hom(one, c, Polarization::parallel, 1, det);
  double total = 0.0;
  for (double v : h.counts) total += v;
  CHECK(total == 0.0);
  CHECK(h.tau.size() == 2 * static_cast<std::size_t>(std::llround(det.window / det.bin_width)) + 1);
  HomDetection short_run = det;
  short_run.duration = 10e-9;
  CHECK_THROWS_AS(simulate_hom(one, c, Polarization::parallel, 1, short_run), PreconditionError);
}

TEST_CASE("ideal single photons: interference empties the zero-delay peak") {
  const std::int64_t period_ps = 3333;
  const double P = period_ps * 1e-12;
  const std::size_t slots = 400000;
  const PhotonStream src = ideal_source(slots, period_ps);
  HomDetection det;
  det.period = P;
  det.jitter_fwhm = 0.0;
  det.window = 5.0 * P;
  det.duration = static_cast<double>(slots) * P;
  for (double eta : {1.0, 0.5, 0.0}) {
    const InterferometerConfig c = InterferometerConfig::from_ratio(1.0, 0.5, P, eta, 0.0);
    const CoincidenceHistogram h = simulate_hom(src, c, Polarization::parallel, 17, det);
    const double central = window_area(h, 0.0, P).value;
    double far = 0.0;
    for (int k : {-4, -3, 3, 4}) far += 0.25 * window_area(h, k * P, P).value;
    // Zero-delay model value for g2(0) = 0, balanced splitters:
    // 2 r1 t1 (1 - eta) = (1 - eta) / 2 relative to uncorrelated peaks.
    const double expect = 0.5 * (1.0 - eta) * far;
    CAPTURE(eta);
    if (eta == 1.0) {
      CHECK(central == 0.0);
    } else {
      CHECK(std::abs(central - expect) < 4.0 * std::sqrt(expect + far / 4.0));
    }
  }
}

TEST_CASE("simulate_hom is deterministic") {
  const PhotonStream src = ideal_source(50000, 3333);
  HomDetection det;
  det.duration = 50000 * 3333e-12;
  const InterferometerConfig c = InterferometerConfig::from_ratio(1.3, 0.41, 3.33e-9, 0.97, 0.05);
  const auto a = simulate_hom(src, c, Polarization::parallel, 5, det);
  const auto b = simulate_hom(src, c, Polarization::parallel, 5, det);
  CHECK(a.counts == b.counts);
  CHECK(simulate_hom(src, c, Polarization::parallel, 6, det).counts != a.counts);
}

TEST_CASE("normalized difference and its area") {
  CoincidenceHistogram g2, hom;
  for (int k = -10; k <= 10; ++k) {
    g2.tau.push_back(k * 1e-10);
    hom.tau.push_back(k * 1e-10);
  }
  g2.bin_width = hom.bin_width = 1e-10;
  g2.expectation = hom.expectation = 100.0;
  g2.counts.assign(21, 100.0);
  hom.counts.assign(21, 150.0);
  g2.counts[10] = 1.0;  // masked: below 5% of the long-delay mean
  hom.counts[10] = 40.0;
  for (auto* h : {&g2, &hom}) {
    h->normalized.resize(21);
    for (std::size_t i = 0; i < 21; ++i) h->normalized[i] = h->counts[i] / h->expectation;
  }
  const DifferenceCurve d = normalized_difference(hom, g2);
  CHECK(d.masked[10]);
  CHECK(std::isnan(d.value[10]));
  CHECK(d.value[0] == doctest::Approx(0.5));
  const Area a = difference_area(d, 1e-9);
  CHECK(a.value == doctest::Approx(0.5 * 9));  // bins -5..4, one masked
  CoincidenceHistogram other = g2;
  other.tau.pop_back();
  CHECK_THROWS_AS(normalized_difference(hom, other), PreconditionError);
  CHECK(central_area(hom, 1e-9).value == doctest::Approx((9 * 150.0 + 40.0) / 100.0));
}
