#pragma once

// Data-parallel inner loops with a scalar reference implementation and
// vectorized variants selected at runtime. Every variant implements the same
// algorithm as the scalar kernel; tests/unit/test_simd.cpp checks them against
// each other.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace heitler::simd {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa);

// Best ISA supported by both the build and the running CPU.
Isa detected_isa();

// ISA used by the free functions below. Defaults to detected_isa(), or to the
// value of HEITLER_SIMD ("scalar", "avx2", "neon") when that is set and
// available.
Isa active_isa();
void set_active_isa(Isa isa);  // throws PreconditionError if unavailable
std::vector<Isa> available_isas();

// 2x2 complex propagator applied to every lane: g' = u00 g + u01 e,
// e' = u10 g + u11 e.
struct Propagator2 {
  std::complex<double> u00, u01, u10, u11;
};

// Structure-of-arrays block of unnormalized two-level amplitudes.
struct LaneBlock {
  std::vector<double> g_re, g_im, e_re, e_im;

  explicit LaneBlock(std::size_t lanes = 0)
      : g_re(lanes, 1.0), g_im(lanes, 0.0), e_re(lanes, 0.0), e_im(lanes, 0.0) {}
  std::size_t size() const { return g_re.size(); }
  void reset_ground(std::size_t lane) {
    g_re[lane] = 1.0;
    g_im[lane] = e_re[lane] = e_im[lane] = 0.0;
  }
  void reset_excited(std::size_t lane) {
    e_re[lane] = 1.0;
    g_re[lane] = g_im[lane] = e_im[lane] = 0.0;
  }
};

struct KernelTable {
  double (*dot)(const double* a, const double* b, std::size_t n);
  void (*norm_sq)(const std::complex<double>* in, double* out, std::size_t n);
  // out[m] = sum_n x[n] exp(-2 pi i (f0 + m df) n), frequencies in cycles/sample.
  void (*zoom_dft)(const double* x, std::size_t n, double f0, double df,
                   std::complex<double>* out, std::size_t m);
  // Applies u to every lane, writes |g|^2 + |e|^2 to norms and returns the
  // number of lanes whose norm fell below their threshold.
  std::size_t (*propagate_lanes)(const Propagator2& u, double* g_re, double* g_im,
                                 double* e_re, double* e_im, const double* thresholds,
                                 double* norms, std::size_t lanes);
};

const KernelTable& kernels(Isa isa);

// Block length after which zoom_dft recomputes its phasors exactly.
inline constexpr std::size_t kZoomResyncBlock = 512;

double dot(std::span<const double> a, std::span<const double> b);
void norm_sq(std::span<const std::complex<double>> in, std::span<double> out);
void zoom_dft(std::span<const double> x, double f0, double df,
              std::span<std::complex<double>> out);
std::size_t propagate_lanes(const Propagator2& u, LaneBlock& lanes,
                            std::span<const double> thresholds, std::span<double> norms);

namespace detail {
extern const KernelTable scalar_table;
#if defined(HEITLER_HAVE_AVX2)
extern const KernelTable avx2_table;
#endif
#if defined(HEITLER_HAVE_NEON)
extern const KernelTable neon_table;
#endif
}  // namespace detail

}  // namespace heitler::simd
