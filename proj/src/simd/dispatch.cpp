#include <atomic>
#include <cstdlib>
#include <string>

#include "heitler/common.hpp"
#include "heitler/simd/kernels.hpp"

namespace heitler::simd {
namespace {

bool cpu_supports(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(HEITLER_HAVE_AVX2) && defined(__GNUC__)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::neon:
#if defined(HEITLER_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa initial_isa() {
  if (const char* env = std::getenv("HEITLER_SIMD")) {
    const std::string want(env);
    for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
      if (want == isa_name(isa) && cpu_supports(isa)) return isa;
    }
  }
  return detected_isa();
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

Isa detected_isa() {
  if (cpu_supports(Isa::avx2)) return Isa::avx2;
  if (cpu_supports(Isa::neon)) return Isa::neon;
  return Isa::scalar;
}

std::vector<Isa> available_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
    if (cpu_supports(isa)) out.push_back(isa);
  }
  return out;
}

Isa active_isa() { return active().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (!cpu_supports(isa)) {
    throw PreconditionError("SIMD variant '" + std::string(isa_name(isa)) +
                            "' is not available on this build/CPU");
  }
  active().store(isa, std::memory_order_relaxed);
}

const KernelTable& kernels(Isa isa) {
  switch (isa) {
#if defined(HEITLER_HAVE_AVX2)
    case Isa::avx2:
      if (cpu_supports(Isa::avx2)) return detail::avx2_table;
      break;
#endif
#if defined(HEITLER_HAVE_NEON)
    case Isa::neon:
      return detail::neon_table;
#endif
    default:
      break;
  }
  return detail::scalar_table;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw PreconditionError("dot: length mismatch");
  return kernels(active_isa()).dot(a.data(), b.data(), a.size());
}

void norm_sq(std::span<const std::complex<double>> in, std::span<double> out) {
  if (in.size() != out.size()) throw PreconditionError("norm_sq: length mismatch");
  kernels(active_isa()).norm_sq(in.data(), out.data(), in.size());
}

void zoom_dft(std::span<const double> x, double f0, double df,
              std::span<std::complex<double>> out) {
  kernels(active_isa()).zoom_dft(x.data(), x.size(), f0, df, out.data(), out.size());
}

std::size_t propagate_lanes(const Propagator2& u, LaneBlock& lanes,
                            std::span<const double> thresholds, std::span<double> norms) {
  const std::size_t n = lanes.size();
  if (thresholds.size() != n || norms.size() != n) {
    throw PreconditionError("propagate_lanes: lane count mismatch");
  }
  return kernels(active_isa())
      .propagate_lanes(u, lanes.g_re.data(), lanes.g_im.data(), lanes.e_re.data(),
                       lanes.e_im.data(), thresholds.data(), norms.data(), n);
}

}  // namespace heitler::simd
