#pragma once

#include <span>
#include <vector>

#include "heitler/emitter/params.hpp"

namespace heitler {

enum class CorrelationKind { first_order, second_order };

struct CorrelationFunction {
  std::vector<double> tau;   // s, strictly increasing
  std::vector<cplx> values;  // g2 values are real
  CorrelationKind kind = CorrelationKind::second_order;
  double decay_rate = 0.0;   // radiative rate of the emitter that produced it

  std::vector<double> real_values() const;
};

// Normalized second-order correlation of CW resonance fluorescence by the
// quantum regression theorem: the excited population after a jump to the
// ground state, divided by its steady value. rabi must be > 0.
CorrelationFunction g2_qrt(const EmitterParams& params, double rabi, double detuning,
                           std::span<const double> tau_grid);

// Normalized first-order correlation <sigma^+(0) sigma(tau)> / <sigma^+ sigma>.
// Its long-delay plateau is the coherent fraction.
CorrelationFunction g1_qrt(const EmitterParams& params, double rabi, double detuning,
                           std::span<const double> tau_grid);

}  // namespace heitler
