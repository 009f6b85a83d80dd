#pragma once

// Liouvillian of the driven two-level system and a Dormand-Prince 5(4)
// stepper for it. Internal to the library.

#include <algorithm>
#include <array>
#include <cmath>

#include "heitler/common.hpp"

namespace heitler::detail {

// Density-matrix elements in the order gg, ee, eg, ge. sigma = |g><e|, so
// <sigma> = rho_eg.
using Rho = std::array<cplx, 4>;

inline Rho operator+(const Rho& a, const Rho& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]};
}
inline Rho operator*(double s, const Rho& a) { return {s * a[0], s * a[1], s * a[2], s * a[3]}; }

// Rotating frame at the laser: H = -delta sigma^+ sigma + (omega sigma^+ + conj(omega) sigma)/2,
// decay gamma, coherence decay gamma2 = gamma/2 + pure dephasing.
inline Rho bloch_rhs(double gamma, double gamma2, cplx omega, double delta, const Rho& r) {
  const cplx i{0.0, 1.0};
  const cplx h = 0.5 * omega;
  const cplx hc = std::conj(h);
  const cplx inv = r[0] - r[1];
  const cplx coh = h * r[3] - hc * r[2];
  return {
      i * coh + gamma * r[1],
      -i * coh - gamma * r[1],
      i * delta * r[2] - i * h * inv - gamma2 * r[2],
      -i * delta * r[3] + i * hc * inv - gamma2 * r[3],
  };
}

struct Tolerance {
  double rtol = 1e-9;
  double atol = 1e-12;
};

class Dopri5 {
 public:
  explicit Dopri5(Tolerance tol) : tol_(tol) {}

  // Advances y from t to t_end; f(t, y) returns dy/dt. The step size carries
  // over between calls.
  template <typename F>
  void advance(F&& f, double t, double t_end, Rho& y) {
    if (t_end <= t) return;
    if (h_ <= 0.0) h_ = 0.01 * (t_end - t);
    int rejects = 0;
    while (t < t_end) {
      const bool last = t + h_ >= t_end * (1.0 - 1e-15) - 1e-300;
      const double h = last ? t_end - t : h_;
      const Rho k1 = f(t, y);
      const Rho k2 = f(t + h / 5.0, y + (h / 5.0) * k1);
      const Rho k3 = f(t + 3.0 * h / 10.0, y + (h * 3.0 / 40.0) * k1 + (h * 9.0 / 40.0) * k2);
      const Rho k4 = f(t + 4.0 * h / 5.0, y + (h * 44.0 / 45.0) * k1 + (h * -56.0 / 15.0) * k2 +
                                              (h * 32.0 / 9.0) * k3);
      const Rho k5 = f(t + 8.0 * h / 9.0,
                       y + (h * 19372.0 / 6561.0) * k1 + (h * -25360.0 / 2187.0) * k2 +
                           (h * 64448.0 / 6561.0) * k3 + (h * -212.0 / 729.0) * k4);
      const Rho k6 = f(t + h, y + (h * 9017.0 / 3168.0) * k1 + (h * -355.0 / 33.0) * k2 +
                                  (h * 46732.0 / 5247.0) * k3 + (h * 49.0 / 176.0) * k4 +
                                  (h * -5103.0 / 18656.0) * k5);
      const Rho y5 = y + (h * 35.0 / 384.0) * k1 + (h * 500.0 / 1113.0) * k3 +
                     (h * 125.0 / 192.0) * k4 + (h * -2187.0 / 6784.0) * k5 +
                     (h * 11.0 / 84.0) * k6;
      const Rho k7 = f(t + h, y5);
      const Rho err = (h * 71.0 / 57600.0) * k1 + (h * -71.0 / 16695.0) * k3 +
                      (h * 71.0 / 1920.0) * k4 + (h * -17253.0 / 339200.0) * k5 +
                      (h * 22.0 / 525.0) * k6 + (h * -1.0 / 40.0) * k7;
      double e = 0.0;
      for (int c = 0; c < 4; ++c) {
        const double scale = tol_.atol + tol_.rtol * std::max(std::abs(y[c]), std::abs(y5[c]));
        e = std::max(e, std::abs(err[c]) / scale);
      }
      if (e <= 1.0) {
        t = last ? t_end : t + h;
        y = y5;
        rejects = 0;
        const double grow = e > 0.0 ? 0.9 * std::pow(e, -0.2) : 5.0;
        if (!last) h_ = h * std::clamp(grow, 0.2, 5.0);
        else h_ = std::max(h_, h * std::clamp(grow, 0.2, 5.0));
      } else {
        h_ = h * std::max(0.1, 0.9 * std::pow(e, -0.2));
        if (++rejects > 100) throw PreconditionError("Bloch integrator: step size underflow");
      }
    }
  }

 private:
  Tolerance tol_;
  double h_ = 0.0;
};

}  // namespace heitler::detail
