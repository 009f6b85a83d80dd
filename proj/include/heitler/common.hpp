#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace heitler {

using cplx = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kFwhmPerSigma = 2.3548200450309493;  // 2 sqrt(2 ln 2)

// Error hierarchy. The CLI maps each branch onto an exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A physics or numerical precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// A scenario file does not match its schema.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// File system failures and corrupt input files.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace heitler
