#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace minspace {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Base class for everything this library throws on purpose.
class error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Violated precondition: arguments outside the documented domain
// (|alpha| > 1, empty Blaschke zero list, non-increasing schedule, ...).
class validation_error : public error {
public:
  using error::error;
};

// Evaluation hit a pole-adjacent denominator or produced a non-finite value.
class eval_error : public error {
public:
  using error::error;
};

// Symbol cannot be handled by an algorithm (e.g. valency on a composition
// whose rational degree exceeds the supported cap).
class unsupported_symbol_error : public error {
public:
  using error::error;
};

inline bool is_finite(Complex z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

}  // namespace minspace
