#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace hardy {

using cplx = std::complex<double>;

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Evaluation too close to a pole of a rational map.
class PoleError : public Error {
public:
    PoleError(cplx where, double den_modulus)
        : Error("evaluation at or near a pole (|den(z)| = " + std::to_string(den_modulus) + ")"),
          point(where), distance(den_modulus) {}

    cplx point;
    /// |den(z)| at the offending point; a proxy for distance to the pole.
    double distance;
};

/// Numerical procedure could not reach its target (bad conditioning, stalled refinement).
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Operation called outside its domain (unbounded symbol, non-self-map, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

}  // namespace hardy
