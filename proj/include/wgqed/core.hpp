#pragma once

// Shared numeric types and error classes.
//
// Units throughout the library: k0 = omega0/c = 1 (lengths in 1/k0) and
// gamma0 = 1 (times in 1/gamma0, rates and detunings in gamma0).

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace wgqed {

using cplx = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;
using CMat3 = Eigen::Matrix3cd;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input outside the domain of an operation (point outside the guide,
/// coincident points, bad index).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A series or iteration could not be carried to the requested accuracy.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Ill-conditioned or failed linear algebra.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Invalid run configuration. The message lists every problem found.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace wgqed
