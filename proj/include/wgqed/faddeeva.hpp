#pragma once

// Faddeeva function w(z) = exp(-z^2) erfc(-i z) and the complex
// complementary error function built on it.

#include "wgqed/core.hpp"

namespace wgqed {

/// w(z) on the whole complex plane. Weideman's rational expansion with 40
/// terms in the upper half-plane (relative error ~1e-14); the lower
/// half-plane uses w(z) = 2 exp(-z^2) - w(-z).
cplx faddeeva(cplx z);

/// erfc for complex argument.
cplx erfc_complex(cplx z);

/// Dawson's integral F(x) = (sqrt(pi)/2) Im w(x) for real x.
double dawson(double x);

}  // namespace wgqed
