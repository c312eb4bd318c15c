#pragma once

// Modes of a hollow rectangular waveguide with perfectly conducting walls.
//
// The cross-section occupies 0 <= x <= a, 0 <= y <= b; the guide axis is z.
// A mode (m, n) has cutoff wavenumber kc^2 = (pi m / a)^2 + (pi n / b)^2 and
// longitudinal wavenumber kz^2 = 1 - kc^2. Radiating modes have real
// kz >= 0; evanescent modes have kz = i * kappa with kappa > 0.

#include <optional>
#include <vector>

#include "wgqed/core.hpp"

namespace wgqed {

class Geometry {
public:
    Geometry(double a, double b);

    double a() const { return a_; }
    double b() const { return b_; }
    double area() const { return a_ * b_; }
    Vec3 center(double z = 0.0) const { return {0.5 * a_, 0.5 * b_, z}; }

    /// True for points strictly inside the cross-section.
    bool contains(double x, double y) const;
    /// Distance from (x, y) to the nearest wall.
    double wall_distance(double x, double y) const;

private:
    double a_;
    double b_;
};

enum class ModeFamily { TE, TM };

const char* to_string(ModeFamily family);

struct Mode {
    ModeFamily family;
    int m;
    int n;
    cplx kz;        // longitudinal wavenumber (units of k0)
    double cutoff;  // kc

    bool radiating() const { return kz.imag() == 0.0; }
    /// kappa = Im(kz); zero for radiating modes.
    double attenuation() const { return kz.imag(); }
};

/// Longitudinal wavenumber for a given squared cutoff wavenumber. Returns the
/// outgoing branch: sqrt(1 - kc^2) or i * sqrt(kc^2 - 1).
cplx longitudinal_wavenumber(double cutoff_sq);

/// Which evanescent modes enter a mode sum.
///
/// A pair at axial separation s keeps modes with kappa * s <= attenuation_budget,
/// so dropped terms are bounded by exp(-attenuation_budget). A fixed
/// kappa_max overrides the separation-dependent bound. Mode indices beyond
/// index_cap are never generated; a sum that would need them fails with
/// ConvergenceError.
struct TruncationPolicy {
    double attenuation_budget = 40.0;
    int index_cap = 2000;
    std::optional<double> kappa_max;

    double kappa_for(double separation) const;
};

/// All TE and TM modes with Im(kz) <= kappa_max, sorted by attenuation, then
/// family (TE first), then (m, n).
std::vector<Mode> classify_modes(const Geometry& geometry, double kappa_max,
                                 int index_cap = 2000);
std::vector<Mode> classify_modes(const Geometry& geometry,
                                 const TruncationPolicy& truncation,
                                 double min_separation);

/// Radiating modes only (a finite set for any geometry).
std::vector<Mode> radiating_modes(const Geometry& geometry);
int radiating_count(const Geometry& geometry);

enum class Direction { Forward, Backward };

/// Electric-field profile of a mode at (x, y).
///
/// Normalization: TE profiles are u = z x grad(psi) / (kc sqrt(N_psi)) with
/// psi = cos(m pi x/a) cos(n pi y/b), N_psi = a b / (eps_m eps_n),
/// eps_0 = 1, eps_{>0} = 2, so that the transverse profile has unit L2 norm.
/// TM profiles are (kz v -/+ i kc w) with v = grad(phi) / (kc sqrt(ab/4)),
/// w = z phi / sqrt(ab/4), phi = sin(m pi x/a) sin(n pi y/b); the sign is -
/// for a wave travelling towards +z. With these profiles the Green tensor is
///   G = sum_modes i exp(i kz |z - z'|) / (2 kz) e(r) e~(r')^T,
/// e~ being the profile for the opposite direction.
///
/// Throws DomainError when (x, y) lies outside the closed cross-section.
CVec3 mode_function(const Mode& mode, const Geometry& geometry, double x, double y,
                    Direction direction = Direction::Forward);

}  // namespace wgqed
