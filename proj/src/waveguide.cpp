#include "wgqed/waveguide.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <tuple>

namespace wgqed {

Geometry::Geometry(double a, double b) : a_(a), b_(b)
{
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
        std::ostringstream os;
        os << "waveguide sides must be positive and finite (a=" << a << ", b=" << b << ")";
        throw DomainError(os.str());
    }
}

bool Geometry::contains(double x, double y) const
{
    return x > 0.0 && x < a_ && y > 0.0 && y < b_;
}

double Geometry::wall_distance(double x, double y) const
{
    return std::min({x, a_ - x, y, b_ - y});
}

const char* to_string(ModeFamily family)
{
    return family == ModeFamily::TE ? "TE" : "TM";
}

cplx longitudinal_wavenumber(double cutoff_sq)
{
    const double kz_sq = 1.0 - cutoff_sq;
    if (kz_sq >= 0.0)
        return {std::sqrt(kz_sq), 0.0};
    return {0.0, std::sqrt(-kz_sq)};
}

double TruncationPolicy::kappa_for(double separation) const
{
    if (kappa_max)
        return *kappa_max;
    if (separation <= 0.0)
        return std::numeric_limits<double>::infinity();
    return attenuation_budget / separation;
}

std::vector<Mode> classify_modes(const Geometry& geometry, double kappa_max, int index_cap)
{
    if (!(kappa_max >= 0.0) || std::isinf(kappa_max))
        throw DomainError("classify_modes: kappa_max must be finite and non-negative");

    const double kc_max = std::sqrt(1.0 + kappa_max * kappa_max);
    const int m_max = static_cast<int>(std::floor(kc_max * geometry.a() / pi));
    const int n_max = static_cast<int>(std::floor(kc_max * geometry.b() / pi));
    if (m_max > index_cap || n_max > index_cap) {
        std::ostringstream os;
        os << "classify_modes: kappa_max=" << kappa_max << " needs indices up to ("
           << m_max << ", " << n_max << ") beyond the cap " << index_cap;
        throw ConvergenceError(os.str());
    }

    std::vector<Mode> modes;
    for (int m = 0; m <= m_max; ++m) {
        const double kx = pi * m / geometry.a();
        for (int n = 0; n <= n_max; ++n) {
            if (m == 0 && n == 0)
                continue;
            const double ky = pi * n / geometry.b();
            const double kc_sq = kx * kx + ky * ky;
            const cplx kz = longitudinal_wavenumber(kc_sq);
            if (kz.imag() > kappa_max)
                continue;
            const double kc = std::sqrt(kc_sq);
            modes.push_back({ModeFamily::TE, m, n, kz, kc});
            if (m >= 1 && n >= 1)
                modes.push_back({ModeFamily::TM, m, n, kz, kc});
        }
    }
    std::sort(modes.begin(), modes.end(), [](const Mode& l, const Mode& r) {
        return std::make_tuple(l.attenuation(), l.family, l.m, l.n) <
               std::make_tuple(r.attenuation(), r.family, r.m, r.n);
    });
    return modes;
}

std::vector<Mode> classify_modes(const Geometry& geometry, const TruncationPolicy& truncation,
                                 double min_separation)
{
    return classify_modes(geometry, truncation.kappa_for(min_separation), truncation.index_cap);
}

std::vector<Mode> radiating_modes(const Geometry& geometry)
{
    return classify_modes(geometry, 0.0, std::numeric_limits<int>::max());
}

int radiating_count(const Geometry& geometry)
{
    return static_cast<int>(radiating_modes(geometry).size());
}

CVec3 mode_function(const Mode& mode, const Geometry& geometry, double x, double y,
                    Direction direction)
{
    const double a = geometry.a();
    const double b = geometry.b();
    if (x < 0.0 || x > a || y < 0.0 || y > b) {
        std::ostringstream os;
        os << "mode_function: point (" << x << ", " << y << ") outside the cross-section";
        throw DomainError(os.str());
    }
    const double kx = pi * mode.m / a;
    const double ky = pi * mode.n / b;
    const double kc = mode.cutoff;
    const double cx = std::cos(kx * x), sx = std::sin(kx * x);
    const double cy = std::cos(ky * y), sy = std::sin(ky * y);

    CVec3 e = CVec3::Zero();
    if (mode.family == ModeFamily::TE) {
        const double eps = (mode.m == 0 ? 1.0 : 2.0) * (mode.n == 0 ? 1.0 : 2.0);
        const double norm = std::sqrt(eps / (a * b)) / kc;
        e(0) = norm * ky * cx * sy;
        e(1) = -norm * kx * sx * cy;
        return e;
    }

    const double norm = 2.0 / std::sqrt(a * b);
    const double sign = direction == Direction::Forward ? 1.0 : -1.0;
    e(0) = mode.kz * (norm / kc) * kx * cx * sy;
    e(1) = mode.kz * (norm / kc) * ky * sx * cy;
    e(2) = -sign * I * kc * norm * sx * sy;
    return e;
}

}  // namespace wgqed
