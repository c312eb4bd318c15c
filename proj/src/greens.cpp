#include "wgqed/greens.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "wgqed/faddeeva.hpp"

namespace wgqed {
namespace {

// exp(-37) ~ 1e-16: cutoff for both halves of the Ewald split.
constexpr double kEwaldExponent = 37.0;
// Largest Ewald alpha = k/(2E); keeps exp(alpha^2) amplification below e^9.
constexpr double kEwaldMaxAlpha = 3.0;

struct ScalarWithHessian {
    cplx value = 0.0;
    CMat3 hessian = CMat3::Zero();
};

// Doubly periodic scalar Green function sum_{p,q} exp(i R)/(4 pi R) over the
// lattice (2a p, 2b q, 0), together with its Hessian. Each wall image set of
// the rectangular guide is one such lattice.
class EwaldLattice {
public:
    explicit EwaldLattice(const Geometry& g)
        : a_(g.a()), b_(g.b()), cell_area_(4.0 * g.a() * g.b())
    {
        split_ = std::max(std::sqrt(pi / cell_area_), 1.0 / (2.0 * kEwaldMaxAlpha));
        alpha_ = 1.0 / (2.0 * split_);
    }

    // With subtract_direct, the (0,0) lattice term is replaced by its regular
    // part exp(iR)/(4 pi R) subtracted, evaluated at d = 0.
    ScalarWithHessian evaluate(const Vec3& d, bool subtract_direct) const
    {
        ScalarWithHessian out;
        add_spatial(d, subtract_direct, out);
        add_spectral(d, out);
        return out;
    }

private:
    void add_spatial(const Vec3& d, bool subtract_direct, ScalarWithHessian& out) const
    {
        const double E = split_;
        const double r_max = std::sqrt(alpha_ * alpha_ + kEwaldExponent) / E;
        const int p_lo = static_cast<int>(std::ceil((d.x() - r_max) / (2.0 * a_)));
        const int p_hi = static_cast<int>(std::floor((d.x() + r_max) / (2.0 * a_)));
        const int q_lo = static_cast<int>(std::ceil((d.y() - r_max) / (2.0 * b_)));
        const int q_hi = static_cast<int>(std::floor((d.y() + r_max) / (2.0 * b_)));
        const double norm = 1.0 / (8.0 * pi);
        const double gauss = 2.0 * E / std::sqrt(pi);

        for (int p = p_lo; p <= p_hi; ++p) {
            for (int q = q_lo; q <= q_hi; ++q) {
                const Vec3 v(d.x() - 2.0 * a_ * p, d.y() - 2.0 * b_ * q, d.z());
                const double R = v.norm();
                if (R > r_max)
                    continue;
                if (subtract_direct && p == 0 && q == 0) {
                    add_direct_regular(out);
                    continue;
                }
                if (R < 1e-12)
                    throw DomainError("lattice Green function evaluated on a source point");

                // h(R) = exp(iR) erfc(RE + i alpha) + exp(-iR) erfc(RE - i alpha)
                //      = 2 c Re w(alpha + i R E),  c = exp(alpha^2 - R^2 E^2).
                const double c = std::exp(alpha_ * alpha_ - R * R * E * E);
                const cplx w = faddeeva(cplx(alpha_, R * E));
                const double h = 2.0 * c * w.real();
                const double j = 2.0 * c * w.imag();
                const double dh = j - 2.0 * gauss * c;
                const double d2h = -h + 4.0 * gauss * R * E * E * c;

                const double f = norm * h / R;
                const double df = norm * (dh - h / R) / R;
                const double d2f = norm * (d2h - 2.0 * dh / R + 2.0 * h / (R * R)) / R;
                const Vec3 n = v / R;
                const Eigen::Matrix3d nn = n * n.transpose();
                out.value += f;
                out.hessian += (d2f * nn + (df / R) * (Eigen::Matrix3d::Identity() - nn)).cast<cplx>();
            }
        }
    }

    // Small-R expansion of the direct spatial term minus exp(iR)/(4 pi R):
    // q(R) = q0 + q2 R^2 + O(R^4), so the Hessian at 0 is 2 q2 I.
    void add_direct_regular(ScalarWithHessian& out) const
    {
        const double E = split_;
        const double D = 2.0 * E / std::sqrt(pi) * std::exp(alpha_ * alpha_);
        const double F1 = D * (1.0 - 2.0 * alpha_ * dawson(alpha_));
        const double F3 = -F1 - 2.0 * E * E * D;
        const cplx q0 = -(I + F1) / (4.0 * pi);
        const cplx q2 = (I - F3) / (24.0 * pi);
        out.value += q0;
        out.hessian += 2.0 * q2 * CMat3::Identity();
    }

    void add_spectral(const Vec3& d, ScalarWithHessian& out) const
    {
        const double E = split_;
        const double z = d.z();
        const double g_max = 2.0 * E * std::sqrt(kEwaldExponent + z * z * E * E);
        const double kt_max = std::sqrt(g_max * g_max + 1.0);
        const int p_max = static_cast<int>(kt_max * a_ / pi) + 1;
        const int q_max = static_cast<int>(kt_max * b_ / pi) + 1;
        const double pref = 1.0 / (4.0 * cell_area_);
        const double gauss_z = 4.0 * E / std::sqrt(pi) * std::exp(-z * z * E * E);

        std::vector<cplx> phase_y(2 * q_max + 1);
        for (int q = -q_max; q <= q_max; ++q)
            phase_y[q + q_max] = std::polar(1.0, pi * q / b_ * d.y());

        for (int p = -p_max; p <= p_max; ++p) {
            const double kx = pi * p / a_;
            const cplx phase_x = std::polar(1.0, kx * d.x());
            for (int q = -q_max; q <= q_max; ++q) {
                const double ky = pi * q / b_;
                const double kt2 = kx * kx + ky * ky;
                const double g2 = kt2 - 1.0;
                if (g2 > g_max * g_max)
                    continue;
                if (std::abs(g2) < 1e-24)
                    throw DomainError("lattice Green function: a mode sits exactly at cutoff");

                cplx Phi, dPhi, d2Phi;
                if (g2 > 0.0) {
                    const double g = std::sqrt(g2);
                    const double plus = std::exp(g * z) * std::erfc(g / (2.0 * E) + z * E);
                    const double minus = std::exp(-g * z) * std::erfc(g / (2.0 * E) - z * E);
                    Phi = (plus + minus) / g;
                    dPhi = plus - minus;
                    d2Phi = g2 * Phi - gauss_z * std::exp(-g2 / (4.0 * E * E));
                } else {
                    const cplx g(0.0, -std::sqrt(-g2));
                    const cplx plus = std::exp(g * z) * erfc_complex(g / (2.0 * E) + z * E);
                    const cplx minus = std::exp(-g * z) * erfc_complex(g / (2.0 * E) - z * E);
                    Phi = (plus + minus) / g;
                    dPhi = plus - minus;
                    d2Phi = g * g * Phi - gauss_z * std::exp(-g * g / (4.0 * E * E));
                }

                const cplx ph = pref * phase_x * phase_y[q + q_max];
                out.value += ph * Phi;
                CMat3 h;
                h << -kx * kx * Phi, -kx * ky * Phi, I * kx * dPhi,
                     -kx * ky * Phi, -ky * ky * Phi, I * ky * dPhi,
                     I * kx * dPhi, I * ky * dPhi, d2Phi;
                out.hessian += ph * h;
            }
        }
    }

    double a_;
    double b_;
    double cell_area_;
    double split_;  // Ewald parameter E
    double alpha_;  // 1 / (2E)
};

// G_ij = sum over the four image families of s_jj (delta_ij g + d_i d_j g),
// where the image signs follow from reflecting a current element in the walls
// (tangential components flip, normal ones are kept).
CMat3 lattice_tensor(const Vec3& r, const Vec3& rp, const Geometry& g, bool self)
{
    const EwaldLattice lattice(g);
    CMat3 G = CMat3::Zero();
    for (int px = 0; px < 2; ++px) {
        for (int py = 0; py < 2; ++py) {
            const Vec3 d(r.x() - (px ? -rp.x() : rp.x()),
                         r.y() - (py ? -rp.y() : rp.y()),
                         r.z() - rp.z());
            const auto s = lattice.evaluate(d, self && px == 0 && py == 0);
            const double sign[3] = {py ? -1.0 : 1.0, px ? -1.0 : 1.0, (px ^ py) ? -1.0 : 1.0};
            for (int i = 0; i < 3; ++i) {
                for (int j = 0; j < 3; ++j) {
                    cplx term = s.hessian(i, j);
                    if (i == j)
                        term += s.value;
                    G(i, j) += sign[j] * term;
                }
            }
        }
    }
    return G;
}

void require_inside(const Vec3& r, const Geometry& g, const char* what)
{
    if (!g.contains(r.x(), r.y())) {
        std::ostringstream os;
        os << what << ": point (" << r.x() << ", " << r.y() << ", " << r.z()
           << ") is not strictly inside the " << g.a() << " x " << g.b() << " cross-section";
        throw DomainError(os.str());
    }
}

CMat3 mode_sum(const Vec3& r, const Vec3& rp, const Geometry& g, double kappa_max, int index_cap,
               bool radiating_only)
{
    const double a = g.a();
    const double b = g.b();
    const double dz = r.z() - rp.z();
    const double adz = std::abs(dz);
    const double s = dz > 0.0 ? 1.0 : (dz < 0.0 ? -1.0 : 0.0);
    if (radiating_only)
        kappa_max = 0.0;

    const double kc_max_sq = 1.0 + kappa_max * kappa_max;
    const double kc_max = std::sqrt(kc_max_sq);
    const int m_max = static_cast<int>(std::floor(kc_max * a / pi));
    const int n_max = static_cast<int>(std::floor(kc_max * b / pi));
    if (m_max > index_cap || n_max > index_cap) {
        std::ostringstream os;
        os << "mode sum for axial separation " << adz << " needs indices up to (" << m_max
           << ", " << n_max << "), beyond the cap " << index_cap
           << "; raise the cap or use the lattice route";
        throw ConvergenceError(os.str());
    }

    std::vector<double> cx(m_max + 1), sx(m_max + 1), cxp(m_max + 1), sxp(m_max + 1);
    for (int m = 0; m <= m_max; ++m) {
        const double kx = pi * m / a;
        cx[m] = std::cos(kx * r.x());
        sx[m] = std::sin(kx * r.x());
        cxp[m] = std::cos(kx * rp.x());
        sxp[m] = std::sin(kx * rp.x());
    }
    std::vector<double> cy(n_max + 1), sy(n_max + 1), cyp(n_max + 1), syp(n_max + 1);
    for (int n = 0; n <= n_max; ++n) {
        const double ky = pi * n / b;
        cy[n] = std::cos(ky * r.y());
        sy[n] = std::sin(ky * r.y());
        cyp[n] = std::cos(ky * rp.y());
        syp[n] = std::sin(ky * rp.y());
    }

    const double inv_area = 1.0 / (a * b);
    cplx g00 = 0.0, g01 = 0.0, g10 = 0.0, g11 = 0.0;
    cplx g02 = 0.0, g12 = 0.0, g20 = 0.0, g21 = 0.0, g22 = 0.0;
    for (int m = 0; m <= m_max; ++m) {
        const double kx = pi * m / a;
        for (int n = 0; n <= n_max; ++n) {
            if (m == 0 && n == 0)
                continue;
            const double ky = pi * n / b;
            const double kc2 = kx * kx + ky * ky;
            if (kc2 > kc_max_sq)
                break;
            const cplx beta = longitudinal_wavenumber(kc2);
            if (beta.imag() > kappa_max)
                break;
            if (std::abs(beta) < 1e-12) {
                std::ostringstream os;
                os << "mode (" << m << ", " << n << ") is exactly at cutoff; the Green tensor diverges";
                throw DomainError(os.str());
            }
            const cplx coef = I * std::exp(I * beta * adz) / (2.0 * beta);

            // TE
            const double eps = (m == 0 ? 1.0 : 2.0) * (n == 0 ? 1.0 : 2.0);
            const cplx te = coef * (eps * inv_area / kc2);
            const double ux = ky * cx[m] * sy[n], uy = -kx * sx[m] * cy[n];
            const double upx = ky * cxp[m] * syp[n], upy = -kx * sxp[m] * cyp[n];
            g00 += te * (ux * upx);
            g01 += te * (ux * upy);
            g10 += te * (uy * upx);
            g11 += te * (uy * upy);

            if (m == 0 || n == 0)
                continue;
            // TM
            const double kc = std::sqrt(kc2);
            const cplx tm = coef * (4.0 * inv_area);
            const double vx = kx * cx[m] * sy[n] / kc, vy = ky * sx[m] * cy[n] / kc;
            const double vpx = kx * cxp[m] * syp[n] / kc, vpy = ky * sxp[m] * cyp[n] / kc;
            const double w = sx[m] * sy[n], wp = sxp[m] * syp[n];
            const cplx tt = tm * beta * beta;
            g00 += tt * (vx * vpx);
            g01 += tt * (vx * vpy);
            g10 += tt * (vy * vpx);
            g11 += tt * (vy * vpy);
            const cplx tz = tm * (I * s * kc) * beta;
            g02 += tz * (vx * wp);
            g12 += tz * (vy * wp);
            g20 -= tz * (w * vpx);
            g21 -= tz * (w * vpy);
            g22 += tm * kc2 * (w * wp);
        }
    }
    CMat3 G;
    G << g00, g01, g02, g10, g11, g12, g20, g21, g22;
    return G;
}

}  // namespace

CMat3 free_space_green(const Vec3& d)
{
    const double R = d.norm();
    if (R <= 0.0)
        throw DomainError("free_space_green: zero separation");
    const Vec3 n = d / R;
    const cplx pref = std::exp(I * R) / (4.0 * pi * R);
    const cplx c1 = 1.0 + I / R - 1.0 / (R * R);
    const cplx c2 = -1.0 - 3.0 * I / R + 3.0 / (R * R);
    return pref * (c1 * CMat3::Identity() + c2 * (n * n.transpose()).cast<cplx>());
}

CMat3 mode_sum_green(const Vec3& r, const Vec3& rp, const Geometry& geometry, double kappa_max,
                     int index_cap)
{
    require_inside(r, geometry, "mode_sum_green");
    require_inside(rp, geometry, "mode_sum_green");
    if (r.z() == rp.z())
        throw DomainError("mode_sum_green: the evanescent mode sum needs a nonzero axial separation");
    return mode_sum(r, rp, geometry, kappa_max, index_cap, false);
}

CMat3 radiating_green(const Vec3& r, const Vec3& rp, const Geometry& geometry)
{
    require_inside(r, geometry, "radiating_green");
    require_inside(rp, geometry, "radiating_green");
    return mode_sum(r, rp, geometry, 0.0, std::numeric_limits<int>::max(), true);
}

CMat3 lattice_green(const Vec3& r, const Vec3& rp, const Geometry& geometry)
{
    require_inside(r, geometry, "lattice_green");
    require_inside(rp, geometry, "lattice_green");
    if (r == rp)
        throw DomainError("lattice_green: coincident points; use self_term");
    return lattice_tensor(r, rp, geometry, false);
}

CMat3 green_tensor(const Vec3& r, const Vec3& rp, const Geometry& geometry,
                   const GreenOptions& options)
{
    if (!options.evanescent)
        return radiating_green(r, rp, geometry);
    if (r == rp)
        throw DomainError("green_tensor: coincident points; use self_term");

    const double adz = std::abs(r.z() - rp.z());
    GreenRoute route = options.route;
    if (route == GreenRoute::Auto)
        route = adz >= options.lattice_switch ? GreenRoute::ModeSum : GreenRoute::Lattice;
    if (route == GreenRoute::Lattice)
        return lattice_green(r, rp, geometry);
    return mode_sum_green(r, rp, geometry, options.truncation.kappa_for(adz),
                          options.truncation.index_cap);
}

CMat3 self_term(const Vec3& r, const Geometry& geometry)
{
    require_inside(r, geometry, "self_term");
    if (geometry.wall_distance(r.x(), r.y()) < 1e-6)
        throw DomainError("self_term: point within 1e-6 of a wall; the image sum does not converge");
    return lattice_tensor(r, r, geometry, true);
}

const CMat3& spherical_basis()
{
    static const CMat3 basis = [] {
        const double h = 1.0 / std::sqrt(2.0);
        CMat3 u;
        // columns: m = -1, 0, +1
        u << h, 0.0, -h,
             -I * h, 0.0, -I * h,
             0.0, 1.0, 0.0;
        return u;
    }();
    return basis;
}

CVec3 sublevel_vector(int mj)
{
    if (mj < -1 || mj > 1)
        throw DomainError("sublevel_vector: m_J must be -1, 0 or +1");
    return spherical_basis().col(mj + 1);
}

void AtomEnsemble::validate(const Geometry& geometry) const
{
    for (std::size_t i = 0; i < positions.size(); ++i) {
        const Vec3& p = positions[i];
        if (!p.allFinite() || !geometry.contains(p.x(), p.y())) {
            std::ostringstream os;
            os << "atom " << i << " at (" << p.x() << ", " << p.y() << ", " << p.z()
               << ") is not strictly inside the cross-section";
            throw DomainError(os.str());
        }
    }
    for (std::size_t i = 0; i < positions.size(); ++i)
        for (std::size_t j = i + 1; j < positions.size(); ++j)
            if (positions[i] == positions[j]) {
                std::ostringstream os;
                os << "atoms " << i << " and " << j << " coincide";
                throw DomainError(os.str());
            }
}

namespace {

Eigen::MatrixXcd block_transform(const Eigen::MatrixXcd& m, bool to_cart)
{
    const Eigen::Index n = m.rows() / 3;
    const CMat3& u = spherical_basis();
    Eigen::MatrixXcd out(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            const CMat3 blk = m.block<3, 3>(3 * i, 3 * j);
            out.block<3, 3>(3 * i, 3 * j) = to_cart ? CMat3(u * blk * u.adjoint())
                                                    : CMat3(u.adjoint() * blk * u);
        }
    return out;
}

}  // namespace

Eigen::MatrixXcd to_cartesian(const Eigen::MatrixXcd& spherical)
{
    return block_transform(spherical, true);
}

Eigen::MatrixXcd to_spherical(const Eigen::MatrixXcd& cartesian)
{
    return block_transform(cartesian, false);
}

Eigen::MatrixXcd EffectiveHamiltonian::cartesian() const
{
    return to_cartesian(matrix);
}

CMat3 coupling_block(const CMat3& green)
{
    const CMat3& u = spherical_basis();
    return -kCouplingScale * (u.adjoint() * green * u);
}

EffectiveHamiltonian build_effective_hamiltonian(const AtomEnsemble& ensemble,
                                                 const Geometry& geometry,
                                                 const GreenOptions& options, unsigned threads)
{
    ensemble.validate(geometry);
    const std::size_t n = ensemble.size();
    EffectiveHamiltonian h{Eigen::MatrixXcd::Zero(3 * n, 3 * n), geometry, options,
                           ensemble.positions};

    // Pair list in row-major upper-triangular order, diagonal included.
    const std::size_t pairs = n * (n + 1) / 2;
    auto pair_of = [n](std::size_t k) {
        std::size_t i = 0;
        while (k >= n - i) {
            k -= n - i;
            ++i;
        }
        return std::pair<std::size_t, std::size_t>{i, i + k};
    };

    auto fill = [&](std::size_t i, std::size_t j) {
        const Vec3& ri = ensemble.positions[i];
        const Vec3& rj = ensemble.positions[j];
        try {
            if (i == j) {
                CMat3 blk;
                if (options.evanescent)
                    blk = coupling_block(self_term(ri, geometry)) - 0.5 * I * CMat3::Identity();
                else
                    blk = coupling_block(radiating_green(ri, ri, geometry));
                h.matrix.block<3, 3>(3 * i, 3 * i) = blk;
                return;
            }
            const CMat3 g = green_tensor(ri, rj, geometry, options);
            const CMat3& u = spherical_basis();
            h.matrix.block<3, 3>(3 * i, 3 * j) = coupling_block(g);
            // Reciprocity: G(rj, ri) = G(ri, rj)^T.
            h.matrix.block<3, 3>(3 * j, 3 * i) = -kCouplingScale * (u.adjoint() * g.transpose() * u);
        } catch (const Error& e) {
            std::ostringstream os;
            os << "pair (" << i << ", " << j << "): " << e.what();
            if (dynamic_cast<const ConvergenceError*>(&e))
                throw ConvergenceError(os.str());
            throw DomainError(os.str());
        }
    };

    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(pairs)));
    if (threads == 1) {
        for (std::size_t k = 0; k < pairs; ++k) {
            const auto [i, j] = pair_of(k);
            fill(i, j);
        }
        return h;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (std::size_t k = next++; k < pairs; k = next++) {
                    try {
                        const auto [i, j] = pair_of(k);
                        fill(i, j);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure)
                            failure = std::current_exception();
                    }
                }
            });
    }
    if (failure)
        std::rethrow_exception(failure);
    return h;
}

}  // namespace wgqed
