#pragma once

// Dyadic Green tensor of the rectangular guide and the single-excitation
// effective Hamiltonian of an atomic ensemble inside it.
//
// G solves curl curl G - G = I delta(r - r') with outgoing conditions along z
// and vanishing tangential field on the walls (k0 = 1). The coupling between
// excited sublevels (i, m) and (j, m') is
//     H_{im, jm'} = -3 pi e_m^* . G(r_i, r_j) . e_m'      (gamma0 = 1),
// and amplitudes evolve as d b / dt = -i H b in the frame rotating at omega0.
// A free atom has H = -i/2 (decay rate gamma0).

#include <cstddef>
#include <vector>

#include "wgqed/waveguide.hpp"

namespace wgqed {

/// Prefactor between the Green tensor and the coupling matrix.
inline constexpr double kCouplingScale = 3.0 * pi;

/// Free-space dyadic Green tensor for separation d = r - r' (d != 0).
CMat3 free_space_green(const Vec3& d);

enum class GreenRoute {
    Auto,     // mode sum for |dz| >= lattice_switch, lattice sum below
    ModeSum,  // TE + TM mode expansion
    Lattice,  // Ewald-split image lattice
};

struct GreenOptions {
    TruncationPolicy truncation{};
    bool evanescent = true;
    double lattice_switch = 0.5;
    GreenRoute route = GreenRoute::Auto;
};

/// Waveguide Green tensor G(r, rp) for r != rp.
///
/// With evanescent == false only radiating modes are summed; this variant is
/// finite for all pairs, coincident ones included.
CMat3 green_tensor(const Vec3& r, const Vec3& rp, const Geometry& geometry,
                   const GreenOptions& options = {});

/// Mode expansion keeping modes with Im(kz) <= kappa_max.
CMat3 mode_sum_green(const Vec3& r, const Vec3& rp, const Geometry& geometry,
                     double kappa_max, int index_cap = 2000);

/// Radiating modes only. Allowed at r == rp.
CMat3 radiating_green(const Vec3& r, const Vec3& rp, const Geometry& geometry);

/// Image-lattice representation (Ewald split between image and mode space).
/// Accurate for any separation; used for small axial separations.
CMat3 lattice_green(const Vec3& r, const Vec3& rp, const Geometry& geometry);

/// Regular part of the Green tensor at coincident points: (G - G_free)(r, r).
/// -3 pi Im gives the change in decay rate, -3 pi Re the level shift.
/// Throws DomainError within 1e-6 of a wall.
CMat3 self_term(const Vec3& r, const Geometry& geometry);

/// Columns e_{-1}, e_0, e_{+1} with e_{+-1} = -+(x +- i y)/sqrt(2), e_0 = z.
const CMat3& spherical_basis();
CVec3 sublevel_vector(int mj);

/// Index of sublevel mj of atom `atom` in the 3N amplitude vector.
inline Eigen::Index slot(std::size_t atom, int mj)
{
    return static_cast<Eigen::Index>(3 * atom) + (mj + 1);
}

struct AtomEnsemble {
    std::vector<Vec3> positions;

    std::size_t size() const { return positions.size(); }
    /// Throws DomainError for atoms outside the guide or coincident atoms.
    void validate(const Geometry& geometry) const;
};

struct EffectiveHamiltonian {
    Eigen::MatrixXcd matrix;  // spherical (m_J) basis, slot(atom, mj) ordering
    Geometry geometry;
    GreenOptions options;
    std::vector<Vec3> positions;

    Eigen::Index dim() const { return matrix.rows(); }
    std::size_t atoms() const { return positions.size(); }
    bool evanescent() const { return options.evanescent; }
    /// Same operator in the Cartesian dipole basis (complex symmetric).
    Eigen::MatrixXcd cartesian() const;
};

Eigen::MatrixXcd to_cartesian(const Eigen::MatrixXcd& spherical);
Eigen::MatrixXcd to_spherical(const Eigen::MatrixXcd& cartesian);

/// 3x3 sublevel block coupling an atom at r to a dipole at rp.
CMat3 coupling_block(const CMat3& green);

/// Assembles H for the ensemble. Pairs are distributed over `threads`
/// workers; errors name the offending pair.
EffectiveHamiltonian build_effective_hamiltonian(const AtomEnsemble& ensemble,
                                                 const Geometry& geometry,
                                                 const GreenOptions& options = {},
                                                 unsigned threads = 1);

}  // namespace wgqed
