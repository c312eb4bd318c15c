#pragma once

// Collective eigenstates of the effective Hamiltonian.

#include <span>
#include <vector>

#include "wgqed/greens.hpp"

namespace wgqed {

struct CollectiveState {
    cplx lambda;           // eigenvalue of H
    double participation;  // sum |psi_k|^4 of the unit-norm right eigenvector

    double shift() const { return lambda.real(); }
    double decay_rate() const { return -2.0 * lambda.imag(); }
    /// Eigenvalue of the re-emission matrix V, where H = (conj(V) - i)/2.
    /// A free atom maps to 0.
    cplx reemission() const { return 2.0 * std::conj(lambda) - I; }
};

struct Eigensystem {
    Eigen::VectorXcd values;
    Eigen::MatrixXcd vectors;  // columns, unit norm
};

/// Complex eigendecomposition. Retries with a diagonal shift when the QR
/// iteration stalls; throws NumericalError if every attempt fails.
Eigensystem eigensystem(const Eigen::MatrixXcd& h);

/// All 3N eigenpairs summarized, sorted by Re(lambda).
std::vector<CollectiveState> collective_spectrum(const Eigen::MatrixXcd& h);
std::vector<CollectiveState> collective_spectrum(const EffectiveHamiltonian& h);

/// beta a b of the fundamental mode. With evanescent modes dropped, H scales
/// as 1/(beta a b) under y -> y b'/b, z -> z beta/beta', so lambda times this
/// factor is invariant across single-mode guides.
double single_mode_scale(const Geometry& geometry);

struct HistogramRange {
    double shift_lo, shift_hi;
    double decay_lo, decay_hi;
};

struct SpectrumHistogram {
    HistogramRange range{};
    std::size_t bins = 0;             // per axis
    std::vector<std::size_t> counts;  // row-major, shift index outer
    std::size_t outside = 0;

    std::size_t at(std::size_t i_shift, std::size_t i_decay) const
    {
        return counts[i_shift * bins + i_decay];
    }
    std::size_t occupied() const;
};

/// 2-D counts over (shift, decay rate). The range defaults to the data extent.
/// Empty input gives an empty histogram.
SpectrumHistogram spectrum_histogram(std::span<const CollectiveState> states, std::size_t bins);
SpectrumHistogram spectrum_histogram(std::span<const CollectiveState> states, std::size_t bins,
                                     const HistogramRange& range);

/// Sample skewness of Re(lambda).
double shift_skewness(std::span<const CollectiveState> states);

}  // namespace wgqed
