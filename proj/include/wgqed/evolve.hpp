#pragma once

// Time evolution of single-excitation amplitudes, d b / dt = -i H b.

#include <span>
#include <string>
#include <vector>

#include "wgqed/greens.hpp"

namespace wgqed {

struct AmplitudeState {
    double t = 0.0;
    Eigen::VectorXcd b;

    double total_population() const { return b.squaredNorm(); }
};

/// Unit excitation of sublevel mj on one atom, at t = 0.
AmplitudeState initial_state(std::size_t atoms, std::size_t atom, int mj);

enum class Solver {
    Auto,        // eigendecomposition, integrator if the eigenbasis is ill-conditioned
    Spectral,    // eigendecomposition only
    Integrator,  // adaptive Dormand-Prince
};

/// exp(-i H t) through the eigendecomposition H = V diag(lambda) V^-1.
/// Built once per matrix and reused for any number of initial states.
class SpectralPropagator {
public:
    explicit SpectralPropagator(const Eigen::MatrixXcd& h);

    const Eigen::VectorXcd& eigenvalues() const { return lambda_; }
    const Eigen::MatrixXcd& eigenvectors() const { return vectors_; }
    /// 1-norm condition number of the eigenvector matrix.
    double condition() const { return condition_; }

    Eigen::VectorXcd evolve(const Eigen::VectorXcd& b0, double dt) const;

private:
    Eigen::VectorXcd lambda_;
    Eigen::MatrixXcd vectors_;
    Eigen::MatrixXcd inverse_;
    double condition_ = 1.0;
};

/// Eigenvector conditioning above which Solver::Auto switches to the integrator.
inline constexpr double kMaxEigenCondition = 1e7;

struct Trajectory {
    std::vector<AmplitudeState> states;
    Solver used = Solver::Spectral;
    std::vector<std::string> warnings;
};

/// States at every time of an increasing grid starting at s0.t.
Trajectory propagate(const Eigen::MatrixXcd& h, const AmplitudeState& s0,
                     std::span<const double> t_grid, Solver solver = Solver::Auto);
Trajectory propagate(const EffectiveHamiltonian& h, const AmplitudeState& s0,
                     std::span<const double> t_grid, Solver solver = Solver::Auto);

std::vector<double> uniform_grid(double t0, double t1, std::size_t points);

struct PopulationTrace {
    std::vector<double> t;
    Eigen::MatrixXd populations;  // rows: times, columns: slot(atom, mj)
    std::vector<double> total;

    std::size_t atoms() const { return static_cast<std::size_t>(populations.cols() / 3); }
    /// Population of one atom (all sublevels) at row k.
    double atom_population(Eigen::Index k, std::size_t atom) const;
    /// Column labels P_atom<i>_m<mj>, 1-based atom numbers.
    std::vector<std::string> labels() const;
};

PopulationTrace population_trace(std::span<const AmplitudeState> states);

}  // namespace wgqed
