#include "wgqed/evolve.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "wgqed/spectrum.hpp"

namespace wgqed {

AmplitudeState initial_state(std::size_t atoms, std::size_t atom, int mj)
{
    if (atom >= atoms) {
        std::ostringstream os;
        os << "initial_state: atom index " << atom << " out of range for " << atoms << " atoms";
        throw DomainError(os.str());
    }
    if (mj < -1 || mj > 1)
        throw DomainError("initial_state: m_J must be -1, 0 or +1");
    AmplitudeState s;
    s.b = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(3 * atoms));
    s.b(slot(atom, mj)) = 1.0;
    return s;
}

namespace {

double one_norm(const Eigen::MatrixXcd& m)
{
    return m.cwiseAbs().colwise().sum().maxCoeff();
}

}  // namespace

SpectralPropagator::SpectralPropagator(const Eigen::MatrixXcd& h)
{
    auto es = eigensystem(h);
    lambda_ = std::move(es.values);
    vectors_ = std::move(es.vectors);
    inverse_ = vectors_.partialPivLu().inverse();
    condition_ = one_norm(vectors_) * one_norm(inverse_);
    if (!std::isfinite(condition_))
        condition_ = std::numeric_limits<double>::infinity();
}

Eigen::VectorXcd SpectralPropagator::evolve(const Eigen::VectorXcd& b0, double dt) const
{
    const Eigen::VectorXcd c = inverse_ * b0;
    const Eigen::VectorXcd phased = ((-I * dt) * lambda_).array().exp() * c.array();
    return vectors_ * phased;
}

namespace {

using OdeState = std::vector<cplx>;

std::vector<AmplitudeState> integrate(const Eigen::MatrixXcd& h, const AmplitudeState& s0,
                                      std::span<const double> t_grid)
{
    namespace odeint = boost::numeric::odeint;
    const Eigen::Index n = h.rows();
    const Eigen::MatrixXcd gen = -I * h;
    auto rhs = [&](const OdeState& x, OdeState& dxdt, double) {
        Eigen::Map<const Eigen::VectorXcd> xv(x.data(), n);
        Eigen::Map<Eigen::VectorXcd> dv(dxdt.data(), n);
        dv.noalias() = gen * xv;
    };

    std::vector<AmplitudeState> out;
    out.reserve(t_grid.size());
    OdeState x(s0.b.data(), s0.b.data() + n);
    auto observer = [&](const OdeState& xs, double t) {
        AmplitudeState s;
        s.t = t;
        s.b = Eigen::Map<const Eigen::VectorXcd>(xs.data(), n);
        out.push_back(std::move(s));
    };
    auto stepper = odeint::make_dense_output(1e-12, 1e-10, odeint::runge_kutta_dopri5<OdeState>());
    const double dt0 = t_grid.size() > 1 ? 1e-3 * (t_grid.back() - t_grid.front()) : 1e-3;
    odeint::integrate_times(stepper, rhs, x, t_grid.begin(), t_grid.end(), std::max(dt0, 1e-6),
                            observer);
    return out;
}

void check_grid(const AmplitudeState& s0, std::span<const double> t_grid)
{
    if (t_grid.empty())
        throw DomainError("propagate: empty time grid");
    if (t_grid.front() != s0.t)
        throw DomainError("propagate: the time grid must start at the initial state's time");
    for (std::size_t k = 1; k < t_grid.size(); ++k)
        if (!(t_grid[k] > t_grid[k - 1]))
            throw DomainError("propagate: the time grid must be strictly increasing");
}

}  // namespace

Trajectory propagate(const Eigen::MatrixXcd& h, const AmplitudeState& s0,
                     std::span<const double> t_grid, Solver solver)
{
    check_grid(s0, t_grid);
    if (s0.b.size() != h.rows())
        throw DomainError("propagate: state and Hamiltonian dimensions differ");

    Trajectory traj;
    if (solver != Solver::Integrator) {
        const SpectralPropagator prop(h);
        if (solver == Solver::Spectral || prop.condition() <= kMaxEigenCondition) {
            traj.used = Solver::Spectral;
            traj.states.reserve(t_grid.size());
            for (double t : t_grid)
                traj.states.push_back({t, prop.evolve(s0.b, t - s0.t)});
            return traj;
        }
        std::ostringstream os;
        os << "eigenvector condition number " << prop.condition()
           << " too large; switched to the adaptive integrator";
        traj.warnings.push_back(os.str());
    }
    traj.used = Solver::Integrator;
    traj.states = integrate(h, s0, t_grid);
    return traj;
}

Trajectory propagate(const EffectiveHamiltonian& h, const AmplitudeState& s0,
                     std::span<const double> t_grid, Solver solver)
{
    return propagate(h.matrix, s0, t_grid, solver);
}

std::vector<double> uniform_grid(double t0, double t1, std::size_t points)
{
    if (points < 2 || !(t1 > t0))
        throw DomainError("uniform_grid: need at least two points on a non-empty interval");
    std::vector<double> grid(points);
    for (std::size_t k = 0; k < points; ++k)
        grid[k] = t0 + (t1 - t0) * static_cast<double>(k) / static_cast<double>(points - 1);
    return grid;
}

double PopulationTrace::atom_population(Eigen::Index k, std::size_t atom) const
{
    return populations.row(k).segment(static_cast<Eigen::Index>(3 * atom), 3).sum();
}

std::vector<std::string> PopulationTrace::labels() const
{
    std::vector<std::string> out;
    for (std::size_t a = 0; a < atoms(); ++a)
        for (int mj = -1; mj <= 1; ++mj)
            out.push_back("P_atom" + std::to_string(a + 1) + "_m" + std::to_string(mj));
    return out;
}

PopulationTrace population_trace(std::span<const AmplitudeState> states)
{
    if (states.empty())
        throw DomainError("population_trace: no states");
    const Eigen::Index dim = states.front().b.size();
    PopulationTrace trace;
    trace.populations.resize(static_cast<Eigen::Index>(states.size()), dim);
    for (std::size_t k = 0; k < states.size(); ++k) {
        const auto row = states[k].b.cwiseAbs2();
        trace.populations.row(static_cast<Eigen::Index>(k)) = row.transpose();
        trace.t.push_back(states[k].t);
        trace.total.push_back(row.sum());
    }
    return trace;
}

}  // namespace wgqed
