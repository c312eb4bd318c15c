#include "wgqed/steady.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "wgqed/evolve.hpp"

namespace wgqed {

namespace {

CMat3 field_green(const Vec3& r, const Vec3& rp, const Geometry& g, const GreenOptions& options)
{
    return options.evanescent ? green_tensor(r, rp, g, options) : radiating_green(r, rp, g);
}

void check_point(const Vec3& r, const Geometry& g, const char* what)
{
    if (!g.contains(r.x(), r.y())) {
        std::ostringstream os;
        os << what << " (" << r.x() << ", " << r.y() << ", " << r.z()
           << ") is not strictly inside the cross-section";
        throw DomainError(os.str());
    }
}

void check_sublevel(int mj)
{
    if (mj < -1 || mj > 1)
        throw DomainError("source sublevel must be -1, 0 or +1");
}

}  // namespace

Eigen::VectorXcd source_drive(const EffectiveHamiltonian& h, const Probe& probe)
{
    check_sublevel(probe.source_sublevel);
    check_point(probe.source_position, h.geometry, "source");
    const CVec3 es = sublevel_vector(probe.source_sublevel);
    const CMat3& u = spherical_basis();
    Eigen::VectorXcd drive(h.dim());
    for (std::size_t a = 0; a < h.atoms(); ++a) {
        if ((h.positions[a] - probe.source_position).norm() < 1e-9)
            throw DomainError("source coincides with atom " + std::to_string(a));
        const CVec3 field = field_green(h.positions[a], probe.source_position, h.geometry, h.options) * es;
        drive.segment<3>(static_cast<Eigen::Index>(3 * a)) =
            (-kCouplingScale * probe.source_strength) * (u.adjoint() * field);
    }
    return drive;
}

SteadySolution steady_amplitudes(const EffectiveHamiltonian& h, const Eigen::VectorXcd& drive,
                                 double delta)
{
    SteadySolution sol;
    if (h.dim() == 0)
        return sol;
    Eigen::MatrixXcd a = -h.matrix;
    a.diagonal().array() += delta;
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
    sol.rcond = lu.rcond();
    if (!(sol.rcond >= kMinReciprocalCondition)) {
        std::ostringstream os;
        os << "steady state is singular at delta = " << delta << " (reciprocal condition "
           << sol.rcond << ")";
        throw NumericalError(os.str());
    }
    sol.beta = lu.solve(drive);
    const double scale = drive.norm();
    sol.residual = scale > 0.0 ? (a * sol.beta - drive).norm() / scale : 0.0;
    return sol;
}

SteadySolution steady_amplitudes(const EffectiveHamiltonian& h, const Probe& probe)
{
    return steady_amplitudes(h, source_drive(h, probe), probe.delta);
}

DetectorReading detector_intensity(const Vec3& position, const Eigen::VectorXcd& beta,
                                   const Probe& probe, const EffectiveHamiltonian& h)
{
    check_point(position, h.geometry, "detector");
    check_sublevel(probe.source_sublevel);
    if (beta.size() != h.dim())
        throw DomainError("detector_intensity: amplitude vector does not match the ensemble");
    const CMat3& u = spherical_basis();
    CVec3 field = probe.source_strength *
                  (field_green(position, probe.source_position, h.geometry, h.options) *
                   sublevel_vector(probe.source_sublevel));
    for (std::size_t a = 0; a < h.atoms(); ++a) {
        if ((h.positions[a] - position).norm() < 1e-9)
            throw DomainError("detector coincides with atom " + std::to_string(a));
        field += field_green(position, h.positions[a], h.geometry, h.options) *
                 (u * beta.segment<3>(static_cast<Eigen::Index>(3 * a)));
    }
    return {position, field.squaredNorm()};
}

double empty_guide_intensity(const Vec3& position, const Probe& probe, const Geometry& geometry,
                             const GreenOptions& options)
{
    check_point(position, geometry, "detector");
    check_sublevel(probe.source_sublevel);
    const CVec3 field = probe.source_strength *
                        (field_green(position, probe.source_position, geometry, options) *
                         sublevel_vector(probe.source_sublevel));
    return field.squaredNorm();
}

Eigen::VectorXcd slow_source_amplitudes(const EffectiveHamiltonian& h, const Probe& probe,
                                        double gamma_s, double t)
{
    if (!(gamma_s > 0.0) || !(t > 0.0))
        throw DomainError("slow_source_amplitudes: gamma_s and t must be positive");
    const Eigen::Index n = h.dim();
    const double root = std::sqrt(gamma_s);
    const CVec3 es = sublevel_vector(probe.source_sublevel);
    const CMat3& u = spherical_basis();

    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n + 1, n + 1);
    m.topLeftCorner(n, n) = h.matrix;
    m.col(n).head(n) = root * source_drive(h, probe);
    for (std::size_t a = 0; a < h.atoms(); ++a) {
        const CMat3 g = field_green(probe.source_position, h.positions[a], h.geometry, h.options);
        const Eigen::RowVector3cd row = (-kCouplingScale * probe.source_strength * root) *
                                        (es.adjoint() * g * u);
        m.row(n).segment<3>(static_cast<Eigen::Index>(3 * a)) = row;
    }
    m(n, n) = cplx(probe.delta, -0.5 * gamma_s);

    AmplitudeState s0;
    s0.b = Eigen::VectorXcd::Zero(n + 1);
    s0.b(n) = 1.0;
    const std::vector<double> grid{0.0, t};
    const auto traj = propagate(m, s0, grid);
    const Eigen::VectorXcd& b = traj.states.back().b;
    return b.head(n) / (root * b(n));
}

ProbeLine probe_line(const Geometry& geometry, double cloud_length, double margin)
{
    const double reach = 0.5 * cloud_length + margin;
    return {geometry.center(-reach), geometry.center(reach)};
}

ConfigurationResponse::ConfigurationResponse(const AtomEnsemble& ensemble,
                                             const TransmissionSetup& setup)
    : setup_(setup),
      line_(probe_line(setup.geometry, setup.cloud_length, setup.margin)),
      h_(build_effective_hamiltonian(ensemble, setup.geometry, setup.green))
{
    const Probe p = probe(0.0);
    drive_ = source_drive(h_, p);
    direct_ = field_green(line_.detector, line_.source, setup_.geometry, setup_.green) *
              sublevel_vector(setup_.source_sublevel);
    reference_ = direct_.squaredNorm();
    if (!(reference_ > 0.0))
        throw DomainError("the source does not reach the detector in the empty guide");
    const CMat3& u = spherical_basis();
    to_detector_.resize(3, h_.dim());
    for (std::size_t a = 0; a < h_.atoms(); ++a)
        to_detector_.middleCols<3>(static_cast<Eigen::Index>(3 * a)) =
            field_green(line_.detector, h_.positions[a], setup_.geometry, setup_.green) * u;
}

Probe ConfigurationResponse::probe(double delta) const
{
    Probe p;
    p.delta = delta;
    p.source_position = line_.source;
    p.source_sublevel = setup_.source_sublevel;
    return p;
}

SteadySolution ConfigurationResponse::solve(double delta) const
{
    return steady_amplitudes(h_, drive_, delta);
}

CVec3 ConfigurationResponse::detector_field(const Eigen::VectorXcd& beta) const
{
    if (h_.dim() == 0)
        return direct_;
    return direct_ + to_detector_ * beta;
}

double ConfigurationResponse::transmission(const Eigen::VectorXcd& beta) const
{
    return detector_field(beta).squaredNorm() / reference_;
}

TransmissionRun transmission_spectrum(const TransmissionSetup& setup, const ResolvedSampling& sampling,
                                      std::span<const double> deltas, unsigned threads)
{
    const std::vector<double> grid(deltas.begin(), deltas.end());
    if (grid.empty())
        throw DomainError("transmission_spectrum: empty detuning grid");
    auto batch = run_trials(sampling.trials, threads, [&](std::size_t trial) {
        const ConfigurationResponse resp(sample_configuration(sampling, setup.geometry, trial), setup);
        std::vector<double> out;
        out.reserve(2 * grid.size());
        for (double d : grid) {
            const double t = resp.transmission(d);
            out.push_back(t);
            out.push_back(std::log(t));
        }
        return out;
    });
    const auto stats = batch.statistics();
    TransmissionRun run;
    run.trials_used = batch.used();
    run.warnings = batch.messages;
    for (std::size_t k = 0; k < grid.size(); ++k)
        run.points.push_back({grid[k], stats[2 * k], stats[2 * k + 1]});
    return run;
}

namespace {

constexpr std::size_t kProfileFields = 7;  // count, |d|, Re, Im, populations

double fundamental_kz(const Geometry& g)
{
    const auto modes = radiating_modes(g);
    return modes.empty() ? 0.0 : modes.front().kz.real();
}

}  // namespace

PolarizationProfile polarization_profile(const TransmissionSetup& setup,
                                         const ResolvedSampling& sampling, double delta,
                                         unsigned threads, double bin_width)
{
    if (!(bin_width > 0.0))
        throw DomainError("polarization_profile: bin width must be positive");
    const double length = sampling.length;
    const std::size_t bins = static_cast<std::size_t>(std::ceil(length / bin_width - 1e-9));
    const double kz = fundamental_kz(setup.geometry);
    const CMat3& u = spherical_basis();

    auto batch = run_trials(sampling.trials, threads, [&](std::size_t trial) {
        const AtomEnsemble ens = sample_configuration(sampling, setup.geometry, trial);
        const ConfigurationResponse resp(ens, setup);
        const Eigen::VectorXcd beta = resp.solve(delta).beta;
        std::vector<double> acc(bins * kProfileFields, 0.0);
        for (std::size_t a = 0; a < ens.size(); ++a) {
            const double z = ens.positions[a].z();
            const double pos = (z + 0.5 * length) / bin_width;
            if (pos < 0.0 || pos >= static_cast<double>(bins))
                continue;
            double* cell = &acc[static_cast<std::size_t>(pos) * kProfileFields];
            const Eigen::Vector3cd amp = beta.segment<3>(static_cast<Eigen::Index>(3 * a));
            const CVec3 d = u * amp;
            const cplx coherent = d(0) * std::exp(cplx(0.0, -kz * z));
            cell[0] += 1.0;
            cell[1] += d.norm();
            cell[2] += coherent.real();
            cell[3] += coherent.imag();
            for (int m = 0; m < 3; ++m)
                cell[4 + m] += std::norm(amp(m));
        }
        return acc;
    });
    const auto stats = batch.statistics();

    PolarizationProfile prof;
    prof.reference_kz = kz;
    prof.bin_width = bin_width;
    prof.trials_used = batch.used();
    prof.warnings = batch.messages;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    double previous = nan;
    for (std::size_t i = 0; i < bins; ++i) {
        const double zc = -0.5 * length + (static_cast<double>(i) + 0.5) * bin_width;
        const auto at = [&](std::size_t f) { return stats[i * kProfileFields + f].mean; };
        const double count = at(0);
        prof.z.push_back(zc);
        prof.atoms.push_back(count);
        if (!(count > 0.0)) {
            prof.mean_abs.push_back(nan);
            prof.coherent_abs.push_back(nan);
            prof.phase.push_back(nan);
            for (auto& p : prof.population)
                p.push_back(nan);
            continue;
        }
        const cplx c(at(2) / count, at(3) / count);
        prof.mean_abs.push_back(at(1) / count);
        prof.coherent_abs.push_back(std::abs(c));
        double ph = std::arg(c);
        if (!std::isnan(previous)) {
            while (ph - previous > pi)
                ph -= 2.0 * pi;
            while (ph - previous < -pi)
                ph += 2.0 * pi;
        }
        previous = ph;
        prof.phase.push_back(ph + kz * zc);
        for (int m = 0; m < 3; ++m)
            prof.population[m].push_back(at(4 + static_cast<std::size_t>(m)) / count);
    }
    return prof;
}

LinearFit fit_phase_slope(const PolarizationProfile& profile, double cloud_length)
{
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < profile.z.size(); ++i)
        if (std::abs(profile.z[i]) <= 0.3 * cloud_length && std::isfinite(profile.phase[i])) {
            xs.push_back(profile.z[i]);
            ys.push_back(profile.phase[i]);
        }
    return fit_line(xs, ys);
}

double mean_population(const PolarizationProfile& profile, int mj, double z_lo, double z_hi)
{
    if (mj < -1 || mj > 1)
        throw DomainError("mean_population: m_J must be -1, 0 or +1");
    const auto& pop = profile.population[mj + 1];
    double weight = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < profile.z.size(); ++i)
        if (profile.z[i] >= z_lo && profile.z[i] <= z_hi && profile.atoms[i] > 0.0) {
            weight += profile.atoms[i];
            sum += profile.atoms[i] * pop[i];
        }
    return weight > 0.0 ? sum / weight : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace wgqed
