#include "wgqed/experiments.hpp"

#include <cmath>
#include <sstream>

#include "wgqed/ensemble.hpp"
#include "wgqed/evolve.hpp"
#include "wgqed/spectrum.hpp"
#include "wgqed/steady.hpp"

#ifndef WGQED_VERSION
#define WGQED_VERSION "0.0.0"
#endif

namespace wgqed {

const char* version()
{
    return WGQED_VERSION;
}

namespace {

constexpr const char* kUnits = "lengths in 1/k0, times in 1/gamma0, rates and detunings in gamma0";

ResultTable start_table(const RunConfig& c, const std::string& schema)
{
    ResultTable t;
    t.set("schema", schema + "/" + std::to_string(kSchemaVersion));
    t.set("version", version());
    t.set("experiment", std::string(to_string(c.experiment)));
    t.set("seed", std::to_string(c.seed));
    t.set("units", kUnits);
    std::istringstream is(to_text(c));
    for (std::string line; std::getline(is, line);)
        t.echo.push_back(line);
    return t;
}

void add_warnings(ResultTable& t, const std::vector<std::string>& warnings)
{
    t.set("warnings", std::to_string(warnings.size()));
    // Keep headers short on badly failing runs; the count is exact.
    for (std::size_t i = 0; i < std::min<std::size_t>(warnings.size(), 20); ++i)
        t.set("warning." + std::to_string(i + 1), warnings[i]);
}

Geometry geometry_of(const RunConfig& c, double b)
{
    return Geometry(c.a, b);
}

ResolvedSampling resolved(const RunConfig& c, const Geometry& g)
{
    try {
        return resolve_sampling(c.sampling(), g);
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("invalid configuration\n  ") + e.what());
    }
}

AtomEnsemble explicit_atoms(const RunConfig& c, const Geometry& g)
{
    AtomEnsemble ens;
    ens.positions = c.positions;
    ens.validate(g);
    return ens;
}

void describe_modes(ResultTable& t, const Geometry& g)
{
    const auto modes = radiating_modes(g);
    t.set("radiating_modes", std::to_string(modes.size()));
    if (!modes.empty())
        t.set("fundamental_kz", modes.front().kz.real());
}

}  // namespace

ResultTable run_dynamics(const RunConfig& c, unsigned threads)
{
    const Geometry g = geometry_of(c, c.b);
    const auto grid = uniform_grid(0.0, c.t_end, c.points);
    const std::size_t initial = c.initial_atom - 1;

    if (!c.sampled()) {
        const AtomEnsemble ens = explicit_atoms(c, g);
        const auto h = build_effective_hamiltonian(ens, g, c.green, threads);
        const auto traj = propagate(h, initial_state(ens.size(), initial, c.initial_mj), grid, c.solver);
        const auto trace = population_trace(traj.states);

        ResultTable t = start_table(c, "dynamics");
        describe_modes(t, g);
        t.set("atoms", std::to_string(ens.size()));
        t.set("solver", traj.used == Solver::Integrator ? "integrator" : "spectral");
        add_warnings(t, traj.warnings);
        t.columns.push_back("t");
        for (const auto& l : trace.labels())
            t.columns.push_back(l);
        t.columns.push_back("P_total");
        for (Eigen::Index k = 0; k < trace.populations.rows(); ++k) {
            std::vector<double> row{trace.t[static_cast<std::size_t>(k)]};
            for (Eigen::Index j = 0; j < trace.populations.cols(); ++j)
                row.push_back(trace.populations(k, j));
            row.push_back(trace.total[static_cast<std::size_t>(k)]);
            t.add_row(std::move(row));
        }
        return t;
    }

    const ResolvedSampling s = resolved(c, g);
    if (initial >= s.atoms)
        throw ConfigError("invalid configuration\n  dynamics.initial_atom exceeds the atom count");
    std::vector<std::string> solver_notes;
    auto batch = run_trials(s.trials, threads, [&](std::size_t trial) {
        const auto ens = sample_configuration(s, g, trial);
        const auto h = build_effective_hamiltonian(ens, g, c.green);
        const auto traj = propagate(h, initial_state(ens.size(), initial, c.initial_mj), grid, c.solver);
        const auto trace = population_trace(traj.states);
        std::vector<double> out(trace.total);
        for (Eigen::Index k = 0; k < trace.populations.rows(); ++k)
            out.push_back(trace.atom_population(k, initial));
        return out;
    });
    const auto stats = batch.statistics();
    const std::size_t n = grid.size();

    ResultTable t = start_table(c, "dynamics_ensemble");
    describe_modes(t, g);
    t.set("atoms", std::to_string(s.atoms));
    t.set("length", s.length);
    t.set("density", s.density);
    t.set("trials_used", std::to_string(batch.used()));
    add_warnings(t, batch.messages);
    t.columns = {"t", "P_total", "P_total_stderr", "P_initial", "P_initial_stderr"};
    for (std::size_t k = 0; k < n; ++k)
        t.add_row({grid[k], stats[k].mean, stats[k].std_error, stats[n + k].mean, stats[n + k].std_error});
    return t;
}

std::vector<NamedTable> run_spectrum(const RunConfig& c, unsigned threads)
{
    const Geometry g = geometry_of(c, c.b);
    std::optional<ResolvedSampling> s;
    if (c.sampled())
        s = resolved(c, g);
    const std::size_t trials = s ? s->trials : 1;

    auto batch = run_trials(trials, threads, [&](std::size_t trial) {
        const AtomEnsemble ens = s ? sample_configuration(*s, g, trial) : explicit_atoms(c, g);
        const auto h = build_effective_hamiltonian(ens, g, c.green, s ? 1u : threads);
        std::vector<double> out;
        for (const auto& st : collective_spectrum(h)) {
            out.push_back(st.lambda.real());
            out.push_back(st.lambda.imag());
            out.push_back(st.participation);
        }
        return out;
    });

    ResultTable t = start_table(c, "spectrum");
    describe_modes(t, g);
    t.set("atoms", std::to_string(s ? s->atoms : c.positions.size()));
    t.set("trials_used", std::to_string(batch.used()));
    t.set("reemission", "V = 2 conj(lambda) - i; lambda is the eigenvalue of H, decay rate = -2 Im(lambda)");
    add_warnings(t, batch.messages);
    t.columns = {"re_lambda", "im_lambda", "participation", "trial", "re_v", "im_v"};
    std::vector<CollectiveState> all;
    for (std::size_t trial = 0; trial < batch.results.size(); ++trial) {
        const auto& r = batch.results[trial];
        for (std::size_t k = 0; k + 2 < r.size(); k += 3) {
            const CollectiveState st{cplx(r[k], r[k + 1]), r[k + 2]};
            const cplx v = st.reemission();
            t.add_row({r[k], r[k + 1], r[k + 2], static_cast<double>(trial), v.real(), v.imag()});
            all.push_back(st);
        }
    }
    std::vector<NamedTable> out{{"spectrum", std::move(t)}};

    if (c.histogram_bins > 0) {
        const auto hist = spectrum_histogram(all, c.histogram_bins);
        ResultTable h = start_table(c, "spectrum_histogram");
        h.set("outside", std::to_string(hist.outside));
        h.columns = {"shift_lo", "shift_hi", "decay_lo", "decay_hi", "count"};
        const double ds = (hist.range.shift_hi - hist.range.shift_lo) / static_cast<double>(hist.bins);
        const double dd = (hist.range.decay_hi - hist.range.decay_lo) / static_cast<double>(hist.bins);
        for (std::size_t i = 0; i < hist.bins; ++i)
            for (std::size_t j = 0; j < hist.bins; ++j)
                h.add_row({hist.range.shift_lo + ds * static_cast<double>(i),
                           hist.range.shift_lo + ds * static_cast<double>(i + 1),
                           hist.range.decay_lo + dd * static_cast<double>(j),
                           hist.range.decay_lo + dd * static_cast<double>(j + 1),
                           static_cast<double>(hist.at(i, j))});
        out.push_back({"spectrum_histogram", std::move(h)});
    }
    return out;
}

namespace {

TransmissionSetup setup_for(const RunConfig& c, const Geometry& g, double length)
{
    TransmissionSetup setup{g};
    setup.green = c.green;
    setup.cloud_length = length;
    setup.margin = c.margin;
    setup.source_sublevel = c.source_mj;
    return setup;
}

std::string delta_key(const std::string& what, double delta)
{
    return what + "@" + format_number(delta);
}

}  // namespace

std::vector<NamedTable> run_steady(const RunConfig& c, unsigned threads)
{
    const Geometry g = geometry_of(c, c.b);
    const ResolvedSampling s = resolved(c, g);
    const TransmissionSetup setup = setup_for(c, g, s.length);
    const auto run = transmission_spectrum(setup, s, c.deltas, threads);

    ResultTable t = start_table(c, "transmission");
    describe_modes(t, g);
    t.set("atoms", std::to_string(s.atoms));
    t.set("length", s.length);
    t.set("density", s.density);
    t.set("trials_used", std::to_string(run.trials_used));
    t.set("reference", "empty guide, same source and detector");
    add_warnings(t, run.warnings);
    t.columns = {"delta", "T_mean", "T_stderr", "logT_mean", "logT_stderr"};
    for (const auto& p : run.points)
        t.add_row({p.delta, p.t.mean, p.t.std_error, p.log_t.mean, p.log_t.std_error});
    std::vector<NamedTable> out{{"transmission", std::move(t)}};

    if (c.profile) {
        ResultTable p = start_table(c, "profile");
        describe_modes(p, g);
        p.set("extinction_convention", "amplitude: coherent_abs ~ exp(-alpha z)");
        p.set("fit_window", "central 60% of the cloud");
        p.columns = {"delta", "z", "atoms", "mean_abs", "coherent_abs", "phase",
                     "pop_m-1", "pop_m0", "pop_m1"};
        std::vector<std::string> warnings;
        for (double d : c.deltas) {
            const auto prof = polarization_profile(setup, s, d, threads, c.bin_width);
            warnings.insert(warnings.end(), prof.warnings.begin(), prof.warnings.end());
            try {
                const auto fit = fit_extinction(prof.z, prof.coherent_abs, s.length);
                p.set(delta_key("alpha", d), fit.alpha);
                p.set(delta_key("alpha_stderr", d), fit.alpha_error);
                p.set(delta_key("alpha_r2", d), fit.line.r_squared);
                if (fit.warning)
                    warnings.push_back("delta " + format_number(d) + ": " + *fit.warning);
                const auto ph = fit_phase_slope(prof, s.length);
                p.set(delta_key("phase_slope", d), ph.slope);
                p.set(delta_key("phase_slope_stderr", d), ph.slope_error);
            } catch (const DomainError& e) {
                warnings.push_back("delta " + format_number(d) + ": " + e.what());
            }
            for (std::size_t i = 0; i < prof.z.size(); ++i)
                p.add_row({d, prof.z[i], prof.atoms[i], prof.mean_abs[i], prof.coherent_abs[i],
                           prof.phase[i], prof.population[0][i], prof.population[1][i],
                           prof.population[2][i]});
        }
        add_warnings(p, warnings);
        out.push_back({"profile", std::move(p)});
    }
    return out;
}

std::vector<NamedTable> run_sweep(const RunConfig& c, unsigned threads)
{
    const std::vector<double> bs = c.sweep_b.empty() ? std::vector<double>{c.b} : c.sweep_b;
    const std::vector<double> lengths =
        c.sweep_lengths.empty() ? std::vector<double>{*c.length} : c.sweep_lengths;

    ResultTable t = start_table(c, "sweep");
    t.columns = {"b", "length", "atoms", "delta", "T_mean", "T_stderr", "logT_mean", "logT_stderr",
                 "trials_used"};
    ResultTable loc = start_table(c, "localization");
    loc.set("convention", "xi = -1/slope of mean log T against L");
    loc.columns = {"b", "delta", "xi", "xi_stderr", "slope", "slope_stderr", "localized"};
    std::vector<std::string> warnings;

    for (double b : bs) {
        const Geometry g = geometry_of(c, b);
        std::vector<std::vector<double>> log_t(c.deltas.size());
        for (double length : lengths) {
            RunConfig point = c;
            point.b = b;
            point.length = length;
            point.atoms.reset();
            const ResolvedSampling s = resolved(point, g);
            const auto run = transmission_spectrum(setup_for(c, g, s.length), s, c.deltas, threads);
            for (const auto& w : run.warnings)
                warnings.push_back("b " + format_number(b) + ", L " + format_number(length) + ": " + w);
            for (std::size_t k = 0; k < run.points.size(); ++k) {
                const auto& p = run.points[k];
                t.add_row({b, s.length, static_cast<double>(s.atoms), p.delta, p.t.mean, p.t.std_error,
                           p.log_t.mean, p.log_t.std_error, static_cast<double>(run.trials_used)});
                log_t[k].push_back(p.log_t.mean);
            }
        }
        if (lengths.size() >= 4) {
            for (std::size_t k = 0; k < c.deltas.size(); ++k) {
                try {
                    const auto fit = fit_localization_length(lengths, log_t[k]);
                    loc.add_row({b, c.deltas[k], fit.xi, fit.xi_error, fit.line.slope,
                                 fit.line.slope_error, fit.localized ? 1.0 : 0.0});
                    if (!fit.localized)
                        warnings.push_back("b " + format_number(b) + ", delta " +
                                           format_number(c.deltas[k]) + ": " + fit.note);
                } catch (const DomainError& e) {
                    warnings.push_back(e.what());
                }
            }
        }
    }
    add_warnings(t, warnings);
    std::vector<NamedTable> out{{"sweep", std::move(t)}};
    if (lengths.size() >= 4)
        out.push_back({"localization", std::move(loc)});
    return out;
}

std::vector<NamedTable> run_experiment(const RunConfig& c, unsigned threads)
{
    switch (c.experiment) {
    case ExperimentKind::Dynamics: return {{"dynamics", run_dynamics(c, threads)}};
    case ExperimentKind::Steady: return run_steady(c, threads);
    case ExperimentKind::Spectrum: return run_spectrum(c, threads);
    case ExperimentKind::Sweep: return run_sweep(c, threads);
    }
    return {};
}

std::string describe(const RunConfig& c)
{
    std::ostringstream os;
    os << to_text(c) << "\n";
    const std::vector<double> bs =
        c.experiment == ExperimentKind::Sweep && !c.sweep_b.empty() ? c.sweep_b : std::vector<double>{c.b};
    for (double b : bs) {
        const Geometry g(c.a, b);
        os << "# guide " << format_number(c.a) << " x " << format_number(b) << ": "
           << radiating_count(g) << " radiating mode(s)\n";
        if (!c.sampled()) {
            explicit_atoms(c, g);
            os << "#   atoms = " << c.positions.size() << " (explicit)\n";
            continue;
        }
        const std::vector<std::optional<double>> lengths =
            c.experiment == ExperimentKind::Sweep && !c.sweep_lengths.empty()
                ? std::vector<std::optional<double>>(c.sweep_lengths.begin(), c.sweep_lengths.end())
                : std::vector<std::optional<double>>{c.length};
        for (const auto& l : lengths) {
            RunConfig point = c;
            point.length = l;
            if (c.experiment == ExperimentKind::Sweep)
                point.atoms.reset();
            const auto s = resolved(point, g);
            os << "#   atoms = " << s.atoms << ", length = " << format_number(s.length)
               << ", density = " << format_number(s.density) << ", trials = " << s.trials << "\n";
        }
    }
    return os.str();
}

}  // namespace wgqed
