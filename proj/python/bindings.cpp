#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wgqed/experiments.hpp"
#include "wgqed/spectrum.hpp"
#include "wgqed/steady.hpp"

namespace py = pybind11;
using namespace wgqed;

namespace {

std::vector<Vec3> to_points(const Eigen::MatrixXd& p)
{
    if (p.cols() != 3)
        throw DomainError("positions must have shape (N, 3)");
    std::vector<Vec3> out;
    for (Eigen::Index i = 0; i < p.rows(); ++i)
        out.emplace_back(p(i, 0), p(i, 1), p(i, 2));
    return out;
}

GreenOptions options(bool evanescent)
{
    GreenOptions o;
    o.evanescent = evanescent;
    return o;
}

}  // namespace

PYBIND11_MODULE(_wgqed, m)
{
    m.doc() = "Cold atoms in a rectangular waveguide (k0 = 1, gamma0 = 1).";
    m.attr("__version__") = version();

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_ArithmeticError);

    m.def("radiating_count", [](double a, double b) { return radiating_count(Geometry(a, b)); },
          py::arg("a"), py::arg("b"), "Number of propagating modes of an a x b guide.");

    m.def(
        "modes",
        [](double a, double b, double kappa_max) {
            py::list out;
            for (const auto& md : classify_modes(Geometry(a, b), kappa_max)) {
                py::dict d;
                d["family"] = to_string(md.family);
                d["m"] = md.m;
                d["n"] = md.n;
                d["kz"] = md.kz;
                d["cutoff"] = md.cutoff;
                out.append(d);
            }
            return out;
        },
        py::arg("a"), py::arg("b"), py::arg("kappa_max") = 0.0,
        "Modes with attenuation up to kappa_max, as dicts.");

    m.def(
        "green_tensor",
        [](const Vec3& r, const Vec3& rp, double a, double b, bool evanescent) {
            return CMat3(green_tensor(r, rp, Geometry(a, b), options(evanescent)));
        },
        py::arg("r"), py::arg("rp"), py::arg("a"), py::arg("b"), py::arg("evanescent") = true);

    m.def(
        "effective_hamiltonian",
        [](const Eigen::MatrixXd& positions, double a, double b, bool evanescent, unsigned threads) {
            AtomEnsemble ens;
            ens.positions = to_points(positions);
            py::gil_scoped_release release;
            return build_effective_hamiltonian(ens, Geometry(a, b), options(evanescent), threads).matrix;
        },
        py::arg("positions"), py::arg("a"), py::arg("b"), py::arg("evanescent") = true,
        py::arg("threads") = 1,
        "3N x 3N matrix H with d b/dt = -i H b, ordered (atom, m_J = -1, 0, +1).");

    m.def(
        "populations",
        [](const Eigen::MatrixXcd& h, std::size_t atom, int mj, const std::vector<double>& t) {
            if (h.rows() % 3 != 0 || h.rows() != h.cols())
                throw DomainError("h must be square with a multiple of 3 rows");
            py::gil_scoped_release release;
            auto s0 = initial_state(static_cast<std::size_t>(h.rows() / 3), atom, mj);
            s0.t = t.empty() ? 0.0 : t.front();
            const auto trace = population_trace(propagate(h, s0, t).states);
            return Eigen::MatrixXd(trace.populations);
        },
        py::arg("h"), py::arg("atom"), py::arg("mj"), py::arg("t"),
        "Sublevel populations (len(t), 3N) after exciting one sublevel at t[0].");

    m.def(
        "collective_spectrum",
        [](const Eigen::MatrixXcd& h) {
            const auto states = collective_spectrum(h);
            Eigen::VectorXcd lambda(static_cast<Eigen::Index>(states.size()));
            Eigen::VectorXd part(lambda.size());
            for (std::size_t k = 0; k < states.size(); ++k) {
                lambda(static_cast<Eigen::Index>(k)) = states[k].lambda;
                part(static_cast<Eigen::Index>(k)) = states[k].participation;
            }
            return py::make_tuple(lambda, part);
        },
        py::arg("h"), "Eigenvalues sorted by real part and their participation ratios.");

    m.def(
        "transmission",
        [](double a, double b, double density, double length, const std::vector<double>& deltas,
           std::size_t trials, std::uint64_t seed, unsigned threads) {
            const Geometry g(a, b);
            SamplingSpec spec;
            spec.density = density;
            spec.length = length;
            spec.trials = trials;
            spec.seed = seed;
            const auto s = resolve_sampling(spec, g);
            TransmissionSetup setup{g};
            setup.cloud_length = s.length;
            py::gil_scoped_release release;
            const auto run = transmission_spectrum(setup, s, deltas, threads);
            Eigen::MatrixXd out(static_cast<Eigen::Index>(run.points.size()), 5);
            for (std::size_t k = 0; k < run.points.size(); ++k) {
                const auto& p = run.points[k];
                out.row(static_cast<Eigen::Index>(k)) << p.delta, p.t.mean, p.t.std_error,
                    p.log_t.mean, p.log_t.std_error;
            }
            return out;
        },
        py::arg("a"), py::arg("b"), py::arg("density"), py::arg("length"), py::arg("deltas"),
        py::arg("trials"), py::arg("seed") = 1, py::arg("threads") = 1,
        "Rows (delta, T, T stderr, log T, log T stderr) averaged over random clouds.");

    m.def(
        "run",
        [](const std::string& config_text, unsigned threads) {
            const RunConfig c = parse_config(strip_echo(config_text));
            std::vector<NamedTable> tables;
            {
                py::gil_scoped_release release;
                tables = run_experiment(c, threads);
            }
            py::dict out;
            for (const auto& t : tables)
                out[py::str(t.name)] = to_csv(t.table);
            return out;
        },
        py::arg("config"), py::arg("threads") = 1,
        "Runs a configuration and returns {table name: CSV text}.");

    m.def("describe", [](const std::string& text) { return describe(parse_config(strip_echo(text))); },
          py::arg("config"));
}
