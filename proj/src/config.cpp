#include "wgqed/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

#include "wgqed/table.hpp"

extern char** environ;

namespace wgqed {

std::string_view to_string(ExperimentKind kind)
{
    switch (kind) {
    case ExperimentKind::Dynamics: return "dynamics";
    case ExperimentKind::Steady: return "steady";
    case ExperimentKind::Spectrum: return "spectrum";
    case ExperimentKind::Sweep: return "sweep";
    }
    return "dynamics";
}

std::optional<ExperimentKind> parse_experiment(std::string_view name)
{
    for (auto k : {ExperimentKind::Dynamics, ExperimentKind::Steady, ExperimentKind::Spectrum,
                   ExperimentKind::Sweep})
        if (to_string(k) == name)
            return k;
    return std::nullopt;
}

SamplingSpec RunConfig::sampling() const
{
    SamplingSpec s;
    s.atoms = atoms;
    s.density = density;
    s.length = length;
    s.seed = seed;
    s.trials = trials;
    s.fixed = fixed;
    return s;
}

namespace {

enum class Kind { Text, Seed, Length, Time, Detunings, Density, Count, Sublevel, Bool, Real, Points, Lengths };

struct KeySpec {
    Kind kind;
    const char* help;
};

const std::map<std::string, KeySpec>& schema()
{
    static const std::map<std::string, KeySpec> s{
        {"run.experiment", {Kind::Text, "dynamics, steady, spectrum or sweep"}},
        {"run.seed", {Kind::Seed, "unsigned 64-bit seed"}},
        {"guide.a", {Kind::Length, "guide width"}},
        {"guide.b", {Kind::Length, "guide height"}},
        {"atoms.positions", {Kind::Points, "explicit atom positions"}},
        {"atoms.fixed", {Kind::Points, "pinned atoms of a sampled ensemble"}},
        {"ensemble.atoms", {Kind::Count, "atom count N"}},
        {"ensemble.density", {Kind::Density, "atoms per (1/k0)^3"}},
        {"ensemble.length", {Kind::Length, "cloud length L"}},
        {"ensemble.trials", {Kind::Count, "Monte Carlo trials"}},
        {"dynamics.t_end", {Kind::Time, "end of the time grid"}},
        {"dynamics.points", {Kind::Count, "time grid points"}},
        {"dynamics.initial_atom", {Kind::Count, "initially excited atom, 1-based"}},
        {"dynamics.initial_mj", {Kind::Sublevel, "initially excited sublevel"}},
        {"dynamics.solver", {Kind::Text, "auto, spectral or integrator"}},
        {"probe.delta", {Kind::Detunings, "probe detuning(s)"}},
        {"probe.source_mj", {Kind::Sublevel, "source dipole sublevel"}},
        {"probe.margin", {Kind::Length, "source/detector distance beyond the cloud"}},
        {"probe.profile", {Kind::Bool, "write the polarization profile"}},
        {"probe.bin_width", {Kind::Length, "profile bin width"}},
        {"sweep.b", {Kind::Lengths, "guide heights to sweep"}},
        {"sweep.lengths", {Kind::Lengths, "cloud lengths to sweep"}},
        {"green.evanescent", {Kind::Bool, "include evanescent modes"}},
        {"green.attenuation_budget", {Kind::Real, "kappa_max times separation"}},
        {"green.index_cap", {Kind::Count, "largest mode index"}},
        {"green.kappa_max", {Kind::Real, "fixed attenuation cutoff in k0"}},
        {"green.lattice_switch", {Kind::Length, "axial separation below which the lattice sum is used"}},
        {"spectrum.histogram_bins", {Kind::Count, "bins per axis, 0 for none"}},
    };
    return s;
}

const std::set<std::string> kSections{"run", "guide", "atoms", "ensemble", "dynamics",
                                      "probe", "sweep", "green", "spectrum"};

const char* unit_for(Kind k)
{
    switch (k) {
    case Kind::Length:
    case Kind::Lengths:
    case Kind::Points: return "/k0";
    case Kind::Time: return "/gamma0";
    case Kind::Detunings: return "gamma0";
    case Kind::Density: return "k0^3";
    default: return nullptr;
    }
}

const std::set<std::string> kKnownUnits{"/k0", "/gamma0", "gamma0", "k0^3", "k0"};

std::string trim(std::string_view s)
{
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b])))
        ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])))
        --e;
    return std::string(s.substr(b, e - b));
}

struct Entry {
    std::string value;
    std::string origin;
};

class Collector {
public:
    void add(const std::string& origin, const std::string& msg)
    {
        errors_.push_back(origin.empty() ? msg : origin + ": " + msg);
    }
    bool empty() const { return errors_.empty(); }
    [[noreturn]] void raise() const
    {
        std::ostringstream os;
        os << "invalid configuration (" << errors_.size() << (errors_.size() == 1 ? " problem)" : " problems)");
        for (const auto& e : errors_)
            os << "\n  " << e;
        throw ConfigError(os.str());
    }

private:
    std::vector<std::string> errors_;
};

// Number with an optional unit suffix. Returns nullopt and records an error
// on failure.
std::optional<double> number(std::string_view raw, Kind kind, const std::string& what,
                             const std::string& origin, Collector& err)
{
    const std::string s = trim(raw);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || s.empty()) {
        err.add(origin, what + ": '" + s + "' is not a number");
        return std::nullopt;
    }
    const std::string suffix = trim(std::string_view(res.ptr, static_cast<std::size_t>(s.data() + s.size() - res.ptr)));
    if (!suffix.empty()) {
        const char* unit = unit_for(kind);
        if (!unit) {
            err.add(origin, what + " is dimensionless and takes no unit suffix ('" + suffix + "')");
            return std::nullopt;
        }
        if (suffix != unit) {
            if (kKnownUnits.count(suffix))
                err.add(origin, what + ": unit '" + suffix + "' does not apply here, expected '" + unit + "'");
            else
                err.add(origin, what + ": unknown unit suffix '" + suffix + "', expected '" + unit + "'");
            return std::nullopt;
        }
    }
    if (!std::isfinite(v)) {
        err.add(origin, what + " must be finite");
        return std::nullopt;
    }
    return v;
}

std::vector<std::string> split(std::string_view s, char sep)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return out;
}

std::optional<std::vector<double>> number_list(const std::string& value, Kind kind,
                                               const std::string& what, const std::string& origin,
                                               Collector& err)
{
    std::vector<double> out;
    bool ok = true;
    for (const auto& part : split(value, ',')) {
        auto v = number(part, kind, what, origin, err);
        ok = ok && v.has_value();
        if (v)
            out.push_back(*v);
    }
    if (!ok)
        return std::nullopt;
    return out;
}

std::optional<std::vector<double>> detunings(const std::string& value, const std::string& what,
                                             const std::string& origin, Collector& err)
{
    if (value.find(':') == std::string::npos)
        return number_list(value, Kind::Detunings, what, origin, err);
    const auto parts = split(value, ':');
    if (parts.size() != 3) {
        err.add(origin, what + ": a range is start:stop:count");
        return std::nullopt;
    }
    const auto lo = number(parts[0], Kind::Detunings, what, origin, err);
    const auto hi = number(parts[1], Kind::Detunings, what, origin, err);
    const auto n = number(parts[2], Kind::Real, what + " count", origin, err);
    if (!lo || !hi || !n)
        return std::nullopt;
    if (*n < 2 || std::floor(*n) != *n || !(*hi > *lo)) {
        err.add(origin, what + ": a range needs start < stop and an integer count >= 2");
        return std::nullopt;
    }
    const auto count = static_cast<std::size_t>(*n);
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i)
        out[i] = *lo + (*hi - *lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    return out;
}

std::optional<std::vector<Vec3>> points(const std::string& value, const std::string& what,
                                        const std::string& origin, Collector& err)
{
    std::vector<Vec3> out;
    for (const auto& triple : split(value, ';')) {
        if (triple.empty())
            continue;
        std::istringstream is(triple);
        std::vector<std::string> tok;
        for (std::string t; is >> t;)
            tok.push_back(t);
        if (!tok.empty() && tok.back() == unit_for(Kind::Points))
            tok.pop_back();
        if (tok.size() != 3) {
            err.add(origin, what + ": each position is 'x y z' (got '" + triple + "')");
            return std::nullopt;
        }
        Vec3 p;
        for (int i = 0; i < 3; ++i) {
            const auto v = number(tok[static_cast<std::size_t>(i)], Kind::Points, what, origin, err);
            if (!v)
                return std::nullopt;
            p(i) = *v;
        }
        out.push_back(p);
    }
    if (out.empty()) {
        err.add(origin, what + ": no positions given");
        return std::nullopt;
    }
    return out;
}

}  // namespace

RunConfig parse_config(std::string_view text, std::optional<ExperimentKind> fallback,
                       const std::vector<ConfigOverride>& overrides)
{
    Collector err;
    std::map<std::string, Entry> entries;

    std::string section;
    std::size_t lineno = 0;
    std::string_view rest = text;
    while (!rest.empty()) {
        const auto nl = rest.find('\n');
        std::string_view raw = rest.substr(0, nl);
        rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
        ++lineno;
        const std::string origin = "line " + std::to_string(lineno);
        // ';' separates positions inside values, so it only starts a comment at line start.
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';')
            continue;
        if (const auto hash = raw.find('#'); hash != std::string_view::npos)
            line = trim(raw.substr(0, hash));
        if (line.front() == '[') {
            if (line.back() != ']') {
                err.add(origin, "malformed section header '" + line + "'");
                continue;
            }
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            if (!kSections.count(section))
                err.add(origin, "unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            err.add(origin, "expected 'key = value', got '" + line + "'");
            continue;
        }
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (section.empty()) {
            err.add(origin, "key '" + key + "' appears before any section");
            continue;
        }
        if (!kSections.count(section))
            continue;
        const std::string full = section + "." + key;
        if (!schema().count(full)) {
            err.add(origin, "unknown key '" + key + "' in [" + section + "]");
            continue;
        }
        if (entries.count(full)) {
            err.add(origin, "duplicate key " + full + " (first at " + entries[full].origin + ")");
            continue;
        }
        if (value.empty()) {
            err.add(origin, full + " has no value");
            continue;
        }
        entries[full] = {value, origin};
    }
    for (const auto& o : overrides) {
        if (!schema().count(o.key)) {
            err.add(o.origin, "unknown key " + o.key);
            continue;
        }
        entries[o.key] = {o.value, o.origin};
    }

    RunConfig c;
    std::set<std::string> given;
    auto has = [&](const char* k) { return entries.count(k) > 0; };
    auto real = [&](const char* k, Kind kind) -> std::optional<double> {
        const auto& e = entries.at(k);
        return number(e.value, kind, k, e.origin, err);
    };
    auto count = [&](const char* k) -> std::optional<std::size_t> {
        const auto& e = entries.at(k);
        const std::string v = trim(e.value);
        std::size_t out = 0;
        const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
        if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
            const auto as_real = number(v, Kind::Real, k, e.origin, err);
            if (as_real)
                err.add(e.origin, std::string(k) + " must be a non-negative integer");
            return std::nullopt;
        }
        return out;
    };
    auto sublevel = [&](const char* k) -> std::optional<int> {
        const auto& e = entries.at(k);
        const auto v = number(e.value, Kind::Sublevel, k, e.origin, err);
        if (!v)
            return std::nullopt;
        if (*v != -1.0 && *v != 0.0 && *v != 1.0) {
            err.add(e.origin, std::string(k) + " must be -1, 0 or 1");
            return std::nullopt;
        }
        return static_cast<int>(*v);
    };
    auto flag = [&](const char* k) -> std::optional<bool> {
        const auto& e = entries.at(k);
        std::string v = trim(e.value);
        std::transform(v.begin(), v.end(), v.begin(), [](unsigned char ch) { return std::tolower(ch); });
        if (v == "true" || v == "yes" || v == "on" || v == "1")
            return true;
        if (v == "false" || v == "no" || v == "off" || v == "0")
            return false;
        err.add(e.origin, std::string(k) + " must be true or false");
        return std::nullopt;
    };
    auto positive = [&](const char* k, double v) {
        if (!(v > 0.0))
            err.add(entries.at(k).origin, std::string(k) + " must be positive");
        return v;
    };

    // run
    if (has("run.experiment")) {
        const auto& e = entries.at("run.experiment");
        if (auto k = parse_experiment(e.value))
            c.experiment = *k;
        else
            err.add(e.origin, "run.experiment must be one of dynamics, steady, spectrum, sweep");
        if (fallback && parse_experiment(e.value) && *parse_experiment(e.value) != *fallback)
            err.add(e.origin, "run.experiment is '" + e.value + "' but the '" +
                                  std::string(to_string(*fallback)) + "' command was requested");
    } else if (fallback) {
        c.experiment = *fallback;
    } else {
        err.add("", "missing required key run.experiment");
    }
    if (has("run.seed")) {
        const auto& e = entries.at("run.seed");
        const std::string v = trim(e.value);
        const auto res = std::from_chars(v.data(), v.data() + v.size(), c.seed);
        if (res.ec != std::errc() || res.ptr != v.data() + v.size())
            err.add(e.origin, "run.seed must be an unsigned 64-bit integer");
    }

    // guide
    if (has("guide.a")) {
        if (auto v = real("guide.a", Kind::Length))
            c.a = positive("guide.a", *v);
    } else {
        err.add("", "missing required key guide.a");
    }
    const bool sweep = c.experiment == ExperimentKind::Sweep;
    if (has("guide.b")) {
        if (auto v = real("guide.b", Kind::Length))
            c.b = positive("guide.b", *v);
    } else if (!sweep) {
        err.add("", "missing required key guide.b");
    }

    // atoms
    if (has("atoms.positions"))
        if (auto p = points(entries.at("atoms.positions").value, "atoms.positions",
                            entries.at("atoms.positions").origin, err))
            c.positions = *p;
    if (has("atoms.fixed"))
        if (auto p = points(entries.at("atoms.fixed").value, "atoms.fixed",
                            entries.at("atoms.fixed").origin, err))
            c.fixed = *p;
    if (has("ensemble.atoms"))
        c.atoms = count("ensemble.atoms");
    if (has("ensemble.density"))
        if (auto v = real("ensemble.density", Kind::Density))
            c.density = positive("ensemble.density", *v);
    if (has("ensemble.length"))
        if (auto v = real("ensemble.length", Kind::Length))
            c.length = positive("ensemble.length", *v);
    if (has("ensemble.trials"))
        if (auto v = count("ensemble.trials")) {
            c.trials = *v;
            if (*v < 1)
                err.add(entries.at("ensemble.trials").origin, "ensemble.trials must be at least 1");
        }

    const bool any_sampling = has("ensemble.atoms") || has("ensemble.density") || has("ensemble.length");
    if (has("atoms.positions") && (any_sampling || has("atoms.fixed") || has("ensemble.trials")))
        err.add(entries.at("atoms.positions").origin,
                "atoms.positions excludes the [ensemble] keys and atoms.fixed");
    if (sweep) {
        if (has("atoms.positions"))
            err.add(entries.at("atoms.positions").origin, "sweep runs need a sampled ensemble");
        if (!has("ensemble.density"))
            err.add("", "missing required key ensemble.density (sweep)");
        if (!has("ensemble.length") && !has("sweep.lengths"))
            err.add("", "missing required key ensemble.length or sweep.lengths (sweep)");
        if (has("ensemble.atoms"))
            err.add(entries.at("ensemble.atoms").origin,
                    "sweep runs derive the atom count from density and length; drop ensemble.atoms");
    } else if (!has("atoms.positions")) {
        const int n = has("ensemble.atoms") + has("ensemble.density") + has("ensemble.length");
        if (n < 2)
            err.add("", "missing atoms: give atoms.positions or two of ensemble.atoms, "
                        "ensemble.density, ensemble.length (N = n*a*b*L)");
        if (n == 3 && c.atoms && c.density && c.length && c.a > 0.0 && c.b > 0.0) {
            const double implied = *c.density * c.a * c.b * *c.length;
            if (std::abs(implied - static_cast<double>(*c.atoms)) > 0.5) {
                std::ostringstream os;
                os << "ensemble.atoms, ensemble.density and ensemble.length violate N = n*a*b*L ("
                   << *c.atoms << " != " << implied << ")";
                err.add(entries.at("ensemble.atoms").origin, os.str());
            }
        }
    }

    // dynamics
    bool t_end_given = false;
    if (has("dynamics.t_end"))
        if (auto v = real("dynamics.t_end", Kind::Time)) {
            c.t_end = positive("dynamics.t_end", *v);
            t_end_given = true;
        }
    if (!t_end_given)
        c.t_end = has("atoms.positions") ? 10.0 : 25.0;
    if (has("dynamics.points"))
        if (auto v = count("dynamics.points")) {
            c.points = *v;
            if (*v < 2)
                err.add(entries.at("dynamics.points").origin, "dynamics.points must be at least 2");
        }
    if (has("dynamics.initial_atom"))
        if (auto v = count("dynamics.initial_atom")) {
            c.initial_atom = *v;
            if (*v < 1)
                err.add(entries.at("dynamics.initial_atom").origin, "dynamics.initial_atom is 1-based");
            else if (!c.positions.empty() && *v > c.positions.size())
                err.add(entries.at("dynamics.initial_atom").origin,
                        "dynamics.initial_atom exceeds the number of atoms");
        }
    if (has("dynamics.initial_mj"))
        if (auto v = sublevel("dynamics.initial_mj"))
            c.initial_mj = *v;
    if (has("dynamics.solver")) {
        const auto& e = entries.at("dynamics.solver");
        if (e.value == "auto")
            c.solver = Solver::Auto;
        else if (e.value == "spectral")
            c.solver = Solver::Spectral;
        else if (e.value == "integrator")
            c.solver = Solver::Integrator;
        else
            err.add(e.origin, "dynamics.solver must be auto, spectral or integrator");
    }

    // probe
    if (has("probe.delta")) {
        const auto& e = entries.at("probe.delta");
        if (auto v = detunings(e.value, "probe.delta", e.origin, err))
            c.deltas = *v;
    }
    if (has("probe.source_mj"))
        if (auto v = sublevel("probe.source_mj"))
            c.source_mj = *v;
    if (has("probe.margin"))
        if (auto v = real("probe.margin", Kind::Length))
            c.margin = positive("probe.margin", *v);
    if (has("probe.profile"))
        if (auto v = flag("probe.profile"))
            c.profile = *v;
    if (has("probe.bin_width"))
        if (auto v = real("probe.bin_width", Kind::Length))
            c.bin_width = positive("probe.bin_width", *v);
    if (c.experiment == ExperimentKind::Steady && has("atoms.positions"))
        err.add(entries.at("atoms.positions").origin,
                "steady runs place source and detector around a sampled cloud; use [ensemble]");

    // sweep
    if (has("sweep.b")) {
        const auto& e = entries.at("sweep.b");
        if (auto v = number_list(e.value, Kind::Lengths, "sweep.b", e.origin, err)) {
            c.sweep_b = *v;
            for (double x : *v)
                if (!(x > 0.0))
                    err.add(e.origin, "sweep.b values must be positive");
        }
    }
    if (has("sweep.lengths")) {
        const auto& e = entries.at("sweep.lengths");
        if (auto v = number_list(e.value, Kind::Lengths, "sweep.lengths", e.origin, err)) {
            c.sweep_lengths = *v;
            for (double x : *v)
                if (!(x > 0.0))
                    err.add(e.origin, "sweep.lengths values must be positive");
        }
    }
    if (sweep && c.sweep_b.empty() && !has("guide.b"))
        err.add("", "missing required key sweep.b (or guide.b)");
    if (!sweep)
        for (const char* k : {"sweep.b", "sweep.lengths"})
            if (has(k))
                err.add(entries.at(k).origin, std::string(k) + " is only used by sweep runs");

    // green
    if (has("green.evanescent"))
        if (auto v = flag("green.evanescent"))
            c.green.evanescent = *v;
    if (has("green.attenuation_budget"))
        if (auto v = real("green.attenuation_budget", Kind::Real))
            c.green.truncation.attenuation_budget = positive("green.attenuation_budget", *v);
    if (has("green.index_cap"))
        if (auto v = count("green.index_cap"))
            c.green.truncation.index_cap = static_cast<int>(std::min<std::size_t>(*v, 1u << 30));
    if (has("green.kappa_max"))
        if (auto v = real("green.kappa_max", Kind::Real))
            c.green.truncation.kappa_max = positive("green.kappa_max", *v);
    if (has("green.lattice_switch"))
        if (auto v = real("green.lattice_switch", Kind::Length))
            c.green.lattice_switch = *v;

    if (has("spectrum.histogram_bins"))
        if (auto v = count("spectrum.histogram_bins"))
            c.histogram_bins = *v;

    if (!err.empty())
        err.raise();
    return c;
}

namespace {

std::string join(const std::vector<double>& v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out += (i ? ", " : "") + format_number(v[i]);
    return out;
}

std::string join(const std::vector<Vec3>& v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out += (i ? "; " : "") + format_number(v[i].x()) + " " + format_number(v[i].y()) + " " +
               format_number(v[i].z());
    return out;
}

const char* solver_name(Solver s)
{
    switch (s) {
    case Solver::Spectral: return "spectral";
    case Solver::Integrator: return "integrator";
    default: return "auto";
    }
}

}  // namespace

std::string to_text(const RunConfig& c)
{
    std::ostringstream os;
    os << "[run]\nexperiment = " << to_string(c.experiment) << "\nseed = " << c.seed << "\n";
    os << "\n[guide]\na = " << format_number(c.a) << "\n";
    if (c.b > 0.0)
        os << "b = " << format_number(c.b) << "\n";
    if (!c.sampled()) {
        os << "\n[atoms]\npositions = " << join(c.positions) << "\n";
    } else {
        if (!c.fixed.empty())
            os << "\n[atoms]\nfixed = " << join(c.fixed) << "\n";
        os << "\n[ensemble]\n";
        if (c.atoms)
            os << "atoms = " << *c.atoms << "\n";
        if (c.density)
            os << "density = " << format_number(*c.density) << "\n";
        if (c.length)
            os << "length = " << format_number(*c.length) << "\n";
        os << "trials = " << c.trials << "\n";
    }
    switch (c.experiment) {
    case ExperimentKind::Dynamics:
        os << "\n[dynamics]\nt_end = " << format_number(c.t_end) << "\npoints = " << c.points
           << "\ninitial_atom = " << c.initial_atom << "\ninitial_mj = " << c.initial_mj
           << "\nsolver = " << solver_name(c.solver) << "\n";
        break;
    case ExperimentKind::Steady:
    case ExperimentKind::Sweep:
        os << "\n[probe]\ndelta = " << join(c.deltas) << "\nsource_mj = " << c.source_mj
           << "\nmargin = " << format_number(c.margin) << "\nprofile = " << (c.profile ? "true" : "false")
           << "\nbin_width = " << format_number(c.bin_width) << "\n";
        if (c.experiment == ExperimentKind::Sweep) {
            os << "\n[sweep]\n";
            if (!c.sweep_b.empty())
                os << "b = " << join(c.sweep_b) << "\n";
            if (!c.sweep_lengths.empty())
                os << "lengths = " << join(c.sweep_lengths) << "\n";
        }
        break;
    case ExperimentKind::Spectrum:
        os << "\n[spectrum]\nhistogram_bins = " << c.histogram_bins << "\n";
        break;
    }
    os << "\n[green]\nevanescent = " << (c.green.evanescent ? "true" : "false")
       << "\nattenuation_budget = " << format_number(c.green.truncation.attenuation_budget)
       << "\nindex_cap = " << c.green.truncation.index_cap << "\n";
    if (c.green.truncation.kappa_max)
        os << "kappa_max = " << format_number(*c.green.truncation.kappa_max) << "\n";
    os << "lattice_switch = " << format_number(c.green.lattice_switch) << "\n";
    return os.str();
}

std::vector<ConfigOverride> environment_overrides(std::string_view prefix,
                                                  const std::vector<std::string>& skip)
{
    std::vector<ConfigOverride> out;
    for (char** env = environ; env && *env; ++env) {
        const std::string_view entry(*env);
        if (!entry.starts_with(prefix))
            continue;
        const auto eq = entry.find('=');
        if (eq == std::string_view::npos)
            continue;
        const std::string name(entry.substr(0, eq));
        if (std::find(skip.begin(), skip.end(), name) != skip.end())
            continue;
        std::string rest(entry.substr(prefix.size(), eq - prefix.size()));
        std::transform(rest.begin(), rest.end(), rest.begin(), [](unsigned char ch) { return std::tolower(ch); });
        const auto us = rest.find('_');
        ConfigOverride o;
        o.key = us == std::string::npos ? rest : rest.substr(0, us) + "." + rest.substr(us + 1);
        o.value = std::string(entry.substr(eq + 1));
        o.origin = "environment " + name;
        out.push_back(std::move(o));
    }
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.key < y.key; });
    return out;
}

std::string strip_echo(std::string_view text)
{
    std::string out;
    bool found = false;
    std::string_view rest = text;
    while (!rest.empty()) {
        const auto nl = rest.find('\n');
        std::string_view line = rest.substr(0, nl);
        rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
        if (line.starts_with("#| ")) {
            out.append(line.substr(3));
            out.push_back('\n');
            found = true;
        } else if (line == "#|") {
            out.push_back('\n');
            found = true;
        }
    }
    return found ? out : std::string(text);
}

}  // namespace wgqed
