// wgqed: run one experiment family from a configuration file and write CSV tables.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "wgqed/experiments.hpp"

namespace fs = std::filesystem;
using namespace wgqed;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    unsigned threads = 0;
    std::string out = ".";
    bool dry_run = false;
};

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot read configuration file '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

int run(ExperimentKind kind, const Options& opt)
{
    const std::string text = strip_echo(slurp(opt.config));
    auto overrides = environment_overrides("WGQED_", {"WGQED_CONFIG", "WGQED_SEED", "WGQED_THREADS",
                                                      "WGQED_OUT", "WGQED_DRY_RUN"});
    if (opt.seed)
        overrides.push_back({"run.seed", std::to_string(*opt.seed), "--seed"});
    const RunConfig config = parse_config(text, kind, overrides);

    if (opt.dry_run) {
        std::cout << describe(config);
        return kExitOk;
    }

    const unsigned threads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
    const auto tables = run_experiment(config, threads);
    fs::create_directories(opt.out);
    for (const auto& t : tables) {
        const fs::path path = fs::path(opt.out) / (t.name + ".csv");
        write_table(t.table, path);
        std::cout << path.string() << ": " << t.table.rows.size() << " rows";
        if (const auto w = t.table.get("warnings"); w && *w != "0")
            std::cout << ", " << *w << " warning(s)";
        std::cout << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Cold atoms in a rectangular waveguide: dynamics, transmission and collective spectra."};
    app.set_version_flag("--version", version());
    app.require_subcommand(1);

    Options opt;
    std::optional<ExperimentKind> chosen;
    for (ExperimentKind kind : {ExperimentKind::Dynamics, ExperimentKind::Steady,
                                ExperimentKind::Spectrum, ExperimentKind::Sweep}) {
        const char* help = nullptr;
        switch (kind) {
        case ExperimentKind::Dynamics: help = "time evolution of sublevel populations"; break;
        case ExperimentKind::Steady: help = "transmission spectrum and polarization profile of a cloud"; break;
        case ExperimentKind::Spectrum: help = "eigenvalues of the effective Hamiltonian"; break;
        case ExperimentKind::Sweep: help = "transmission over guide heights and cloud lengths, localization length"; break;
        }
        auto* sub = app.add_subcommand(std::string(to_string(kind)), help);
        sub->add_option("--config", opt.config, "configuration file, or a result table to re-run")
            ->required()
            ->envname("WGQED_CONFIG");
        sub->add_option("--seed", opt.seed, "override run.seed")->envname("WGQED_SEED");
        sub->add_option("--threads", opt.threads, "worker threads (default: hardware concurrency)")
            ->envname("WGQED_THREADS")
            ->check(CLI::NonNegativeNumber);
        sub->add_option("--out", opt.out, "output directory")->envname("WGQED_OUT");
        sub->add_flag("--dry-run", opt.dry_run, "print the resolved configuration and exit");
        sub->callback([&chosen, kind] { chosen = kind; });
        sub->footer("Other WGQED_<SECTION>_<KEY> variables override configuration keys, "
                    "e.g. WGQED_ENSEMBLE_TRIALS=100.");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        return run(*chosen, opt);
    } catch (const ConfigError& e) {
        std::cerr << "wgqed: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DomainError& e) {
        std::cerr << "wgqed: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NumericalError& e) {
        std::cerr << "wgqed: numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const ConvergenceError& e) {
        std::cerr << "wgqed: numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "wgqed: " << e.what() << "\n";
        return kExitFailure;
    }
}
