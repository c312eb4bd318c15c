#pragma once

// Run configuration: flat INI-style text.
//
//   [run]       experiment, seed
//   [guide]     a, b
//   [atoms]     positions = "x y z; x y z", fixed = "x y z; ..."
//   [ensemble]  atoms, density, length, trials
//   [dynamics]  t_end, points, initial_atom (1-based), initial_mj, solver
//   [probe]     delta (value, list or start:stop:count), source_mj, margin, profile, bin_width
//   [sweep]     b (list), lengths (list)
//   [green]     evanescent, attenuation_budget, index_cap, kappa_max, lattice_switch
//   [spectrum]  histogram_bins
//
// '#' and ';' start comments. Values may carry a unit suffix: "/k0" for
// lengths, "/gamma0" for times, "gamma0" for detunings, "k0^3" for densities.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wgqed/ensemble.hpp"
#include "wgqed/evolve.hpp"
#include "wgqed/greens.hpp"

namespace wgqed {

enum class ExperimentKind { Dynamics, Steady, Spectrum, Sweep };

std::string_view to_string(ExperimentKind kind);
std::optional<ExperimentKind> parse_experiment(std::string_view name);

struct RunConfig {
    ExperimentKind experiment = ExperimentKind::Dynamics;
    std::uint64_t seed = 1;
    double a = 0.0;
    double b = 0.0;

    std::vector<Vec3> positions;  // explicit atoms; empty for sampled runs
    std::vector<Vec3> fixed;
    std::optional<std::size_t> atoms;
    std::optional<double> density;
    std::optional<double> length;
    std::size_t trials = 1;

    double t_end = 10.0;
    std::size_t points = 400;
    std::size_t initial_atom = 1;
    int initial_mj = -1;
    Solver solver = Solver::Auto;

    std::vector<double> deltas{0.0};
    int source_mj = -1;
    double margin = 500.0;
    bool profile = false;
    double bin_width = 25.0;

    std::vector<double> sweep_b;
    std::vector<double> sweep_lengths;

    GreenOptions green{};
    std::size_t histogram_bins = 0;

    bool sampled() const { return positions.empty(); }
    SamplingSpec sampling() const;
};

/// A "section.key" = value override applied after the file, e.g. from the
/// environment. `origin` names it in error messages.
struct ConfigOverride {
    std::string key;
    std::string value;
    std::string origin;
};

/// Validates everything and throws one ConfigError listing every problem with
/// its line number. `fallback` supplies run.experiment when the text has none.
RunConfig parse_config(std::string_view text, std::optional<ExperimentKind> fallback = {},
                       const std::vector<ConfigOverride>& overrides = {});

/// Canonical text, a fixed point of to_text(parse_config(.)).
std::string to_text(const RunConfig& config);

/// Overrides from variables named <prefix><SECTION>_<KEY>.
std::vector<ConfigOverride> environment_overrides(std::string_view prefix,
                                                  const std::vector<std::string>& skip = {});

/// The configuration echoed in a result table ("#| " lines), or the text
/// itself when it holds none.
std::string strip_echo(std::string_view text);

}  // namespace wgqed
