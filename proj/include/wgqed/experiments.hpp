#pragma once

// The four experiment families behind the command line. Each returns result
// tables carrying the canonical configuration as their echo, so a table can
// be fed back as a configuration and reproduces itself.

#include <string>
#include <vector>

#include "wgqed/config.hpp"
#include "wgqed/table.hpp"

namespace wgqed {

struct NamedTable {
    std::string name;  // file stem, e.g. "dynamics"
    ResultTable table;
};

const char* version();

/// Table schema versions; bump when columns change.
inline constexpr int kSchemaVersion = 1;

std::vector<NamedTable> run_experiment(const RunConfig& config, unsigned threads);

ResultTable run_dynamics(const RunConfig& config, unsigned threads);
std::vector<NamedTable> run_steady(const RunConfig& config, unsigned threads);
std::vector<NamedTable> run_spectrum(const RunConfig& config, unsigned threads);
std::vector<NamedTable> run_sweep(const RunConfig& config, unsigned threads);

/// Canonical configuration plus derived quantities (atom count or length,
/// radiating modes) as '#' comments. Validates the ensemble.
std::string describe(const RunConfig& config);

}  // namespace wgqed
