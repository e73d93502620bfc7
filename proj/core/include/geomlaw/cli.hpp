#pragma once

#include <string>
#include <vector>

namespace geomlaw {

// Command-line front end. Subcommands: sample, graph, functional, limit,
// converge, couple, boolean, pack. Exit codes: 0 success, 2 configuration or
// usage error, 3 runtime failure. The GEOMLAW_SEED environment variable
// overrides every other seed source.
int run_cli(const std::vector<std::string>& args);
int run_cli(int argc, const char* const* argv);

}  // namespace geomlaw
