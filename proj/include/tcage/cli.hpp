#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tcage {

/// Subcommands: validate, lifespan, activation, hazard, fit, analyze, synth.
/// `args[0]` is the program name. Returns the process exit status; failures
/// print a single `error: ...` line to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run_cli(int argc, char** argv);

}  // namespace tcage
