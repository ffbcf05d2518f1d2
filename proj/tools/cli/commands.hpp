#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"
#include "searcheq/verify.hpp"

namespace searcheq::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_config = 2,
    exit_solve = 3,
    exit_verify = 4,
};

/// Parses argv (including the program name), runs the subcommand and maps
/// every error to its exit code, writing one JSON error line to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int cmd_solve(const RunConfig& cfg, std::ostream& out);
int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_welfare(const RunConfig& cfg, std::ostream& out);
int cmd_sweep(const RunConfig& cfg, std::ostream& out);

/// Reads a two-column `x,cdf` CSV. Throws DomainError on malformed input.
TabulatedCdf read_cdf_table(const std::string& path);

} // namespace searcheq::cli
