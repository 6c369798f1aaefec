#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ammfg {

enum ExitCode : int
{
    exit_ok = 0,
    exit_validation = 1,
    exit_numerical = 2,
    exit_not_converged = 3,
};

/// Batch entry point. `args` excludes the program name.
///
///   solve --kind {f|f1|f2}   equilibrium.csv, policy.csv, solve.json
///   sandwich [--epsilon E]   sandwich.json
///   sweep --phis a,b,...     sweep.csv
///   simulate --n N           sim_summary.json, sim_paths.csv
///   check                    check_report.json
///
/// Global options: --config FILE, --set section.key=value (repeatable),
/// --out DIR (else $AMMFG_OUT_DIR, else run config), --workers N.
int run(std::vector<std::string> const& args, std::ostream& out, std::ostream& err);

int run(int argc, char const* const* argv);

}  // namespace ammfg
